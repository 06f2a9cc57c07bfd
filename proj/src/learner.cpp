#include "symlearn/learner.hpp"

#include "symlearn/errors.hpp"

#include <cmath>
#include <numbers>

namespace symlearn {

std::string to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::none: return "none";
    case RegularizerKind::naive: return "naive";
    case RegularizerKind::global: return "global";
    case RegularizerKind::local: return "local";
  }
  return "?";
}

RegularizerKind regularizer_kind_from_string(const std::string& name) {
  for (auto k : {RegularizerKind::none, RegularizerKind::naive, RegularizerKind::global,
                 RegularizerKind::local}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown regularizer '" + name + "'");
}

std::string to_string(EpochStatus status) {
  switch (status) {
    case EpochStatus::found: return "found";
    case EpochStatus::redirected: return "redirected";
    case EpochStatus::unconverged: return "unconverged";
  }
  return "?";
}

std::string to_string(ManifoldLabel label) {
  switch (label) {
    case ManifoldLabel::m1_diagonal: return "M1";
    case ManifoldLabel::m2_offdiagonal: return "M2";
    case ManifoldLabel::none: return "none";
  }
  return "?";
}

void validate(const LearnerConfig& cfg) {
  validate(cfg.circuit);
  validate(cfg.loss);
  validate(cfg.nm);
  validate(cfg.train);
  validate(cfg.noise);
  if (cfg.query_period < 1) throw ArgumentError("query_period must be >= 1");
  if (!(cfg.symmetry_threshold > 0)) throw ArgumentError("symmetry_threshold must be positive");
  if (!(cfg.familiarity_threshold > 0)) throw ArgumentError("familiarity_threshold must be positive");
  if (cfg.naive_lambda < 0) throw ArgumentError("naive_lambda must be >= 0");
  if (cfg.max_epochs < 0) throw ArgumentError("max_epochs must be >= 0");
  if (cfg.consecutive_redirects_to_stop < 1) {
    throw ArgumentError("consecutive_redirects_to_stop must be >= 1");
  }
  if (!(cfg.local.eta > 0) || !(cfg.local.delta > 0) || cfg.local.steps < 1 ||
      cfg.local.max_redirects_per_epoch < 0) {
    throw ArgumentError("invalid local exploration settings");
  }
  if (cfg.noise.active() && cfg.loss.mode != LossMode::qkl) {
    throw ArgumentError("noisy learning needs the shot-based qkl loss");
  }
  if (cfg.label_manifolds && cfg.circuit.block_depth != 0) {
    throw ArgumentError("manifold labels exist only for block depth 0");
  }
  if (!(cfg.label_tolerance > 0)) throw ArgumentError("label_tolerance must be positive");
}

TrainConfig regularizer_train_config() {
  TrainConfig t;
  t.learning_rate = 1e-2;
  t.epochs_per_path = 300;
  t.momentum = 0.9;
  return t;
}

double default_symmetry_threshold(LossMode mode) { return is_qkl(mode) ? 1e-2 : 1e-3; }

LearnerConfig default_learner_config(const CircuitSpec& circuit, LossMode mode) {
  LearnerConfig cfg;
  cfg.circuit = circuit;
  cfg.loss.mode = mode;
  cfg.nm.max_iter = default_max_iter(circuit.num_qubits);
  cfg.symmetry_threshold = default_symmetry_threshold(mode);
  return cfg;
}

// ---- manifold labels --------------------------------------------------------

ManifoldLabel classify_ghz_d0_manifold(const std::vector<Eigen::Matrix2cd>& factors, double tol) {
  if (factors.empty()) return ManifoldLabel::none;
  bool diagonal = true;
  bool anti = true;
  Complex d0 = 1.0, d1 = 1.0, a0 = 1.0, a1 = 1.0;
  for (const auto& u : factors) {
    diagonal = diagonal && std::abs(u(0, 1)) <= tol && std::abs(u(1, 0)) <= tol;
    anti = anti && std::abs(u(0, 0)) <= tol && std::abs(u(1, 1)) <= tol;
    d0 *= u(0, 0);
    d1 *= u(1, 1);
    a0 *= u(0, 1);
    a1 *= u(1, 0);
  }
  auto phases_agree = [tol](Complex x, Complex y) {
    if (std::abs(x) == 0.0 || std::abs(y) == 0.0) return false;
    return std::abs(std::arg(x / y)) <= tol;
  };
  if (diagonal && phases_agree(d0, d1)) return ManifoldLabel::m1_diagonal;
  if (anti && phases_agree(a0, a1)) return ManifoldLabel::m2_offdiagonal;
  return ManifoldLabel::none;
}

ManifoldLabel classify_ghz_d0_manifold(const CircuitSpec& spec, const ParamVector& theta, double tol) {
  check_params(spec, theta);
  if (spec.block_depth != 0) throw ArgumentError("manifold labels exist only for block depth 0");
  std::vector<Eigen::Matrix2cd> factors;
  for (int q = 0; q < spec.num_qubits; ++q) {
    factors.push_back(rotation_matrix(theta.angles(spec.num_qubits, 0, q)));
  }
  return classify_ghz_d0_manifold(factors, tol);
}

// ---- CNet regularizer -------------------------------------------------------

CNetRegularizer::CNetRegularizer(const CircuitSpec& spec, std::uint64_t seed, const TrainConfig& train,
                                 CNetInput input)
    : model_(cnet_init(spec, seed, input)), train_(train) {
  train_.shuffle_seed = derive_seed(seed, 1);
}

double CNetRegularizer::estimation_error(const ParamVector& theta, double loss) const {
  return cnet_estimation_error(model_, theta, loss);
}

void CNetRegularizer::learn_path(const PathTranscript& transcript) {
  history_.push_back(cnet_train_path(model_, transcript, train_));
}

// ---- epochs -----------------------------------------------------------------

double naive_regularized_loss(double loss, const ParamVector& theta,
                              const std::vector<ParamVector>& found, double lambda) {
  if (lambda < 0) throw ArgumentError("lambda must be >= 0");
  double penalty = 0.0;
  for (const auto& t : found) {
    if (t.size() != theta.size()) throw ArgumentError("parameter vectors differ in length");
    const double dist = (theta.values() - t.values()).norm();
    if (dist <= 1e-12) return kNaiveCap;
    penalty += 1.0 / (dist * dist);
  }
  return std::min(kNaiveCap, loss + lambda * penalty);
}

namespace {

ParamVector explore(const Objective& loss, const Regularizer& reg, const LearnerConfig& cfg,
                    const ParamVector& from) {
  const Objective surprise = [&](const ParamVector& t) { return reg.estimation_error(t, loss(t)); };
  return explore_ascent(surprise, from, cfg.local.eta, cfg.local.steps, cfg.local.delta);
}

}  // namespace

EpochResult run_epoch(const Objective& loss, const LearnerConfig& cfg, Regularizer* reg,
                      const ParamVector& start, int epoch_id, const std::vector<ParamVector>& found,
                      const LearnerTracer& tracer) {
  check_params(cfg.circuit, start);
  const bool naive = cfg.regularizer == RegularizerKind::naive;
  const bool guided = (cfg.regularizer == RegularizerKind::global ||
                       cfg.regularizer == RegularizerKind::local) && reg != nullptr;
  const bool local = cfg.regularizer == RegularizerKind::local && reg != nullptr;

  Objective objective = loss;
  if (naive && !found.empty()) {
    objective = [&](const ParamVector& t) {
      return naive_regularized_loss(loss(t), t, found, cfg.naive_lambda);
    };
  }
  IterationObserver observer;
  if (guided) {
    observer = [&](int iter, const ParamVector& best, double best_loss) {
      if (iter % cfg.query_period != 0 || !reg->ready()) return false;
      if (tracer) tracer(LearnerEvent::regularizer_query, epoch_id);
      return reg->estimation_error(best, best_loss) < cfg.familiarity_threshold;
    };
  }

  EpochResult out;
  out.transcript.epoch_id = epoch_id;
  ParamVector theta = start;
  while (true) {
    NelderMeadResult nm = nelder_mead_minimize(objective, theta, cfg.nm, observer);
    if (out.iterations_to_threshold < 0) {
      for (std::size_t i = 0; i < nm.transcript.points.size(); ++i) {
        if (nm.transcript.points[i].loss <= cfg.symmetry_threshold) {
          out.iterations_to_threshold = out.iterations + static_cast<int>(i);
          break;
        }
      }
    }
    out.iterations += nm.iterations;
    out.transcript.append(nm.transcript);
    out.theta = nm.theta;
    out.loss = nm.loss;
    if (nm.transcript.status != TerminalStatus::redirected) break;
    ++out.redirects;
    if (!local || out.redirects > cfg.local.max_redirects_per_epoch) {
      out.status = EpochStatus::redirected;
      out.transcript.status = TerminalStatus::redirected;
      return out;
    }
    theta = explore(loss, *reg, cfg, nm.theta);
  }
  if (naive && !found.empty()) out.loss = loss(out.theta);
  out.status = out.loss <= cfg.symmetry_threshold ? EpochStatus::found : EpochStatus::unconverged;
  return out;
}

// ---- loss evaluation --------------------------------------------------------

LossEvaluator::LossEvaluator(const StateVector& psi, const LearnerConfig& cfg, std::uint64_t seed,
                             Circuit prep)
    : psi_(psi), spec_(cfg.circuit), loss_(cfg.loss), noise_(cfg.noise), prep_(std::move(prep)),
      rng_(seed) {
  validate(cfg);
  if (psi.num_qubits() != spec_.num_qubits) throw ArgumentError("state and circuit sizes differ");
  if (is_qkl(loss_.mode) && loss_.bases.empty()) loss_.bases = select_bases(psi_, loss_.shots, rng_);
}

double LossEvaluator::operator()(const ParamVector& theta) {
  if (noise_.active()) {
    const StateVector initial = prep_.empty() ? psi_ : StateVector(spec_.num_qubits);
    return noisy_qkl_loss(initial, prep_, spec_, theta, loss_.bases, loss_.shots, loss_.smoothing,
                          noise_, rng_);
  }
  return evaluate_loss(psi_, spec_, theta, loss_, rng_);
}

Objective LossEvaluator::objective() {
  return [this](const ParamVector& theta) { return (*this)(theta); };
}

// ---- learner loop -----------------------------------------------------------

namespace {

using StopRule = std::function<bool(const LearnReport&)>;

LearnReport learn_loop(const Objective& loss, const LearnerConfig& cfg, Regularizer* reg,
                       std::uint64_t seed, const LearnerTracer& tracer, const StopRule& stop) {
  validate(cfg);
  LearnReport report;
  Rng rng(seed);
  std::vector<ParamVector> found;
  int streak = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const ParamVector start = random_params(cfg.circuit, rng);

    if (tracer) tracer(LearnerEvent::epoch_begin, epoch);
    EpochResult res = run_epoch(loss, cfg, reg, start, epoch, found, tracer);
    if (tracer) tracer(LearnerEvent::epoch_end, epoch);

    EpochReport er;
    er.epoch = epoch;
    er.status = res.status;
    er.iterations = res.iterations;
    er.final_loss = res.loss;
    er.redirects = res.redirects;

    if (res.status == EpochStatus::found) {
      streak = 0;
      if (cfg.label_manifolds) er.label = classify_ghz_d0_manifold(cfg.circuit, res.theta, cfg.label_tolerance);
      SymmetryRecord rec;
      rec.theta = res.theta;
      rec.loss = res.loss;
      rec.epoch = epoch;
      rec.spec = cfg.circuit;
      rec.mode = cfg.loss.mode;
      rec.seed = seed;
      rec.iterations = res.iterations;
      report.records.push_back(std::move(rec));
      found.push_back(res.theta);
      if (reg && cfg.regularizer != RegularizerKind::none && cfg.regularizer != RegularizerKind::naive) {
        if (tracer) tracer(LearnerEvent::regularizer_train, epoch);
        reg->learn_path(res.transcript);
      }
    } else if (res.status == EpochStatus::redirected) {
      ++streak;
    } else {
      streak = 0;
    }
    report.epochs.push_back(er);
    if (streak >= cfg.consecutive_redirects_to_stop) {
      report.terminated_by_redirects = true;
      break;
    }
    if (stop && stop(report)) break;
  }
  return report;
}

std::unique_ptr<Regularizer> make_regularizer(const LearnerConfig& cfg, std::uint64_t seed) {
  if (cfg.regularizer != RegularizerKind::global && cfg.regularizer != RegularizerKind::local) return nullptr;
  return std::make_unique<CNetRegularizer>(cfg.circuit, seed, cfg.train, cfg.cnet_input);
}

std::vector<ManifoldLabel> found_labels(const LearnReport& report) {
  std::vector<ManifoldLabel> labels;
  for (const auto& e : report.epochs) {
    if (e.status == EpochStatus::found && e.label && *e.label != ManifoldLabel::none) {
      labels.push_back(*e.label);
    }
  }
  return labels;
}

void count_labels(const LearnReport& report, TauReport& tau) {
  for (const auto& e : report.epochs) {
    if (e.status != EpochStatus::found || !e.label) continue;
    if (*e.label == ManifoldLabel::m1_diagonal) ++tau.m1_count;
    else if (*e.label == ManifoldLabel::m2_offdiagonal) ++tau.m2_count;
    else ++tau.none_count;
  }
}

}  // namespace

LearnReport learn_with_objective(const Objective& loss, const LearnerConfig& cfg, Regularizer* reg,
                                 std::uint64_t seed, const LearnerTracer& tracer) {
  return learn_loop(loss, cfg, reg, seed, tracer, {});
}

LearnReport learn_symmetries(const StateVector& psi, const LearnerConfig& cfg, std::uint64_t seed,
                             const Circuit& prep, const LearnerTracer& tracer) {
  validate(cfg);
  LossEvaluator evaluator(psi, cfg, derive_seed(seed, 0), prep);
  auto reg = make_regularizer(cfg, derive_seed(seed, 1));
  LearnReport report = learn_loop(evaluator.objective(), cfg, reg.get(), derive_seed(seed, 2), tracer, {});
  for (auto& rec : report.records) {
    rec.seed = seed;
    if (cfg.circuit.num_qubits <= cfg.record_matrix_max_qubits) {
      rec.matrix = ansatz_matrix(cfg.circuit, rec.theta);
    }
  }
  return report;
}

// ---- learning times ---------------------------------------------------------

double tau_from_labels(const std::vector<ManifoldLabel>& labels) {
  if (labels.size() < 2) throw ArgumentError("need at least two labels");
  const auto horizon = static_cast<double>(labels.size() - 1);
  int switches = 0;
  for (std::size_t t = 1; t < labels.size(); ++t) switches += labels[t] != labels[t - 1];
  return switches == 0 ? horizon : horizon / switches;
}

TauReport tau_global(const Objective& loss, const LearnerConfig& cfg_in, int runs, std::uint64_t seed,
                     const RegularizerFactory& factory) {
  if (runs < 1) throw ArgumentError("runs must be >= 1");
  LearnerConfig cfg = cfg_in;
  cfg.label_manifolds = true;
  validate(cfg);
  TauReport tau;
  double total = 0.0;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    auto reg = factory ? factory(derive_seed(run_seed, 1)) : nullptr;
    const StopRule switched = [](const LearnReport& rep) {
      const auto labels = found_labels(rep);
      return !labels.empty() && labels.back() != labels.front();
    };
    const LearnReport rep = learn_loop(loss, cfg, reg.get(), derive_seed(run_seed, 2), {}, switched);
    count_labels(rep, tau);
    const auto labels = found_labels(rep);
    double value = cfg.max_epochs;
    if (!labels.empty() && labels.back() != labels.front()) {
      value = static_cast<double>(labels.size() - 1);
    } else {
      ++tau.censored;
    }
    tau.per_run.push_back(value);
    total += value;
  }
  tau.tau = total / runs;
  return tau;
}

TauReport tau_global(const StateVector& psi, const LearnerConfig& cfg, int runs, std::uint64_t seed) {
  LossEvaluator evaluator(psi, cfg, derive_seed(seed, 0));
  const RegularizerFactory factory = [&cfg](std::uint64_t s) { return make_regularizer(cfg, s); };
  return tau_global(evaluator.objective(), cfg, runs, seed, factory);
}

TauReport tau_local(const StateVector& psi, const LearnerConfig& cfg_in, int horizon, std::uint64_t seed) {
  if (horizon < 2) throw ArgumentError("horizon must be >= 2");
  LearnerConfig cfg = cfg_in;
  cfg.label_manifolds = true;
  if (cfg.regularizer != RegularizerKind::local) throw ArgumentError("tau_local needs the local regularizer");
  validate(cfg);
  LossEvaluator evaluator(psi, cfg, derive_seed(seed, 0));
  auto reg = make_regularizer(cfg, derive_seed(seed, 1));
  const auto need = static_cast<std::size_t>(horizon) + 1;
  const StopRule enough = [need](const LearnReport& rep) { return found_labels(rep).size() >= need; };
  const LearnReport rep = learn_loop(evaluator.objective(), cfg, reg.get(), derive_seed(seed, 2), {}, enough);
  auto labels = found_labels(rep);
  if (labels.size() < need) {
    throw NumericalError("local scheme found " + std::to_string(labels.size()) + " labelled symmetries, needed " +
                         std::to_string(need));
  }
  TauReport tau;
  count_labels(rep, tau);
  tau.tau = tau_from_labels(labels);
  tau.per_run.push_back(tau.tau);
  if (tau.tau >= horizon) tau.censored = 1;
  return tau;
}

}  // namespace symlearn

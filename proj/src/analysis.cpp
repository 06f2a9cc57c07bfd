#include "symlearn/analysis.hpp"

#include "symlearn/errors.hpp"
#include "symlearn/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace symlearn {

namespace {

struct Moments {
  double mean = 0.0;
  double std_dev = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

// ---- PCA --------------------------------------------------------------------

Eigen::MatrixXcd gauge_fix(const Eigen::MatrixXcd& u) {
  if (u.size() == 0) return u;
  Eigen::Index r = 0, c = 0;
  u.cwiseAbs().maxCoeff(&r, &c);
  const Complex pivot = u(r, c);
  if (std::abs(pivot) == 0.0) return u;
  return u * (std::abs(pivot) / pivot);
}

Eigen::VectorXd unitary_features(const Eigen::MatrixXcd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd f(2 * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      f[k] = u(i, j).real();
      f[n + k] = u(i, j).imag();
      ++k;
    }
  }
  return f;
}

PCAResult pca_project(const Eigen::MatrixXd& features, int dims) {
  const Eigen::Index n = features.rows();
  if (n < 1 || features.cols() < 1) throw ArgumentError("PCA needs a non-empty feature matrix");
  if (dims < 1 || dims > std::min(n, features.cols())) throw ArgumentError("invalid PCA dimension");
  PCAResult out;
  out.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - out.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  out.components = svd.matrixV().leftCols(dims);
  out.projected = centered * out.components;
  const double total = s.squaredNorm();
  out.explained = Eigen::VectorXd::Zero(dims);
  if (total > 0) {
    for (int i = 0; i < dims && i < s.size(); ++i) out.explained[i] = s[i] * s[i] / total;
  }
  return out;
}

PCAResult pca_project(const std::vector<SymmetryRecord>& records, int dims, PcaFeature feature) {
  if (records.size() < 3) throw ArgumentError("PCA needs at least three records");
  const CircuitSpec& spec = records.front().spec;
  Eigen::MatrixXd features;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.spec.num_qubits != spec.num_qubits) throw ArgumentError("records have different qubit counts");
    Eigen::VectorXd f;
    if (feature == PcaFeature::theta) {
      if (rec.spec != spec) throw ArgumentError("theta PCA needs records from one circuit shape");
      f = rec.theta.values();
    } else {
      const Eigen::MatrixXcd u = rec.matrix ? *rec.matrix : ansatz_matrix(rec.spec, rec.theta);
      f = unitary_features(gauge_fix(u));
    }
    if (i == 0) features.resize(static_cast<Eigen::Index>(records.size()), f.size());
    features.row(static_cast<Eigen::Index>(i)) = f.transpose();
  }
  return pca_project(features, dims);
}

double separation_margin(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(points.rows()) != labels.size()) throw ArgumentError("label count mismatch");
  const Eigen::Index k = points.cols();
  Eigen::VectorXd mu[2] = {Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k)};
  int count[2] = {0, 0};
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)] ? 1 : 0;
    mu[c] += points.row(i).transpose();
    ++count[c];
  }
  if (count[0] == 0 || count[1] == 0) throw ArgumentError("separation needs two non-empty classes");
  mu[0] /= count[0];
  mu[1] /= count[1];
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd d = points.row(i).transpose() - mu[labels[static_cast<std::size_t>(i)] ? 1 : 0];
    sw += d * d.transpose();
  }
  sw += (1e-12 + 1e-9 * sw.trace()) * Eigen::MatrixXd::Identity(k, k);

  std::vector<Eigen::VectorXd> directions;
  directions.push_back(sw.ldlt().solve(mu[1] - mu[0]));
  for (Eigen::Index j = 0; j < k; ++j) directions.push_back(Eigen::VectorXd::Unit(k, j));

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : directions) {
    const double norm = w.norm();
    if (norm == 0.0) continue;
    double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double hi[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const int c = labels[static_cast<std::size_t>(i)] ? 1 : 0;
      const double p = points.row(i).dot(w) / norm;
      lo[c] = std::min(lo[c], p);
      hi[c] = std::max(hi[c], p);
    }
    best = std::max({best, lo[1] - hi[0], lo[0] - hi[1]});
  }
  return best;
}

// ---- matrix views -----------------------------------------------------------

Eigen::MatrixXd threshold_matrix(const Eigen::MatrixXd& magnitudes, double alpha) {
  if (alpha < 0) throw ArgumentError("alpha must be >= 0");
  if (magnitudes.size() == 0) return magnitudes;
  const double cutoff = magnitudes.maxCoeff() - alpha;
  return magnitudes.unaryExpr([cutoff](double v) { return v >= cutoff ? v : 0.0; });
}

Eigen::MatrixXd threshold_matrix(const Eigen::MatrixXcd& u, double alpha) {
  return threshold_matrix(Eigen::MatrixXd(u.cwiseAbs2()), alpha);
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt(m(i, j));
    os << '\n';
  }
  return os.str();
}

// ---- benchmarks -------------------------------------------------------------

std::string benchmark_csv(const BenchmarkTable& table, const std::string& value_name) {
  std::ostringstream os;
  os << "state,num_qubits,block_depth,mean_" << value_name << ",std_" << value_name << ",trials,censored\n";
  for (const auto& r : table) {
    os << r.state << ',' << r.num_qubits << ',' << r.block_depth << ',' << fmt(r.mean) << ','
       << fmt(r.std_dev) << ',' << r.trials << ',' << r.censored << '\n';
  }
  return os.str();
}

BenchmarkTable bench_depth(const DepthBenchConfig& cfg) {
  if (cfg.epochs < 1) throw ArgumentError("epochs must be >= 1");
  std::vector<StateVector> states;
  for (const auto& s : cfg.states) states.push_back(prepare_state(s));
  const std::size_t cells = cfg.states.size() * cfg.depths.size();
  BenchmarkTable table(cells);
  parallel_for(cells, cfg.jobs, [&](std::size_t cell) {
    const std::size_t si = cell / cfg.depths.size();
    const int d = cfg.depths[cell % cfg.depths.size()];
    const StateVector& psi = states[si];
    LearnerConfig lc = default_learner_config({psi.num_qubits(), d, cfg.family});
    if (cfg.max_iter > 0) lc.nm.max_iter = cfg.max_iter;
    const std::uint64_t cell_seed = derive_seed(cfg.seed, cell);
    LossEvaluator loss(psi, lc, derive_seed(cell_seed, 0));
    Rng rng(derive_seed(cell_seed, 1));
    std::vector<double> losses;
    int censored = 0;
    for (int e = 0; e < cfg.epochs; ++e) {
      const EpochResult res = run_epoch(loss.objective(), lc, nullptr, random_params(lc.circuit, rng), e);
      losses.push_back(res.loss);
      censored += res.transcript.status == TerminalStatus::max_iter;
    }
    const Moments m = moments(losses);
    table[cell] = {cfg.states[si].label(), psi.num_qubits(), d, m.mean, m.std_dev, cfg.epochs, censored};
  });
  return table;
}

BenchmarkTable bench_queries(const QueryBenchConfig& cfg) {
  if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
  const std::size_t cells = cfg.sizes.size() * cfg.depths.size();
  BenchmarkTable table(cells);
  parallel_for(cells, cfg.jobs, [&](std::size_t cell) {
    const int n = cfg.sizes[cell / cfg.depths.size()];
    const int d = cfg.depths[cell % cfg.depths.size()];
    const CircuitSpec spec{n, d, cfg.family};
    const StateVector psi = prepare_ghz(n);
    NelderMeadConfig nm;
    nm.max_iter = default_max_iter(n);
    nm.target = cfg.threshold;
    Rng rng(derive_seed(cfg.seed, cell));
    const Objective loss = [&](const ParamVector& t) { return exact_overlap_loss(psi, spec, t); };
    std::vector<double> iters;
    int censored = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      const NelderMeadResult r = nelder_mead_minimize(loss, random_params(spec, rng), nm);
      if (r.iterations_to_target < 0) {
        ++censored;
        iters.push_back(r.iterations);
      } else {
        iters.push_back(r.iterations_to_target);
      }
    }
    const Moments m = moments(iters);
    table[cell] = {StateSpec::ghz(n).label(), n, d, m.mean, m.std_dev, cfg.trials, censored};
  });
  return table;
}

std::vector<NoiseBenchRow> bench_noise(const NoiseBenchConfig& cfg) {
  if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
  const StateVector psi = prepare_state(cfg.state);
  const auto prep = preparation_circuit(cfg.state);
  if (!prep) throw ArgumentError("noise benchmark needs a state with a gate-level preparation");
  const CircuitSpec spec{psi.num_qubits(), cfg.block_depth, EntanglerFamily::nearest_neighbor};
  Rng basis_rng(derive_seed(cfg.seed, 0));
  const auto bases = select_bases(psi, cfg.shots, basis_rng);

  const std::size_t np = cfg.p_grid.size();
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<double> true_loss(np * trials), noisy_loss(np * trials);
  parallel_for(np * trials, cfg.jobs, [&](std::size_t cell) {
    const double p = cfg.p_grid[cell / trials];
    LearnerConfig lc = default_learner_config(spec, LossMode::qkl);
    lc.loss.shots = cfg.shots;
    lc.loss.bases = bases;
    lc.noise.p_error = p;
    lc.nm.max_iter = cfg.max_iter;
    const std::uint64_t cell_seed = derive_seed(cfg.seed, cell + 1);
    LossEvaluator loss(psi, lc, derive_seed(cell_seed, 0), *prep);
    Rng rng(derive_seed(cell_seed, 1));
    const EpochResult res = run_epoch(loss.objective(), lc, nullptr, random_params(spec, rng),
                                      static_cast<int>(cell % trials));
    true_loss[cell] = qkl_exact(psi, spec, res.theta, bases);
    noisy_loss[cell] = loss(res.theta);
  });

  std::vector<NoiseBenchRow> rows;
  for (std::size_t i = 0; i < np; ++i) {
    const std::vector<double> t(true_loss.begin() + static_cast<long>(i * trials),
                                true_loss.begin() + static_cast<long>((i + 1) * trials));
    const std::vector<double> q(noisy_loss.begin() + static_cast<long>(i * trials),
                                noisy_loss.begin() + static_cast<long>((i + 1) * trials));
    const Moments mt = moments(t), mq = moments(q);
    rows.push_back({cfg.p_grid[i], mt.mean, mt.std_dev, mq.mean, mq.std_dev, mq.mean - mt.mean, cfg.trials});
  }
  return rows;
}

std::string noise_csv(const std::vector<NoiseBenchRow>& rows) {
  std::ostringstream os;
  os << "p_error,true_loss,true_std,noisy_loss,noisy_std,gap,trials\n";
  for (const auto& r : rows) {
    os << fmt(r.p_error) << ',' << fmt(r.true_loss) << ',' << fmt(r.true_std) << ',' << fmt(r.noisy_loss)
       << ',' << fmt(r.noisy_std) << ',' << fmt(r.gap) << ',' << r.trials << '\n';
  }
  return os.str();
}

LearnerConfig default_regularizer_bench_learner() {
  LearnerConfig lc = default_learner_config({3, 0, EntanglerFamily::nearest_neighbor});
  lc.regularizer = RegularizerKind::local;
  lc.max_epochs = 100000;
  lc.consecutive_redirects_to_stop = 1000;
  return lc;
}

std::vector<RegularizerBenchRow> bench_regularizer(const RegularizerBenchConfig& cfg) {
  if (cfg.repeats < 1) throw ArgumentError("repeats must be >= 1");
  const StateVector psi = prepare_ghz(cfg.learner.circuit.num_qubits);
  const std::size_t ns = cfg.step_sizes.size();
  const auto reps = static_cast<std::size_t>(cfg.repeats);
  std::vector<double> taus(ns * reps);
  parallel_for(ns * reps, cfg.jobs, [&](std::size_t cell) {
    LearnerConfig lc = cfg.learner;
    lc.regularizer = RegularizerKind::local;
    lc.local.eta = cfg.step_sizes[cell / reps];
    // Common seeds across step sizes so the sweep compares like with like.
    taus[cell] = tau_local(psi, lc, cfg.horizon, derive_seed(cfg.seed, cell % reps)).tau;
  });
  std::vector<RegularizerBenchRow> rows;
  for (std::size_t i = 0; i < ns; ++i) {
    const Moments m = moments({taus.begin() + static_cast<long>(i * reps),
                               taus.begin() + static_cast<long>((i + 1) * reps)});
    rows.push_back({cfg.step_sizes[i], m.mean, m.std_dev, cfg.repeats});
  }
  return rows;
}

std::string regularizer_csv(const std::vector<RegularizerBenchRow>& rows) {
  std::ostringstream os;
  os << "step_size,tau_local,tau_std,repeats\n";
  for (const auto& r : rows) {
    os << fmt(r.step_size) << ',' << fmt(r.tau) << ',' << fmt(r.tau_std) << ',' << r.repeats << '\n';
  }
  return os.str();
}

}  // namespace symlearn

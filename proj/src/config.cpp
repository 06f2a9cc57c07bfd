#include "symlearn/config.hpp"

#include "symlearn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace symlearn {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ArgumentError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw ArgumentError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

Json to_json(const AdiabaticSchedule& s) {
  return {{"total_time", s.total_time},
          {"omega_ramp_fraction", s.omega_ramp_fraction},
          {"delta_start_ratio", s.delta_start_ratio},
          {"time_step", s.time_step}};
}

AdiabaticSchedule schedule_from_json(const Json& j) {
  check_keys(j, {"total_time", "omega_ramp_fraction", "delta_start_ratio", "time_step"}, "schedule");
  AdiabaticSchedule s;
  read(j, "total_time", s.total_time);
  read(j, "omega_ramp_fraction", s.omega_ramp_fraction);
  read(j, "delta_start_ratio", s.delta_start_ratio);
  read(j, "time_step", s.time_step);
  return s;
}

Json to_json(const RydbergParams& p) {
  return {{"num_qubits", p.num_qubits}, {"delta_over_omega", p.delta_over_omega},
          {"rb_over_a", p.rb_over_a},   {"omega_max", p.omega_max},
          {"c6", p.c6},                 {"phi", p.phi},
          {"schedule", to_json(p.schedule)}};
}

RydbergParams rydberg_from_json(const Json& j) {
  check_keys(j, {"num_qubits", "delta_over_omega", "rb_over_a", "omega_max", "c6", "phi", "schedule"},
             "rydberg");
  RydbergParams p;
  read(j, "num_qubits", p.num_qubits);
  read(j, "delta_over_omega", p.delta_over_omega);
  read(j, "rb_over_a", p.rb_over_a);
  read(j, "omega_max", p.omega_max);
  read(j, "c6", p.c6);
  read(j, "phi", p.phi);
  if (j.contains("schedule")) p.schedule = schedule_from_json(j.at("schedule"));
  return p;
}

Json matrix_to_json(const Eigen::MatrixXcd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return out;
}

Eigen::MatrixXcd matrix_from_json(const Json& j) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (n * n != static_cast<Eigen::Index>(j.size())) throw ArgumentError("record matrix is not square");
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index k = 0; k < n * n; ++k) {
    const auto& e = j.at(static_cast<std::size_t>(k));
    m(k / n, k % n) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
  }
  return m;
}

}  // namespace

Json to_json(const StateSpec& s) {
  Json j = {{"kind", to_string(s.kind)}, {"num_qubits", s.num_qubits}};
  if (s.kind == StateSpec::Kind::cluster) j["side"] = s.side;
  if (s.kind == StateSpec::Kind::tfim) j["coupling"] = s.coupling;
  if (s.kind == StateSpec::Kind::rydberg) j["rydberg"] = to_json(s.rydberg);
  return j;
}

StateSpec state_spec_from_json(const Json& j) {
  check_keys(j, {"kind", "num_qubits", "side", "coupling", "rydberg"}, "state");
  const auto kind = state_kind_from_string(j.at("kind").get<std::string>());
  StateSpec s;
  switch (kind) {
    case StateSpec::Kind::bell: s = StateSpec::bell(); break;
    case StateSpec::Kind::ghz: s = StateSpec::ghz(j.value("num_qubits", 3)); break;
    case StateSpec::Kind::cluster: s = StateSpec::cluster(j.value("side", 2)); break;
    case StateSpec::Kind::tfim: s = StateSpec::tfim(j.value("num_qubits", 4), j.value("coupling", 1.0)); break;
    case StateSpec::Kind::rydberg: {
      RydbergParams p = j.contains("rydberg") ? rydberg_from_json(j.at("rydberg")) : RydbergParams{};
      if (j.contains("num_qubits")) p.num_qubits = j.at("num_qubits").get<int>();
      s = StateSpec::rydberg_chain(p);
      break;
    }
  }
  if (j.contains("num_qubits") && j.at("num_qubits").get<int>() != s.num_qubits) {
    throw ArgumentError("num_qubits does not match the " + to_string(kind) + " state");
  }
  return s;
}

Json to_json(const CircuitSpec& s) {
  return {{"num_qubits", s.num_qubits}, {"block_depth", s.block_depth}, {"family", to_string(s.family)}};
}

CircuitSpec circuit_spec_from_json(const Json& j) {
  check_keys(j, {"num_qubits", "block_depth", "family"}, "circuit");
  CircuitSpec s;
  read(j, "num_qubits", s.num_qubits);
  read(j, "block_depth", s.block_depth);
  if (j.contains("family")) s.family = entangler_family_from_string(j.at("family").get<std::string>());
  return s;
}

Json to_json(const MeasurementBasis& b) {
  Json rot = Json::array();
  for (const auto& r : b.rotations) rot.push_back({r.a, r.b, r.c});
  return {{"label", b.label}, {"rotations", rot}};
}

MeasurementBasis basis_from_json(const Json& j) {
  check_keys(j, {"label", "rotations"}, "basis");
  MeasurementBasis b;
  read(j, "label", b.label);
  for (const auto& r : j.at("rotations")) {
    b.rotations.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()});
  }
  return b;
}

Json to_json(const RunConfig& cfg) {
  const LearnerConfig& l = cfg.learner;
  Json bases = Json::array();
  for (const auto& b : l.loss.bases) bases.push_back(to_json(b));
  Json j;
  j["state"] = to_json(cfg.state);
  j["circuit"] = to_json(l.circuit);
  j["loss"] = {{"mode", to_string(l.loss.mode)}, {"shots", l.loss.shots},
               {"smoothing", l.loss.smoothing}, {"bases", bases}};
  j["optimizer"] = {{"tol", l.nm.tol},
                    {"max_iter", l.nm.max_iter},
                    {"reflection", l.nm.reflection},
                    {"expansion", l.nm.expansion},
                    {"contraction", l.nm.contraction},
                    {"shrink", l.nm.shrink},
                    {"initial_simplex_scale", l.nm.initial_simplex_scale},
                    {"target", std::isfinite(l.nm.target) ? Json(l.nm.target) : Json(nullptr)}};
  j["learner"] = {{"symmetry_threshold", l.symmetry_threshold},
                  {"regularizer", to_string(l.regularizer)},
                  {"query_period", l.query_period},
                  {"familiarity_threshold", l.familiarity_threshold},
                  {"naive_lambda", l.naive_lambda},
                  {"local",
                   {{"eta", l.local.eta},
                    {"delta", l.local.delta},
                    {"steps", l.local.steps},
                    {"max_redirects_per_epoch", l.local.max_redirects_per_epoch}}},
                  {"max_epochs", l.max_epochs},
                  {"consecutive_redirects_to_stop", l.consecutive_redirects_to_stop},
                  {"record_matrix_max_qubits", l.record_matrix_max_qubits},
                  {"label_manifolds", l.label_manifolds},
                  {"label_tolerance", l.label_tolerance}};
  j["cnet_training"] = {{"learning_rate", l.train.learning_rate},
                        {"batch_size", l.train.batch_size},
                        {"epochs_per_path", l.train.epochs_per_path},
                        {"momentum", l.train.momentum},
                        {"input", to_string(l.cnet_input)}};
  j["noise"] = {{"p_error", l.noise.p_error}};
  j["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  j["output_dir"] = cfg.output_dir;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  check_keys(j, {"state", "circuit", "loss", "optimizer", "learner", "cnet_training", "noise", "seed", "output_dir"},
             "config");
  RunConfig cfg;
  if (j.contains("state")) cfg.state = state_spec_from_json(j.at("state"));
  CircuitSpec circuit{cfg.state.num_qubits, 0, EntanglerFamily::nearest_neighbor};
  if (j.contains("circuit")) circuit = circuit_spec_from_json(j.at("circuit"));
  validate(circuit);

  LossMode mode = LossMode::exact_overlap;
  if (j.contains("loss") && j.at("loss").contains("mode")) {
    mode = loss_mode_from_string(j.at("loss").at("mode").get<std::string>());
  }
  LearnerConfig& l = cfg.learner;
  l = default_learner_config(circuit, mode);

  if (j.contains("loss")) {
    const Json& jl = j.at("loss");
    check_keys(jl, {"mode", "shots", "smoothing", "bases"}, "loss");
    read(jl, "shots", l.loss.shots);
    read(jl, "smoothing", l.loss.smoothing);
    if (jl.contains("bases")) {
      for (const auto& b : jl.at("bases")) l.loss.bases.push_back(basis_from_json(b));
    }
  }
  if (j.contains("optimizer")) {
    const Json& jo = j.at("optimizer");
    check_keys(jo, {"tol", "max_iter", "reflection", "expansion", "contraction", "shrink",
                    "initial_simplex_scale", "target"},
               "optimizer");
    read(jo, "tol", l.nm.tol);
    read(jo, "max_iter", l.nm.max_iter);
    read(jo, "reflection", l.nm.reflection);
    read(jo, "expansion", l.nm.expansion);
    read(jo, "contraction", l.nm.contraction);
    read(jo, "shrink", l.nm.shrink);
    read(jo, "initial_simplex_scale", l.nm.initial_simplex_scale);
    read(jo, "target", l.nm.target);
  }
  if (j.contains("learner")) {
    const Json& jl = j.at("learner");
    check_keys(jl, {"symmetry_threshold", "regularizer", "query_period", "familiarity_threshold", "naive_lambda",
                    "local", "max_epochs", "consecutive_redirects_to_stop", "record_matrix_max_qubits",
                    "label_manifolds", "label_tolerance"},
               "learner");
    read(jl, "symmetry_threshold", l.symmetry_threshold);
    if (jl.contains("regularizer")) {
      l.regularizer = regularizer_kind_from_string(jl.at("regularizer").get<std::string>());
    }
    read(jl, "query_period", l.query_period);
    read(jl, "familiarity_threshold", l.familiarity_threshold);
    read(jl, "naive_lambda", l.naive_lambda);
    if (jl.contains("local")) {
      const Json& jx = jl.at("local");
      check_keys(jx, {"eta", "delta", "steps", "max_redirects_per_epoch"}, "learner.local");
      read(jx, "eta", l.local.eta);
      read(jx, "delta", l.local.delta);
      read(jx, "steps", l.local.steps);
      read(jx, "max_redirects_per_epoch", l.local.max_redirects_per_epoch);
    }
    read(jl, "max_epochs", l.max_epochs);
    read(jl, "consecutive_redirects_to_stop", l.consecutive_redirects_to_stop);
    read(jl, "record_matrix_max_qubits", l.record_matrix_max_qubits);
    read(jl, "label_manifolds", l.label_manifolds);
    read(jl, "label_tolerance", l.label_tolerance);
  }
  if (j.contains("cnet_training")) {
    const Json& jt = j.at("cnet_training");
    check_keys(jt, {"learning_rate", "batch_size", "epochs_per_path", "momentum", "input"}, "cnet_training");
    read(jt, "learning_rate", l.train.learning_rate);
    read(jt, "batch_size", l.train.batch_size);
    read(jt, "epochs_per_path", l.train.epochs_per_path);
    read(jt, "momentum", l.train.momentum);
    if (jt.contains("input")) l.cnet_input = cnet_input_from_string(jt.at("input").get<std::string>());
  }
  if (j.contains("noise")) {
    check_keys(j.at("noise"), {"p_error"}, "noise");
    read(j.at("noise"), "p_error", l.noise.p_error);
  }
  if (j.contains("seed") && !j.at("seed").is_null()) cfg.seed = j.at("seed").get<std::uint64_t>();
  read(j, "output_dir", cfg.output_dir);

  if (cfg.state.num_qubits != l.circuit.num_qubits) {
    throw ArgumentError("state and circuit qubit counts differ");
  }
  validate(l);
  return cfg;
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ArgumentError("cannot parse " + path + ": " + e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const Json::exception& e) {
    throw ArgumentError("malformed config " + path + ": " + e.what());
  }
}

Json record_to_json(const SymmetryRecord& rec, const StateSpec& state) {
  Json j;
  j["version"] = kRecordVersion;
  j["state"] = to_json(state);
  j["spec"] = to_json(rec.spec);
  j["theta"] = std::vector<double>(rec.theta.values().data(), rec.theta.values().data() + rec.theta.size());
  j["loss"] = rec.loss;
  j["mode"] = to_string(rec.mode);
  j["epoch"] = rec.epoch;
  j["seed"] = rec.seed;
  j["iterations"] = rec.iterations;
  if (rec.matrix) j["matrix"] = matrix_to_json(*rec.matrix);
  return j;
}

LoadedRecord record_from_json(const Json& j) {
  check_keys(j, {"version", "state", "spec", "theta", "loss", "mode", "epoch", "seed", "iterations", "matrix"},
             "record");
  if (j.value("version", 0) != kRecordVersion) throw ArgumentError("unsupported record version");
  LoadedRecord out;
  SymmetryRecord& r = out.record;
  r.spec = circuit_spec_from_json(j.at("spec"));
  const auto theta = j.at("theta").get<std::vector<double>>();
  r.theta = ParamVector(Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size())));
  check_params(r.spec, r.theta);
  r.loss = j.at("loss").get<double>();
  r.mode = loss_mode_from_string(j.value("mode", std::string("exact_overlap")));
  r.epoch = j.value("epoch", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.iterations = j.value("iterations", 0);
  if (j.contains("matrix")) r.matrix = matrix_from_json(j.at("matrix"));
  if (j.contains("state")) out.state = state_spec_from_json(j.at("state"));
  return out;
}

LoadedRecord load_record(const std::string& path) {
  try {
    return record_from_json(Json::parse(read_text(path)));
  } catch (const Json::exception& e) {
    throw ArgumentError("malformed record " + path + ": " + e.what());
  }
}

Json report_to_json(const LearnReport& report) {
  Json epochs = Json::array();
  for (const auto& e : report.epochs) {
    Json je = {{"epoch", e.epoch},
               {"status", to_string(e.status)},
               {"iterations", e.iterations},
               {"final_loss", e.final_loss},
               {"redirects", e.redirects}};
    if (e.label) je["manifold_label"] = to_string(*e.label);
    epochs.push_back(je);
  }
  return {{"epochs", epochs},
          {"records", report.records.size()},
          {"terminated_by_redirects", report.terminated_by_redirects}};
}

std::uint64_t config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp);
    out << text;
    if (!out) throw ResourceError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace symlearn

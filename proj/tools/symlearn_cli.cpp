// symlearn: learn, verify and benchmark quantum-state symmetries.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.

#include "symlearn/analysis.hpp"
#include "symlearn/config.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/learner.hpp"
#include "symlearn/lossfn.hpp"
#include "symlearn/statelib.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace symlearn;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out;
};

struct Resolved {
  std::uint64_t seed;
  std::string source;
};

Resolved resolve_seed(const std::optional<std::uint64_t>& cli, const std::optional<std::uint64_t>& cfg) {
  if (cli) return {*cli, "cli"};
  if (cfg) return {*cfg, "config"};
  std::random_device rd;
  return {(static_cast<std::uint64_t>(rd()) << 32) ^ rd(), "entropy"};
}

void write_manifest(const std::string& dir, const std::string& command, const Json& config, const Resolved& seed,
                    int jobs, const std::vector<std::string>& outputs) {
  const Json manifest = {{"tool", "symlearn"},
                         {"version", kToolVersion},
                         {"command", command},
                         {"config", config},
                         {"config_hash", hex64(config_hash(config))},
                         {"seed", seed.seed},
                         {"seed_source", seed.source},
                         {"jobs", jobs},
                         {"outputs", outputs}};
  write_text_atomic((std::filesystem::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// ---- learn ------------------------------------------------------------------

int cmd_learn(const std::string& config_path, const Common& c) {
  RunConfig cfg = load_run_config(config_path);
  const Resolved seed = resolve_seed(c.seed, cfg.seed);
  cfg.seed = seed.seed;
  const std::string dir = c.out.empty() ? cfg.output_dir : c.out;

  const StateVector psi = prepare_state(cfg.state);
  Circuit prep;
  if (cfg.learner.noise.active()) {
    auto circuit = preparation_circuit(cfg.state);
    if (circuit) prep = *circuit;
  }
  const LearnReport report = learn_symmetries(psi, cfg.learner, seed.seed, prep);

  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "record_%04zu.json", i);
    write_text_atomic(join(dir, name), record_to_json(report.records[i], cfg.state).dump(2) + "\n");
    outputs.emplace_back(name);
  }
  write_text_atomic(join(dir, "report.json"), report_to_json(report).dump(2) + "\n");
  outputs.emplace_back("report.json");
  write_manifest(dir, "learn", to_json(cfg), seed, c.jobs, outputs);

  std::cout << "records: " << report.records.size() << "\n";
  for (const auto& e : report.epochs) {
    std::cout << "epoch " << e.epoch << ": " << to_string(e.status) << " loss=" << e.final_loss
              << " iterations=" << e.iterations;
    if (e.label) std::cout << " label=" << to_string(*e.label);
    std::cout << "\n";
  }
  if (report.terminated_by_redirects) std::cout << "terminated: consecutive redirects\n";
  return 0;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const std::string& record_path, const std::string& state_path, std::optional<double> threshold,
               std::optional<double> cv_threshold, int n_bases, std::int64_t shots, const Common& c) {
  if (!std::filesystem::exists(record_path)) throw ArgumentError("record not found: " + record_path);
  const LoadedRecord loaded = load_record(record_path);
  StateSpec state;
  if (!state_path.empty()) {
    state = state_spec_from_json(Json::parse(read_text(state_path)));
  } else if (loaded.state) {
    state = *loaded.state;
  } else {
    throw ArgumentError("record has no state; pass --state");
  }
  const SymmetryRecord& rec = loaded.record;
  const StateVector psi = prepare_state(state);
  if (psi.num_qubits() != rec.spec.num_qubits) throw ArgumentError("record and state sizes differ");
  const Resolved seed = resolve_seed(c.seed, std::nullopt);
  Rng rng(seed.seed);

  const double delta = threshold.value_or(default_symmetry_threshold(rec.mode));
  double loss;
  if (is_qkl(rec.mode)) {
    loss = qkl_exact(psi, rec.spec, rec.theta, select_bases(psi, 10000, rng));
  } else {
    loss = exact_overlap_loss(psi, rec.spec, rec.theta);
  }
  const double cv = qkl_cross_validate(psi, rec.spec, rec.theta, n_bases, shots, rng);
  const double cv_limit = cv_threshold.value_or(10 * delta);
  const bool pass = loss <= delta && cv <= cv_limit;
  std::cout << "state: " << state.label() << "\n"
            << "loss: " << loss << " (threshold " << delta << ")\n"
            << "cross-validation (" << n_bases << " random bases): " << cv << " (threshold " << cv_limit << ")\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : kExitNumerical;
}

// ---- bench ------------------------------------------------------------------

struct BenchOptions {
  int epochs = 100;
  int trials = 0;  // 0: suite default
  std::vector<int> sizes;
  std::vector<int> depths;
  std::vector<double> steps;
  std::vector<double> p_grid;
  int horizon = 400;
  int repeats = 1;
  std::int64_t shots = 0;
  int max_iter = 0;
  std::vector<double> delta_grid = {0.3, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> rb_grid = {1.0, 1.3, 1.6, 2.0, 2.5, 3.0};
  int chain = 7;
};

int cmd_bench(const std::string& suite, const BenchOptions& o, const Common& c) {
  const Resolved seed = resolve_seed(c.seed, std::nullopt);
  const std::string dir = c.out.empty() ? "symlearn_bench" : c.out;
  Json params = {{"suite", suite}};
  std::string csv;
  if (suite == "depth") {
    DepthBenchConfig cfg;
    cfg.epochs = o.epochs;
    if (!o.depths.empty()) cfg.depths = o.depths;
    if (o.max_iter > 0) cfg.max_iter = o.max_iter;
    cfg.seed = seed.seed;
    cfg.jobs = c.jobs;
    params["epochs"] = cfg.epochs;
    params["depths"] = cfg.depths;
    csv = benchmark_csv(bench_depth(cfg), "loss");
  } else if (suite == "queries") {
    QueryBenchConfig cfg;
    if (!o.sizes.empty()) cfg.sizes = o.sizes;
    if (!o.depths.empty()) cfg.depths = o.depths;
    if (o.trials > 0) cfg.trials = o.trials;
    cfg.seed = seed.seed;
    cfg.jobs = c.jobs;
    params["sizes"] = cfg.sizes;
    params["depths"] = cfg.depths;
    params["trials"] = cfg.trials;
    csv = benchmark_csv(bench_queries(cfg), "iterations");
  } else if (suite == "noise") {
    NoiseBenchConfig cfg;
    if (!o.p_grid.empty()) cfg.p_grid = o.p_grid;
    if (o.trials > 0) cfg.trials = o.trials;
    if (o.shots > 0) cfg.shots = o.shots;
    if (o.max_iter > 0) cfg.max_iter = o.max_iter;
    cfg.seed = seed.seed;
    cfg.jobs = c.jobs;
    params["p_grid"] = cfg.p_grid;
    params["trials"] = cfg.trials;
    params["shots"] = cfg.shots;
    params["max_iter"] = cfg.max_iter;
    csv = noise_csv(bench_noise(cfg));
  } else if (suite == "regularizer") {
    RegularizerBenchConfig cfg;
    cfg.learner = default_regularizer_bench_learner();
    if (!o.steps.empty()) cfg.step_sizes = o.steps;
    cfg.horizon = o.horizon;
    cfg.repeats = o.repeats;
    cfg.seed = seed.seed;
    cfg.jobs = c.jobs;
    params["steps"] = cfg.step_sizes;
    params["horizon"] = cfg.horizon;
    params["repeats"] = cfg.repeats;
    csv = regularizer_csv(bench_regularizer(cfg));
  } else if (suite == "phase-diagram") {
    RydbergParams base;
    base.num_qubits = o.chain;
    params["delta_over_omega"] = o.delta_grid;
    params["rb_over_a"] = o.rb_grid;
    params["num_qubits"] = o.chain;
    csv = phase_diagram_csv(phase_diagram(o.delta_grid, o.rb_grid, base, c.jobs));
  } else {
    throw ArgumentError("unknown bench suite '" + suite + "'");
  }
  const std::string name = suite + ".csv";
  write_text_atomic(join(dir, name), csv);
  write_manifest(dir, "bench " + suite, params, seed, c.jobs, {name});
  std::cout << csv;
  return 0;
}

// ---- bases ------------------------------------------------------------------

int cmd_bases(const std::string& config_path, std::int64_t shots, const Common& c) {
  const RunConfig cfg = config_path.empty() ? default_run_config() : load_run_config(config_path);
  const Resolved seed = resolve_seed(c.seed, cfg.seed);
  Rng rng(seed.seed);
  const StateVector psi = prepare_state(cfg.state);
  Json out = Json::array();
  for (const auto& b : select_bases(psi, shots, rng)) out.push_back(to_json(b));
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn symmetries of quantum states with a simulated variational circuit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "RNG seed (drawn from entropy and recorded when unset)");
  app.add_option("--jobs", common.jobs, "worker threads for benchmark cells")->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "output directory");

  std::string config_path;
  auto* learn = app.add_subcommand("learn", "run the symmetry learner on a config file");
  learn->add_option("config", config_path, "config JSON")->required();

  std::string record_path, state_path;
  std::optional<double> threshold, cv_threshold;
  int n_bases = 3;
  std::int64_t verify_shots = 0;
  auto* verify = app.add_subcommand("verify", "re-evaluate a stored symmetry record");
  verify->add_option("record", record_path, "record JSON")->required();
  verify->add_option("--state", state_path, "state spec JSON (defaults to the record's state)");
  verify->add_option("--threshold", threshold, "loss threshold (default by loss mode)");
  verify->add_option("--cv-threshold", cv_threshold, "cross-validation threshold (default 10x loss threshold)");
  verify->add_option("--bases", n_bases, "number of random cross-validation bases");
  verify->add_option("--shots", verify_shots, "shots per basis (0 = exact probabilities)");

  std::string suite;
  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite and write CSV");
  bench->add_option("suite", suite, "depth | queries | noise | regularizer | phase-diagram")->required();
  bench->add_option("--epochs", bo.epochs, "epochs per cell (depth)");
  bench->add_option("--trials", bo.trials, "trials per cell (queries, noise)");
  bench->add_option("--sizes", bo.sizes, "qubit counts (queries)");
  bench->add_option("--depths", bo.depths, "block depths (depth, queries)");
  bench->add_option("--steps", bo.steps, "exploration step sizes (regularizer)");
  bench->add_option("--horizon", bo.horizon, "accepted symmetries per tau_L estimate (regularizer)");
  bench->add_option("--repeats", bo.repeats, "independent runs per step size (regularizer)");
  bench->add_option("--p-grid", bo.p_grid, "error probabilities (noise)");
  bench->add_option("--shots", bo.shots, "shots per basis (noise)");
  bench->add_option("--max-iter", bo.max_iter, "Nelder-Mead iteration cap (depth, noise)");
  bench->add_option("--delta-grid", bo.delta_grid, "Delta/Omega values (phase-diagram)");
  bench->add_option("--rb-grid", bo.rb_grid, "R_b/a values (phase-diagram)");
  bench->add_option("--chain", bo.chain, "chain length (phase-diagram)");

  std::string bases_config;
  std::int64_t bases_shots = 10000;
  auto* bases = app.add_subcommand("bases", "print the two measurement bases chosen for a state");
  bases->add_option("config", bases_config, "config JSON (default GHZ-3)");
  bases->add_option("--shots", bases_shots, "shots used to estimate sparsity");

  auto* defaults = app.add_subcommand("print-defaults", "print the default config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*learn) return cmd_learn(config_path, common);
    if (*verify) return cmd_verify(record_path, state_path, threshold, cv_threshold, n_bases, verify_shots, common);
    if (*bench) return cmd_bench(suite, bo, common);
    if (*bases) return cmd_bases(bases_config, bases_shots, common);
    if (*defaults) {
      std::cout << to_json(default_run_config()).dump(2) << "\n";
      return 0;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

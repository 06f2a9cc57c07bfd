#pragma once

// Post-processing of learned symmetries and the benchmark sweeps.

#include "symlearn/learner.hpp"
#include "symlearn/statelib.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace symlearn {

// ---- PCA --------------------------------------------------------------------

enum class PcaFeature { unitary, theta };

struct PCAResult {
  Eigen::MatrixXd projected;   // n x dims
  Eigen::VectorXd explained;   // variance ratio per component
  Eigen::MatrixXd components;  // features x dims
  Eigen::VectorXd mean;
};

// Rotates the global phase so the largest-magnitude entry is real and positive.
Eigen::MatrixXcd gauge_fix(const Eigen::MatrixXcd& u);
// Row-major real parts followed by row-major imaginary parts.
Eigen::VectorXd unitary_features(const Eigen::MatrixXcd& u);

// rows = samples.
PCAResult pca_project(const Eigen::MatrixXd& features, int dims = 2);
PCAResult pca_project(const std::vector<SymmetryRecord>& records, int dims = 2,
                      PcaFeature feature = PcaFeature::unitary);

// Largest gap between two labelled point sets along the Fisher direction or
// any coordinate axis; positive iff a separating line was found.
double separation_margin(const Eigen::MatrixXd& points, const std::vector<int>& labels);

// ---- matrix views -----------------------------------------------------------

// |U_ij|^2 where |U_ij|^2 >= max |U|^2 - alpha, else 0.
Eigen::MatrixXd threshold_matrix(const Eigen::MatrixXcd& u, double alpha);
Eigen::MatrixXd threshold_matrix(const Eigen::MatrixXd& magnitudes, double alpha);
std::string matrix_csv(const Eigen::MatrixXd& m);

// ---- benchmark tables -------------------------------------------------------

struct BenchmarkRow {
  std::string state;
  int num_qubits = 0;
  int block_depth = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  int trials = 0;
  int censored = 0;  // depth: hit the iteration cap; queries: stopped without reaching the threshold
};

using BenchmarkTable = std::vector<BenchmarkRow>;

std::string benchmark_csv(const BenchmarkTable& table, const std::string& value_name);

struct DepthBenchConfig {
  std::vector<StateSpec> states = {StateSpec::ghz(4), StateSpec::tfim(4), StateSpec::cluster(2)};
  std::vector<int> depths = {0, 1, 2, 3};
  int epochs = 100;
  EntanglerFamily family = EntanglerFamily::nearest_neighbor;
  int max_iter = 0;  // 0: default for the register size
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Mean and spread of the final unregularized exact-overlap loss per (state, d).
BenchmarkTable bench_depth(const DepthBenchConfig& cfg);

struct QueryBenchConfig {
  std::vector<int> sizes = {3, 4, 5, 6, 7};
  std::vector<int> depths = {0, 1, 2, 3};
  int trials = 10;
  double threshold = 1e-3;
  EntanglerFamily family = EntanglerFamily::nearest_neighbor;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Nelder-Mead iterations until the GHZ overlap loss first reaches the threshold.
BenchmarkTable bench_queries(const QueryBenchConfig& cfg);

struct NoiseBenchConfig {
  StateSpec state = StateSpec::ghz(3);
  int block_depth = 1;
  std::vector<double> p_grid = {0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.2, 0.3};
  int trials = 20;
  std::int64_t shots = 1000;
  int max_iter = 1500;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct NoiseBenchRow {
  double p_error = 0.0;
  double true_loss = 0.0;   // exact QKL against the noiseless state
  double true_std = 0.0;
  double noisy_loss = 0.0;  // sampled QKL between noisy preparation and noisy U
  double noisy_std = 0.0;
  double gap = 0.0;         // noisy_loss - true_loss
  int trials = 0;
};

std::vector<NoiseBenchRow> bench_noise(const NoiseBenchConfig& cfg);
std::string noise_csv(const std::vector<NoiseBenchRow>& rows);

struct RegularizerBenchConfig {
  std::vector<double> step_sizes = {0.5, 1.0, 2.0, 3.0, 5.0, 8.0};
  int horizon = 400;
  int repeats = 1;
  LearnerConfig learner;  // regularizer forced to local
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct RegularizerBenchRow {
  double step_size = 0.0;
  double tau = 0.0;
  double tau_std = 0.0;
  int repeats = 0;
};

// tau_L(horizon) on 3-GHZ, d = 0 for each exploration step size.
std::vector<RegularizerBenchRow> bench_regularizer(const RegularizerBenchConfig& cfg);
LearnerConfig default_regularizer_bench_learner();
std::string regularizer_csv(const std::vector<RegularizerBenchRow>& rows);

}  // namespace symlearn

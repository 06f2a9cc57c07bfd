#pragma once

// Epoch loop of the symmetry search: Nelder-Mead over the ansatz parameters,
// with an optional regularizer that redirects searches which wander into
// already-explored territory.

#include "symlearn/ansatz.hpp"
#include "symlearn/cnet.hpp"
#include "symlearn/lossfn.hpp"
#include "symlearn/noise.hpp"
#include "symlearn/optim.hpp"
#include "symlearn/qsim.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace symlearn {

enum class RegularizerKind { none, naive, global, local };
std::string to_string(RegularizerKind kind);
RegularizerKind regularizer_kind_from_string(const std::string& name);

struct LocalExploreConfig {
  double eta = 0.5;
  double delta = 1e-3;
  int steps = 5;
  int max_redirects_per_epoch = 20;
};

// lr 1e-2 with momentum 0.9 and 300 passes per path.
TrainConfig regularizer_train_config();

struct LearnerConfig {
  CircuitSpec circuit;
  LossConfig loss;
  NelderMeadConfig nm;
  double symmetry_threshold = 1e-3;
  RegularizerKind regularizer = RegularizerKind::none;
  int query_period = 100;
  double familiarity_threshold = 1e-2;
  double naive_lambda = 1e-3;
  LocalExploreConfig local;
  int max_epochs = 10;
  int consecutive_redirects_to_stop = 10;
  // Surrogate training between epochs; heavier than the bare TrainConfig defaults.
  TrainConfig train = regularizer_train_config();
  CNetInput cnet_input = CNetInput::periodic;
  NoiseModel noise;
  // Keep the dense unitary in each record up to this many qubits.
  int record_matrix_max_qubits = 4;
  // Attach GHZ d = 0 manifold labels to the report (requires block_depth 0).
  bool label_manifolds = false;
  double label_tolerance = 1e-3;
};

void validate(const LearnerConfig& cfg);
// 1e-3 for the overlap losses, 1e-2 for QKL.
double default_symmetry_threshold(LossMode mode);
// Defaults for a circuit: iteration cap by size and mode-dependent threshold.
LearnerConfig default_learner_config(const CircuitSpec& circuit, LossMode mode = LossMode::exact_overlap);

struct SymmetryRecord {
  ParamVector theta;
  double loss = 0.0;
  int epoch = 0;
  CircuitSpec spec;
  LossMode mode = LossMode::exact_overlap;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::optional<Eigen::MatrixXcd> matrix;
};

// ---- manifold labels (GHZ, d = 0) ------------------------------------------

enum class ManifoldLabel { m1_diagonal, m2_offdiagonal, none };
std::string to_string(ManifoldLabel label);

// Per-qubit factors U = U_0 x ... x U_{L-1}. M1: all diagonal, M2: all
// anti-diagonal, and in both cases the product of the entries mapping the
// GHZ branches onto each other must agree in phase.
ManifoldLabel classify_ghz_d0_manifold(const std::vector<Eigen::Matrix2cd>& factors, double tol = 1e-3);
ManifoldLabel classify_ghz_d0_manifold(const CircuitSpec& spec, const ParamVector& theta, double tol = 1e-3);

// ---- regularizers -----------------------------------------------------------

class Regularizer {
 public:
  virtual ~Regularizer() = default;
  // False until the surrogate has seen at least one path.
  virtual bool ready() const = 0;
  // Squared surrogate error at theta given the measured loss there.
  virtual double estimation_error(const ParamVector& theta, double loss) const = 0;
  virtual void learn_path(const PathTranscript& transcript) = 0;
};

class CNetRegularizer : public Regularizer {
 public:
  CNetRegularizer(const CircuitSpec& spec, std::uint64_t seed, const TrainConfig& train,
                  CNetInput input = CNetInput::raw);

  bool ready() const override { return model_.trained_paths() > 0; }
  double estimation_error(const ParamVector& theta, double loss) const override;
  void learn_path(const PathTranscript& transcript) override;

  const CNetModel& model() const { return model_; }
  const std::vector<TrainSummary>& history() const { return history_; }

 private:
  CNetModel model_;
  TrainConfig train_;
  std::vector<TrainSummary> history_;
};

// ---- epochs -----------------------------------------------------------------

enum class EpochStatus { found, redirected, unconverged };
std::string to_string(EpochStatus status);

enum class LearnerEvent { epoch_begin, regularizer_query, epoch_end, regularizer_train };
using LearnerTracer = std::function<void(LearnerEvent, int epoch)>;

struct EpochResult {
  EpochStatus status = EpochStatus::unconverged;
  ParamVector theta;
  double loss = 0.0;
  int iterations = 0;
  // First iteration whose best loss was within the symmetry threshold (-1 if none).
  int iterations_to_threshold = -1;
  int redirects = 0;
  PathTranscript transcript;
};

// Objective of the naive baseline: loss + lambda * sum_k |theta - theta_k|^-2.
double naive_regularized_loss(double loss, const ParamVector& theta,
                              const std::vector<ParamVector>& found, double lambda);
inline constexpr double kNaiveCap = 1e12;

// One search epoch from `start`. `loss` must be the raw symmetry loss.
EpochResult run_epoch(const Objective& loss, const LearnerConfig& cfg, Regularizer* reg,
                      const ParamVector& start, int epoch_id,
                      const std::vector<ParamVector>& found = {}, const LearnerTracer& tracer = {});

struct EpochReport {
  int epoch = 0;
  EpochStatus status = EpochStatus::unconverged;
  int iterations = 0;
  double final_loss = 0.0;
  int redirects = 0;
  std::optional<ManifoldLabel> label;
};

struct LearnReport {
  std::vector<SymmetryRecord> records;
  std::vector<EpochReport> epochs;
  bool terminated_by_redirects = false;
};

// Symmetry loss of cfg for a target state. Noisy evaluation needs the gate-level
// preparation `prep` (applied to |0...0>); empty prep means psi is prepared exactly.
class LossEvaluator {
 public:
  LossEvaluator(const StateVector& psi, const LearnerConfig& cfg, std::uint64_t seed,
                Circuit prep = {});
  double operator()(const ParamVector& theta);
  const std::vector<MeasurementBasis>& bases() const { return loss_.bases; }
  Objective objective();

 private:
  StateVector psi_;
  CircuitSpec spec_;
  LossConfig loss_;
  NoiseModel noise_;
  Circuit prep_;
  Rng rng_;
};

// Learner loop on an arbitrary loss; `reg` may be null (none / naive). Records
// carry no matrix here.
LearnReport learn_with_objective(const Objective& loss, const LearnerConfig& cfg, Regularizer* reg,
                                 std::uint64_t seed, const LearnerTracer& tracer = {});

// Full pipeline on a state: builds the loss and, for global / local, a fresh CNet.
LearnReport learn_symmetries(const StateVector& psi, const LearnerConfig& cfg, std::uint64_t seed,
                             const Circuit& prep = {}, const LearnerTracer& tracer = {});

// ---- learning times ---------------------------------------------------------

struct TauReport {
  double tau = 0.0;
  std::vector<double> per_run;  // tau_G: one value per reset run
  int censored = 0;
  int m1_count = 0;
  int m2_count = 0;
  int none_count = 0;
};

using RegularizerFactory = std::function<std::unique_ptr<Regularizer>(std::uint64_t seed)>;

// Mean number of accepted symmetries after the first until the manifold label
// changes, over `runs` independent resets. Runs without a change count max_epochs.
TauReport tau_global(const Objective& loss, const LearnerConfig& cfg, int runs, std::uint64_t seed,
                     const RegularizerFactory& factory);
TauReport tau_global(const StateVector& psi, const LearnerConfig& cfg, int runs, std::uint64_t seed);

// T / (number of label changes over T + 1 consecutive accepted symmetries);
// T when the label never changes.
double tau_from_labels(const std::vector<ManifoldLabel>& labels);
TauReport tau_local(const StateVector& psi, const LearnerConfig& cfg, int horizon, std::uint64_t seed);

}  // namespace symlearn

#pragma once

// Classical surrogate for the symmetry loss.
//
// The parameter vector is viewed as a (d+1, L, 3) tensor. conv1 maps each
// 3-angle rotation to conv1_channels features (kernel 1x1x3, stride 3); conv2
// mixes channels per position (kernel 1x1x1); the flattened result feeds three
// affine maps (two hidden layers of `hidden` units). Leaky ReLU follows every
// layer except the output.

#include "symlearn/ansatz.hpp"
#include "symlearn/optim.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace symlearn {

// raw: the 3 angles per rotation as given. periodic: each angle x enters as
// (cos x, sin x), so the first kernel spans 6 inputs.
enum class CNetInput { raw, periodic };
std::string to_string(CNetInput input);
CNetInput cnet_input_from_string(const std::string& name);

struct CNetArchitecture {
  int num_qubits = 1;
  int block_depth = 0;
  int conv1_channels = 8;
  int conv2_channels = 16;
  int hidden = 100;
  double leaky_slope = 0.01;
  CNetInput input = CNetInput::raw;

  int positions() const { return (block_depth + 1) * num_qubits; }
  // Length of the parameter vector the model accepts.
  int input_dim() const { return 3 * positions(); }
  int kernel_width() const { return input == CNetInput::periodic ? 6 : 3; }
  friend bool operator==(const CNetArchitecture&, const CNetArchitecture&) = default;
};

CNetArchitecture cnet_architecture(const CircuitSpec& spec, CNetInput input = CNetInput::raw);

struct CNetWeights {
  Eigen::MatrixXd w1, w2, w3, w4, w5;
  Eigen::VectorXd b1, b2, b3, b4, b5;

  static CNetWeights zeros(const CNetArchitecture& arch);
  long size() const;
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  // this += scale * other
  void axpy(double scale, const CNetWeights& other);
};

class CNetModel {
 public:
  explicit CNetModel(const CNetArchitecture& arch);  // all weights zero

  const CNetArchitecture& architecture() const { return arch_; }
  const CNetWeights& weights() const { return weights_; }
  CNetWeights& weights() { return weights_; }

  // Number of completed training calls.
  int trained_paths() const { return trained_paths_; }
  void mark_trained() { ++trained_paths_; }

  double forward(const ParamVector& theta) const;
  // inputs: input_dim x batch, one parameter vector per column.
  Eigen::VectorXd forward_batch(const Eigen::MatrixXd& inputs) const;
  // Mean squared error of the batch and its gradient with respect to every weight.
  double mse_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                          CNetWeights* grad) const;

 private:
  CNetArchitecture arch_;
  CNetWeights weights_;
  int trained_paths_ = 0;
};

// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); deterministic per seed.
CNetModel cnet_init(const CircuitSpec& spec, std::uint64_t seed, CNetInput input = CNetInput::raw);
CNetModel cnet_init(const CNetArchitecture& arch, std::uint64_t seed);

double cnet_forward(const CNetModel& model, const ParamVector& theta);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs_per_path = 5;
  double momentum = 0.0;
  std::uint64_t shuffle_seed = 0;
};

void validate(const TrainConfig& cfg);

struct TrainSummary {
  double initial_mse = 0.0;
  double final_mse = 0.0;
  std::vector<double> epoch_mse;  // full-dataset MSE after each epoch
};

// Mini-batch SGD on (theta, loss) pairs.
TrainSummary cnet_train(CNetModel& model, const std::vector<ParamVector>& inputs,
                        const std::vector<double>& targets, const TrainConfig& cfg);
TrainSummary cnet_train_path(CNetModel& model, const PathTranscript& transcript,
                             const TrainConfig& cfg);

// (true_loss - prediction)^2.
double cnet_estimation_error(const CNetModel& model, const ParamVector& theta, double true_loss);
double cnet_mse(const CNetModel& model, const std::vector<ParamVector>& inputs,
                const std::vector<double>& targets);

// JSON checkpoint: {"format": "symlearn-cnet", "version": 1, "architecture": {...}, "weights": {...}}.
std::string cnet_to_json(const CNetModel& model);
CNetModel cnet_from_json(const std::string& text);

}  // namespace symlearn

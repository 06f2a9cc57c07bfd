#pragma once

// Block-depth parameterized circuits: a rotation layer, then d blocks of
// (CNOT entangling layer, rotation layer). Parameters are laid out
// layer-major, qubit-major, axis-minor: index = (layer * L + qubit) * 3 + axis.

#include "symlearn/qsim.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace symlearn {

enum class EntanglerFamily { all_pairs, nearest_neighbor };

std::string to_string(EntanglerFamily family);
EntanglerFamily entangler_family_from_string(const std::string& name);

struct CircuitSpec {
  int num_qubits = 1;
  int block_depth = 0;
  EntanglerFamily family = EntanglerFamily::nearest_neighbor;

  friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;
};

// Throws ArgumentError / ResourceError for an unusable spec.
void validate(const CircuitSpec& spec);

// 3 * L * (d + 1).
int param_dim(const CircuitSpec& spec);

class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(Eigen::VectorXd values) : values_(std::move(values)) {}
  static ParamVector zeros(const CircuitSpec& spec);

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }

  EulerAngles angles(int num_qubits, int layer, int qubit) const;
  void set_angles(int num_qubits, int layer, int qubit, const EulerAngles& angles);

  // Copy with every entry reduced to [0, 2pi). Reporting only.
  ParamVector wrapped() const;

 private:
  Eigen::VectorXd values_;
};

// Throws ArgumentError if theta does not match the circuit shape or has non-finite entries.
void check_params(const CircuitSpec& spec, const ParamVector& theta);

// i.i.d. Unif[0, 2pi) entries.
ParamVector random_params(const CircuitSpec& spec, Rng& rng);

// CNOT (control, target) pairs of one entangling layer, in application order.
std::vector<std::pair<int, int>> entangler_pairs(const CircuitSpec& spec);

Circuit ansatz_circuit(const CircuitSpec& spec, const ParamVector& theta);
StateVector apply_ansatz(StateVector state, const CircuitSpec& spec, const ParamVector& theta);
Eigen::MatrixXcd ansatz_matrix(const CircuitSpec& spec, const ParamVector& theta,
                               int cap = kDefaultMatrixQubitCap);

}  // namespace symlearn

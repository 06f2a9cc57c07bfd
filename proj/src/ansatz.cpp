#include "symlearn/ansatz.hpp"

#include "symlearn/errors.hpp"

#include <cmath>
#include <numbers>

namespace symlearn {

std::string to_string(EntanglerFamily family) {
  return family == EntanglerFamily::all_pairs ? "all_pairs" : "nearest_neighbor";
}

EntanglerFamily entangler_family_from_string(const std::string& name) {
  if (name == "all_pairs") return EntanglerFamily::all_pairs;
  if (name == "nearest_neighbor") return EntanglerFamily::nearest_neighbor;
  throw ArgumentError("unknown entangler family '" + name + "'");
}

void validate(const CircuitSpec& spec) {
  if (spec.num_qubits < 1) throw ArgumentError("circuit needs at least one qubit");
  if (spec.num_qubits > kMaxStateQubits) {
    throw ResourceError("circuit on " + std::to_string(spec.num_qubits) +
                        " qubits exceeds the state-vector cap of " +
                        std::to_string(kMaxStateQubits));
  }
  if (spec.block_depth < 0) throw ArgumentError("block depth must be >= 0");
}

int param_dim(const CircuitSpec& spec) { return 3 * spec.num_qubits * (spec.block_depth + 1); }

ParamVector ParamVector::zeros(const CircuitSpec& spec) {
  return ParamVector(Eigen::VectorXd::Zero(param_dim(spec)));
}

EulerAngles ParamVector::angles(int num_qubits, int layer, int qubit) const {
  const Eigen::Index base = (static_cast<Eigen::Index>(layer) * num_qubits + qubit) * 3;
  return {values_[base], values_[base + 1], values_[base + 2]};
}

void ParamVector::set_angles(int num_qubits, int layer, int qubit, const EulerAngles& angles) {
  const Eigen::Index base = (static_cast<Eigen::Index>(layer) * num_qubits + qubit) * 3;
  values_[base] = angles.a;
  values_[base + 1] = angles.b;
  values_[base + 2] = angles.c;
}

ParamVector ParamVector::wrapped() const {
  constexpr double two_pi = 2 * std::numbers::pi;
  Eigen::VectorXd w = values_;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = std::fmod(w[i], two_pi);
    if (w[i] < 0) w[i] += two_pi;
    if (w[i] >= two_pi) w[i] = 0.0;
  }
  return ParamVector(std::move(w));
}

void check_params(const CircuitSpec& spec, const ParamVector& theta) {
  if (theta.size() != param_dim(spec)) {
    throw ArgumentError("parameter vector has " + std::to_string(theta.size()) +
                        " entries, circuit expects " + std::to_string(param_dim(spec)));
  }
  if (!theta.values().allFinite()) throw ArgumentError("parameter vector has non-finite entries");
}

ParamVector random_params(const CircuitSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 2 * std::numbers::pi);
  Eigen::VectorXd v(param_dim(spec));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unif(rng);
  return ParamVector(std::move(v));
}

std::vector<std::pair<int, int>> entangler_pairs(const CircuitSpec& spec) {
  std::vector<std::pair<int, int>> pairs;
  const int n = spec.num_qubits;
  if (spec.family == EntanglerFamily::all_pairs) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else {
    for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  }
  return pairs;
}

Circuit ansatz_circuit(const CircuitSpec& spec, const ParamVector& theta) {
  validate(spec);
  check_params(spec, theta);
  const int n = spec.num_qubits;
  const auto pairs = entangler_pairs(spec);
  Circuit circuit;
  circuit.reserve(static_cast<std::size_t>((spec.block_depth + 1) * n) +
                  static_cast<std::size_t>(spec.block_depth) * pairs.size());
  for (int layer = 0; layer <= spec.block_depth; ++layer) {
    if (layer > 0) {
      for (const auto& [c, t] : pairs) circuit.push_back(Gate::cnot(c, t));
    }
    for (int q = 0; q < n; ++q) {
      circuit.push_back(Gate::single(q, rotation_matrix(theta.angles(n, layer, q))));
    }
  }
  return circuit;
}

StateVector apply_ansatz(StateVector state, const CircuitSpec& spec, const ParamVector& theta) {
  if (state.num_qubits() != spec.num_qubits) throw ArgumentError("state and circuit sizes differ");
  apply_circuit(state, ansatz_circuit(spec, theta));
  return state;
}

Eigen::MatrixXcd ansatz_matrix(const CircuitSpec& spec, const ParamVector& theta, int cap) {
  const Circuit circuit = ansatz_circuit(spec, theta);
  return circuit_to_matrix([&](StateVector& s) { apply_circuit(s, circuit); }, spec.num_qubits,
                           cap);
}

}  // namespace symlearn

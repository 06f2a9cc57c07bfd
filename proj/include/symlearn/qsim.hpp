#pragma once

// Dense state-vector simulation.
//
// Basis index convention: qubit 0 is the most significant bit, so on L qubits
// the basis state |b_0 b_1 ... b_{L-1}> has index sum_k b_k 2^{L-1-k}. With
// this convention the 7-site bitstring 1010101 is index 85.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace symlearn {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

// Independent child seed for stream `stream` (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr int kMaxStateQubits = 20;
inline constexpr int kDefaultMatrixQubitCap = 10;

// ZYZ Euler angles: R(a, b, c) = Rz(c) * Ry(b) * Rz(a).
struct EulerAngles {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  friend bool operator==(const EulerAngles&, const EulerAngles&) = default;
};

Eigen::Matrix2cd rz_matrix(double angle);
Eigen::Matrix2cd ry_matrix(double angle);
Eigen::Matrix2cd rotation_matrix(const EulerAngles& angles);

// Inverse of rotation_matrix up to a global phase. b is returned in [0, pi].
EulerAngles euler_from_matrix(const Eigen::Matrix2cd& u);

class StateVector {
 public:
  // |0...0> on num_qubits qubits.
  explicit StateVector(int num_qubits);

  static StateVector basis_state(int num_qubits, std::uint64_t index);
  // Takes ownership of amps and normalizes them; the length must be a power of two.
  static StateVector from_amplitudes(Eigen::VectorXcd amps);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex amplitude(std::uint64_t index) const { return amps_[static_cast<Eigen::Index>(index)]; }

  void apply_1q(int qubit, const Eigen::Matrix2cd& m);
  void apply_rotation(int qubit, const EulerAngles& angles);
  void apply_x(int qubit);
  void apply_cnot(int control, int target);
  void apply_cz(int a, int b);
  // Projects qubit onto |outcome> and renormalizes. Returns the pre-projection
  // probability of that outcome.
  double project(int qubit, int outcome);

  double norm_squared() const { return amps_.squaredNorm(); }
  void normalize();
  std::vector<double> probabilities() const;

 private:
  StateVector(int num_qubits, Eigen::VectorXcd amps);
  void check_qubit(int qubit) const;
  std::uint64_t bit(int qubit) const { return std::uint64_t{1} << (num_qubits_ - 1 - qubit); }

  int num_qubits_;
  Eigen::VectorXcd amps_;
};

// Per-qubit rotation applied before a computational-basis measurement.
struct MeasurementBasis {
  std::vector<EulerAngles> rotations;
  std::string label;

  static MeasurementBasis z(int num_qubits);
  static MeasurementBasis x(int num_qubits);
  int num_qubits() const { return static_cast<int>(rotations.size()); }
};

struct EmpiricalDistribution {
  int num_qubits = 0;
  std::map<std::uint64_t, std::int64_t> counts;
  std::int64_t shots = 0;
  std::string basis;

  std::int64_t count(std::uint64_t index) const;
  double frequency(std::uint64_t index) const;
  std::string bitstring(std::uint64_t index) const;
};

std::string to_bitstring(std::uint64_t index, int num_qubits);

StateVector apply_single_qubit_rotation(StateVector state, int qubit, const EulerAngles& angles);
StateVector apply_cnot(StateVector state, int control, int target);

// <a|b>.
Complex inner_product(const StateVector& a, const StateVector& b);

// Rotates a copy of the state into the basis and returns exact Born probabilities.
std::vector<double> basis_probabilities(const StateVector& state, const MeasurementBasis& basis);

// Multinomial draw of `shots` outcomes from a probability vector.
std::map<std::uint64_t, std::int64_t> draw_counts(const std::vector<double>& probs,
                                                  std::int64_t shots, Rng& rng);

EmpiricalDistribution sample_measurements(const StateVector& state, const MeasurementBasis& basis,
                                          std::int64_t shots, Rng& rng);

// Von Neumann entropy (nats) of qubits [0, cut).
double entanglement_entropy(const StateVector& state, int cut);

using StateProcedure = std::function<void(StateVector&)>;

// Column j is the image of |j>.
Eigen::MatrixXcd circuit_to_matrix(const StateProcedure& apply, int num_qubits,
                                   int cap = kDefaultMatrixQubitCap);

// max |U^dagger U - I|.
double unitarity_error(const Eigen::MatrixXcd& u);

// Elementary gate of a gate-list circuit.
struct Gate {
  enum class Kind { single, cnot, cz };

  Kind kind = Kind::single;
  int q0 = 0;  // target for single, control for cnot
  int q1 = -1;
  Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Identity();

  static Gate single(int qubit, const Eigen::Matrix2cd& m) { return {Kind::single, qubit, -1, m}; }
  static Gate cnot(int control, int target) {
    return {Kind::cnot, control, target, Eigen::Matrix2cd::Identity()};
  }
  static Gate cz(int a, int b) { return {Kind::cz, a, b, Eigen::Matrix2cd::Identity()}; }

  // Qubits the gate acts on.
  std::vector<int> targets() const;
};

using Circuit = std::vector<Gate>;

void apply_gate(StateVector& state, const Gate& gate);
void apply_circuit(StateVector& state, const Circuit& circuit);

}  // namespace symlearn

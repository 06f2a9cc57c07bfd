#include "symlearn/qsim.hpp"

#include "symlearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace symlearn {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Eigen::Matrix2cd rz_matrix(double angle) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(-kI * (angle / 2));
  m(1, 1) = std::exp(kI * (angle / 2));
  return m;
}

Eigen::Matrix2cd ry_matrix(double angle) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  Eigen::Matrix2cd m;
  m << c, -s, s, c;
  return m;
}

Eigen::Matrix2cd rotation_matrix(const EulerAngles& angles) {
  // Closed form of Rz(c) Ry(b) Rz(a).
  const double cb = std::cos(angles.b / 2);
  const double sb = std::sin(angles.b / 2);
  const double sum = (angles.a + angles.c) / 2;
  const double diff = (angles.a - angles.c) / 2;
  Eigen::Matrix2cd m;
  m(0, 0) = cb * std::exp(-kI * sum);
  m(0, 1) = -sb * std::exp(kI * diff);
  m(1, 0) = sb * std::exp(-kI * diff);
  m(1, 1) = cb * std::exp(kI * sum);
  return m;
}

EulerAngles euler_from_matrix(const Eigen::Matrix2cd& u) {
  const Complex det = u.determinant();
  const Eigen::Matrix2cd v = u / std::sqrt(det);
  EulerAngles out;
  out.b = 2.0 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
  // v11 = cos(b/2) e^{i(a+c)/2}, v10 = sin(b/2) e^{-i(a-c)/2}.
  const double sum = std::abs(v(1, 1)) > 1e-12 ? 2.0 * std::arg(v(1, 1)) : 0.0;
  const double diff = std::abs(v(1, 0)) > 1e-12 ? -2.0 * std::arg(v(1, 0)) : 0.0;
  out.a = (sum + diff) / 2;
  out.c = (sum - diff) / 2;
  return out;
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxStateQubits) {
    throw ResourceError("state vector supports 1.." + std::to_string(kMaxStateQubits) +
                        " qubits, got " + std::to_string(num_qubits));
  }
  amps_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
  amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, Eigen::VectorXcd amps)
    : num_qubits_(num_qubits), amps_(std::move(amps)) {}

StateVector StateVector::basis_state(int num_qubits, std::uint64_t index) {
  StateVector s(num_qubits);
  if (index >= s.dim()) throw IndexError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(Eigen::VectorXcd amps) {
  const auto n = static_cast<std::size_t>(amps.size());
  if (!is_power_of_two(n)) throw ArgumentError("amplitude count must be a power of two");
  int qubits = 0;
  while ((std::size_t{1} << qubits) < n) ++qubits;
  if (qubits < 1 || qubits > kMaxStateQubits) throw ResourceError("unsupported register size");
  const double norm = amps.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("cannot normalize amplitudes");
  amps /= norm;
  return StateVector(qubits, std::move(amps));
}

void StateVector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= num_qubits_) {
    throw IndexError("qubit " + std::to_string(qubit) + " out of range for " +
                     std::to_string(num_qubits_) + " qubits");
  }
}

void StateVector::apply_1q(int qubit, const Eigen::Matrix2cd& m) {
  check_qubit(qubit);
  const std::uint64_t stride = bit(qubit);
  const std::uint64_t n = dim();
  const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  Complex* a = amps_.data();
  for (std::uint64_t base = 0; base < n; base += 2 * stride) {
    for (std::uint64_t i = base; i < base + stride; ++i) {
      const Complex x0 = a[i];
      const Complex x1 = a[i + stride];
      a[i] = m00 * x0 + m01 * x1;
      a[i + stride] = m10 * x0 + m11 * x1;
    }
  }
}

void StateVector::apply_rotation(int qubit, const EulerAngles& angles) {
  apply_1q(qubit, rotation_matrix(angles));
}

void StateVector::apply_x(int qubit) {
  check_qubit(qubit);
  const std::uint64_t stride = bit(qubit);
  const std::uint64_t n = dim();
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & stride) == 0) std::swap(amps_[static_cast<Eigen::Index>(i)],
                                     amps_[static_cast<Eigen::Index>(i | stride)]);
  }
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw ArgumentError("CNOT control and target must differ");
  const std::uint64_t cbit = bit(control);
  const std::uint64_t tbit = bit(target);
  const std::uint64_t n = dim();
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & cbit) != 0 && (i & tbit) == 0) {
      std::swap(amps_[static_cast<Eigen::Index>(i)], amps_[static_cast<Eigen::Index>(i | tbit)]);
    }
  }
}

void StateVector::apply_cz(int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw ArgumentError("CZ qubits must differ");
  const std::uint64_t mask = bit(a) | bit(b);
  const std::uint64_t n = dim();
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & mask) == mask) amps_[static_cast<Eigen::Index>(i)] = -amps_[static_cast<Eigen::Index>(i)];
  }
}

double StateVector::project(int qubit, int outcome) {
  check_qubit(qubit);
  const std::uint64_t b = bit(qubit);
  const std::uint64_t n = dim();
  double p = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const bool one = (i & b) != 0;
    if (one == (outcome == 1)) {
      p += std::norm(amps_[static_cast<Eigen::Index>(i)]);
    } else {
      amps_[static_cast<Eigen::Index>(i)] = 0.0;
    }
  }
  if (p <= 0.0) throw NumericalError("projection onto a zero-probability outcome");
  amps_ /= std::sqrt(p);
  return p;
}

void StateVector::normalize() {
  const double norm = amps_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("cannot normalize state");
  amps_ /= norm;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(dim());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amps_[static_cast<Eigen::Index>(i)]);
  return p;
}

MeasurementBasis MeasurementBasis::z(int num_qubits) {
  return {std::vector<EulerAngles>(static_cast<std::size_t>(num_qubits)), "z"};
}

MeasurementBasis MeasurementBasis::x(int num_qubits) {
  // Ry(-pi/2) maps |+> to |0> and |-> to |1>.
  return {std::vector<EulerAngles>(static_cast<std::size_t>(num_qubits),
                                   EulerAngles{0.0, -std::numbers::pi / 2, 0.0}),
          "x"};
}

std::int64_t EmpiricalDistribution::count(std::uint64_t index) const {
  const auto it = counts.find(index);
  return it == counts.end() ? 0 : it->second;
}

double EmpiricalDistribution::frequency(std::uint64_t index) const {
  return shots > 0 ? static_cast<double>(count(index)) / static_cast<double>(shots) : 0.0;
}

std::string EmpiricalDistribution::bitstring(std::uint64_t index) const {
  return to_bitstring(index, num_qubits);
}

std::string to_bitstring(std::uint64_t index, int num_qubits) {
  std::string s(static_cast<std::size_t>(num_qubits), '0');
  for (int q = 0; q < num_qubits; ++q) {
    if ((index >> (num_qubits - 1 - q)) & 1U) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

StateVector apply_single_qubit_rotation(StateVector state, int qubit, const EulerAngles& angles) {
  if (!std::isfinite(angles.a) || !std::isfinite(angles.b) || !std::isfinite(angles.c)) {
    throw ArgumentError("rotation angles must be finite");
  }
  state.apply_rotation(qubit, angles);
  return state;
}

StateVector apply_cnot(StateVector state, int control, int target) {
  state.apply_cnot(control, target);
  return state;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) throw ArgumentError("inner product of mismatched registers");
  return a.amplitudes().dot(b.amplitudes());  // Eigen conjugates the left operand
}

std::vector<double> basis_probabilities(const StateVector& state, const MeasurementBasis& basis) {
  if (basis.num_qubits() != state.num_qubits()) throw ArgumentError("basis size mismatch");
  StateVector rotated = state;
  for (int q = 0; q < state.num_qubits(); ++q) {
    const EulerAngles& r = basis.rotations[static_cast<std::size_t>(q)];
    if (r.a != 0.0 || r.b != 0.0 || r.c != 0.0) rotated.apply_rotation(q, r);
  }
  return rotated.probabilities();
}

std::map<std::uint64_t, std::int64_t> draw_counts(const std::vector<double>& probs,
                                                  std::int64_t shots, Rng& rng) {
  if (shots < 1) throw ArgumentError("shots must be >= 1");
  std::map<std::uint64_t, std::int64_t> counts;
  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += std::max(p, 0.0);
  std::int64_t remaining = shots;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_nonzero = i;
  }
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    const double p = std::max(probs[i], 0.0);
    if (p <= 0.0) continue;
    std::int64_t k = remaining;
    if (i != last_nonzero) {
      const double frac = std::clamp(p / remaining_mass, 0.0, 1.0);
      std::binomial_distribution<std::int64_t> binom(remaining, frac);
      k = binom(rng);
    }
    if (k > 0) counts[i] = k;
    remaining -= k;
    remaining_mass -= p;
  }
  return counts;
}

EmpiricalDistribution sample_measurements(const StateVector& state, const MeasurementBasis& basis,
                                          std::int64_t shots, Rng& rng) {
  if (shots < 1) throw ArgumentError("shots must be >= 1");
  EmpiricalDistribution out;
  out.num_qubits = state.num_qubits();
  out.shots = shots;
  out.basis = basis.label;
  out.counts = draw_counts(basis_probabilities(state, basis), shots, rng);
  return out;
}

double entanglement_entropy(const StateVector& state, int cut) {
  const int n = state.num_qubits();
  if (cut < 1 || cut >= n) throw ArgumentError("entropy cut must satisfy 1 <= cut < L");
  const Eigen::Index rows = Eigen::Index{1} << (n - cut);
  const Eigen::Index cols = Eigen::Index{1} << cut;
  // Column-major view: element (b, a) = amps[a * rows + b], a indexes subsystem A.
  const Eigen::Map<const Eigen::MatrixXcd> m(state.amplitudes().data(), rows, cols);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double lambda = svd.singularValues()[i] * svd.singularValues()[i];
    if (lambda > 1e-300) s -= lambda * std::log(lambda);
  }
  return std::max(s, 0.0);
}

Eigen::MatrixXcd circuit_to_matrix(const StateProcedure& apply, int num_qubits, int cap) {
  if (num_qubits > cap) {
    throw ResourceError("dense matrix requested for " + std::to_string(num_qubits) +
                        " qubits; cap is " + std::to_string(cap));
  }
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    StateVector s = StateVector::basis_state(num_qubits, static_cast<std::uint64_t>(j));
    apply(s);
    u.col(j) = s.amplitudes();
  }
  return u;
}

double unitarity_error(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd g = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

std::vector<int> Gate::targets() const {
  if (kind == Kind::single) return {q0};
  return {q0, q1};
}

void apply_gate(StateVector& state, const Gate& gate) {
  switch (gate.kind) {
    case Gate::Kind::single:
      state.apply_1q(gate.q0, gate.matrix);
      break;
    case Gate::Kind::cnot:
      state.apply_cnot(gate.q0, gate.q1);
      break;
    case Gate::Kind::cz:
      state.apply_cz(gate.q0, gate.q1);
      break;
  }
}

void apply_circuit(StateVector& state, const Circuit& circuit) {
  for (const Gate& g : circuit) apply_gate(state, g);
}

}  // namespace symlearn

#pragma once

// Symmetry losses. For a candidate unitary U = C(theta):
//   overlap loss  (1 - |<psi|U|psi>|^2)^2, exact or via a simulated SWAP test;
//   QKL loss      sum over measurement bases of KL(P_psi || P_{U psi}).

#include "symlearn/ansatz.hpp"
#include "symlearn/qsim.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace symlearn {

enum class LossMode {
  exact_overlap,
  swap_test,
  qkl,        // shot-based, Laplace-smoothed
  qkl_exact,  // exact Born probabilities (infinite-shot limit)
};

std::string to_string(LossMode mode);
LossMode loss_mode_from_string(const std::string& name);
inline bool is_qkl(LossMode m) { return m == LossMode::qkl || m == LossMode::qkl_exact; }

struct LossConfig {
  LossMode mode = LossMode::exact_overlap;
  std::int64_t shots = 10000;
  // QKL bases. When empty the learner fills them with select_bases.
  std::vector<MeasurementBasis> bases;
  double smoothing = 1.0;
};

void validate(const LossConfig& cfg);

struct OverlapEstimate {
  double value = 0.0;  // clamped to [0, 1]
  double std_error = 0.0;
  std::int64_t shots_used = 0;
};

// |<psi|U|psi>|^2.
double overlap_squared(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta);
// (1 - overlap)^2.
inline double overlap_loss(double overlap) { return (1.0 - overlap) * (1.0 - overlap); }
double exact_overlap_loss(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta);

// Ancilla outcome drawn binomially with p0 = 1/2 + overlap/2; value = 2k/shots - 1.
OverlapEstimate swap_test_estimate(const StateVector& psi, const CircuitSpec& spec,
                                   const ParamVector& theta, std::int64_t shots, Rng& rng);
// Same estimator, but p0 is read off a simulated 2L+1 qubit register
// (ancilla, psi, U psi) after H, controlled-SWAP, H. Requires L <= 6.
OverlapEstimate swap_test_full_register(const StateVector& psi, const CircuitSpec& spec,
                                        const ParamVector& theta, std::int64_t shots, Rng& rng);
inline constexpr int kMaxFullSwapQubits = 6;

// Laplace-smoothed KL(P || Q) in nats over the union of observed outcomes.
double kl_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q,
                     double smoothing = 1.0);
// KL of exact distributions; q is floored so the result stays finite.
double exact_kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

double qkl_loss(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                const LossConfig& cfg, Rng& rng);
// Sum over bases of exact KL between Born distributions of psi and U psi.
double qkl_exact(const StateVector& psi, const StateVector& u_psi,
                 const std::vector<MeasurementBasis>& bases);
double qkl_exact(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                 const std::vector<MeasurementBasis>& bases);

// Size of the smallest outcome set holding at least `mass` of the empirical counts.
std::size_t support_size(const EmpiricalDistribution& dist, double mass = 0.999);
// Basis with every qubit additionally rotated by `angle` about y.
MeasurementBasis tilt_basis(const MeasurementBasis& basis, double angle);
inline constexpr double kBasisTilt = 0.31415926535897932385;  // pi / 10

// Sparser of {z, x} (tie -> z) and its pi/10 tilt.
std::vector<MeasurementBasis> select_bases(const StateVector& psi, std::int64_t shots, Rng& rng);

// Product basis with independent Haar-random single-qubit rotations.
MeasurementBasis random_product_basis(int num_qubits, Rng& rng);

// Mean QKL over n_bases random product bases. shots == 0 uses exact probabilities.
double qkl_cross_validate(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                          int n_bases, std::int64_t shots, Rng& rng);

// Loss value for one parameter vector under cfg. Sampled modes draw from rng.
double evaluate_loss(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                     const LossConfig& cfg, Rng& rng);

}  // namespace symlearn

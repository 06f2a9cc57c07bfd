#include "symlearn/lossfn.hpp"

#include "symlearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace symlearn {

std::string to_string(LossMode mode) {
  switch (mode) {
    case LossMode::exact_overlap: return "exact_overlap";
    case LossMode::swap_test: return "swap_test";
    case LossMode::qkl: return "qkl";
    case LossMode::qkl_exact: return "qkl_exact";
  }
  return "unknown";
}

LossMode loss_mode_from_string(const std::string& name) {
  for (auto m : {LossMode::exact_overlap, LossMode::swap_test, LossMode::qkl, LossMode::qkl_exact}) {
    if (to_string(m) == name) return m;
  }
  throw ArgumentError("unknown loss mode '" + name + "'");
}

void validate(const LossConfig& cfg) {
  if ((cfg.mode == LossMode::swap_test || cfg.mode == LossMode::qkl) && cfg.shots < 1) {
    throw ArgumentError("sampled loss modes need shots >= 1");
  }
  if (!(cfg.smoothing > 0)) throw ArgumentError("smoothing must be positive");
}

double overlap_squared(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta) {
  return std::norm(inner_product(psi, apply_ansatz(psi, spec, theta)));
}

double exact_overlap_loss(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta) {
  return overlap_loss(std::min(1.0, overlap_squared(psi, spec, theta)));
}

namespace {

OverlapEstimate estimate_from_p0(double p0, std::int64_t shots, Rng& rng) {
  if (shots < 1) throw ArgumentError("shots must be >= 1");
  p0 = std::clamp(p0, 0.0, 1.0);
  std::binomial_distribution<std::int64_t> binom(shots, p0);
  const std::int64_t k = binom(rng);
  OverlapEstimate est;
  est.value = std::clamp(2.0 * static_cast<double>(k) / static_cast<double>(shots) - 1.0, 0.0, 1.0);
  est.std_error = 2.0 * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(shots));
  est.shots_used = shots;
  return est;
}

}  // namespace

OverlapEstimate swap_test_estimate(const StateVector& psi, const CircuitSpec& spec,
                                   const ParamVector& theta, std::int64_t shots, Rng& rng) {
  const double overlap = std::min(1.0, overlap_squared(psi, spec, theta));
  return estimate_from_p0(0.5 + 0.5 * overlap, shots, rng);
}

OverlapEstimate swap_test_full_register(const StateVector& psi, const CircuitSpec& spec,
                                        const ParamVector& theta, std::int64_t shots, Rng& rng) {
  const int n = psi.num_qubits();
  if (n > kMaxFullSwapQubits) {
    throw ResourceError("full-register SWAP test is limited to " +
                        std::to_string(kMaxFullSwapQubits) + " qubits per register");
  }
  const StateVector phi = apply_ansatz(psi, spec, theta);
  const Eigen::Index reg = Eigen::Index{1} << n;
  // Index layout: ancilla (MSB) | register A | register B.
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(2 * reg * reg);
  for (Eigen::Index a = 0; a < reg; ++a) {
    for (Eigen::Index b = 0; b < reg; ++b) amps[a * reg + b] = psi.amplitudes()[a] * phi.amplitudes()[b];
  }
  StateVector s = StateVector::from_amplitudes(std::move(amps));
  const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
  }();
  s.apply_1q(0, h);
  // Controlled-SWAP of the two registers: permute the ancilla = 1 half.
  Eigen::VectorXcd swapped = s.amplitudes();
  const Eigen::Index half = reg * reg;
  for (Eigen::Index a = 0; a < reg; ++a) {
    for (Eigen::Index b = 0; b < reg; ++b) swapped[half + a * reg + b] = s.amplitudes()[half + b * reg + a];
  }
  s = StateVector::from_amplitudes(std::move(swapped));
  s.apply_1q(0, h);
  const double p0 = s.amplitudes().head(half).squaredNorm();
  return estimate_from_p0(p0, shots, rng);
}

double kl_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q,
                     double smoothing) {
  if (p.basis != q.basis) {
    throw ArgumentError("KL between distributions in different bases ('" + p.basis + "' vs '" +
                        q.basis + "')");
  }
  if (p.shots < 1 || q.shots < 1) throw ArgumentError("KL needs shots >= 1 on both sides");
  if (!(smoothing > 0)) throw ArgumentError("smoothing must be positive");
  std::set<std::uint64_t> support;
  for (const auto& [k, c] : p.counts) support.insert(k);
  for (const auto& [k, c] : q.counts) support.insert(k);
  const double s = static_cast<double>(support.size());
  const double pn = static_cast<double>(p.shots) + smoothing * s;
  const double qn = static_cast<double>(q.shots) + smoothing * s;
  double kl = 0.0;
  for (std::uint64_t x : support) {
    const double pt = (static_cast<double>(p.count(x)) + smoothing) / pn;
    const double qt = (static_cast<double>(q.count(x)) + smoothing) / qn;
    kl += pt * std::log(pt / qt);
  }
  return std::max(kl, 0.0);
}

double exact_kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ArgumentError("distribution sizes differ");
  constexpr double kFloor = 1e-30;
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double qi = std::max(q[i], kFloor);
    const double r = (qi - p[i]) / p[i];
    // log1p near q = p, plain log elsewhere
    kl -= p[i] * (std::abs(r) < 0.5 ? std::log1p(r) : std::log(qi / p[i]));
  }
  return std::max(kl, 0.0);
}

double qkl_loss(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                const LossConfig& cfg, Rng& rng) {
  if (!is_qkl(cfg.mode)) throw ArgumentError("qkl_loss called with a non-QKL loss config");
  if (cfg.bases.empty()) throw ArgumentError("QKL loss needs at least one basis");
  const StateVector u_psi = apply_ansatz(psi, spec, theta);
  if (cfg.mode == LossMode::qkl_exact) return qkl_exact(psi, u_psi, cfg.bases);
  double total = 0.0;
  for (const auto& basis : cfg.bases) {
    const auto p = sample_measurements(psi, basis, cfg.shots, rng);
    const auto q = sample_measurements(u_psi, basis, cfg.shots, rng);
    total += kl_divergence(p, q, cfg.smoothing);
  }
  return total;
}

double qkl_exact(const StateVector& psi, const StateVector& u_psi,
                 const std::vector<MeasurementBasis>& bases) {
  double total = 0.0;
  for (const auto& basis : bases) {
    total += exact_kl_divergence(basis_probabilities(psi, basis), basis_probabilities(u_psi, basis));
  }
  return total;
}

double qkl_exact(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                 const std::vector<MeasurementBasis>& bases) {
  return qkl_exact(psi, apply_ansatz(psi, spec, theta), bases);
}

std::size_t support_size(const EmpiricalDistribution& dist, double mass) {
  std::vector<std::int64_t> counts;
  counts.reserve(dist.counts.size());
  for (const auto& [k, c] : dist.counts) counts.push_back(c);
  std::sort(counts.begin(), counts.end(), std::greater<>());
  const double needed = mass * static_cast<double>(dist.shots);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::int64_t c : counts) {
    if (acc >= needed) break;
    acc += static_cast<double>(c);
    ++n;
  }
  return n;
}

MeasurementBasis tilt_basis(const MeasurementBasis& basis, double angle) {
  MeasurementBasis out = basis;
  const Eigen::Matrix2cd tilt = ry_matrix(angle);
  for (auto& r : out.rotations) r = euler_from_matrix(tilt * rotation_matrix(r));
  out.label = basis.label + "_tilt";
  return out;
}

std::vector<MeasurementBasis> select_bases(const StateVector& psi, std::int64_t shots, Rng& rng) {
  const int n = psi.num_qubits();
  const auto z = MeasurementBasis::z(n);
  const auto x = MeasurementBasis::x(n);
  const std::size_t z_support = support_size(sample_measurements(psi, z, shots, rng));
  const std::size_t x_support = support_size(sample_measurements(psi, x, shots, rng));
  const MeasurementBasis& first = x_support < z_support ? x : z;
  return {first, tilt_basis(first, kBasisTilt)};
}

MeasurementBasis random_product_basis(int num_qubits, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MeasurementBasis basis;
  basis.label = "random";
  for (int q = 0; q < num_qubits; ++q) {
    // Haar measure in ZYZ coordinates: cos(b) uniform on [-1, 1].
    const double a = 2 * std::numbers::pi * unif(rng);
    const double b = std::acos(1.0 - 2.0 * unif(rng));
    const double c = 2 * std::numbers::pi * unif(rng);
    basis.rotations.push_back({a, b, c});
  }
  return basis;
}

double qkl_cross_validate(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                          int n_bases, std::int64_t shots, Rng& rng) {
  if (n_bases < 1) throw ArgumentError("cross-validation needs n_bases >= 1");
  const StateVector u_psi = apply_ansatz(psi, spec, theta);
  double total = 0.0;
  for (int i = 0; i < n_bases; ++i) {
    auto basis = random_product_basis(psi.num_qubits(), rng);
    if (shots == 0) {
      total += qkl_exact(psi, u_psi, {basis});
    } else {
      const auto p = sample_measurements(psi, basis, shots, rng);
      const auto q = sample_measurements(u_psi, basis, shots, rng);
      total += kl_divergence(p, q, 1.0);
    }
  }
  return total / n_bases;
}

double evaluate_loss(const StateVector& psi, const CircuitSpec& spec, const ParamVector& theta,
                     const LossConfig& cfg, Rng& rng) {
  switch (cfg.mode) {
    case LossMode::exact_overlap:
      return exact_overlap_loss(psi, spec, theta);
    case LossMode::swap_test:
      return overlap_loss(swap_test_estimate(psi, spec, theta, cfg.shots, rng).value);
    case LossMode::qkl:
    case LossMode::qkl_exact:
      return qkl_loss(psi, spec, theta, cfg, rng);
  }
  throw ArgumentError("unknown loss mode");
}

}  // namespace symlearn

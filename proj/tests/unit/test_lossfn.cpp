#include "oracles.hpp"

#include "symlearn/errors.hpp"
#include "symlearn/lossfn.hpp"
#include "symlearn/statelib.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace symlearn;

namespace {

// theta with R = X (up to phase) on `qubit` and identity elsewhere, d = 0.
ParamVector x_on(const CircuitSpec& spec, int qubit) {
  ParamVector p = ParamVector::zeros(spec);
  p.set_angles(spec.num_qubits, 0, qubit, {0, std::numbers::pi, 0});
  return p;
}

EmpiricalDistribution dist(std::map<std::uint64_t, std::int64_t> counts, int n) {
  EmpiricalDistribution d;
  d.num_qubits = n;
  d.counts = std::move(counts);
  for (auto& [k, c] : d.counts) d.shots += c;
  d.basis = "z";
  return d;
}

}  // namespace

TEST(Loss, OverlapMatchesFrozenNumpyOracle) {
  const auto j = oracle::load_fixture("ghz_overlap_cases.json");
  for (const auto& c : j.at("cases")) {
    const int n = c.at("num_qubits");
    const CircuitSpec spec{n, c.at("block_depth").get<int>(), entangler_family_from_string(c.at("family"))};
    const auto th = c.at("theta").get<std::vector<double>>();
    const ParamVector theta(Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size())));
    const StateVector psi = prepare_ghz(n);
    EXPECT_NEAR(overlap_squared(psi, spec, theta), c.at("overlap").get<double>(), 1e-12);
    EXPECT_NEAR(exact_overlap_loss(psi, spec, theta), c.at("loss").get<double>(), 1e-12);
  }
}

TEST(Loss, IdentityAndBitFlipOnGhz) {
  const CircuitSpec spec{3, 0, EntanglerFamily::nearest_neighbor};
  const StateVector psi = prepare_ghz(3);
  EXPECT_NEAR(exact_overlap_loss(psi, spec, ParamVector::zeros(spec)), 0.0, 1e-15);
  EXPECT_NEAR(exact_overlap_loss(psi, spec, x_on(spec, 0)), 1.0, 1e-12);
}

TEST(Loss, SwapTestEstimator) {
  const CircuitSpec spec{3, 0, EntanglerFamily::nearest_neighbor};
  const StateVector psi = prepare_ghz(3);
  Rng rng(31);
  const auto id = swap_test_estimate(psi, spec, ParamVector::zeros(spec), 100, rng);
  EXPECT_DOUBLE_EQ(id.value, 1.0);
  const auto flip = swap_test_estimate(psi, spec, x_on(spec, 0), 10000, rng);
  EXPECT_LE(std::abs(flip.value), 5 * flip.std_error + 1e-12);
  EXPECT_GE(flip.value, 0.0);
}

TEST(Loss, SwapTestFullRegisterAgreesWithExactOverlap) {
  const CircuitSpec spec{2, 1, EntanglerFamily::nearest_neighbor};
  const StateVector psi = prepare_bell();
  Rng rng(32);
  const ParamVector theta = random_params(spec, rng);
  const double exact = overlap_squared(psi, spec, theta);
  const auto est = swap_test_full_register(psi, spec, theta, 200000, rng);
  EXPECT_NEAR(est.value, exact, 5 * est.std_error + 1e-9);
  EXPECT_THROW(swap_test_full_register(prepare_ghz(7), {7, 0, EntanglerFamily::nearest_neighbor},
                                       ParamVector::zeros({7, 0, EntanglerFamily::nearest_neighbor}), 10, rng),
               ResourceError);
}

TEST(Loss, SwapTestIsConsistentOnAverage) {
  const CircuitSpec spec{2, 0, EntanglerFamily::nearest_neighbor};
  const StateVector psi = prepare_bell();
  ParamVector theta = ParamVector::zeros(spec);
  theta.set_angles(2, 0, 0, {0.0, 0.8, 0.0});
  const double exact = overlap_squared(psi, spec, theta);
  Rng rng(33);
  double mean = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) mean += swap_test_estimate(psi, spec, theta, 1000000, rng).value;
  EXPECT_NEAR(mean / seeds, exact, 3e-4);
}

TEST(Loss, KlDivergenceHandFormula) {
  // P = {0:3, 1:1}, Q = {0:1, 2:3}, lambda = 1, support {0, 1, 2}:
  // p~ = (4, 2, 1)/7, q~ = (2, 1, 4)/7, KL = (4/7) ln 2.
  const auto p = dist({{0, 3}, {1, 1}}, 2);
  const auto q = dist({{0, 1}, {2, 3}}, 2);
  EXPECT_NEAR(kl_divergence(p, q, 1.0), 4.0 / 7.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(kl_divergence(p, p, 1.0), 0.0, 1e-15);
}

TEST(Loss, KlDivergenceIsNonNegative) {
  Rng rng(34);
  std::uniform_int_distribution<int> c(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::uint64_t, std::int64_t> a, b;
    for (std::uint64_t k = 0; k < 6; ++k) {
      if (int v = c(rng)) a[k] = v;
      if (int v = c(rng)) b[k] = v;
    }
    if (a.empty() || b.empty()) continue;
    EXPECT_GE(kl_divergence(dist(a, 3), dist(b, 3), 0.5), -1e-15);
  }
  std::vector<double> p = {0.5, 0.5, 0, 0}, q = {0, 0, 0.5, 0.5};
  EXPECT_TRUE(std::isfinite(exact_kl_divergence(p, q)));
  EXPECT_GE(exact_kl_divergence(p, q), 0.0);
}

TEST(Loss, QklOnIdentityAndBitFlip) {
  const CircuitSpec spec{3, 0, EntanglerFamily::nearest_neighbor};
  const StateVector psi = prepare_ghz(3);
  LossConfig cfg;
  cfg.mode = LossMode::qkl;
  cfg.shots = 10000;
  cfg.bases = {MeasurementBasis::z(3)};
  Rng rng(35);
  EXPECT_LE(qkl_loss(psi, spec, ParamVector::zeros(spec), cfg, rng), 0.01);
  EXPECT_GT(qkl_loss(psi, spec, x_on(spec, 0), cfg, rng), 1.0);
  EXPECT_NEAR(qkl_exact(psi, spec, ParamVector::zeros(spec), cfg.bases), 0.0, 1e-15);
}

TEST(Loss, SelectBasesPicksSparserBasisAndTilt) {
  Rng rng(36);
  const auto g = select_bases(prepare_ghz(3), 10000, rng);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].label, "z");
  StateVector plus(3);
  const Eigen::Matrix2cd h = (Eigen::Matrix2cd() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  for (int q = 0; q < 3; ++q) plus.apply_1q(q, h);
  EXPECT_EQ(select_bases(plus, 10000, rng)[0].label, "x");
  // The second basis is the first tilted by pi/10 about y on every qubit.
  const auto t = tilt_basis(g[0], kBasisTilt);
  for (int q = 0; q < 3; ++q) {
    EXPECT_LT((rotation_matrix(t.rotations[q]) - rotation_matrix(g[1].rotations[q])).cwiseAbs().maxCoeff(), 1e-12);
  }
  // With H = 0.5 sum S^z - J sum S^x S^x the J = 1 chain is z-sparse; J = 10 is x-sparse.
  EXPECT_EQ(select_bases(prepare_tfim_ground(4, 1.0), 100000, rng)[0].label, "z");
  EXPECT_EQ(select_bases(prepare_tfim_ground(4, 10.0), 100000, rng)[0].label, "x");
}

TEST(Loss, SupportSize) {
  const auto d = dist({{0, 990}, {1, 9}, {2, 1}}, 2);
  EXPECT_EQ(support_size(d, 0.99), 1u);
  EXPECT_EQ(support_size(d, 0.999), 2u);
}

TEST(Loss, CrossValidation) {
  const CircuitSpec spec{3, 0, EntanglerFamily::nearest_neighbor};
  const StateVector psi = prepare_ghz(3);
  Rng rng(37);
  EXPECT_NEAR(qkl_cross_validate(psi, spec, ParamVector::zeros(spec), 3, 0, rng), 0.0, 1e-14);
  EXPECT_LE(qkl_cross_validate(psi, spec, ParamVector::zeros(spec), 3, 10000, rng), 0.01);
  const MeasurementBasis b = random_product_basis(3, rng);
  EXPECT_EQ(b.num_qubits(), 3);
}

TEST(Loss, ConfigValidationAndModeNames) {
  LossConfig cfg;
  cfg.mode = LossMode::qkl;
  cfg.shots = 0;
  EXPECT_THROW(validate(cfg), ArgumentError);
  cfg.shots = 10;
  cfg.smoothing = 0;
  EXPECT_THROW(validate(cfg), ArgumentError);
  for (auto m : {LossMode::exact_overlap, LossMode::swap_test, LossMode::qkl, LossMode::qkl_exact}) {
    EXPECT_EQ(loss_mode_from_string(to_string(m)), m);
  }
  EXPECT_THROW(loss_mode_from_string("fidelity"), ArgumentError);
}

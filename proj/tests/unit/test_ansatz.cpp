#include "oracles.hpp"

#include "symlearn/ansatz.hpp"
#include "symlearn/errors.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace symlearn;

TEST(Ansatz, ParamDimension) {
  EXPECT_EQ(param_dim({3, 0, EntanglerFamily::nearest_neighbor}), 9);
  EXPECT_EQ(param_dim({4, 2, EntanglerFamily::all_pairs}), 36);
  EXPECT_EQ(param_dim({7, 3, EntanglerFamily::nearest_neighbor}), 84);
}

TEST(Ansatz, ParameterLayoutIsLayerQubitAxis) {
  const CircuitSpec spec{3, 1, EntanglerFamily::nearest_neighbor};
  ParamVector p = ParamVector::zeros(spec);
  p.set_angles(3, 1, 2, {0.1, 0.2, 0.3});
  EXPECT_DOUBLE_EQ(p[(1 * 3 + 2) * 3 + 0], 0.1);
  EXPECT_DOUBLE_EQ(p[(1 * 3 + 2) * 3 + 1], 0.2);
  EXPECT_DOUBLE_EQ(p[(1 * 3 + 2) * 3 + 2], 0.3);
  EXPECT_EQ(p.angles(3, 1, 2), (EulerAngles{0.1, 0.2, 0.3}));
}

TEST(Ansatz, EntanglerPairs) {
  using P = std::vector<std::pair<int, int>>;
  EXPECT_EQ(entangler_pairs({4, 1, EntanglerFamily::nearest_neighbor}), (P{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(entangler_pairs({3, 1, EntanglerFamily::all_pairs}), (P{{0, 1}, {0, 2}, {1, 2}}));
}

TEST(Ansatz, ZeroParametersAtDepthZeroGiveIdentity) {
  const CircuitSpec spec{3, 0, EntanglerFamily::nearest_neighbor};
  const Eigen::MatrixXcd u = ansatz_matrix(spec, ParamVector::zeros(spec));
  EXPECT_LT((u - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Ansatz, MatrixMatchesKroneckerOracle) {
  Rng rng(21);
  for (int n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 3; ++d) {
      for (auto fam : {EntanglerFamily::nearest_neighbor, EntanglerFamily::all_pairs}) {
        const CircuitSpec spec{n, d, fam};
        const ParamVector theta = random_params(spec, rng);
        const Eigen::MatrixXcd u = ansatz_matrix(spec, theta);
        const oracle::Mat ref = oracle::ansatz(n, d, theta.values(), fam == EntanglerFamily::all_pairs);
        EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n << " d=" << d;
        EXPECT_LT(unitarity_error(u), 1e-12);
      }
    }
  }
}

TEST(Ansatz, StateApplicationMatchesMatrix) {
  Rng rng(22);
  std::mt19937_64 vr(23);
  const CircuitSpec spec{4, 2, EntanglerFamily::nearest_neighbor};
  const ParamVector theta = random_params(spec, rng);
  const oracle::Vec v = oracle::random_state(4, vr);
  const StateVector out = apply_ansatz(StateVector::from_amplitudes(v), spec, theta);
  EXPECT_LT((out.amplitudes() - oracle::ansatz(4, 2, theta.values()) * v).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-12);
}

TEST(Ansatz, RandomParamsAreInRangeAndSeeded) {
  const CircuitSpec spec{5, 3, EntanglerFamily::nearest_neighbor};
  Rng a(1), b(1);
  const ParamVector pa = random_params(spec, a), pb = random_params(spec, b);
  EXPECT_EQ(pa.values(), pb.values());
  EXPECT_GE(pa.values().minCoeff(), 0.0);
  EXPECT_LT(pa.values().maxCoeff(), 2 * std::numbers::pi);
}

TEST(Ansatz, WrappedReducesToPrincipalRange) {
  ParamVector p(Eigen::VectorXd::LinSpaced(5, -10, 10));
  const ParamVector w = p.wrapped();
  for (int i = 0; i < w.size(); ++i) {
    EXPECT_GE(w[i], 0.0);
    EXPECT_LT(w[i], 2 * std::numbers::pi);
    EXPECT_NEAR(std::remainder(w[i] - p[i], 2 * std::numbers::pi), 0.0, 1e-12);
  }
}

TEST(Ansatz, ValidationErrors) {
  EXPECT_THROW(validate(CircuitSpec{0, 0, EntanglerFamily::nearest_neighbor}), ArgumentError);
  EXPECT_THROW(validate(CircuitSpec{3, -1, EntanglerFamily::nearest_neighbor}), ArgumentError);
  EXPECT_THROW(validate(CircuitSpec{50, 0, EntanglerFamily::nearest_neighbor}), ResourceError);
  const CircuitSpec spec{2, 0, EntanglerFamily::nearest_neighbor};
  EXPECT_THROW(check_params(spec, ParamVector(Eigen::VectorXd::Zero(5))), ArgumentError);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(6);
  bad[2] = std::nan("");
  EXPECT_THROW(check_params(spec, ParamVector(bad)), ArgumentError);
  EXPECT_THROW(ansatz_matrix({11, 0, EntanglerFamily::nearest_neighbor},
                             ParamVector::zeros({11, 0, EntanglerFamily::nearest_neighbor})),
               ResourceError);
  EXPECT_EQ(entangler_family_from_string("all_pairs"), EntanglerFamily::all_pairs);
  EXPECT_THROW(entangler_family_from_string("ring"), ArgumentError);
}

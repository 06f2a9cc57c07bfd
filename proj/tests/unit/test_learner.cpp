#include "symlearn/errors.hpp"
#include "symlearn/learner.hpp"
#include "symlearn/statelib.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace symlearn;

namespace {

const CircuitSpec kGhz3{3, 0, EntanglerFamily::nearest_neighbor};

LearnerConfig ghz3_config() {
  LearnerConfig cfg = default_learner_config(kGhz3);
  cfg.max_epochs = 4;
  return cfg;
}

Objective ghz3_loss() {
  return [psi = prepare_ghz(3)](const ParamVector& t) { return exact_overlap_loss(psi, kGhz3, t); };
}

Eigen::Matrix2cd pauli(char p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

std::vector<Eigen::Matrix2cd> factors(const std::string& s) {
  std::vector<Eigen::Matrix2cd> out;
  for (char c : s) out.push_back(pauli(c));
  return out;
}

// Knows the manifold of every path it has been shown and flags the current point as familiar
// when it lies on one of them.
class OracleRegularizer : public Regularizer {
 public:
  bool ready() const override { return !seen_.empty(); }
  double estimation_error(const ParamVector& theta, double) const override {
    const auto label = classify_ghz_d0_manifold(kGhz3, theta, 1e-2);
    for (auto l : seen_) {
      if (l == label) return 0.0;
    }
    return 1.0;
  }
  void learn_path(const PathTranscript& t) override {
    seen_.push_back(classify_ghz_d0_manifold(kGhz3, t.points.back().theta, 1e-2));
  }

 private:
  std::vector<ManifoldLabel> seen_;
};

class AlwaysFamiliar : public Regularizer {
 public:
  bool ready() const override { return true; }
  double estimation_error(const ParamVector&, double) const override { return 0.0; }
  void learn_path(const PathTranscript&) override {}
};

// Checks that training never happens while an epoch is running.
class TracingRegularizer : public Regularizer {
 public:
  explicit TracingRegularizer(const bool* in_epoch) : in_epoch_(in_epoch) {}
  bool ready() const override { return false; }
  double estimation_error(const ParamVector&, double) const override { return 1.0; }
  void learn_path(const PathTranscript&) override {
    ++trained;
    if (*in_epoch_) ++trained_inside_epoch;
  }
  int trained = 0;
  int trained_inside_epoch = 0;

 private:
  const bool* in_epoch_;
};

}  // namespace

TEST(Manifolds, ClassifyPauliProducts) {
  EXPECT_EQ(classify_ghz_d0_manifold(factors("XXX")), ManifoldLabel::m2_offdiagonal);
  EXPECT_EQ(classify_ghz_d0_manifold(factors("ZZI")), ManifoldLabel::m1_diagonal);
  EXPECT_EQ(classify_ghz_d0_manifold(factors("III")), ManifoldLabel::m1_diagonal);
  // anti-diagonal but the branch phases differ: i^3 vs (-i)^3
  EXPECT_EQ(classify_ghz_d0_manifold(factors("YYY")), ManifoldLabel::none);
  EXPECT_EQ(classify_ghz_d0_manifold(factors("ZII")), ManifoldLabel::none);
  EXPECT_EQ(classify_ghz_d0_manifold(factors("XIX")), ManifoldLabel::none);
}

TEST(Manifolds, ClassifyFromParametersAgreesWithLoss) {
  // Every symmetry of the 3-GHZ at d = 0 lies on M1 or M2.
  ParamVector t = ParamVector::zeros(kGhz3);
  // Ry(pi) Rz(pi) = -i X
  for (int q = 0; q < 3; ++q) t.set_angles(3, 0, q, {std::numbers::pi, std::numbers::pi, 0});
  EXPECT_NEAR(ghz3_loss()(t), 0.0, 1e-12);
  EXPECT_EQ(classify_ghz_d0_manifold(kGhz3, t), ManifoldLabel::m2_offdiagonal);
  EXPECT_THROW(classify_ghz_d0_manifold(CircuitSpec{3, 1, EntanglerFamily::nearest_neighbor},
                                        ParamVector::zeros({3, 1, EntanglerFamily::nearest_neighbor})),
               ArgumentError);
}

TEST(Learner, TauFromLabels) {
  using L = ManifoldLabel;
  EXPECT_DOUBLE_EQ(tau_from_labels({L::m1_diagonal, L::m2_offdiagonal, L::m1_diagonal, L::m2_offdiagonal}), 1.0);
  EXPECT_DOUBLE_EQ(tau_from_labels({L::m1_diagonal, L::m1_diagonal, L::m1_diagonal}), 2.0);
  EXPECT_DOUBLE_EQ(tau_from_labels({L::m1_diagonal, L::m1_diagonal, L::m1_diagonal, L::m2_offdiagonal, L::m2_offdiagonal}),
                   4.0);
  EXPECT_THROW(tau_from_labels({L::m1_diagonal}), ArgumentError);
}

TEST(Learner, NaiveRegularizedLoss) {
  const ParamVector a(Eigen::Vector2d(0, 0)), b(Eigen::Vector2d(3, 4));
  EXPECT_DOUBLE_EQ(naive_regularized_loss(0.5, b, {}, 1e-3), 0.5);
  EXPECT_NEAR(naive_regularized_loss(0.5, b, {a}, 1e-3), 0.5 + 1e-3 / 25, 1e-15);
  EXPECT_NEAR(naive_regularized_loss(0.5, b, {a, a}, 1e-3), 0.5 + 2e-3 / 25, 1e-15);
  EXPECT_DOUBLE_EQ(naive_regularized_loss(0.5, a, {a}, 1e-3), kNaiveCap);
}

TEST(Learner, ZeroEpochsGiveEmptyReport) {
  LearnerConfig cfg = ghz3_config();
  cfg.max_epochs = 0;
  const auto rep = learn_symmetries(prepare_ghz(3), cfg, 1);
  EXPECT_TRUE(rep.records.empty());
  EXPECT_TRUE(rep.epochs.empty());
}

TEST(Learner, FindsGhzSymmetriesReproducibly) {
  const LearnerConfig cfg = ghz3_config();
  const auto a = learn_symmetries(prepare_ghz(3), cfg, 99);
  const auto b = learn_symmetries(prepare_ghz(3), cfg, 99);
  ASSERT_EQ(a.records.size(), b.records.size());
  ASSERT_FALSE(a.records.empty());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].theta.values(), b.records[i].theta.values());
    EXPECT_LE(a.records[i].loss, cfg.symmetry_threshold);
    ASSERT_TRUE(a.records[i].matrix.has_value());
    EXPECT_LT(unitarity_error(*a.records[i].matrix), 1e-12);
  }
}

TEST(Learner, TrainingHappensOnlyBetweenEpochs) {
  LearnerConfig cfg = ghz3_config();
  cfg.regularizer = RegularizerKind::global;
  bool in_epoch = false;
  TracingRegularizer reg(&in_epoch);
  std::vector<LearnerEvent> events;
  const LearnerTracer tracer = [&](LearnerEvent e, int) {
    events.push_back(e);
    if (e == LearnerEvent::epoch_begin) in_epoch = true;
    if (e == LearnerEvent::epoch_end) in_epoch = false;
  };
  const auto rep = learn_with_objective(ghz3_loss(), cfg, &reg, 3, tracer);
  EXPECT_EQ(reg.trained, static_cast<int>(rep.records.size()));
  EXPECT_GT(reg.trained, 0);
  EXPECT_EQ(reg.trained_inside_epoch, 0);
  EXPECT_EQ(std::count(events.begin(), events.end(), LearnerEvent::regularizer_query), 0);
}

TEST(Learner, AlwaysFamiliarRegularizerStopsAfterStreak) {
  LearnerConfig cfg = ghz3_config();
  cfg.regularizer = RegularizerKind::global;
  cfg.max_epochs = 50;
  AlwaysFamiliar reg;
  const auto rep = learn_with_objective(ghz3_loss(), cfg, &reg, 4);
  EXPECT_TRUE(rep.terminated_by_redirects);
  EXPECT_EQ(rep.epochs.size(), 10u);
  EXPECT_TRUE(rep.records.empty());
  for (const auto& e : rep.epochs) {
    EXPECT_EQ(e.status, EpochStatus::redirected);
    EXPECT_EQ(e.iterations, cfg.query_period);
  }
}

TEST(Learner, UntrainedCNetNeverRedirects) {
  LearnerConfig cfg = ghz3_config();
  cfg.regularizer = RegularizerKind::global;
  cfg.max_epochs = 1;
  cfg.train.epochs_per_path = 1;
  CNetRegularizer reg(kGhz3, 5, cfg.train, CNetInput::periodic);
  EXPECT_FALSE(reg.ready());
  const auto rep = learn_with_objective(ghz3_loss(), cfg, &reg, 5);
  ASSERT_EQ(rep.epochs.size(), 1u);
  EXPECT_EQ(rep.epochs[0].redirects, 0);
  EXPECT_NE(rep.epochs[0].status, EpochStatus::redirected);
}

TEST(Learner, IdealRegularizerGivesTauOne) {
  LearnerConfig cfg = ghz3_config();
  cfg.regularizer = RegularizerKind::global;
  cfg.max_epochs = 40;
  cfg.consecutive_redirects_to_stop = 40;
  // Paths converge in under 200 iterations; query often enough to see every one.
  cfg.query_period = 10;
  const RegularizerFactory factory = [](std::uint64_t) { return std::make_unique<OracleRegularizer>(); };
  const auto tau = tau_global(ghz3_loss(), cfg, 10, 6, factory);
  EXPECT_EQ(tau.censored, 0);
  EXPECT_DOUBLE_EQ(tau.tau, 1.0);
}

TEST(Learner, PinnedObjectiveWithoutRegularizerIsCensored) {
  // The penalty on the Ry angles keeps every minimum on the diagonal manifold.
  const Objective base = ghz3_loss();
  const Objective pinned = [base](const ParamVector& t) {
    double pen = 0;
    for (int q = 0; q < 3; ++q) pen += std::pow(std::sin(t.angles(3, 0, q).b / 2), 2);
    return base(t) + pen;
  };
  LearnerConfig cfg = ghz3_config();
  cfg.max_epochs = 4;
  const auto tau = tau_global(pinned, cfg, 2, 7, {});
  EXPECT_EQ(tau.censored, 2);
  EXPECT_DOUBLE_EQ(tau.tau, 4.0);
  EXPECT_EQ(tau.m2_count, 0);
  EXPECT_GT(tau.m1_count, 0);
}

TEST(Learner, ConfigValidation) {
  LearnerConfig cfg = ghz3_config();
  cfg.max_epochs = -1;
  EXPECT_THROW(validate(cfg), ArgumentError);
  cfg = ghz3_config();
  cfg.noise.p_error = 0.1;
  EXPECT_THROW(validate(cfg), ArgumentError);
  cfg = ghz3_config();
  cfg.circuit.block_depth = 1;
  cfg.label_manifolds = true;
  EXPECT_THROW(validate(cfg), ArgumentError);
  EXPECT_EQ(regularizer_kind_from_string("local"), RegularizerKind::local);
  EXPECT_THROW(regularizer_kind_from_string("ridge"), ArgumentError);
  EXPECT_DOUBLE_EQ(default_symmetry_threshold(LossMode::qkl), 1e-2);
  EXPECT_DOUBLE_EQ(default_symmetry_threshold(LossMode::exact_overlap), 1e-3);
}

#include "bdcopy/metrics.hpp"
#include "bdcopy/oracle.hpp"
#include "bdcopy/random.hpp"
#include "bdcopy/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bdcopy;

namespace {

/// Label predictor that flips another predictor's answers.
struct Negated {
  OraclePtr inner;
  LabelVector classify(const PointMatrix& x) const {
    LabelVector out = inner->classify(x);
    for (auto& l : out) l = flip(l);
    return out;
  }
};

struct Fixed {
  LabelVector labels;
  LabelVector classify(const PointMatrix&) const { return labels; }
};

}  // namespace

TEST(Fidelity, SelfAndNegation) {
  const auto s = make_sphere_oracle(VectorXd::Zero(2), 0.5);
  const PointMatrix x = uniform_box(Region::cube(2, -1, 1), 5000, 1).points;
  EXPECT_EQ(empirical_fidelity(*s, *s, x).error, 0.0);
  const FidelityReport neg = empirical_fidelity(Negated{s}, *s, x);
  EXPECT_EQ(neg.error, 1.0);
  EXPECT_EQ(neg.mismatches, 5000);
  EXPECT_THROW(empirical_fidelity(*s, *s, PointMatrix(0, 2)), InvalidArgument);
}

TEST(Fidelity, CountsAndSymmetry) {
  const LabelVector a(10, Label::Positive);
  LabelVector b = a;
  b[1] = b[4] = b[7] = Label::Negative;
  const FidelityReport r = disagreement(a, b);
  EXPECT_EQ(r.mismatches, 3);
  EXPECT_EQ(r.n_eval, 10);
  EXPECT_DOUBLE_EQ(r.error, 0.3);
  EXPECT_EQ(disagreement(b, a), r);
  EXPECT_THROW(disagreement(a, LabelVector(3, Label::Positive)), InvalidArgument);
}

TEST(Accuracy, Fractions) {
  LabeledDataset test{PointMatrix::Zero(100, 1), LabelVector(100, Label::Positive)};
  EXPECT_EQ(accuracy(Fixed{test.labels}, test), 1.0);
  LabelVector flipped(100, Label::Negative);
  EXPECT_EQ(accuracy(Fixed{flipped}, test), 0.0);
  for (int i = 0; i < 93; ++i) flipped[i] = Label::Positive;
  EXPECT_DOUBLE_EQ(accuracy(Fixed{flipped}, test), 0.93);
  EXPECT_THROW(accuracy(Fixed{{}}, LabeledDataset{}), InvalidArgument);
  LabeledDataset bad = test;
  bad.labels[0] = static_cast<Label>(0);
  EXPECT_THROW(accuracy(Fixed{test.labels}, bad), InvalidArgument);
}

TEST(Accuracy, OwnPredictionsScoreOne) {
  const auto h = make_hyperplane_oracle((VectorXd(3) << 1, -2, 0.5).finished(), 0.1);
  const PointMatrix x = uniform_box(Region::cube(3, -1, 1), 500, 3).points;
  EXPECT_EQ(accuracy(*h, LabeledDataset{x, h->classify(x)}), 1.0);
}

TEST(DistanceError, Examples) {
  const auto r = distance_error_report((VectorXd(2) << 0.1, 0.3).finished(), (VectorXd(2) << 0.2, 0.2).finished());
  EXPECT_NEAR(r.mae, 0.1, 1e-15);
  EXPECT_NEAR(r.rmse, 0.1, 1e-15);
  EXPECT_EQ(r.n, 2);
  const auto z = distance_error_report(VectorXd::Ones(3), VectorXd::Ones(3));
  EXPECT_EQ(z.mae, 0.0);
  EXPECT_EQ(z.rmse, 0.0);
  const auto s = distance_error_report(VectorXd::Zero(2), (VectorXd(2) << 0, 2).finished());
  EXPECT_DOUBLE_EQ(s.mae, 1.0);
  EXPECT_DOUBLE_EQ(s.rmse, std::sqrt(2.0));
  EXPECT_THROW(distance_error_report(VectorXd(0), VectorXd(0)), InvalidArgument);
  EXPECT_THROW(distance_error_report(VectorXd::Zero(2), VectorXd::Zero(3)), InvalidArgument);
}

TEST(DistanceError, MaeNeverExceedsRmse) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(50));
    VectorXd p(n), t(n);
    for (Index i = 0; i < n; ++i) {
      p[i] = rng.normal() * 3;
      t[i] = rng.uniform(0, 2);
    }
    const auto r = distance_error_report(p, t);
    ASSERT_LE(r.mae, r.rmse * (1 + 1e-12));
    ASSERT_GE(r.mae, 0.0);
  }
}

TEST(RelativeDifference, Examples) {
  EXPECT_NEAR(*relative_difference(0.08, 0.10), -20.0, 1e-12);
  EXPECT_EQ(*relative_difference(0.1, 0.1), 0.0);
  EXPECT_NEAR(*relative_difference(0.15, 0.10), 50.0, 1e-12);
  EXPECT_FALSE(relative_difference(0.1, 0.0).has_value());
  EXPECT_FALSE(relative_difference(0.0, 0.0).has_value());
}

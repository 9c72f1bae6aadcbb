#include "bdcopy/oracle.hpp"
#include "bdcopy/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

using namespace bdcopy;

namespace {

PointMatrix rows(std::initializer_list<std::initializer_list<double>> values) {
  PointMatrix m(static_cast<Index>(values.size()), static_cast<Index>(values.begin()->size()));
  Index i = 0;
  for (const auto& r : values) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST(Hyperplane, LabelsAndBoundaryConvention) {
  const HyperplaneOracle h(vec({1, 0}), 0.0);
  const auto labels = h.classify(rows({{0.5, 3}, {-0.5, 3}, {0.0, -9}}));
  EXPECT_EQ(labels, (LabelVector{Label::Positive, Label::Negative, Label::Positive}));
}

TEST(Hyperplane, SignedDistanceIsNormalised) {
  const HyperplaneOracle h(vec({3, 4}), -5.0);
  EXPECT_DOUBLE_EQ(h.signed_distance(vec({3, 4})), (9.0 + 16.0 - 5.0) / 5.0);
  EXPECT_DOUBLE_EQ(h.signed_distance(vec({0, 0})), -1.0);
}

TEST(Hyperplane, LabelAgreesWithSignedDistanceSign) {
  const HyperplaneOracle h(vec({0.3, -1.2, 2.0}), 0.4);
  Rng rng(8);
  PointMatrix x(500, 3);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-2, 2);
  const auto labels = h.classify(x);
  for (Index i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(labels[static_cast<std::size_t>(i)], sign_label(h.signed_distance(x.row(i).transpose())));
  }
}

TEST(Hyperplane, RejectsDegenerateNormal) {
  EXPECT_THROW(HyperplaneOracle(VectorXd::Zero(2), 0.0), InvalidArgument);
  EXPECT_THROW(HyperplaneOracle(VectorXd(), 0.0), InvalidArgument);
}

TEST(Sphere, InsideIsPositive) {
  const SphereOracle s(vec({1, 1}), 0.5);
  const auto labels = s.classify(rows({{1, 1}, {1.5, 1}, {2, 2}}));
  EXPECT_EQ(labels, (LabelVector{Label::Positive, Label::Positive, Label::Negative}));
  EXPECT_DOUBLE_EQ(s.signed_distance(vec({1, 1})), 0.5);
  EXPECT_DOUBLE_EQ(s.signed_distance(vec({1, 3})), -1.5);
  EXPECT_THROW(SphereOracle(vec({0}), 0.0), InvalidArgument);
}

TEST(Constant, AlwaysSameLabel) {
  const ConstantOracle c(3, Label::Negative);
  const auto labels = c.classify(PointMatrix::Random(4, 3));
  EXPECT_EQ(labels, LabelVector(4, Label::Negative));
}

TEST(Oracle, EmptyBatchAndDimensionCheck) {
  const HyperplaneOracle h(vec({1, 0}), 0.0);
  EXPECT_TRUE(h.classify(PointMatrix(0, 2)).empty());
  EXPECT_THROW(h.classify(PointMatrix::Zero(2, 3)), InvalidArgument);
  EXPECT_EQ(h.classify_point(vec({-1, 0})), Label::Negative);
}

TEST(NearestNeighbor, ReproducesTrainingLabels) {
  LabeledDataset train;
  Rng rng(1);
  train.points.resize(50, 2);
  for (Index i = 0; i < train.points.size(); ++i) train.points.data()[i] = rng.uniform(-1, 1);
  for (Index i = 0; i < 50; ++i) train.labels.push_back(rng.below(2) ? Label::Positive : Label::Negative);
  const NearestNeighborOracle nn(train);
  EXPECT_EQ(nn.classify(train.points), train.labels);
}

TEST(NearestNeighbor, TieGoesToSmallestIndex) {
  LabeledDataset train{rows({{1, 0}, {-1, 0}, {0, 1}}), {Label::Negative, Label::Positive, Label::Positive}};
  const NearestNeighborOracle nn(train);
  // (0,0) is equidistant from all three points.
  EXPECT_EQ(nn.classify_point(vec({0, 0})), Label::Negative);
  // (0,-0.5) ties between rows 0 and 1 only.
  EXPECT_EQ(nn.classify_point(vec({0, -0.5})), Label::Negative);
  LabeledDataset swapped{rows({{-1, 0}, {1, 0}}), {Label::Positive, Label::Negative}};
  EXPECT_EQ(NearestNeighborOracle(swapped).classify_point(vec({0, 0})), Label::Positive);
}

TEST(NearestNeighbor, RejectsBadTrainingSets) {
  EXPECT_THROW(NearestNeighborOracle(LabeledDataset{}), InvalidArgument);
  EXPECT_THROW(NearestNeighborOracle(LabeledDataset{PointMatrix::Zero(2, 2), {Label::Positive}}), InvalidArgument);
}

TEST(Counting, CountsPointsAndBatches) {
  const auto counted = with_counting(make_hyperplane_oracle(vec({1, 1}), 0.0));
  counted->classify(PointMatrix::Zero(10, 2));
  counted->classify(PointMatrix::Zero(3, 2));
  counted->classify(PointMatrix(0, 2));
  EXPECT_EQ(counted->budget().calls, 13u);
  EXPECT_EQ(counted->budget().batches, 2u);
  EXPECT_EQ(counted->name(), "hyperplane");
  EXPECT_NE(as_analytic(*counted), nullptr);
}

TEST(Counting, ForwardsLabelsUnchanged) {
  const auto inner = make_sphere_oracle(VectorXd::Zero(3), 1.0);
  const auto counted = with_counting(inner);
  const PointMatrix x = PointMatrix::Random(100, 3) * 1.5;
  EXPECT_EQ(counted->classify(x), inner->classify(x));
}

TEST(Counting, ConcurrentBatchesAreAllCounted) {
  const auto counted = with_counting(make_hyperplane_oracle(vec({1, 0}), 0.0));
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([&] {
      for (int i = 0; i < 100; ++i) counted->classify(PointMatrix::Zero(5, 2));
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(counted->budget().calls, 8u * 100u * 5u);
  EXPECT_EQ(counted->budget().batches, 800u);
}

TEST(Analytic, OnlyForGeometricOracles) {
  EXPECT_EQ(as_analytic(ConstantOracle(2, Label::Positive)), nullptr);
  const auto counted = with_counting(with_counting(make_sphere_oracle(VectorXd::Zero(2), 1.0)));
  EXPECT_NE(as_analytic(*counted), nullptr);
}

#pragma once

#include "bdcopy/core.hpp"

#include <atomic>
#include <memory>
#include <string>

namespace bdcopy {

/// Hard-label binary black box f: R^d -> {-1, +1}, queried in batches.
///
/// Implementations must be deterministic: the same point always receives the
/// same label. Built-in oracles are immutable and safe to share across threads.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual Index dim() const = 0;
  virtual std::string name() const = 0;

  /// Labels every row of `points`, preserving order. Throws InvalidArgument on
  /// a column count different from dim().
  LabelVector classify(const PointsRef& points) const;
  Label classify_point(const Eigen::Ref<const VectorXd>& x) const;

 protected:
  virtual LabelVector classify_rows(const PointsRef& points) const = 0;
};

using OraclePtr = std::shared_ptr<const Oracle>;

/// Oracle whose signed distance to its own decision boundary is known in
/// closed form. Used as ground truth.
class AnalyticOracle : public Oracle {
 public:
  /// f(x) * distance(x, boundary), Euclidean.
  virtual double signed_distance(const Eigen::Ref<const VectorXd>& x) const = 0;
};

/// sign(w.x + b); points on the hyperplane label +1.
class HyperplaneOracle final : public AnalyticOracle {
 public:
  HyperplaneOracle(VectorXd w, double b);

  Index dim() const override { return w_.size(); }
  std::string name() const override { return "hyperplane"; }
  double signed_distance(const Eigen::Ref<const VectorXd>& x) const override;

  const VectorXd& weights() const { return w_; }
  double offset() const { return b_; }

 protected:
  LabelVector classify_rows(const PointsRef& points) const override;

 private:
  VectorXd w_;
  double b_;
};

/// +1 inside the ball ||x - c|| < r, -1 outside, +1 on the sphere itself.
class SphereOracle final : public AnalyticOracle {
 public:
  SphereOracle(VectorXd center, double radius);

  Index dim() const override { return center_.size(); }
  std::string name() const override { return "sphere"; }
  double signed_distance(const Eigen::Ref<const VectorXd>& x) const override;

  const VectorXd& center() const { return center_; }
  double radius() const { return radius_; }

 protected:
  LabelVector classify_rows(const PointsRef& points) const override;

 private:
  VectorXd center_;
  double radius_;
};

/// Same label everywhere. Has no decision boundary.
class ConstantOracle final : public Oracle {
 public:
  ConstantOracle(Index dim, Label label);

  Index dim() const override { return dim_; }
  std::string name() const override { return "constant"; }
  Label label() const { return label_; }

 protected:
  LabelVector classify_rows(const PointsRef& points) const override;

 private:
  Index dim_;
  Label label_;
};

/// 1-nearest-neighbour classifier over a stored training set. Overfits by
/// construction; equidistant neighbours resolve to the smallest index.
class NearestNeighborOracle final : public Oracle {
 public:
  explicit NearestNeighborOracle(LabeledDataset train);

  Index dim() const override { return train_.dim(); }
  std::string name() const override { return "nearest-neighbor"; }
  const LabeledDataset& training_set() const { return train_; }

 protected:
  LabelVector classify_rows(const PointsRef& points) const override;

 private:
  LabeledDataset train_;
};

/// Snapshot of a CountingOracle's accounting.
struct QueryBudget {
  std::uint64_t calls = 0;
  std::uint64_t batches = 0;
};

/// Forwards to an inner oracle and counts labelled points and batch requests.
/// Labels are never altered. Counter updates are atomic.
class CountingOracle final : public Oracle {
 public:
  explicit CountingOracle(OraclePtr inner);

  Index dim() const override { return inner_->dim(); }
  std::string name() const override { return inner_->name(); }

  QueryBudget budget() const;
  const Oracle& inner() const { return *inner_; }
  const OraclePtr& inner_ptr() const { return inner_; }

 protected:
  LabelVector classify_rows(const PointsRef& points) const override;

 private:
  OraclePtr inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
  mutable std::atomic<std::uint64_t> batches_{0};
};

OraclePtr make_hyperplane_oracle(VectorXd w, double b);
OraclePtr make_sphere_oracle(VectorXd center, double radius);
OraclePtr fit_nearest_neighbor_teacher(LabeledDataset train);
std::shared_ptr<const CountingOracle> with_counting(OraclePtr oracle);

/// Looks through counting wrappers for an analytic oracle; nullptr if none.
const AnalyticOracle* as_analytic(const Oracle& oracle);

}  // namespace bdcopy

#include "bdcopy/oracle.hpp"

#include <limits>

namespace bdcopy {

LabelVector Oracle::classify(const PointsRef& points) const {
  if (points.rows() == 0) return {};
  require_dim(points.cols(), dim(), "classify");
  return classify_rows(points);
}

Label Oracle::classify_point(const Eigen::Ref<const VectorXd>& x) const {
  const PointMatrix row = x.transpose();
  return classify(row).front();
}

HyperplaneOracle::HyperplaneOracle(VectorXd w, double b) : w_(std::move(w)), b_(b) {
  if (w_.size() < 1) throw InvalidArgument("hyperplane: empty weight vector");
  if (!(w_.norm() > 0.0)) throw InvalidArgument("hyperplane: zero weight vector");
}

LabelVector HyperplaneOracle::classify_rows(const PointsRef& points) const {
  const VectorXd scores = (points * w_).array() + b_;
  LabelVector out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = sign_label(scores[i]);
  return out;
}

double HyperplaneOracle::signed_distance(const Eigen::Ref<const VectorXd>& x) const {
  require_dim(x.size(), dim(), "hyperplane signed distance");
  return (w_.dot(x) + b_) / w_.norm();
}

SphereOracle::SphereOracle(VectorXd center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 1) throw InvalidArgument("sphere: empty center");
  if (!(radius_ > 0.0)) throw InvalidArgument("sphere: radius must be positive");
}

LabelVector SphereOracle::classify_rows(const PointsRef& points) const {
  LabelVector out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    const double dist = (points.row(i).transpose() - center_).norm();
    out[static_cast<std::size_t>(i)] = dist <= radius_ ? Label::Positive : Label::Negative;
  }
  return out;
}

double SphereOracle::signed_distance(const Eigen::Ref<const VectorXd>& x) const {
  require_dim(x.size(), dim(), "sphere signed distance");
  // Inside is +1, so radius - ||x - c|| already carries the label's sign.
  return radius_ - (x - center_).norm();
}

ConstantOracle::ConstantOracle(Index dim, Label label) : dim_(dim), label_(label) {
  if (dim < 1) throw InvalidArgument("constant oracle: dimension must be >= 1");
}

LabelVector ConstantOracle::classify_rows(const PointsRef& points) const {
  return LabelVector(static_cast<std::size_t>(points.rows()), label_);
}

NearestNeighborOracle::NearestNeighborOracle(LabeledDataset train) : train_(std::move(train)) {
  if (train_.size() == 0) throw InvalidArgument("nearest-neighbor teacher: empty training set");
  if (train_.dim() < 1) throw InvalidArgument("nearest-neighbor teacher: zero-dimensional points");
  if (static_cast<Index>(train_.labels.size()) != train_.size()) {
    throw InvalidArgument("nearest-neighbor teacher: label count differs from point count");
  }
}

LabelVector NearestNeighborOracle::classify_rows(const PointsRef& points) const {
  LabelVector out(static_cast<std::size_t>(points.rows()));
  const Index n = train_.size();
  for (Index i = 0; i < points.rows(); ++i) {
    // Exact squared distances; the dot-product expansion would perturb ties.
    Index best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      const double d2 = (train_.points.row(j) - points.row(i)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    out[static_cast<std::size_t>(i)] = train_.labels[static_cast<std::size_t>(best)];
  }
  return out;
}

CountingOracle::CountingOracle(OraclePtr inner) : inner_(std::move(inner)) {
  if (!inner_) throw InvalidArgument("counting oracle: null inner oracle");
}

QueryBudget CountingOracle::budget() const {
  return {calls_.load(std::memory_order_relaxed), batches_.load(std::memory_order_relaxed)};
}

LabelVector CountingOracle::classify_rows(const PointsRef& points) const {
  LabelVector out = inner_->classify(points);
  calls_.fetch_add(static_cast<std::uint64_t>(points.rows()), std::memory_order_relaxed);
  batches_.fetch_add(1, std::memory_order_relaxed);
  return out;
}

OraclePtr make_hyperplane_oracle(VectorXd w, double b) {
  return std::make_shared<HyperplaneOracle>(std::move(w), b);
}

OraclePtr make_sphere_oracle(VectorXd center, double radius) {
  return std::make_shared<SphereOracle>(std::move(center), radius);
}

OraclePtr fit_nearest_neighbor_teacher(LabeledDataset train) {
  return std::make_shared<NearestNeighborOracle>(std::move(train));
}

std::shared_ptr<const CountingOracle> with_counting(OraclePtr oracle) {
  return std::make_shared<CountingOracle>(std::move(oracle));
}

const AnalyticOracle* as_analytic(const Oracle& oracle) {
  if (const auto* analytic = dynamic_cast<const AnalyticOracle*>(&oracle)) return analytic;
  if (const auto* counting = dynamic_cast<const CountingOracle*>(&oracle)) {
    return as_analytic(counting->inner());
  }
  return nullptr;
}

}  // namespace bdcopy

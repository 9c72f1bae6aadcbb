#pragma once

#include "bdcopy/core.hpp"

#include <concepts>
#include <optional>

namespace bdcopy {

/// Anything that assigns hard labels to a batch of points: oracles and
/// trained students alike.
template <typename T>
concept LabelPredictor = requires(const T& t, const PointMatrix& points) {
  { t.classify(points) } -> std::convertible_to<LabelVector>;
};

struct FidelityReport {
  Index n_eval = 0;
  Index mismatches = 0;
  /// mismatches / n_eval
  double error = 0.0;

  friend bool operator==(const FidelityReport&, const FidelityReport&) = default;
};

struct DistanceErrorReport {
  double mae = 0.0;
  double rmse = 0.0;
  Index n = 0;

  friend bool operator==(const DistanceErrorReport&, const DistanceErrorReport&) = default;
};

/// 0-1 disagreement between two label sequences of equal length.
FidelityReport disagreement(const LabelVector& a, const LabelVector& b);

/// Empirical fidelity error of `copy` against `teacher` on `eval_points`
/// (normally a large uniform sample of the region of interest).
template <LabelPredictor Copy, LabelPredictor Teacher>
FidelityReport empirical_fidelity(const Copy& copy, const Teacher& teacher, const PointsRef& eval_points) {
  if (eval_points.rows() == 0) throw InvalidArgument("empirical_fidelity: no evaluation points");
  const PointMatrix points = eval_points;
  return disagreement(copy.classify(points), teacher.classify(points));
}

/// Fraction of `test.labels` reproduced by `copy`.
template <LabelPredictor Copy>
double accuracy(const Copy& copy, const LabeledDataset& test) {
  if (test.size() == 0) throw InvalidArgument("accuracy: empty test set");
  if (static_cast<Index>(test.labels.size()) != test.size()) {
    throw InvalidArgument("accuracy: label count differs from point count");
  }
  for (Label l : test.labels) {
    if (l != Label::Positive && l != Label::Negative) throw InvalidArgument("accuracy: invalid label");
  }
  return 1.0 - disagreement(copy.classify(test.points), test.labels).error;
}

/// MAE and RMSE of `predicted` against `truth`.
DistanceErrorReport distance_error_report(const Eigen::Ref<const VectorXd>& predicted,
                                          const Eigen::Ref<const VectorXd>& truth);

/// 100 * (copy - baseline) / baseline; nullopt when the baseline is zero.
std::optional<double> relative_difference(double copy_metric, double baseline_metric);

}  // namespace bdcopy

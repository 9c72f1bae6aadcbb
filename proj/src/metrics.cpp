#include "bdcopy/metrics.hpp"

#include <cmath>

namespace bdcopy {

FidelityReport disagreement(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) throw InvalidArgument("disagreement: label sequences differ in length");
  if (a.empty()) throw InvalidArgument("disagreement: no labels");
  FidelityReport report;
  report.n_eval = static_cast<Index>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) report.mismatches += a[i] != b[i] ? 1 : 0;
  report.error = static_cast<double>(report.mismatches) / static_cast<double>(report.n_eval);
  return report;
}

DistanceErrorReport distance_error_report(const Eigen::Ref<const VectorXd>& predicted,
                                          const Eigen::Ref<const VectorXd>& truth) {
  if (predicted.size() != truth.size()) throw InvalidArgument("distance_error_report: length mismatch");
  if (predicted.size() == 0) throw InvalidArgument("distance_error_report: empty input");
  const auto diff = (predicted - truth).array();
  const auto n = static_cast<double>(predicted.size());
  return {diff.abs().sum() / n, std::sqrt(diff.square().sum() / n), predicted.size()};
}

std::optional<double> relative_difference(double copy_metric, double baseline_metric) {
  if (baseline_metric == 0.0) return std::nullopt;
  return 100.0 * (copy_metric - baseline_metric) / baseline_metric;
}

}  // namespace bdcopy

#pragma once

#include "bdcopy/core.hpp"
#include "bdcopy/oracle.hpp"
#include "bdcopy/sampling.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace bdcopy {

/// One synthetic training point: its teacher label, the estimated distance
/// to the nearest opposite-label point, and the regression target.
struct SignedSample {
  VectorXd x;
  Label label = Label::Positive;
  double xi = 0.0;
  /// The estimate hit the search cap; xi equals that cap.
  bool saturated = false;
  double target = 0.0;
};

/// Column-oriented collection of SignedSample.
struct SignedDataset {
  PointMatrix points;
  LabelVector labels;
  VectorXd xi;
  std::vector<bool> saturated;
  /// label * xi^alpha for the last alpha applied; label * xi on construction.
  VectorXd target;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  SignedSample sample(Index i) const;

  /// Allocates storage for n samples of dimension d.
  static SignedDataset with_size(Index n, Index d);
};

/// Per-query refinement (individual distance computation).
struct Alg1Params {
  double d_max = 1.0;
  double d_min = 0.05;
  int it_max = 5;
  Index m = 200;

  void validate() const;
};

/// Clustered labelling (grouped distance computation).
struct Alg2Params {
  Index n_c = 1;
  Index n_in = 16;
  Index n_out = 64;
  double d_in = 0.05;
  double d_out = 0.25;

  void validate() const;
};

enum class CenterSampling { Sobol, Uniform };

/// Estimates boundary distances for each query by repeatedly jumping to the
/// closest opposite-label point of a shared ball cloud around the current
/// centre: radius d_max on the first jump, d_min afterwards.
///
/// Calls: n to label the queries, then m per jump. That is n*(it_max*m + 1)
/// when every jump finds an opposite label, fewer otherwise.
SignedDataset estimate_distances_alg1(const Oracle& oracle, const PointsRef& queries,
                                      const Alg1Params& params, std::uint64_t seed,
                                      const Deadline& deadline = {});

/// Labels n_c clusters in one batch each and measures every inner point's
/// distance to the closest opposite-label outer point. Exactly
/// n_c*(n_in + n_out) calls; returns n_c*n_in samples.
SignedDataset build_dataset_alg2(const Oracle& oracle, const Region& region,
                                 const Alg2Params& params, std::uint64_t seed,
                                 CenterSampling centers = CenterSampling::Sobol,
                                 const Deadline& deadline = {});

/// Hard-label baseline: xi = 1 for every point, so target == label for any alpha.
SignedDataset hard_label_dataset(const Oracle& oracle, const PointsRef& points);

/// label * xi^alpha elementwise, with 0^0 = 1.
template <typename DerivedXi>
VectorXd alpha_targets(const LabelVector& labels, const Eigen::MatrixBase<DerivedXi>& xi,
                       double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (static_cast<Index>(labels.size()) != xi.size()) {
    throw InvalidArgument("alpha_targets: label and distance counts differ");
  }
  VectorXd out(xi.size());
  for (Index i = 0; i < xi.size(); ++i) {
    if (!(xi[i] >= 0.0)) throw InvalidArgument("alpha_targets: negative or NaN distance");
    const double magnitude = alpha == 0.0 ? 1.0 : std::pow(xi[i], alpha);
    out[i] = to_double(labels[static_cast<std::size_t>(i)]) * magnitude;
  }
  return out;
}

SignedDataset alpha_transform(SignedDataset samples, double alpha);

/// Exact f(x) * xi(x) for hyperplane and sphere oracles (or counting wrappers
/// around them). Throws InvalidArgument for any other kind.
double analytic_signed_distance(const Oracle& oracle, const Eigen::Ref<const VectorXd>& x);
VectorXd analytic_signed_distances(const Oracle& oracle, const PointsRef& points);

struct HolderViolation {
  VectorXd x;
  VectorXd y;
  double lhs = 0.0;
  double bound = 0.0;
};

struct HolderReport {
  double alpha = 0.0;
  double diameter = 0.0;
  Index pairs_checked = 0;
  double max_ratio = 0.0;  ///< max lhs / bound over pairs with bound > 0
  std::vector<HolderViolation> violations;
};

inline constexpr double kHolderSlack = 1e-9;

/// Regularity bound on |l(x) - l(y)|: 2 d^alpha for alpha <= 1, and
/// 2 alpha D^(alpha-1) d for alpha >= 1.
double holder_bound(double distance, double alpha, double diameter);

/// Evaluates |l(x_i) - l(y_i)| against holder_bound for every row pair.
/// Throws when a pair is farther apart than `diameter`.
HolderReport check_holder_bounds(const std::function<double(const VectorXd&)>& l_alpha,
                                 const PointsRef& xs, const PointsRef& ys, double alpha,
                                 double diameter);

/// CSV with header x0,...,x{d-1},label,xi,saturated,target.
void write_signed_csv(std::ostream& out, const SignedDataset& data);
SignedDataset read_signed_csv(std::istream& in);

}  // namespace bdcopy

#include "bdcopy/boundary_distance.hpp"

#include "bdcopy/io.hpp"
#include "bdcopy/random.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace bdcopy {
namespace {

/// Indices of the cloud's rows sorted by distance from the origin, ties by index.
std::vector<Index> order_by_norm(const PointMatrix& cloud) {
  const VectorXd norms = cloud.rowwise().norm();
  std::vector<Index> order(static_cast<std::size_t>(cloud.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return norms[a] < norms[b]; });
  return order;
}

std::uint64_t nonzero(std::uint64_t x) { return x == 0 ? 1 : x; }

}  // namespace

SignedSample SignedDataset::sample(Index i) const {
  const auto k = static_cast<std::size_t>(i);
  return {points.row(i).transpose(), labels.at(k), xi[i], saturated.at(k), target[i]};
}

SignedDataset SignedDataset::with_size(Index n, Index d) {
  SignedDataset data;
  data.points.resize(n, d);
  data.labels.assign(static_cast<std::size_t>(n), Label::Positive);
  data.xi = VectorXd::Zero(n);
  data.saturated.assign(static_cast<std::size_t>(n), false);
  data.target = VectorXd::Zero(n);
  return data;
}

void Alg1Params::validate() const {
  if (!(d_max > 0.0) || !(d_min > 0.0)) throw InvalidArgument("alg1: d_max and d_min must be > 0");
  if (d_min > d_max) throw InvalidArgument("alg1: d_min must not exceed d_max");
  if (it_max < 1) throw InvalidArgument("alg1: it_max must be >= 1");
  if (m < 1) throw InvalidArgument("alg1: m must be >= 1");
}

void Alg2Params::validate() const {
  if (n_c < 1 || n_in < 1 || n_out < 1) throw InvalidArgument("alg2: n_c, n_in, n_out must be >= 1");
  if (!(d_in > 0.0) || !(d_out > 0.0)) throw InvalidArgument("alg2: d_in and d_out must be > 0");
  if (d_in > d_out) throw InvalidArgument("alg2: d_in must not exceed d_out");
}

SignedDataset estimate_distances_alg1(const Oracle& oracle, const PointsRef& queries,
                                      const Alg1Params& params, std::uint64_t seed,
                                      const Deadline& deadline) {
  params.validate();
  if (queries.rows() == 0) throw InvalidArgument("alg1: no queries");
  require_dim(queries.cols(), oracle.dim(), "alg1");

  const Index n = queries.rows();
  const Index d = queries.cols();
  const PointMatrix ball = unit_ball_cloud(d, params.m, stream_seed(seed, 1)).points;
  const std::vector<Index> nearest_first = order_by_norm(ball);

  SignedDataset out = SignedDataset::with_size(n, d);
  out.points = queries;
  out.labels = oracle.classify(queries);

  PointMatrix candidates(params.m, d);
  for (Index i = 0; i < n; ++i) {
    deadline.check("labelling");
    const VectorXd z = queries.row(i).transpose();
    VectorXd center = z;
    Label center_label = out.labels[static_cast<std::size_t>(i)];
    bool found_any = false;

    for (int it = 0; it < params.it_max; ++it) {
      const double radius = it == 0 ? params.d_max : params.d_min;
      candidates = (radius * ball).rowwise() + center.transpose();
      LabelVector labels;
      try {
        labels = oracle.classify(candidates);
      } catch (const OracleError& e) {
        throw OracleError("alg1 query " + std::to_string(i) + ": " + e.what());
      }
      const auto hit = std::find_if(nearest_first.begin(), nearest_first.end(), [&](Index j) {
        return labels[static_cast<std::size_t>(j)] != center_label;
      });
      if (hit == nearest_first.end()) break;
      center = candidates.row(*hit).transpose();
      center_label = labels[static_cast<std::size_t>(*hit)];
      found_any = true;
    }

    double xi = params.d_max;
    bool saturated = true;
    if (found_any) {
      const double dist = (center - z).norm();
      if (dist < params.d_max) {
        xi = dist;
        saturated = false;
      }
    }
    out.xi[i] = xi;
    out.saturated[static_cast<std::size_t>(i)] = saturated;
  }
  out.target = to_vector(out.labels).cwiseProduct(out.xi);
  return out;
}

SignedDataset build_dataset_alg2(const Oracle& oracle, const Region& region,
                                 const Alg2Params& params, std::uint64_t seed,
                                 CenterSampling centers, const Deadline& deadline) {
  params.validate();
  require_dim(region.dim(), oracle.dim(), "alg2");
  const Index d = region.dim();

  const PointMatrix center_points =
      centers == CenterSampling::Sobol
          ? map_to_region(sobol_sequence(d, params.n_c, nonzero(stream_seed(seed, 4))), region).points
          : uniform_box(region, params.n_c, stream_seed(seed, 4)).points;
  const PointMatrix inner = params.d_in * unit_ball_cloud(d, params.n_in, stream_seed(seed, 2)).points;
  const PointMatrix outer =
      params.d_out * unit_ball_cloud(d, params.n_out, stream_seed(seed, 3)).points;

  SignedDataset out = SignedDataset::with_size(params.n_c * params.n_in, d);
  PointMatrix cluster(params.n_in + params.n_out, d);
  for (Index k = 0; k < params.n_c; ++k) {
    deadline.check("labelling");
    const auto c = center_points.row(k);
    cluster.topRows(params.n_in) = inner.rowwise() + c;
    cluster.bottomRows(params.n_out) = outer.rowwise() + c;
    LabelVector labels;
    try {
      labels = oracle.classify(cluster);
    } catch (const OracleError& e) {
      throw OracleError("alg2 cluster " + std::to_string(k) + ": " + e.what());
    }

    for (Index p = 0; p < params.n_in; ++p) {
      const Label lp = labels[static_cast<std::size_t>(p)];
      double best = std::numeric_limits<double>::infinity();
      for (Index q = 0; q < params.n_out; ++q) {
        if (labels[static_cast<std::size_t>(params.n_in + q)] == lp) continue;
        const double dist = (cluster.row(params.n_in + q) - cluster.row(p)).norm();
        if (dist < best) best = dist;
      }
      const Index row = k * params.n_in + p;
      out.points.row(row) = cluster.row(p);
      out.labels[static_cast<std::size_t>(row)] = lp;
      // Opposite points past d_out (reachable from off-centre inner points)
      // are capped like a miss.
      const bool saturated = !(best < params.d_out);
      out.xi[row] = saturated ? params.d_out : best;
      out.saturated[static_cast<std::size_t>(row)] = saturated;
    }
  }
  out.target = to_vector(out.labels).cwiseProduct(out.xi);
  return out;
}

SignedDataset hard_label_dataset(const Oracle& oracle, const PointsRef& points) {
  SignedDataset out = SignedDataset::with_size(points.rows(), points.cols());
  out.points = points;
  out.labels = oracle.classify(points);
  out.xi = VectorXd::Ones(points.rows());
  out.target = to_vector(out.labels);
  return out;
}

SignedDataset alpha_transform(SignedDataset samples, double alpha) {
  samples.target = alpha_targets(samples.labels, samples.xi, alpha);
  return samples;
}

double analytic_signed_distance(const Oracle& oracle, const Eigen::Ref<const VectorXd>& x) {
  const AnalyticOracle* analytic = as_analytic(oracle);
  if (analytic == nullptr) {
    throw InvalidArgument("analytic_signed_distance: unsupported oracle kind '" + oracle.name() + "'");
  }
  return analytic->signed_distance(x);
}

VectorXd analytic_signed_distances(const Oracle& oracle, const PointsRef& points) {
  const AnalyticOracle* analytic = as_analytic(oracle);
  if (analytic == nullptr) {
    throw InvalidArgument("analytic_signed_distances: unsupported oracle kind '" + oracle.name() + "'");
  }
  VectorXd out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) out[i] = analytic->signed_distance(points.row(i).transpose());
  return out;
}

double holder_bound(double distance, double alpha, double diameter) {
  if (alpha <= 1.0) return 2.0 * std::pow(distance, alpha);
  return 2.0 * alpha * std::pow(diameter, alpha - 1.0) * distance;
}

HolderReport check_holder_bounds(const std::function<double(const VectorXd&)>& l_alpha,
                                 const PointsRef& xs, const PointsRef& ys, double alpha,
                                 double diameter) {
  if (!(alpha > 0.0)) throw InvalidArgument("check_holder_bounds: alpha must be > 0");
  if (!(diameter > 0.0)) throw InvalidArgument("check_holder_bounds: D must be > 0");
  if (xs.rows() != ys.rows() || xs.cols() != ys.cols()) {
    throw InvalidArgument("check_holder_bounds: pair matrices differ in shape");
  }
  HolderReport report;
  report.alpha = alpha;
  report.diameter = diameter;
  for (Index i = 0; i < xs.rows(); ++i) {
    const VectorXd x = xs.row(i).transpose();
    const VectorXd y = ys.row(i).transpose();
    const double dist = (x - y).norm();
    if (dist > diameter * (1.0 + 1e-12)) {
      throw InvalidArgument("check_holder_bounds: pair " + std::to_string(i) +
                            " is farther apart than D");
    }
    const double lhs = std::abs(l_alpha(x) - l_alpha(y));
    const double bound = holder_bound(dist, alpha, diameter);
    if (bound > 0.0) report.max_ratio = std::max(report.max_ratio, lhs / bound);
    if (lhs > bound + kHolderSlack) report.violations.push_back({x, y, lhs, bound});
    ++report.pairs_checked;
  }
  return report;
}

void write_signed_csv(std::ostream& out, const SignedDataset& data) {
  for (Index j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
  out << "label,xi,saturated,target\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << format_double(data.points(i, j)) << ',';
    out << to_int(data.labels[static_cast<std::size_t>(i)]) << ',' << format_double(data.xi[i])
        << ',' << (data.saturated[static_cast<std::size_t>(i)] ? 1 : 0) << ','
        << format_double(data.target[i]) << '\n';
  }
}

SignedDataset read_signed_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const auto& h = table.header;
  const std::size_t cols = h.size();
  if (cols < 5 || h[cols - 4] != "label" || h[cols - 3] != "xi" || h[cols - 2] != "saturated" ||
      h[cols - 1] != "target") {
    throw InvalidArgument("signed CSV: header must end with label,xi,saturated,target");
  }
  const auto d = static_cast<Index>(cols - 4);
  const auto n = static_cast<Index>(table.rows.size());
  SignedDataset data = SignedDataset::with_size(n, d);
  for (Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j) data.points(i, j) = row[static_cast<std::size_t>(j)];
    data.labels[static_cast<std::size_t>(i)] =
        label_from_value(row[static_cast<std::size_t>(d)]);
    data.xi[i] = row[static_cast<std::size_t>(d + 1)];
    data.saturated[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(d + 2)] != 0.0;
    data.target[i] = row[static_cast<std::size_t>(d + 3)];
  }
  return data;
}

}  // namespace bdcopy

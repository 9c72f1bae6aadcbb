#include "bdcopy/sampling.hpp"

#include "bdcopy/random.hpp"

#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace bdcopy {
namespace {

struct DirectionEntry {
  int degree;
  std::uint32_t coefficients;
  std::array<std::uint32_t, 18> initial;
};

constexpr DirectionEntry kDirectionTable[] = {
#include "sobol_direction_numbers.inc"
};
static_assert(std::size(kDirectionTable) == kMaxSobolDim);

constexpr int kSobolBits = 32;

/// Direction numbers v_1..v_32 scaled to 32-bit integers for one dimension.
std::array<std::uint32_t, kSobolBits> direction_numbers(Index dimension) {
  const DirectionEntry& e = kDirectionTable[dimension];
  std::array<std::uint32_t, kSobolBits> v{};
  if (e.degree == 0) {
    for (int k = 0; k < kSobolBits; ++k) v[k] = std::uint32_t{1} << (kSobolBits - 1 - k);
    return v;
  }
  const int s = e.degree;
  for (int k = 0; k < s && k < kSobolBits; ++k) {
    v[k] = e.initial[k] << (kSobolBits - 1 - k);
  }
  for (int k = s; k < kSobolBits; ++k) {
    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
    for (int j = 1; j < s; ++j) {
      if ((e.coefficients >> (s - 1 - j)) & 1U) value ^= v[k - j];
    }
    v[k] = value;
  }
  return v;
}

}  // namespace

Region bounding_region(const PointsRef& points, double inflation) {
  if (points.rows() == 0) throw InvalidArgument("bounding_region: no points");
  VectorXd lo = points.colwise().minCoeff().transpose();
  VectorXd hi = points.colwise().maxCoeff().transpose();
  VectorXd pad = (hi - lo) * inflation;
  for (Index j = 0; j < pad.size(); ++j) {
    // Degenerate extents still need a box with positive width.
    if (!(pad[j] > 0.0)) pad[j] = std::max(0.5, std::abs(lo[j]) * inflation);
  }
  return Region(lo - pad, hi + pad);
}

PointCloud sobol_sequence(Index dim, Index n, std::uint64_t shift_seed) {
  if (dim < 1 || dim > kMaxSobolDim) {
    throw InvalidArgument("sobol_sequence: dimension must be in [1, 64], got " + std::to_string(dim));
  }
  if (n < 0) throw InvalidArgument("sobol_sequence: negative point count");
  if (static_cast<std::uint64_t>(n) > (std::uint64_t{1} << kSobolBits)) {
    throw InvalidArgument("sobol_sequence: at most 2^32 points");
  }

  PointCloud cloud;
  cloud.provenance = {Provenance::Kind::Sobol, shift_seed, 1.0};
  cloud.points.resize(n, dim);

  VectorXd shift = VectorXd::Zero(dim);
  if (shift_seed != 0) {
    Rng rng(shift_seed, 0x50b01);
    for (Index j = 0; j < dim; ++j) shift[j] = rng.uniform();
  }

  for (Index j = 0; j < dim; ++j) {
    const auto v = direction_numbers(j);
    for (Index i = 0; i < n; ++i) {
      const auto index = static_cast<std::uint64_t>(i);
      const std::uint64_t gray = index ^ (index >> 1);
      std::uint32_t x = 0;
      for (int k = 0; k < kSobolBits; ++k) {
        if ((gray >> k) & 1U) x ^= v[k];
      }
      double u = static_cast<double>(x) * 0x1.0p-32;
      if (shift_seed != 0) {
        u += shift[j];
        if (u >= 1.0) u -= 1.0;
      }
      cloud.points(i, j) = u;
    }
  }
  return cloud;
}

PointCloud map_to_region(const PointCloud& unit_cloud, const Region& region) {
  require_dim(unit_cloud.dim(), region.dim(), "map_to_region");
  PointCloud out;
  out.provenance = unit_cloud.provenance;
  const VectorXd extent = region.extent();
  out.points = (unit_cloud.points.array().rowwise() * extent.transpose().array()).rowwise() +
               region.lower().transpose().array();
  return out;
}

PointCloud unit_ball_cloud(Index dim, Index m, std::uint64_t seed) {
  if (dim < 1) throw InvalidArgument("unit_ball_cloud: dimension must be >= 1");
  if (m < 0) throw InvalidArgument("unit_ball_cloud: negative point count");
  PointCloud cloud;
  cloud.provenance = {Provenance::Kind::Ball, seed, 1.0};
  cloud.points.resize(m, dim);
  Rng rng(seed, 0xba11);
  VectorXd direction(dim);
  for (Index i = 0; i < m; ++i) {
    double norm = 0.0;
    do {
      for (Index j = 0; j < dim; ++j) direction[j] = rng.normal();
      norm = direction.norm();
    } while (!(norm > 0.0));
    const double radius = rng.uniform();
    cloud.points.row(i) = (radius / norm) * direction.transpose();
  }
  return cloud;
}

PointCloud uniform_box(const Region& region, Index n, std::uint64_t seed) {
  if (n < 0) throw InvalidArgument("uniform_box: negative point count");
  PointCloud cloud;
  cloud.provenance = {Provenance::Kind::Uniform, seed, 1.0};
  cloud.points.resize(n, region.dim());
  Rng rng(seed, 0xb0c5);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < region.dim(); ++j) {
      cloud.points(i, j) = rng.uniform(region.lower()[j], region.upper()[j]);
    }
  }
  return cloud;
}

void write_points_csv(std::ostream& out, const PointsRef& points) {
  char buffer[32];
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", points(i, j));
      if (j > 0) out << ',';
      out << buffer;
    }
    out << '\n';
  }
}

}  // namespace bdcopy

#pragma once

#include "bdcopy/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace bdcopy {

/// Axis-aligned box [lower, upper]; the operational space of a copy.
template <typename Scalar>
class RegionX {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  RegionX(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() < 1 || lower_.size() != upper_.size()) {
      throw InvalidArgument("region: lower and upper must have the same non-zero dimension");
    }
    if (!(lower_.array() < upper_.array()).all()) {
      throw InvalidArgument("region: lower must be strictly below upper in every coordinate");
    }
  }

  /// [lo, hi]^dim.
  static RegionX cube(Index dim, Scalar lo, Scalar hi) {
    return RegionX(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
  }

  Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector extent() const { return upper_ - lower_; }
  Vector midpoint() const { return (lower_ + upper_) / Scalar(2); }
  /// Euclidean diameter D, the bound on every pairwise distance in the box.
  Scalar diameter() const { return extent().norm(); }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
  }

  friend bool operator==(const RegionX& a, const RegionX& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_;
  }

 private:
  Vector lower_;
  Vector upper_;
};

using Region = RegionX<double>;

/// Bounding box of `points`, each side pushed out by `inflation` times its width.
Region bounding_region(const PointsRef& points, double inflation = 0.1);

/// How a point cloud was produced.
struct Provenance {
  enum class Kind { Sobol, Uniform, Ball, Mapped };
  Kind kind = Kind::Uniform;
  std::uint64_t seed = 0;
  double scale = 1.0;
};

struct PointCloud {
  PointMatrix points;
  Provenance provenance;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

inline constexpr Index kMaxSobolDim = 64;

/// First `n` points of the Sobol sequence in [0,1)^dim (Joe-Kuo direction
/// numbers, first point at the origin). A non-zero `shift_seed` applies a
/// seeded Cranley-Patterson rotation: x -> frac(x + u), u ~ U[0,1)^dim.
PointCloud sobol_sequence(Index dim, Index n, std::uint64_t shift_seed);

/// x -> lower + x * (upper - lower), elementwise.
PointCloud map_to_region(const PointCloud& unit_cloud, const Region& region);

/// `m` points r * u with u uniform on the unit sphere and r ~ U[0,1]. This is
/// deliberately not volume-uniform: points concentrate near the centre.
PointCloud unit_ball_cloud(Index dim, Index m, std::uint64_t seed);

/// i.i.d. uniform samples in the region.
PointCloud uniform_box(const Region& region, Index n, std::uint64_t seed);

/// One row per point, comma separated, `%.17g`.
void write_points_csv(std::ostream& out, const PointsRef& points);

}  // namespace bdcopy

#include "bdcopy/datasets.hpp"

#include "bdcopy/random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace bdcopy {

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "colliding_gaussians") return SyntheticKind::CollidingGaussians;
  if (name == "two_spirals") return SyntheticKind::TwoSpirals;
  if (name == "irregular_blobs") return SyntheticKind::IrregularBlobs;
  throw InvalidArgument("unknown synthetic dataset kind '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::CollidingGaussians: return "colliding_gaussians";
    case SyntheticKind::TwoSpirals: return "two_spirals";
    case SyntheticKind::IrregularBlobs: return "irregular_blobs";
  }
  return "unknown";
}

LabeledDataset generate_points(SyntheticKind kind, Index n, std::uint64_t seed, double noise) {
  if (n < 10) throw InvalidArgument("synthetic dataset: n must be >= 10");
  if (!(noise >= 0.0)) throw InvalidArgument("synthetic dataset: noise must be >= 0");
  Rng rng(seed, 0xda7a);
  LabeledDataset data;
  data.points.resize(n, 2);
  data.labels.resize(static_cast<std::size_t>(n));

  switch (kind) {
    case SyntheticKind::CollidingGaussians: {
      for (Index i = 0; i < n; ++i) {
        const Label label = i % 2 == 0 ? Label::Positive : Label::Negative;
        data.points(i, 0) = to_double(label) + noise * rng.normal();
        data.points(i, 1) = noise * rng.normal();
        data.labels[static_cast<std::size_t>(i)] = label;
      }
      break;
    }
    case SyntheticKind::TwoSpirals: {
      constexpr double kSweep = 3.0 * std::numbers::pi;
      for (Index i = 0; i < n; ++i) {
        const Label label = i % 2 == 0 ? Label::Positive : Label::Negative;
        const double theta = kSweep * std::sqrt(rng.uniform(0.02, 1.0));
        const double r = theta / kSweep;
        // The negative arm is the positive one rotated by pi.
        const double s = to_double(label);
        data.points(i, 0) = s * r * std::cos(theta) + noise * rng.normal();
        data.points(i, 1) = s * r * std::sin(theta) + noise * rng.normal();
        data.labels[static_cast<std::size_t>(i)] = label;
      }
      break;
    }
    case SyntheticKind::IrregularBlobs: {
      const auto k = static_cast<Index>(6 + rng.below(7));
      PointMatrix centers(k, 2);
      PointMatrix scales(k, 2);
      for (Index j = 0; j < k; ++j) {
        centers.row(j) << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        scales.row(j) << rng.uniform(0.05, 0.25), rng.uniform(0.05, 0.25);
      }
      for (Index i = 0; i < n; ++i) {
        const Label label = i % 2 == 0 ? Label::Positive : Label::Negative;
        // Even clusters are positive, odd ones negative.
        const Index half = label == Label::Positive ? (k + 1) / 2 : k / 2;
        const Index j = 2 * static_cast<Index>(rng.below(static_cast<std::uint64_t>(half))) +
                        (label == Label::Positive ? 0 : 1);
        for (Index c = 0; c < 2; ++c) {
          data.points(i, c) = centers(j, c) + scales(j, c) * rng.normal() + noise * rng.normal();
        }
        data.labels[static_cast<std::size_t>(i)] = label;
      }
      break;
    }
  }
  return data;
}

HoldoutSplit holdout_split(const LabeledDataset& data, std::uint64_t seed, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("holdout_split: train fraction must be in (0, 1)");
  }
  const Index n = data.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed, 0x5b117);
  rng.shuffle(order);
  const auto n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));

  auto take = [&](Index from, Index to) {
    LabeledDataset part;
    part.points.resize(to - from, data.dim());
    for (Index i = from; i < to; ++i) {
      const Index src = order[static_cast<std::size_t>(i)];
      part.points.row(i - from) = data.points.row(src);
      part.labels.push_back(data.labels[static_cast<std::size_t>(src)]);
    }
    return part;
  };
  return {take(0, n_train), take(n_train, n)};
}

HoldoutSplit generate_synthetic_dataset(SyntheticKind kind, Index n, std::uint64_t seed, double noise) {
  return holdout_split(generate_points(kind, n, seed, noise), seed);
}

}  // namespace bdcopy

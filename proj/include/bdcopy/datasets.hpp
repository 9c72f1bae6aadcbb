#pragma once

#include "bdcopy/core.hpp"

#include <cstdint>
#include <string>

namespace bdcopy {

enum class SyntheticKind { CollidingGaussians, TwoSpirals, IrregularBlobs };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Two-dimensional labelled point sets:
///  - colliding_gaussians: isotropic Gaussians at (+1, 0) and (-1, 0) with
///    standard deviation `noise`, one per class;
///  - two_spirals: interleaved Archimedean spirals in the unit disc with
///    Gaussian jitter `noise`;
///  - irregular_blobs: 6-12 anisotropic Gaussian clusters with alternating
///    class labels, plus isotropic jitter `noise`.
/// Classes are balanced (sizes differ by at most one).
LabeledDataset generate_points(SyntheticKind kind, Index n, std::uint64_t seed, double noise);

struct HoldoutSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Seeded permutation, then the first round(train_fraction * n) rows train.
HoldoutSplit holdout_split(const LabeledDataset& data, std::uint64_t seed, double train_fraction = 0.8);

/// generate_points followed by an 80/20 holdout_split with the same seed.
HoldoutSplit generate_synthetic_dataset(SyntheticKind kind, Index n, std::uint64_t seed, double noise);

}  // namespace bdcopy

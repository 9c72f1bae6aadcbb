#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdcopy {

template <typename Scalar>
using PointMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// One point per row.
using PointMatrix = PointMatrixX<double>;
using PointsRef = Eigen::Ref<const PointMatrix>;
using Eigen::Index;
using Eigen::VectorXd;

/// Hard label emitted by a binary classifier. Never zero.
enum class Label : std::int8_t { Negative = -1, Positive = 1 };
using LabelVector = std::vector<Label>;

constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
constexpr double to_double(Label l) noexcept { return static_cast<double>(l); }
constexpr Label flip(Label l) noexcept {
  return l == Label::Positive ? Label::Negative : Label::Positive;
}
/// Sign convention shared by oracles and students: values >= 0 map to +1.
constexpr Label sign_label(double value) noexcept {
  return value >= 0.0 ? Label::Positive : Label::Negative;
}

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised by oracles that fail to answer (transport or protocol problems).
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeLimitExceeded : std::runtime_error {
  explicit TimeLimitExceeded(std::string phase_name)
      : std::runtime_error("wall-clock cap exceeded during " + phase_name),
        phase(std::move(phase_name)) {}
  std::string phase;
};

Label label_from_int(long long value);

/// Labels as a column of +-1 doubles.
VectorXd to_vector(const LabelVector& labels);

/// Optional wall-clock limit checked cooperatively by long-running loops.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(Clock::time_point at) : at_(at) {}
  static Deadline after(double seconds) {
    return Deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(seconds)));
  }

  bool expired() const { return at_ && Clock::now() >= *at_; }
  void check(const char* phase) const {
    if (expired()) throw TimeLimitExceeded(phase);
  }

 private:
  std::optional<Clock::time_point> at_;
};

/// Points with their ground-truth hard labels.
struct LabeledDataset {
  PointMatrix points;
  LabelVector labels;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

void require_dim(Index got, Index expected, const char* what);

}  // namespace bdcopy

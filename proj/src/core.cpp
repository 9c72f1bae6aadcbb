#include "bdcopy/core.hpp"

#include <string>

namespace bdcopy {

Label label_from_int(long long value) {
  if (value == 1) return Label::Positive;
  if (value == -1) return Label::Negative;
  throw InvalidArgument("label must be -1 or +1, got " + std::to_string(value));
}

VectorXd to_vector(const LabelVector& labels) {
  VectorXd out(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) out[static_cast<Index>(i)] = to_double(labels[i]);
  return out;
}

void require_dim(Index got, Index expected, const char* what) {
  if (got != expected) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
                          ", expected " + std::to_string(expected) + ")");
  }
}

}  // namespace bdcopy

#pragma once

#include "bdcopy/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bdcopy {

/// `%.17g`: round-trips every double.
std::string format_double(double value);

/// Numeric CSV with a header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);

/// Exactly -1 or +1, else InvalidArgument.
Label label_from_value(double value);

/// CSV with header x0,...,x{d-1},label.
void write_labeled_csv(std::ostream& out, const LabeledDataset& data);
LabeledDataset read_labeled_csv(std::istream& in);

LabeledDataset read_labeled_csv_file(const std::string& path);
void write_labeled_csv_file(const std::string& path, const LabeledDataset& data);

}  // namespace bdcopy

#include "bdcopy/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bdcopy {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV: missing header");
  for (auto& name : split(strip(line), ',')) table.header.push_back(strip(name));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != table.header.size()) {
      throw InvalidArgument("CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        const std::string token = strip(f);
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw InvalidArgument("CSV line " + std::to_string(line_no) + ": not a number '" + f + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Label label_from_value(double value) {
  if (value == 1.0) return Label::Positive;
  if (value == -1.0) return Label::Negative;
  throw InvalidArgument("label must be -1 or +1, got " + format_double(value));
}

void write_labeled_csv(std::ostream& out, const LabeledDataset& data) {
  for (Index j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
  out << "label\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << format_double(data.points(i, j)) << ',';
    out << to_int(data.labels[static_cast<std::size_t>(i)]) << '\n';
  }
}

LabeledDataset read_labeled_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  if (table.header.size() < 2 || table.header.back() != "label") {
    throw InvalidArgument("labeled CSV: header must be x0,...,label");
  }
  const auto d = static_cast<Index>(table.header.size() - 1);
  LabeledDataset data;
  data.points.resize(static_cast<Index>(table.rows.size()), d);
  data.labels.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (Index j = 0; j < d; ++j) data.points(static_cast<Index>(i), j) = table.rows[i][static_cast<std::size_t>(j)];
    data.labels.push_back(label_from_value(table.rows[i].back()));
  }
  return data;
}

LabeledDataset read_labeled_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_labeled_csv(in);
}

void write_labeled_csv_file(const std::string& path, const LabeledDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_labeled_csv(out, data);
}

}  // namespace bdcopy

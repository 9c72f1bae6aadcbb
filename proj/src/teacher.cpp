#include "bdcopy/datasets.hpp"
#include "bdcopy/harness.hpp"
#include "bdcopy/io.hpp"
#include "bdcopy/remote_oracle.hpp"

#include <map>
#include <sstream>

namespace bdcopy {

using nlohmann::json;

namespace {

std::map<std::string, std::string> parse_fields(const std::string& body) {
  std::map<std::string, std::string> fields;
  std::istringstream stream(body);
  std::string item;
  while (std::getline(stream, item, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("oracle spec: expected key=value, got '" + item + "'");
    fields[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return fields;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("oracle spec: bad number for " + what + ": '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw ConfigError("oracle spec: empty list for " + what);
  return out;
}

const std::string& field(const std::map<std::string, std::string>& fields, const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("oracle spec: missing '" + key + "'");
  return it->second;
}

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

json parse_oracle_spec(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("oracle spec: ") + e.what());
    }
  }
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

  if (kind == "remote") return {{"kind", "remote"}, {"endpoint", body}};

  const auto fields = parse_fields(body);
  if (kind == "hyperplane") {
    return {{"kind", "hyperplane"},
            {"w", parse_list(field(fields, "w"), "w")},
            {"b", fields.count("b") ? parse_number(fields.at("b"), "b") : 0.0}};
  }
  if (kind == "sphere") {
    return {{"kind", "sphere"},
            {"center", parse_list(field(fields, "c"), "c")},
            {"radius", parse_number(field(fields, "r"), "r")}};
  }
  if (kind == "constant") {
    return {{"kind", "constant"},
            {"label", static_cast<int>(parse_number(field(fields, "label"), "label"))},
            {"dim", static_cast<int>(parse_number(field(fields, "dim"), "dim"))}};
  }
  if (kind == "nn" || kind == "nearest-neighbor") {
    if (fields.count("path")) return {{"kind", "nearest-neighbor"}, {"path", fields.at("path")}};
    json dataset = {{"kind", field(fields, "kind")},
                    {"n", static_cast<Index>(parse_number(field(fields, "n"), "n"))},
                    {"noise", fields.count("noise") ? parse_number(fields.at("noise"), "noise") : 0.0},
                    {"seed", fields.count("seed") ? std::stoull(fields.at("seed")) : 0ULL}};
    return {{"kind", "nearest-neighbor"}, {"dataset", std::move(dataset)}};
  }
  throw ConfigError("oracle spec: unknown kind '" + kind + "'");
}

TeacherSetup build_teacher(const json& spec, std::uint64_t split_seed) {
  TeacherSetup setup;
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "hyperplane") {
      setup.oracle = make_hyperplane_oracle(to_eigen(spec.at("w").get<std::vector<double>>()),
                                            spec.value("b", 0.0));
    } else if (kind == "sphere") {
      setup.oracle = make_sphere_oracle(to_eigen(spec.at("center").get<std::vector<double>>()),
                                        spec.at("radius").get<double>());
    } else if (kind == "constant") {
      setup.oracle = std::make_shared<ConstantOracle>(spec.at("dim").get<Index>(),
                                                      label_from_int(spec.at("label").get<int>()));
    } else if (kind == "nearest-neighbor") {
      LabeledDataset train;
      if (spec.contains("path")) {
        train = read_labeled_csv_file(spec.at("path").get<std::string>());
        setup.data_region = bounding_region(train.points, 0.1);
        if (spec.contains("test_path")) {
          setup.test = read_labeled_csv_file(spec.at("test_path").get<std::string>());
        }
      } else {
        const json& d = spec.at("dataset");
        const LabeledDataset all =
            generate_points(parse_synthetic_kind(d.at("kind").get<std::string>()), d.at("n").get<Index>(),
                            d.value("seed", std::uint64_t{0}), d.value("noise", 0.0));
        setup.data_region = bounding_region(all.points, 0.1);
        HoldoutSplit split = holdout_split(all, split_seed);
        train = std::move(split.train);
        setup.test = std::move(split.test);
      }
      setup.oracle = fit_nearest_neighbor_teacher(std::move(train));
    } else if (kind == "remote") {
      setup.oracle = connect_remote_oracle(RemoteEndpoint::parse(spec.at("endpoint").get<std::string>()),
                                           spec.value("dim", Index{0}));
    } else {
      throw ConfigError("oracle: unknown kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("oracle: ") + e.what());
  }
  return setup;
}

}  // namespace bdcopy

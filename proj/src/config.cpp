#include "bdcopy/harness.hpp"

#include <fstream>
#include <sstream>

namespace bdcopy {

using nlohmann::json;

LabellingAlgo parse_labelling_algo(const std::string& name) {
  if (name == "alg1") return LabellingAlgo::Alg1;
  if (name == "alg2") return LabellingAlgo::Alg2;
  if (name == "hard") return LabellingAlgo::Hard;
  throw ConfigError("unknown labelling algorithm '" + name + "' (expected alg1, alg2 or hard)");
}

std::string to_string(LabellingAlgo algo) {
  switch (algo) {
    case LabellingAlgo::Alg1: return "alg1";
    case LabellingAlgo::Alg2: return "alg2";
    case LabellingAlgo::Hard: return "hard";
  }
  return "unknown";
}

Alg1Params LabellingOptions::alg1(double diameter) const {
  Alg1Params p;
  p.d_max = d_max.value_or(diameter);
  p.d_min = d_min.value_or(0.05 * diameter);
  p.it_max = it_max;
  p.m = m;
  p.validate();
  return p;
}

Alg2Params LabellingOptions::alg2(double diameter, Index budget) const {
  Alg2Params p;
  p.n_in = n_in;
  p.n_out = n_out;
  p.d_in = d_in.value_or(0.05 * diameter);
  p.d_out = d_out.value_or(0.25 * diameter);
  p.n_c = std::max<Index>(1, (budget + n_in - 1) / std::max<Index>(1, n_in));
  p.validate();
  return p;
}

StudentSpec parse_student_spec(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return student_spec_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("student spec: ") + e.what());
    }
  }
  StudentSpec spec;
  if (text == "linear") {
    spec.mlp.widths = {1};
    return spec;
  }
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "mlp") {
      spec.mlp.widths.clear();
      std::istringstream stream(body);
      std::string item;
      while (std::getline(stream, item, ',')) spec.mlp.widths.push_back(std::stoll(item));
      spec.mlp.widths.push_back(1);
      return spec;
    }
    if (kind == "gbrt") {
      spec.kind = "gbrt";
      if (!body.empty()) spec.gbrt.n_stages = std::stoi(body);
      return spec;
    }
  } catch (const std::exception&) {
    throw ConfigError("student spec: cannot parse '" + text + "'");
  }
  throw ConfigError("student spec: unknown kind '" + text + "' (expected linear, mlp:<widths>, gbrt:<stages>)");
}

StudentSpec student_spec_from_json(const json& j) {
  StudentSpec spec;
  spec.kind = j.value("kind", std::string("mlp"));
  if (spec.kind == "linear") {
    spec.kind = "mlp";
    spec.mlp.widths = {1};
  } else if (spec.kind == "mlp") {
    if (j.contains("widths")) spec.mlp.widths = j.at("widths").get<std::vector<Index>>();
    if (spec.mlp.widths.empty() || spec.mlp.widths.back() != 1) {
      throw ConfigError("student: mlp widths must end in 1");
    }
  } else if (spec.kind == "gbrt") {
    spec.gbrt.n_stages = j.value("n_stages", spec.gbrt.n_stages);
    spec.gbrt.learning_rate = j.value("learning_rate", spec.gbrt.learning_rate);
    spec.gbrt.max_leaves = j.value("max_leaves", spec.gbrt.max_leaves);
    spec.gbrt.min_samples_leaf = j.value("min_samples_leaf", spec.gbrt.min_samples_leaf);
    spec.gbrt.validate();
  } else {
    throw ConfigError("student: unknown kind '" + spec.kind + "'");
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    spec.train.learning_rate = t.value("learning_rate", spec.train.learning_rate);
    spec.train.batch_size = t.value("batch_size", spec.train.batch_size);
    if (t.contains("epochs")) {
      if (t.at("epochs").is_string()) {
        if (t.at("epochs").get<std::string>() != "auto") throw ConfigError("student: epochs must be an integer or \"auto\"");
        spec.train.epochs.reset();
      } else {
        spec.train.epochs = t.at("epochs").get<int>();
      }
    }
  }
  return spec;
}

json to_json(const StudentSpec& spec) {
  json j;
  j["kind"] = spec.kind;
  if (spec.kind == "mlp") {
    j["widths"] = spec.mlp.widths;
  } else {
    j["n_stages"] = spec.gbrt.n_stages;
    j["learning_rate"] = spec.gbrt.learning_rate;
    j["max_leaves"] = spec.gbrt.max_leaves;
    j["min_samples_leaf"] = spec.gbrt.min_samples_leaf;
  }
  j["train"] = {{"learning_rate", spec.train.learning_rate},
                {"batch_size", spec.train.batch_size},
                {"epochs", spec.train.epochs ? json(*spec.train.epochs) : json("auto")}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    cfg.oracle = j.at("oracle").is_string() ? parse_oracle_spec(j.at("oracle").get<std::string>())
                                            : j.at("oracle");
    if (j.contains("region")) {
      const auto lo = j.at("region").at("lower").get<std::vector<double>>();
      const auto hi = j.at("region").at("upper").get<std::vector<double>>();
      cfg.region = Region(Eigen::Map<const VectorXd>(lo.data(), static_cast<Index>(lo.size())),
                          Eigen::Map<const VectorXd>(hi.data(), static_cast<Index>(hi.size())));
    }
    if (j.contains("algos")) {
      cfg.algos.clear();
      for (const auto& a : j.at("algos")) cfg.algos.push_back(parse_labelling_algo(a.get<std::string>()));
    }
    if (j.contains("alg1")) {
      const json& a = j.at("alg1");
      if (a.contains("d_max")) cfg.labelling.d_max = a.at("d_max").get<double>();
      if (a.contains("d_min")) cfg.labelling.d_min = a.at("d_min").get<double>();
      cfg.labelling.it_max = a.value("it_max", cfg.labelling.it_max);
      cfg.labelling.m = a.value("m", cfg.labelling.m);
    }
    if (j.contains("alg2")) {
      const json& a = j.at("alg2");
      if (a.contains("d_in")) cfg.labelling.d_in = a.at("d_in").get<double>();
      if (a.contains("d_out")) cfg.labelling.d_out = a.at("d_out").get<double>();
      cfg.labelling.n_in = a.value("n_in", cfg.labelling.n_in);
      cfg.labelling.n_out = a.value("n_out", cfg.labelling.n_out);
      const std::string centers = a.value("centers", std::string("sobol"));
      if (centers == "sobol") {
        cfg.labelling.centers = CenterSampling::Sobol;
      } else if (centers == "uniform") {
        cfg.labelling.centers = CenterSampling::Uniform;
      } else {
        throw ConfigError("alg2.centers must be \"sobol\" or \"uniform\"");
      }
    }
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("student")) {
      cfg.student = j.at("student").is_string() ? parse_student_spec(j.at("student").get<std::string>())
                                                : student_spec_from_json(j.at("student"));
    }
    if (j.contains("budgets")) cfg.budgets = j.at("budgets").get<std::vector<Index>>();
    if (j.contains("eval")) {
      cfg.eval_uniform = j.at("eval").value("n_uniform", cfg.eval_uniform);
      cfg.eval_distance = j.at("eval").value("n_distance", cfg.eval_distance);
    }
    cfg.reference_budget_factor = j.value("reference_budget_factor", cfg.reference_budget_factor);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("wall_clock_seconds")) {
      if (j.at("wall_clock_seconds").is_null()) {
        cfg.wall_clock_seconds.reset();
      } else {
        cfg.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (cfg.seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (cfg.budgets.empty()) throw ConfigError("config: budgets must not be empty");
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
    if (cfg.budgets[i] < 1) throw ConfigError("config: budgets must be positive");
    if (i > 0 && cfg.budgets[i] <= cfg.budgets[i - 1]) {
      throw ConfigError("config: budgets must be strictly increasing");
    }
  }
  if (cfg.algos.empty()) throw ConfigError("config: algos must not be empty");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("config: alpha must be >= 0");
  for (double a : cfg.alphas) {
    if (!(a >= 0.0)) throw ConfigError("config: alphas must be >= 0");
  }
  if (cfg.eval_uniform < 1 || cfg.eval_distance < 1) throw ConfigError("config: eval sizes must be positive");
  if (cfg.wall_clock_seconds && !(*cfg.wall_clock_seconds > 0.0)) {
    throw ConfigError("config: wall_clock_seconds must be positive");
  }
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["oracle"] = oracle;
  if (region) {
    j["region"] = {{"lower", std::vector<double>(region->lower().begin(), region->lower().end())},
                   {"upper", std::vector<double>(region->upper().begin(), region->upper().end())}};
  }
  json algo_names = json::array();
  for (auto a : algos) algo_names.push_back(bdcopy::to_string(a));
  j["algos"] = algo_names;
  json alg1 = {{"it_max", labelling.it_max}, {"m", labelling.m}};
  if (labelling.d_max) alg1["d_max"] = *labelling.d_max;
  if (labelling.d_min) alg1["d_min"] = *labelling.d_min;
  j["alg1"] = alg1;
  json alg2 = {{"n_in", labelling.n_in},
               {"n_out", labelling.n_out},
               {"centers", labelling.centers == CenterSampling::Sobol ? "sobol" : "uniform"}};
  if (labelling.d_in) alg2["d_in"] = *labelling.d_in;
  if (labelling.d_out) alg2["d_out"] = *labelling.d_out;
  j["alg2"] = alg2;
  j["alpha"] = alpha;
  j["alphas"] = alphas;
  j["student"] = bdcopy::to_json(student);
  j["budgets"] = budgets;
  j["eval"] = {{"n_uniform", eval_uniform}, {"n_distance", eval_distance}};
  j["reference_budget_factor"] = reference_budget_factor;
  j["seeds"] = seeds;
  j["wall_clock_seconds"] = wall_clock_seconds ? json(*wall_clock_seconds) : json(nullptr);
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace bdcopy

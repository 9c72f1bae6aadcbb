// bcopy: command-line front end for labelling, training, evaluation and the
// desk-scale experiment sweeps.
//
// Exit codes: 0 success, 1 unexpected failure (or bound violations),
// 2 configuration error, 3 oracle or transport error.

#include "bdcopy/datasets.hpp"
#include "bdcopy/harness.hpp"
#include "bdcopy/io.hpp"
#include "bdcopy/random.hpp"
#include "bdcopy/remote_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace bdcopy;
using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;

std::vector<double> parse_csv_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  return out;
}

/// --lower/--upper when both are given, else whatever the teacher implies.
Region region_for(const TeacherSetup& teacher, const std::string& lower, const std::string& upper) {
  if (lower.empty() != upper.empty()) throw ConfigError("--lower and --upper must be given together");
  ExperimentConfig cfg;
  if (!lower.empty()) {
    const auto lo = parse_csv_list(lower, "--lower");
    const auto hi = parse_csv_list(upper, "--upper");
    try {
      cfg.region = Region(Eigen::Map<const VectorXd>(lo.data(), static_cast<Index>(lo.size())),
                          Eigen::Map<const VectorXd>(hi.data(), static_cast<Index>(hi.size())));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  return resolve_region(cfg, teacher);
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void print_summary(const RunReport& report, const std::string& dir) {
  std::cout << report.cells.size() << " cells";
  if (!report.distances.empty()) std::cout << ", " << report.distances.size() << " distance reports";
  std::cout << " written to " << dir << '\n';
  for (const auto& d : report.distances) {
    std::cout << "  seed " << d.seed << " " << d.set << ": mae " << format_double(d.report.mae) << " rmse "
              << format_double(d.report.rmse) << '\n';
  }
}

struct LabelArgs {
  std::string oracle, algo = "alg2", out, lower, upper;
  Index n = 1000;
  double alpha = 1.0;
  std::uint64_t seed = 1;
  std::optional<double> d_max, d_min, d_in, d_out;
  int it_max = 5;
  Index m = 200, n_in = 16, n_out = 64;
};

int run_label(const LabelArgs& a) {
  const TeacherSetup teacher = build_teacher(parse_oracle_spec(a.oracle), a.seed);
  const Region region = region_for(teacher, a.lower, a.upper);
  LabellingOptions options;
  options.d_max = a.d_max;
  options.d_min = a.d_min;
  options.it_max = a.it_max;
  options.m = a.m;
  options.d_in = a.d_in;
  options.d_out = a.d_out;
  options.n_in = a.n_in;
  options.n_out = a.n_out;
  if (!(a.alpha >= 0.0)) throw ConfigError("--alpha must be >= 0");
  const LabellingAlgo algo = parse_labelling_algo(a.algo);
  const auto counting = with_counting(teacher.oracle);
  const SignedDataset data =
      alpha_transform(label_budget(*counting, algo, a.n, region, options, a.seed), algo == LabellingAlgo::Hard ? 0.0 : a.alpha);
  {
    auto out = open_output(a.out);
    write_signed_csv(out, data);
  }
  const auto budget = counting->budget();
  const json manifest = {{"oracle", parse_oracle_spec(a.oracle)},
                         {"algo", a.algo},
                         {"n_requested", a.n},
                         {"n_samples", data.size()},
                         {"alpha", a.alpha},
                         {"seed", a.seed},
                         {"region", {{"lower", std::vector<double>(region.lower().begin(), region.lower().end())},
                                     {"upper", std::vector<double>(region.upper().begin(), region.upper().end())}}},
                         {"oracle_calls", budget.calls},
                         {"oracle_batches", budget.batches},
                         {"saturated", std::count(data.saturated.begin(), data.saturated.end(), true)}};
  auto out = open_output(a.out + ".manifest.json");
  out << manifest.dump(1) << '\n';
  std::cout << data.size() << " samples, " << budget.calls << " oracle calls -> " << a.out << '\n';
  return 0;
}

struct TrainArgs {
  std::string data, student = "mlp:32,16", out;
  std::uint64_t seed = 1;
  std::optional<int> epochs;
};

int run_train(const TrainArgs& a) {
  std::ifstream in(a.data);
  if (!in) throw ConfigError("cannot open " + a.data);
  const CsvTable table = read_csv(in);
  if (table.header.empty()) throw ConfigError(a.data + ": empty file");
  PointMatrix points;
  VectorXd targets;
  const bool signed_csv = table.header.back() == "target";
  const std::size_t d = signed_csv ? table.header.size() - 4 : table.header.size() - 1;
  if (d < 1) throw ConfigError(a.data + ": no feature columns");
  points.resize(static_cast<Index>(table.rows.size()), static_cast<Index>(d));
  targets.resize(static_cast<Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    for (std::size_t j = 0; j < d; ++j) points(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
    targets[static_cast<Index>(i)] = signed_csv ? row.back() : to_double(label_from_value(row.back()));
  }
  StudentSpec spec = parse_student_spec(a.student);
  if (a.epochs) spec.train.epochs = *a.epochs;
  const TrainedStudent trained = train_student(points, targets, spec, a.seed);
  const auto parent = std::filesystem::path(a.out).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  trained.model.save(a.out);
  std::cout << spec.kind << " trained on " << points.rows() << " samples, final loss "
            << format_double(trained.loss_trace.empty() ? 0.0 : trained.loss_trace.back()) << " -> " << a.out
            << '\n';
  return 0;
}

struct EvalArgs {
  std::string model, oracle, test, lower, upper;
  Index n_uniform = 100000;
  std::uint64_t seed = 1;
};

int run_eval(const EvalArgs& a) {
  const StudentModel model = StudentModel::load(a.model);
  const TeacherSetup teacher = build_teacher(parse_oracle_spec(a.oracle), a.seed);
  require_dim(model.input_dim(), teacher.oracle->dim(), "eval");
  const Region region = region_for(teacher, a.lower, a.upper);
  const PointMatrix eval = uniform_box(region, a.n_uniform, stream_seed(a.seed, 4)).points;
  const FidelityReport fid = empirical_fidelity(model, *teacher.oracle, eval);
  json result = {{"fidelity_error", fid.error}, {"n_eval", fid.n_eval}, {"mismatches", fid.mismatches}};
  std::optional<LabeledDataset> test = teacher.test;
  if (!a.test.empty()) test = read_labeled_csv_file(a.test);
  if (test) {
    result["accuracy"] = accuracy(model, *test);
    result["n_test"] = test->size();
  }
  std::cout << result.dump(1) << '\n';
  return 0;
}

int run_experiment(const std::string& which, const std::string& config_path, std::string out_dir) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  if (out_dir.empty()) out_dir = "results/" + cfg.name;
  RunReport report;
  if (which == "sweep-alpha") {
    report = run_alpha_sweep(cfg);
  } else if (which == "sweep-budget") {
    report = run_budget_sweep(cfg);
  } else {
    report = run_distance_quality(cfg);
  }
  emit_report(report, out_dir);
  print_summary(report, out_dir);
  return 0;
}

struct TheoremArgs {
  std::string oracle, lower, upper;
  double alpha = 1.0;
  Index pairs = 10000;
  std::uint64_t seed = 1;
};

int run_verify_theorem1(const TheoremArgs& a) {
  const TeacherSetup teacher = build_teacher(parse_oracle_spec(a.oracle), a.seed);
  if (as_analytic(*teacher.oracle) == nullptr) {
    throw ConfigError("verify-theorem1 needs an analytic oracle (hyperplane or sphere)");
  }
  if (!(a.alpha > 0.0)) throw ConfigError("--alpha must be > 0");
  if (a.pairs < 1) throw ConfigError("--pairs must be positive");
  const Region region = region_for(teacher, a.lower, a.upper);
  const PointMatrix xs = uniform_box(region, a.pairs, stream_seed(a.seed, 1)).points;
  const PointMatrix ys = uniform_box(region, a.pairs, stream_seed(a.seed, 2)).points;
  const auto& oracle = *teacher.oracle;
  const double alpha = a.alpha;
  const auto l_alpha = [&](const VectorXd& x) {
    const double sd = analytic_signed_distance(oracle, x);
    return to_double(sign_label(sd)) * std::pow(std::abs(sd), alpha);
  };
  const HolderReport rep = check_holder_bounds(l_alpha, xs, ys, alpha, region.diameter());
  const json result = {{"alpha", rep.alpha},
                       {"diameter", rep.diameter},
                       {"pairs", rep.pairs_checked},
                       {"max_ratio", rep.max_ratio},
                       {"violations", rep.violations.size()}};
  std::cout << result.dump(1) << '\n';
  return rep.violations.empty() ? 0 : kExitFailure;
}

struct GenArgs {
  std::string kind, out = "data/synthetic";
  Index n = 1000;
  std::uint64_t seed = 1;
  double noise = 0.3;
};

int run_gen_data(const GenArgs& a) {
  const HoldoutSplit split = generate_synthetic_dataset(parse_synthetic_kind(a.kind), a.n, a.seed, a.noise);
  const auto parent = std::filesystem::path(a.out).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_labeled_csv_file(a.out + "_train.csv", split.train);
  write_labeled_csv_file(a.out + "_test.csv", split.test);
  std::cout << split.train.size() << " train / " << split.test.size() << " test -> " << a.out
            << "_{train,test}.csv\n";
  return 0;
}

void add_region_options(CLI::App* cmd, std::string& lower, std::string& upper) {
  cmd->add_option("--lower", lower, "Region lower corner, comma separated");
  cmd->add_option("--upper", upper, "Region upper corner, comma separated");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy hard-label classifiers from boundary-distance supervision"};
  app.require_subcommand(1);

  LabelArgs label;
  auto* label_cmd = app.add_subcommand("label", "Label synthetic points and write a signed-distance CSV");
  label_cmd->add_option("--oracle", label.oracle, "Teacher spec")->required();
  label_cmd->add_option("--algo", label.algo, "alg1, alg2 or hard")->check(CLI::IsMember({"alg1", "alg2", "hard"}));
  label_cmd->add_option("--n", label.n, "Synthetic budget")->check(CLI::PositiveNumber);
  label_cmd->add_option("--alpha", label.alpha, "Target exponent");
  label_cmd->add_option("--seed", label.seed);
  label_cmd->add_option("--out", label.out, "Output CSV")->required();
  label_cmd->add_option("--d-max", label.d_max);
  label_cmd->add_option("--d-min", label.d_min);
  label_cmd->add_option("--it-max", label.it_max);
  label_cmd->add_option("--m", label.m, "Ball cloud size (alg1)");
  label_cmd->add_option("--d-in", label.d_in);
  label_cmd->add_option("--d-out", label.d_out);
  label_cmd->add_option("--n-in", label.n_in);
  label_cmd->add_option("--n-out", label.n_out);
  add_region_options(label_cmd, label.lower, label.upper);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a student on a signed or labelled CSV");
  train_cmd->add_option("--data", train.data, "CSV from `label` or `gen-data`")->required();
  train_cmd->add_option("--student", train.student, "linear, mlp:<widths>, gbrt:<stages> or JSON");
  train_cmd->add_option("--out", train.out, "Model JSON")->required();
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--epochs", train.epochs, "Override the automatic epoch count");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Fidelity and accuracy of a saved model against a teacher");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--oracle", eval.oracle)->required();
  eval_cmd->add_option("--test", eval.test, "Labelled CSV of real test data");
  eval_cmd->add_option("--n-uniform", eval.n_uniform)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval.seed);
  add_region_options(eval_cmd, eval.lower, eval.upper);

  std::string config_path, out_dir;
  std::vector<CLI::App*> experiments;
  for (const char* name : {"sweep-alpha", "sweep-budget", "dist-quality"}) {
    auto* cmd = app.add_subcommand(name, std::string("Run the ") + name + " experiment from a JSON config");
    cmd->add_option("--config", config_path)->required();
    cmd->add_option("--out", out_dir, "Report directory (default results/<name>)");
    experiments.push_back(cmd);
  }

  TheoremArgs theorem;
  auto* theorem_cmd = app.add_subcommand("verify-theorem1", "Check the regularity bound on random pairs");
  theorem_cmd->add_option("--oracle", theorem.oracle)->required();
  theorem_cmd->add_option("--alpha", theorem.alpha)->required();
  theorem_cmd->add_option("--pairs", theorem.pairs);
  theorem_cmd->add_option("--seed", theorem.seed);
  add_region_options(theorem_cmd, theorem.lower, theorem.upper);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic dataset as <out>_train.csv and <out>_test.csv");
  gen_cmd->add_option("--kind", gen.kind, "colliding_gaussians, two_spirals or irregular_blobs")->required();
  gen_cmd->add_option("--n", gen.n);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--noise", gen.noise);
  gen_cmd->add_option("--out", gen.out, "Output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*label_cmd) return run_label(label);
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_eval(eval);
    for (auto* cmd : experiments) {
      if (*cmd) return run_experiment(cmd->get_name(), config_path, out_dir);
    }
    if (*theorem_cmd) return run_verify_theorem1(theorem);
    if (*gen_cmd) return run_gen_data(gen);
  } catch (const OracleError& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

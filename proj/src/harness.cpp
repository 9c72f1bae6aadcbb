#include "bdcopy/harness.hpp"

#include "bdcopy/io.hpp"
#include "bdcopy/random.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bdcopy {

using nlohmann::json;

namespace {

// Stream tags for per-seed randomness.
enum SeedStream : std::uint64_t {
  kLabelStream = 1,
  kInitStream = 2,
  kShuffleStream = 3,
  kEvalStream = 4,
  kDistanceStream = 5,
  kReferenceStream = 6,
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Deadline cell_deadline(const ExperimentConfig& cfg, Clock::time_point start) {
  if (!cfg.wall_clock_seconds) return {};
  return Deadline(start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(*cfg.wall_clock_seconds)));
}

/// Per-seed evaluation context: teacher, region, and cached teacher labels
/// of the uniform evaluation set.
struct SeedContext {
  TeacherSetup teacher;
  Region region;
  PointMatrix eval_points;
  LabelVector eval_labels;
};

SeedContext prepare_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  TeacherSetup teacher = build_teacher(cfg.oracle, seed);
  Region region = resolve_region(cfg, teacher);
  PointMatrix eval = uniform_box(region, cfg.eval_uniform, stream_seed(seed, kEvalStream)).points;
  LabelVector labels = teacher.oracle->classify(eval);
  return {std::move(teacher), std::move(region), std::move(eval), std::move(labels)};
}

struct Evaluation {
  double fidelity_error = 0.0;
  std::optional<double> accuracy;
};

Evaluation evaluate(const StudentModel& copy, const SeedContext& ctx) {
  Evaluation ev;
  ev.fidelity_error = disagreement(copy.classify(ctx.eval_points), ctx.eval_labels).error;
  if (ctx.teacher.test && ctx.teacher.test->size() > 0) ev.accuracy = accuracy(copy, *ctx.teacher.test);
  return ev;
}

void record(RunCell& cell, const Evaluation& ev) {
  cell.fidelity_error = ev.fidelity_error;
  cell.accuracy = ev.accuracy;
}

RelativeOutcome relative(double copy, double baseline) {
  if (const auto v = relative_difference(copy, baseline)) return *v;
  return BaselineZero{};
}

std::string status_for(const TimeLimitExceeded& e) { return "timeout:" + e.phase; }

}  // namespace

Region resolve_region(const ExperimentConfig& cfg, const TeacherSetup& teacher) {
  if (cfg.region) {
    require_dim(cfg.region->dim(), teacher.oracle->dim(), "config region");
    return *cfg.region;
  }
  if (teacher.data_region) return *teacher.data_region;
  if (as_analytic(*teacher.oracle) != nullptr || teacher.oracle->name() == "constant") {
    return Region::cube(teacher.oracle->dim(), -1.0, 1.0);
  }
  throw ConfigError("config: a region is required for oracle '" + teacher.oracle->name() + "'");
}

SignedDataset label_budget(const Oracle& oracle, LabellingAlgo algo, Index budget, const Region& region,
                           const LabellingOptions& options, std::uint64_t seed, const Deadline& deadline) {
  if (budget < 1) throw InvalidArgument("label_budget: budget must be positive");
  const double diameter = region.diameter();
  switch (algo) {
    case LabellingAlgo::Hard: {
      const PointMatrix points =
          map_to_region(sobol_sequence(region.dim(), budget, stream_seed(seed, 7) | 1), region).points;
      return hard_label_dataset(oracle, points);
    }
    case LabellingAlgo::Alg1: {
      const PointMatrix queries =
          map_to_region(sobol_sequence(region.dim(), budget, stream_seed(seed, 7) | 1), region).points;
      return estimate_distances_alg1(oracle, queries, options.alg1(diameter), seed, deadline);
    }
    case LabellingAlgo::Alg2:
      return build_dataset_alg2(oracle, region, options.alg2(diameter, budget), seed, options.centers,
                                deadline);
  }
  throw InvalidArgument("label_budget: unknown algorithm");
}

TrainedStudent train_student(const PointsRef& points, const Eigen::Ref<const VectorXd>& targets,
                             const StudentSpec& spec, std::uint64_t seed, const Deadline& deadline) {
  if (spec.kind == "gbrt") return train_gbrt(points, targets, spec.gbrt, deadline);
  MlpSpec mlp = spec.mlp;
  mlp.init_seed = stream_seed(seed, kInitStream);
  TrainConfig train = spec.train;
  train.shuffle_seed = stream_seed(seed, kShuffleStream);
  return train_mlp(points, targets, mlp, train, deadline);
}

RunReport run_budget_sweep(const ExperimentConfig& cfg) {
  RunReport report;
  report.experiment = "budget-sweep";
  report.config = cfg.to_json();
  for (std::uint64_t seed : cfg.seeds) {
    const SeedContext ctx = prepare_seed(cfg, seed);
    for (Index budget : cfg.budgets) {
      for (LabellingAlgo algo : cfg.algos) {
        const auto start = Clock::now();
        const Deadline deadline = cell_deadline(cfg, start);
        RunCell cell;
        cell.seed = seed;
        cell.algo = to_string(algo);
        cell.budget = budget;
        cell.alpha = algo == LabellingAlgo::Hard ? 0.0 : cfg.alpha;
        const auto counting = with_counting(ctx.teacher.oracle);
        try {
          const SignedDataset data =
              alpha_transform(label_budget(*counting, algo, budget, ctx.region, cfg.labelling,
                                           stream_seed(seed, kLabelStream), deadline),
                              cell.alpha);
          cell.n_samples = data.size();
          cell.oracle_calls = counting->budget().calls;
          const TrainedStudent copy = train_student(data.points, data.target, cfg.student, seed, deadline);
          record(cell, evaluate(copy.model, ctx));
        } catch (const TimeLimitExceeded& e) {
          cell.status = status_for(e);
          cell.oracle_calls = counting->budget().calls;
        }
        cell.wall_seconds = seconds_since(start);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

RunReport run_alpha_sweep(const ExperimentConfig& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("alpha sweep: alphas must not be empty");
  RunReport report;
  report.experiment = "alpha-sweep";
  report.config = cfg.to_json();
  const LabellingAlgo algo = cfg.algos.front();
  const Index budget = cfg.budgets.front();

  for (std::uint64_t seed : cfg.seeds) {
    const SeedContext ctx = prepare_seed(cfg, seed);
    const auto counting = with_counting(ctx.teacher.oracle);

    auto blank_cell = [&](double alpha) {
      RunCell cell;
      cell.seed = seed;
      cell.algo = to_string(algo);
      cell.budget = budget;
      cell.alpha = alpha;
      return cell;
    };

    const auto label_start = Clock::now();
    SignedDataset data;
    try {
      data = label_budget(*counting, algo, budget, ctx.region, cfg.labelling, stream_seed(seed, kLabelStream),
                          cell_deadline(cfg, label_start));
    } catch (const TimeLimitExceeded& e) {
      for (double alpha : cfg.alphas) {
        RunCell cell = blank_cell(alpha);
        cell.status = status_for(e);
        cell.oracle_calls = counting->budget().calls;
        cell.wall_seconds = seconds_since(label_start);
        report.cells.push_back(std::move(cell));
      }
      continue;
    }
    const double labelling_seconds = seconds_since(label_start);

    // Each training gets what is left of the cap after the shared labelling pass.
    auto training_deadline = [&](Clock::time_point start) {
      return cell_deadline(cfg, start - std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(labelling_seconds)));
    };

    std::optional<Evaluation> baseline;
    try {
      const TrainedStudent hard =
          train_student(data.points, to_vector(data.labels), cfg.student, seed, training_deadline(Clock::now()));
      baseline = evaluate(hard.model, ctx);
    } catch (const TimeLimitExceeded&) {
    }

    for (double alpha : cfg.alphas) {
      const auto start = Clock::now();
      RunCell cell = blank_cell(alpha);
      cell.n_samples = data.size();
      try {
        const VectorXd targets = alpha_targets(data.labels, data.xi, alpha);
        const TrainedStudent copy = train_student(data.points, targets, cfg.student, seed, training_deadline(start));
        const Evaluation ev = evaluate(copy.model, ctx);
        record(cell, ev);
        if (baseline) {
          cell.baseline_fidelity_error = baseline->fidelity_error;
          cell.baseline_accuracy = baseline->accuracy;
          cell.rel_diff_fidelity = relative(ev.fidelity_error, baseline->fidelity_error);
          if (ev.accuracy && baseline->accuracy) {
            cell.rel_diff_error = relative(1.0 - *ev.accuracy, 1.0 - *baseline->accuracy);
          }
        }
      } catch (const TimeLimitExceeded& e) {
        cell.status = status_for(e);
      }
      // Cumulative for the seed: unchanged across alphas when nothing re-queries.
      cell.oracle_calls = counting->budget().calls;
      cell.wall_seconds = seconds_since(start) + labelling_seconds;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

RunReport run_distance_quality(const ExperimentConfig& cfg) {
  RunReport report;
  report.experiment = "distance-quality";
  report.config = cfg.to_json();
  const LabellingAlgo algo = cfg.algos.front();
  const Index budget = cfg.budgets.front();
  if (!(cfg.alpha > 0.0)) throw ConfigError("distance quality: alpha must be > 0");

  for (std::uint64_t seed : cfg.seeds) {
    const SeedContext ctx = prepare_seed(cfg, seed);
    const auto counting = with_counting(ctx.teacher.oracle);
    const auto start = Clock::now();
    RunCell cell;
    cell.seed = seed;
    cell.algo = to_string(algo);
    cell.budget = budget;
    cell.alpha = cfg.alpha;

    std::optional<StudentModel> model;
    try {
      const Deadline deadline = cell_deadline(cfg, start);
      const SignedDataset data = alpha_transform(
          label_budget(*counting, algo, budget, ctx.region, cfg.labelling, stream_seed(seed, kLabelStream),
                       deadline),
          cfg.alpha);
      cell.n_samples = data.size();
      model = train_student(data.points, data.target, cfg.student, seed, deadline).model;
      record(cell, evaluate(*model, ctx));
    } catch (const TimeLimitExceeded& e) {
      cell.status = status_for(e);
    }
    cell.oracle_calls = counting->budget().calls;
    cell.wall_seconds = seconds_since(start);
    report.cells.push_back(std::move(cell));
    if (!model) continue;

    std::vector<std::pair<std::string, PointMatrix>> sets;
    sets.emplace_back("uniform",
                      uniform_box(ctx.region, cfg.eval_distance, stream_seed(seed, kDistanceStream)).points);
    if (ctx.teacher.test && ctx.teacher.test->size() > 0) {
      const Index n = std::min(cfg.eval_distance, ctx.teacher.test->size());
      sets.emplace_back("test", ctx.teacher.test->points.topRows(n));
    }

    const bool analytic = as_analytic(*ctx.teacher.oracle) != nullptr;
    for (const auto& [name, points] : sets) {
      VectorXd truth;
      if (analytic) {
        truth = analytic_signed_distances(*ctx.teacher.oracle, points).cwiseAbs();
      } else {
        Alg1Params ref = cfg.labelling.alg1(ctx.region.diameter());
        ref.m *= cfg.reference_budget_factor;
        truth = estimate_distances_alg1(*ctx.teacher.oracle, points, ref, stream_seed(seed, kReferenceStream)).xi;
      }
      // Predictions approximate xi^alpha; undo the exponent to compare distances.
      VectorXd predicted = model->predict_values(points).cwiseAbs();
      if (cfg.alpha != 1.0) predicted = predicted.array().pow(1.0 / cfg.alpha).matrix();

      DistanceEntry entry;
      entry.seed = seed;
      entry.set = name;
      entry.truth = analytic ? "analytic" : "alg1";
      entry.report = distance_error_report(predicted, truth);
      entry.scatter.reserve(static_cast<std::size_t>(truth.size()));
      for (Index i = 0; i < truth.size(); ++i) entry.scatter.emplace_back(truth[i], predicted[i]);
      report.distances.push_back(std::move(entry));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json outcome_json(const RelativeOutcome& o) {
  if (const auto* v = std::get_if<double>(&o)) return *v;
  if (std::holds_alternative<BaselineZero>(o)) return "baseline-zero";
  return nullptr;
}

RelativeOutcome outcome_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::monostate{};
  if (j.at(key).is_string()) return BaselineZero{};
  return j.at(key).get<double>();
}

std::string csv_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string csv_field(const RelativeOutcome& o) {
  if (const auto* v = std::get_if<double>(&o)) return format_double(*v);
  if (std::holds_alternative<BaselineZero>(o)) return "baseline-zero";
  return "";
}

std::string scatter_file_name(const DistanceEntry& e) {
  return "scatter_" + std::to_string(e.seed) + "_" + e.set + ".csv";
}

}  // namespace

std::string curves_csv(const RunReport& report) {
  std::ostringstream out;
  out << "experiment,seed,algo,budget,alpha,status,fidelity_error,accuracy,baseline_fidelity_error,"
         "baseline_accuracy,rel_diff_error_pct,rel_diff_fidelity_pct,oracle_calls,n_samples\n";
  for (const auto& c : report.cells) {
    out << report.experiment << ',' << c.seed << ',' << c.algo << ',' << c.budget << ','
        << format_double(c.alpha) << ',' << c.status << ',' << csv_field(c.fidelity_error) << ','
        << csv_field(c.accuracy) << ',' << csv_field(c.baseline_fidelity_error) << ','
        << csv_field(c.baseline_accuracy) << ',' << csv_field(c.rel_diff_error) << ','
        << csv_field(c.rel_diff_fidelity) << ',' << c.oracle_calls << ',' << c.n_samples << '\n';
  }
  return out.str();
}

json report_to_json(const RunReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"seed", c.seed},
                     {"algo", c.algo},
                     {"budget", c.budget},
                     {"alpha", c.alpha},
                     {"status", c.status},
                     {"fidelity_error", optional_json(c.fidelity_error)},
                     {"accuracy", optional_json(c.accuracy)},
                     {"baseline_fidelity_error", optional_json(c.baseline_fidelity_error)},
                     {"baseline_accuracy", optional_json(c.baseline_accuracy)},
                     {"rel_diff_error_pct", outcome_json(c.rel_diff_error)},
                     {"rel_diff_fidelity_pct", outcome_json(c.rel_diff_fidelity)},
                     {"oracle_calls", c.oracle_calls},
                     {"n_samples", c.n_samples},
                     {"wall_seconds", c.wall_seconds}});
  }
  json distances = json::array();
  for (const auto& d : report.distances) {
    json scatter = json::array();
    for (const auto& [t, p] : d.scatter) scatter.push_back({t, p});
    distances.push_back({{"seed", d.seed},
                         {"set", d.set},
                         {"truth", d.truth},
                         {"mae", d.report.mae},
                         {"rmse", d.report.rmse},
                         {"n", d.report.n},
                         {"scatter_file", scatter_file_name(d)},
                         {"scatter", std::move(scatter)}});
  }
  return {{"format", "bdcopy-report"},
          {"version", 1},
          {"experiment", report.experiment},
          {"config", report.config},
          {"cells", std::move(cells)},
          {"distances", std::move(distances)}};
}

RunReport report_from_json(const json& j) {
  RunReport report;
  try {
    if (j.value("format", "") != "bdcopy-report") throw InvalidArgument("report: not a bdcopy-report document");
    report.experiment = j.at("experiment").get<std::string>();
    report.config = j.at("config");
    for (const auto& c : j.at("cells")) {
      RunCell cell;
      cell.seed = c.at("seed").get<std::uint64_t>();
      cell.algo = c.at("algo").get<std::string>();
      cell.budget = c.at("budget").get<Index>();
      cell.alpha = c.at("alpha").get<double>();
      cell.status = c.at("status").get<std::string>();
      cell.fidelity_error = optional_from(c, "fidelity_error");
      cell.accuracy = optional_from(c, "accuracy");
      cell.baseline_fidelity_error = optional_from(c, "baseline_fidelity_error");
      cell.baseline_accuracy = optional_from(c, "baseline_accuracy");
      cell.rel_diff_error = outcome_from(c, "rel_diff_error_pct");
      cell.rel_diff_fidelity = outcome_from(c, "rel_diff_fidelity_pct");
      cell.oracle_calls = c.at("oracle_calls").get<std::uint64_t>();
      cell.n_samples = c.at("n_samples").get<Index>();
      cell.wall_seconds = c.at("wall_seconds").get<double>();
      report.cells.push_back(std::move(cell));
    }
    for (const auto& d : j.at("distances")) {
      DistanceEntry entry;
      entry.seed = d.at("seed").get<std::uint64_t>();
      entry.set = d.at("set").get<std::string>();
      entry.truth = d.at("truth").get<std::string>();
      entry.report = {d.at("mae").get<double>(), d.at("rmse").get<double>(), d.at("n").get<Index>()};
      for (const auto& pair : d.at("scatter")) {
        entry.scatter.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
      }
      report.distances.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
  return report;
}

void emit_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("report.json");
    out << report_to_json(report).dump(1) << '\n';
  }
  {
    auto out = open("curves.csv");
    out << curves_csv(report);
  }
  for (const auto& d : report.distances) {
    auto out = open(scatter_file_name(d));
    out << "truth,prediction\n";
    for (const auto& [t, p] : d.scatter) out << format_double(t) << ',' << format_double(p) << '\n';
  }
}

RunReport read_report(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "report.json";
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace bdcopy

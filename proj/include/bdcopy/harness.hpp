#pragma once

#include "bdcopy/boundary_distance.hpp"
#include "bdcopy/metrics.hpp"
#include "bdcopy/oracle.hpp"
#include "bdcopy/sampling.hpp"
#include "bdcopy/students.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bdcopy {

/// Bad configuration file or command-line value.
struct ConfigError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// ---------------------------------------------------------------------------
// Teachers

/// Turns a compact oracle description into its JSON form. Accepted shapes:
///   hyperplane:w=1,0;b=0
///   sphere:c=0,0;r=1
///   constant:label=1;dim=2
///   nn:path=train.csv
///   nn:kind=colliding_gaussians;n=500;noise=1;seed=7
///   remote:stdio:<command>   remote:tcp:<host>:<port>
/// A string starting with '{' is parsed as JSON directly.
nlohmann::json parse_oracle_spec(const std::string& text);

/// A ready-to-query teacher plus whatever the spec knows about its data.
struct TeacherSetup {
  OraclePtr oracle;
  /// Held-out real data (nearest-neighbour teachers only).
  std::optional<LabeledDataset> test;
  /// Bounding box of the teacher's data inflated by 10% per side.
  std::optional<Region> data_region;
};

/// Builds the oracle described by `spec`. Dataset-backed nearest-neighbour
/// teachers are fit on the training part of a holdout split drawn with
/// `split_seed`.
TeacherSetup build_teacher(const nlohmann::json& spec, std::uint64_t split_seed);

// ---------------------------------------------------------------------------
// Configuration

enum class LabellingAlgo { Alg1, Alg2, Hard };
LabellingAlgo parse_labelling_algo(const std::string& name);
std::string to_string(LabellingAlgo algo);

/// Student architecture plus its training hyper-parameters.
struct StudentSpec {
  std::string kind = "mlp";  ///< "mlp" or "gbrt"
  MlpSpec mlp;
  GbrtSpec gbrt;
  TrainConfig train;
};

/// "linear", "mlp:32,16", "gbrt:100" or a JSON object.
StudentSpec parse_student_spec(const std::string& text);
StudentSpec student_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StudentSpec& spec);

/// Geometry overrides; unset values default to fractions of the region
/// diameter D (alg1: d_max = D, d_min = 0.05 D; alg2: d_in = 0.05 D,
/// d_out = 0.25 D).
struct LabellingOptions {
  std::optional<double> d_max, d_min;
  int it_max = 5;
  Index m = 200;
  std::optional<double> d_in, d_out;
  Index n_in = 16;
  Index n_out = 64;
  CenterSampling centers = CenterSampling::Sobol;

  Alg1Params alg1(double diameter) const;
  /// n_c chosen so that n_c * n_in covers `budget` synthetic points.
  Alg2Params alg2(double diameter, Index budget) const;
};

struct ExperimentConfig {
  std::string name = "experiment";
  nlohmann::json oracle;
  std::optional<Region> region;
  std::vector<LabellingAlgo> algos{LabellingAlgo::Alg2};
  LabellingOptions labelling;
  /// Alpha used by budget sweeps and distance-quality runs.
  double alpha = 1.0;
  /// Alphas enumerated by alpha sweeps.
  std::vector<double> alphas{0.0, 0.5, 1.0};
  StudentSpec student;
  std::vector<Index> budgets{1000};
  Index eval_uniform = 100000;
  Index eval_distance = 10000;
  /// Reference Algorithm-1 runs use this multiple of the default ball size.
  int reference_budget_factor = 10;
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> wall_clock_seconds = 240.0;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

// ---------------------------------------------------------------------------
// Reports

struct BaselineZero {
  friend bool operator==(BaselineZero, BaselineZero) = default;
};
/// Not applicable, a percentage, or undefined because the baseline was zero.
using RelativeOutcome = std::variant<std::monostate, double, BaselineZero>;

struct RunCell {
  std::uint64_t seed = 0;
  std::string algo;
  Index budget = 0;
  double alpha = 0.0;
  /// "ok", "timeout:labelling" or "timeout:training".
  std::string status = "ok";
  std::optional<double> fidelity_error;
  std::optional<double> accuracy;
  std::optional<double> baseline_fidelity_error;
  std::optional<double> baseline_accuracy;
  RelativeOutcome rel_diff_error;
  RelativeOutcome rel_diff_fidelity;
  std::uint64_t oracle_calls = 0;
  Index n_samples = 0;
  double wall_seconds = 0.0;

  friend bool operator==(const RunCell&, const RunCell&) = default;
};

struct DistanceEntry {
  std::uint64_t seed = 0;
  std::string set;    ///< "uniform" or "test"
  std::string truth;  ///< "analytic" or "alg1"
  DistanceErrorReport report;
  /// (ground-truth distance, predicted distance) per evaluation point.
  std::vector<std::pair<double, double>> scatter;

  friend bool operator==(const DistanceEntry&, const DistanceEntry&) = default;
};

struct RunReport {
  std::string experiment;
  nlohmann::json config;
  std::vector<RunCell> cells;
  std::vector<DistanceEntry> distances;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// ---------------------------------------------------------------------------
// Building blocks shared by the sweeps and the CLI.

/// Labels `budget` synthetic points of `region` with `algo`; queries go
/// through `oracle` (wrap it in a CountingOracle to meter them).
SignedDataset label_budget(const Oracle& oracle, LabellingAlgo algo, Index budget,
                           const Region& region, const LabellingOptions& options,
                           std::uint64_t seed, const Deadline& deadline = {});

/// Trains the configured student on `targets`. Initialization and shuffling
/// seeds derive from `seed` only, never from the targets.
TrainedStudent train_student(const PointsRef& points, const Eigen::Ref<const VectorXd>& targets,
                             const StudentSpec& spec, std::uint64_t seed, const Deadline& deadline = {});

/// Region from the config, else the teacher's data box, else [-1, 1]^d for
/// analytic teachers.
Region resolve_region(const ExperimentConfig& cfg, const TeacherSetup& teacher);

// ---------------------------------------------------------------------------
// Experiments

/// Copy quality as a function of synthetic budget: one cell per
/// (seed, budget, algo).
RunReport run_budget_sweep(const ExperimentConfig& cfg);

/// One labelling pass per seed, then one trained copy per alpha, each
/// compared against the hard-label copy of the same points.
RunReport run_alpha_sweep(const ExperimentConfig& cfg);

/// Predicted distances of an alpha-trained copy against ground truth, on a
/// uniform sample and (for data-backed teachers) on held-out data.
RunReport run_distance_quality(const ExperimentConfig& cfg);

/// One row per cell; wall time is left out so reruns are byte-identical.
std::string curves_csv(const RunReport& report);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Writes report.json, curves.csv and scatter_<seed>_<set>.csv into `dir`.
void emit_report(const RunReport& report, const std::string& dir);
RunReport read_report(const std::string& dir);

}  // namespace bdcopy

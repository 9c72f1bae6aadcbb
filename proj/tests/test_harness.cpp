#include "bdcopy/harness.hpp"
#include "bdcopy/io.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bdcopy;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bdcopy_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_plane_config() {
  return ExperimentConfig::from_json(json::parse(R"({
    "name": "plane",
    "oracle": "hyperplane:w=1,-0.5;b=0.1",
    "algos": ["alg2", "hard"],
    "student": "linear",
    "budgets": [64, 256],
    "eval": {"n_uniform": 2000, "n_distance": 500},
    "seeds": [1, 2]
  })"));
}

std::uint64_t alg2_calls(Index budget, Index n_in = 16, Index n_out = 64) {
  const Index n_c = (budget + n_in - 1) / n_in;
  return static_cast<std::uint64_t>(n_c * (n_in + n_out));
}

}  // namespace

TEST(OracleSpec, CompactForms) {
  EXPECT_EQ(parse_oracle_spec("hyperplane:w=1,0;b=0.5"), json::parse(R"({"kind":"hyperplane","w":[1.0,0.0],"b":0.5})"));
  EXPECT_EQ(parse_oracle_spec("sphere:c=0,0,0;r=2")["radius"], 2.0);
  EXPECT_EQ(parse_oracle_spec("constant:label=-1;dim=4")["dim"], 4);
  EXPECT_EQ(parse_oracle_spec("nn:kind=two_spirals;n=100;noise=0.1;seed=3")["dataset"]["n"], 100);
  EXPECT_EQ(parse_oracle_spec("nn:path=a.csv")["path"], "a.csv");
  EXPECT_EQ(parse_oracle_spec("remote:tcp:localhost:9000")["endpoint"], "tcp:localhost:9000");
  EXPECT_EQ(parse_oracle_spec(R"({"kind":"sphere","center":[0],"radius":1})")["kind"], "sphere");
  EXPECT_THROW(parse_oracle_spec("cube:side=1"), ConfigError);
  EXPECT_THROW(parse_oracle_spec("hyperplane:w=1,x"), ConfigError);
  EXPECT_THROW(parse_oracle_spec("sphere:c=0"), ConfigError);
  EXPECT_THROW(parse_oracle_spec("{not json"), ConfigError);
}

TEST(Teacher, DatasetBackedNearestNeighbour) {
  const auto spec = parse_oracle_spec("nn:kind=colliding_gaussians;n=100;noise=0.5;seed=4");
  const TeacherSetup a = build_teacher(spec, 1);
  const TeacherSetup b = build_teacher(spec, 2);
  ASSERT_TRUE(a.test && a.data_region);
  EXPECT_EQ(a.test->size(), 20);
  EXPECT_EQ(*a.data_region, *b.data_region);
  EXPECT_NE(a.test->points, b.test->points);
  EXPECT_EQ(a.oracle->name(), "nearest-neighbor");
  EXPECT_THROW(build_teacher(json{{"kind", "hyperplane"}}, 1), ConfigError);
}

TEST(Config, ParsesAndRoundTrips) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "name": "x", "oracle": "sphere:c=0,0;r=0.5",
    "region": {"lower": [-2, -1], "upper": [2, 1]},
    "algos": ["alg1"], "alg1": {"d_max": 1.5, "m": 50, "it_max": 3},
    "alg2": {"d_out": 0.9, "n_out": 100, "centers": "uniform"},
    "alpha": 0.5, "alphas": [0, 2], "student": {"kind": "gbrt", "n_stages": 5, "min_samples_leaf": 2},
    "budgets": [10, 20], "eval": {"n_uniform": 7}, "seeds": [3], "wall_clock_seconds": null
  })"));
  EXPECT_EQ(cfg.region->upper()[0], 2.0);
  EXPECT_EQ(cfg.algos, std::vector<LabellingAlgo>{LabellingAlgo::Alg1});
  EXPECT_EQ(cfg.labelling.alg1(3.0).d_max, 1.5);
  EXPECT_DOUBLE_EQ(cfg.labelling.alg1(3.0).d_min, 0.15);
  EXPECT_EQ(cfg.labelling.alg2(3.0, 40).d_out, 0.9);
  EXPECT_DOUBLE_EQ(cfg.labelling.alg2(3.0, 40).d_in, 0.15);
  EXPECT_EQ(cfg.labelling.alg2(3.0, 40).n_c, 3);
  EXPECT_EQ(cfg.labelling.centers, CenterSampling::Uniform);
  EXPECT_EQ(cfg.student.kind, "gbrt");
  EXPECT_EQ(cfg.student.gbrt.n_stages, 5);
  EXPECT_FALSE(cfg.wall_clock_seconds.has_value());
  const ExperimentConfig again = ExperimentConfig::from_json(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
}

TEST(Config, Invariants) {
  const auto bad = [](const char* patch) {
    json j = json::parse(R"({"oracle": "hyperplane:w=1"})");
    j.merge_patch(json::parse(patch));
    return j;
  };
  EXPECT_NO_THROW(ExperimentConfig::from_json(bad("{}")));
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"seeds": []})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"budgets": [100, 100]})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"budgets": [100, 50]})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"alphas": [0, -1]})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"algos": ["alg3"]})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"student": "tree"})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(bad(R"({"budgets": "many"})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::object()), ConfigError);
}

TEST(StudentSpecs, ShortForms) {
  EXPECT_EQ(parse_student_spec("linear").mlp.widths, std::vector<Index>{1});
  EXPECT_EQ(parse_student_spec("mlp:32,16").mlp.widths, (std::vector<Index>{32, 16, 1}));
  EXPECT_EQ(parse_student_spec("gbrt:40").gbrt.n_stages, 40);
  EXPECT_EQ(parse_student_spec(R"({"kind":"mlp","widths":[4,1],"train":{"epochs":3}})").train.epochs, 3);
  EXPECT_THROW(parse_student_spec("mlp:a,b"), ConfigError);
  EXPECT_THROW(parse_student_spec(R"({"kind":"mlp","widths":[4]})"), ConfigError);
}

TEST(LabelBudget, CallCountsPerAlgorithm) {
  const Region r = Region::cube(2, -1, 1);
  LabellingOptions opt;
  opt.m = 20;
  for (auto algo : {LabellingAlgo::Alg1, LabellingAlgo::Alg2, LabellingAlgo::Hard}) {
    const auto counted = with_counting(make_hyperplane_oracle((VectorXd(2) << 1, 1).finished(), 0));
    const SignedDataset d = label_budget(*counted, algo, 50, r, opt, 3);
    const auto calls = counted->budget().calls;
    switch (algo) {
      case LabellingAlgo::Alg1:
        EXPECT_EQ(d.size(), 50);
        EXPECT_LE(calls, 50u * (5u * 20u + 1u));
        break;
      case LabellingAlgo::Alg2:
        EXPECT_EQ(d.size(), 4 * 16);
        EXPECT_EQ(calls, alg2_calls(50));
        break;
      case LabellingAlgo::Hard:
        EXPECT_EQ(d.size(), 50);
        EXPECT_EQ(calls, 50u);
        break;
    }
  }
}

TEST(BudgetSweep, CardinalityAndCallAccounting) {
  const ExperimentConfig cfg = small_plane_config();
  const RunReport rep = run_budget_sweep(cfg);
  ASSERT_EQ(rep.cells.size(), 8u);
  for (const auto& c : rep.cells) {
    EXPECT_EQ(c.status, "ok");
    ASSERT_TRUE(c.fidelity_error.has_value());
    EXPECT_GE(*c.fidelity_error, 0.0);
    EXPECT_LE(*c.fidelity_error, 1.0);
    EXPECT_FALSE(c.accuracy.has_value());
    if (c.algo == "alg2") {
      EXPECT_EQ(c.oracle_calls, alg2_calls(c.budget));
      EXPECT_EQ(c.alpha, 1.0);
    } else {
      EXPECT_EQ(c.oracle_calls, static_cast<std::uint64_t>(c.budget));
      EXPECT_EQ(c.alpha, 0.0);
    }
  }
}

TEST(BudgetSweep, ConstantTeacherIsCopiedPerfectly) {
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "constant:label=1;dim=3", "algos": ["alg2", "hard"], "student": "gbrt:10",
    "budgets": [50, 200], "eval": {"n_uniform": 3000}, "seeds": [5]
  })"));
  for (const auto& c : run_budget_sweep(cfg).cells) EXPECT_EQ(*c.fidelity_error, 0.0) << c.algo << " " << c.budget;
}

TEST(BudgetSweep, LinearStudentCopiesHyperplane) {
  // Frozen regression check: linear target surface, default geometry.
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "hyperplane:w=1,0.5;b=0.2", "student": "linear",
    "budgets": [10000], "eval": {"n_uniform": 100000}, "seeds": [1]
  })"));
  const RunReport rep = run_budget_sweep(cfg);
  ASSERT_EQ(rep.cells.size(), 1u);
  EXPECT_LT(*rep.cells[0].fidelity_error, 0.02);
}

TEST(BudgetSweep, ReproducibleCurves) {
  const ExperimentConfig cfg = small_plane_config();
  EXPECT_EQ(curves_csv(run_budget_sweep(cfg)), curves_csv(run_budget_sweep(cfg)));
}

TEST(BudgetSweep, TimeoutMarksCellAndContinues) {
  ExperimentConfig cfg = small_plane_config();
  cfg.wall_clock_seconds = 1e-9;
  const RunReport rep = run_budget_sweep(cfg);
  ASSERT_EQ(rep.cells.size(), 8u);
  for (const auto& c : rep.cells) {
    EXPECT_EQ(c.status.rfind("timeout:", 0), 0u) << c.status;
    EXPECT_FALSE(c.fidelity_error.has_value());
  }
}

TEST(AlphaSweep, CellsBaselineAndQueryReuse) {
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "nn:kind=colliding_gaussians;n=100;noise=0.6;seed=2",
    "student": {"kind": "mlp", "widths": [8, 1], "train": {"epochs": 5}},
    "budgets": [160], "alphas": [0, 0.5, 1], "eval": {"n_uniform": 2000}, "seeds": [1, 2, 3]
  })"));
  const RunReport rep = run_alpha_sweep(cfg);
  ASSERT_EQ(rep.cells.size(), 9u);
  for (std::size_t s = 0; s < 3; ++s) {
    const RunCell& zero = rep.cells[3 * s];
    EXPECT_EQ(zero.alpha, 0.0);
    // alpha = 0 trains on exactly the hard labels: identical metrics.
    EXPECT_EQ(zero.fidelity_error, zero.baseline_fidelity_error);
    EXPECT_EQ(zero.accuracy, zero.baseline_accuracy);
    EXPECT_EQ(std::get<double>(zero.rel_diff_fidelity), 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const RunCell& c = rep.cells[3 * s + k];
      EXPECT_EQ(c.seed, zero.seed);
      EXPECT_EQ(c.oracle_calls, alg2_calls(160));
      EXPECT_TRUE(c.baseline_accuracy.has_value());
      EXPECT_GE(*c.accuracy, 0.0);
      EXPECT_LE(*c.accuracy, 1.0);
    }
  }
}

TEST(AlphaSweep, ZeroAlphaMatchesHardLabelCopy) {
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "sphere:c=0.2,0;r=0.6", "student": {"kind": "mlp", "widths": [8, 1], "train": {"epochs": 4}},
    "budgets": [320], "alphas": [0], "eval": {"n_uniform": 4000}, "seeds": [7]
  })"));
  const RunReport rep = run_alpha_sweep(cfg);
  ASSERT_EQ(rep.cells.size(), 1u);

  // Independent reconstruction of the hard-label copy.
  const TeacherSetup teacher = build_teacher(cfg.oracle, 7);
  const Region region = resolve_region(cfg, teacher);
  const SignedDataset data =
      label_budget(*teacher.oracle, LabellingAlgo::Alg2, 320, region, cfg.labelling, stream_seed(7, 1));
  const TrainedStudent hard = train_student(data.points, to_vector(data.labels), cfg.student, 7);
  const TrainedStudent zero = train_student(data.points, alpha_transform(data, 0.0).target, cfg.student, 7);
  EXPECT_EQ(hard.model.to_json().dump(), zero.model.to_json().dump());
  const PointMatrix eval = uniform_box(region, 4000, stream_seed(7, 4)).points;
  EXPECT_EQ(*rep.cells[0].fidelity_error, disagreement(hard.model.classify(eval), teacher.oracle->classify(eval)).error);
}

TEST(AlphaSweep, BaselineZeroIsExplicit) {
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "constant:label=-1;dim=2", "student": "gbrt:10",
    "budgets": [64], "alphas": [0, 1], "eval": {"n_uniform": 500}, "seeds": [1]
  })"));
  const RunReport rep = run_alpha_sweep(cfg);
  for (const auto& c : rep.cells) {
    EXPECT_EQ(*c.baseline_fidelity_error, 0.0);
    EXPECT_TRUE(std::holds_alternative<BaselineZero>(c.rel_diff_fidelity));
  }
  EXPECT_NE(curves_csv(rep).find("baseline-zero"), std::string::npos);
}

TEST(DistanceQuality, AnalyticTruthAndScatter) {
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "hyperplane:w=1,0;b=0", "student": "linear", "budgets": [2000],
    "eval": {"n_uniform": 1000, "n_distance": 300}, "seeds": [1]
  })"));
  const RunReport rep = run_distance_quality(cfg);
  ASSERT_EQ(rep.distances.size(), 1u);
  const DistanceEntry& d = rep.distances[0];
  EXPECT_EQ(d.set, "uniform");
  EXPECT_EQ(d.truth, "analytic");
  EXPECT_EQ(d.scatter.size(), 300u);
  EXPECT_LE(d.report.mae, d.report.rmse);
  const fs::path dir = scratch_dir("dq");
  emit_report(rep, dir.string());
  const std::string scatter = slurp(dir / "scatter_1_uniform.csv");
  EXPECT_EQ(std::count(scatter.begin(), scatter.end(), '\n'), 301);
  EXPECT_EQ(scatter.substr(0, scatter.find('\n')), "truth,prediction");
}

TEST(DistanceQuality, DataTeacherUsesReferenceAlgorithmOne) {
  ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(R"({
    "oracle": "nn:kind=two_spirals;n=200;noise=0.05;seed=1",
    "student": {"kind": "mlp", "widths": [8, 1], "train": {"epochs": 3}},
    "budgets": [320], "alg1": {"m": 20}, "eval": {"n_uniform": 500, "n_distance": 25}, "seeds": [1]
  })"));
  const RunReport rep = run_distance_quality(cfg);
  ASSERT_EQ(rep.distances.size(), 2u);
  EXPECT_EQ(rep.distances[0].truth, "alg1");
  EXPECT_EQ(rep.distances[1].set, "test");
  EXPECT_EQ(rep.distances[1].scatter.size(), 25u);
}

TEST(Report, EmitAndReadRoundTrip) {
  RunReport rep = run_budget_sweep(small_plane_config());
  rep.cells[0].rel_diff_error = BaselineZero{};
  rep.cells[1].rel_diff_error = -12.5;
  rep.distances.push_back({3, "uniform", "analytic", {0.1, 0.2, 2}, {{0.5, 0.4}, {1.0 / 3.0, 0.3}}});
  const fs::path dir = scratch_dir("roundtrip");
  emit_report(rep, dir.string());
  EXPECT_TRUE(read_report(dir.string()) == rep);
  const std::string curves = slurp(dir / "curves.csv");
  EXPECT_EQ(static_cast<std::size_t>(std::count(curves.begin(), curves.end(), '\n')), rep.cells.size() + 1);
  EXPECT_TRUE(fs::exists(dir / "scatter_3_uniform.csv"));
}

TEST(Report, EmptyReportIsValid) {
  const RunReport empty;
  const fs::path dir = scratch_dir("empty");
  emit_report(empty, dir.string());
  const json j = json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(j["cells"].empty());
  EXPECT_TRUE(read_report(dir.string()) == empty);
}

// ---------------------------------------------------------------------------
// Command line

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BCOPY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, EndToEnd) {
  const fs::path dir = scratch_dir("cli");
  const std::string d = dir.string();
  EXPECT_EQ(run_cli("gen-data --kind two_spirals --n 200 --seed 2 --noise 0.05 --out " + d + "/spirals"), 0);
  EXPECT_TRUE(fs::exists(dir / "spirals_train.csv"));
  const std::string oracle = "nn:path=" + d + "/spirals_train.csv";
  EXPECT_EQ(run_cli("label --oracle '" + oracle + "' --algo alg2 --n 320 --alpha 1 --seed 1 --out " + d + "/l.csv"), 0);
  const json manifest = json::parse(slurp(dir / "l.csv.manifest.json"));
  EXPECT_EQ(manifest["oracle_calls"], alg2_calls(320));
  EXPECT_EQ(run_cli("train --data " + d + "/l.csv --student mlp:8 --epochs 3 --out " + d + "/m.json"), 0);
  EXPECT_EQ(run_cli("eval --model " + d + "/m.json --oracle '" + oracle + "' --test " + d +
                    "/spirals_test.csv --n-uniform 500"),
            0);
  EXPECT_EQ(run_cli("train --data " + d + "/spirals_train.csv --student linear --out " + d + "/hard.json"), 0);
  EXPECT_EQ(run_cli("verify-theorem1 --alpha 0.5 --oracle 'sphere:c=0,0;r=0.5' --pairs 500"), 0);

  std::ofstream(dir / "cfg.json") << R"({"name":"t","oracle":"hyperplane:w=1,1","student":"linear",
    "budgets":[64],"alphas":[0,1],"eval":{"n_uniform":200},"seeds":[1]})";
  EXPECT_EQ(run_cli("sweep-alpha --config " + d + "/cfg.json --out " + d + "/sa"), 0);
  EXPECT_TRUE(fs::exists(dir / "sa" / "curves.csv"));
  EXPECT_EQ(run_cli("sweep-budget --config " + d + "/cfg.json --out " + d + "/sb"), 0);
  EXPECT_EQ(run_cli("dist-quality --config " + d + "/cfg.json --out " + d + "/dq"), 0);
  EXPECT_TRUE(fs::exists(dir / "dq" / "scatter_1_uniform.csv"));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli_codes");
  const std::string d = dir.string();
  EXPECT_EQ(run_cli("label --oracle 'cube:x=1' --n 10 --out " + d + "/x.csv"), 2);
  EXPECT_EQ(run_cli("label --oracle 'hyperplane:w=0,0' --n 10 --out " + d + "/x.csv"), 2);
  EXPECT_EQ(run_cli("label --oracle hyperplane:w=1 --algo alg9 --n 10 --out " + d + "/x.csv"), 2);
  EXPECT_EQ(run_cli("sweep-alpha --config " + d + "/missing.json"), 2);
  std::ofstream(dir / "bad.json") << R"({"oracle":"hyperplane:w=1","budgets":[10,5]})";
  EXPECT_EQ(run_cli("sweep-budget --config " + d + "/bad.json"), 2);
  EXPECT_EQ(run_cli("label --oracle 'remote:stdio:/nonexistent/teacher' --n 10 --lower 0 --upper 1 --out " + d +
                    "/x.csv"),
            3);
  EXPECT_EQ(run_cli("label --oracle 'remote:tcp:127.0.0.1:1' --n 10 --lower 0 --upper 1 --out " + d + "/x.csv"), 3);
  EXPECT_EQ(run_cli("frobnicate"), 2);
}

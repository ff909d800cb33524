#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "surf/experiment.hpp"

namespace surf {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("surf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << body;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SURF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig parse(const std::string& text) { return parse_config(Json::parse(text)); }

template <typename Fn>
std::string config_error(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected a config error";
  return {};
}

TEST(ParseConfig, DefaultsEverythingButProblem) {
  const auto cfg = parse(R"({"problem": {"kind": "gear"}})");
  EXPECT_EQ(cfg.surf.segments, 20);
  EXPECT_EQ(cfg.surf.alpha, 0.3);
  EXPECT_EQ(cfg.surf.inner.kind, InnerSolverKind::closed_form);
  EXPECT_EQ(cfg.reference_points, 1001);
  EXPECT_TRUE(cfg.baseline);
  EXPECT_FALSE(cfg.hv_reference);
  EXPECT_EQ(cfg.seed, 0u);
}

TEST(ParseConfig, MdpKindsDefaultToValueIteration) {
  const auto cfg = parse(R"({"problem": {"kind": "grid_mdp"}})");
  EXPECT_EQ(cfg.surf.inner.kind, InnerSolverKind::soft_value_iteration);
}

TEST(ParseConfig, ReadsAllSections) {
  const auto cfg = parse(R"({
    "problem": {"kind": "bandit", "arms": 5},
    "surf": {"segments": 7, "alpha": 0.5, "iterations": 3, "interpolation": "w", "grid_size": 129, "threads": 2,
             "baseline": false, "inner": {"solver": "projected_gradient", "steps": 40, "step_size": 0.2}},
    "metrics": {"hv_reference": [1, 2], "reference_points": 51, "quadrature": {"panels": 32}},
    "output": {"dir": "elsewhere"},
    "seed": 42,
    "bandit_error": {"pulls": [10, 100], "trials": 3, "sigma": 0.1}
  })");
  EXPECT_EQ(cfg.surf.segments, 7);
  EXPECT_EQ(cfg.surf.interpolation, InterpolationCoordinate::weight);
  EXPECT_EQ(cfg.surf.grid_size, 129u);
  EXPECT_EQ(cfg.surf.threads, 2u);
  EXPECT_FALSE(cfg.baseline);
  EXPECT_EQ(cfg.surf.inner.kind, InnerSolverKind::projected_gradient);
  EXPECT_EQ(*cfg.surf.inner.step_size, 0.2);
  EXPECT_EQ(cfg.hv_reference->f2, 2.0);
  EXPECT_EQ(cfg.quadrature.panels, 32);
  EXPECT_EQ(cfg.out_dir, "elsewhere");
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.bandit_error.pulls, (std::vector<std::size_t>{10, 100}));
}

TEST(ParseConfig, RejectionsNameTheField) {
  EXPECT_NE(config_error([] { parse(R"({"problem": {"kind": "gear"}, "extra": 1})"); }).find("extra"),
            std::string::npos);
  EXPECT_NE(config_error([] { parse(R"({"problem": {"kind": "gear"}, "surf": {"segmnts": 4}})"); }).find("segmnts"),
            std::string::npos);
  EXPECT_NE(config_error([] { parse(R"({"surf": {}})"); }).find("problem"), std::string::npos);
  EXPECT_NE(config_error([] { parse(R"({"problem": {"kind": "gear"}, "surf": {"alpha": "x"}})"); }).find("surf.alpha"),
            std::string::npos);
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "surf": {"interpolation": "z"}})"); });
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "surf": {"grid_size": 1}})"); });
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "surf": {"alpha": 0}})"); });
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "seed": -3})"); });
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "bandit_error": {"trials": 1}})"); });
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "sweep": {"axis": "beta", "values": [1]}})"); });
  config_error([] { parse(R"({"problem": {"kind": "bandit"}, "sweep": {"axis": "kappa_p", "values": [1]}})"); });
  config_error([] { parse(R"({"problem": {"kind": "gear"}, "metrics": {"hv_reference": [1]}})"); });
}

TEST(BuildProblem, Failures) {
  EXPECT_NE(config_error([] { build_problem_checked(Json::parse(R"({"kind": "torus"})")); }).find("torus"),
            std::string::npos);
  config_error([] { build_problem_checked(Json::parse(R"({"kind": "gear", "p": 0.5})")); });
  config_error([] { build_problem_checked(Json::parse(R"({"kind": "quadratic_1d", "q1": -1})")); });
  config_error([] { build_problem_checked(Json::parse(R"({"kind": "grid_mdp", "map": ["S?"]})")); });
}

TEST(LoadConfig, SyntaxErrorReportsPosition) {
  const auto dir = scratch("syntax");
  const auto path = write_config(dir, "{\n  \"problem\": {\"kind\": \"gear\",}\n}\n");
  const std::string msg = config_error([&] { load_config(path.string()); });
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

ExperimentConfig small_run(const fs::path& out, int iterations = 3) {
  auto cfg = parse(R"({"problem": {"kind": "quadratic_1d", "q2": 4}, "metrics": {"hv_reference": [1.1, 4.4]},
                       "surf": {"segments": 8}})");
  cfg.surf.outer_iterations = iterations;
  cfg.out_dir = out.string();
  return cfg;
}

TEST(CmdRun, GoldenHeadersAndManifest) {
  const auto dir = scratch("golden");
  cmd_run(small_run(dir));
  EXPECT_EQ(lines(dir / "samples.csv").front(), "source,n,w,f1,f2");
  const auto conv = lines(dir / "convergence.csv");
  EXPECT_EQ(conv.front(), "t,sup_dist_to_true_phi,sup_dist_phi_tilde_phi_t,cv,gap_ratio,max_inner_residual");
  ASSERT_EQ(conv.size(), 1u + 4u + 1u);
  EXPECT_EQ(conv.back().substr(0, 2), "4,");
  EXPECT_EQ(conv.back().substr(conv.back().size() - 4), ",,,,");
  EXPECT_EQ(lines(dir / "final_cdf.csv").front(), "w,phi");
  EXPECT_EQ(lines(dir / "samples.csv").size(), 1u + 2u * 9u);

  const auto metrics = Json::parse(slurp(dir / "metrics.json"));
  for (const char* key : {"hv_surf", "hv_uniform", "igd_surf", "igd_uniform", "cv_surf", "cv_uniform",
                          "gap_ratio_surf", "gap_ratio_uniform", "hv_reference_point"}) {
    EXPECT_TRUE(metrics.contains(key)) << key;
  }
  EXPECT_LT(metrics["cv_surf"].get<double>(), metrics["cv_uniform"].get<double>());

  const auto manifest = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["version"], "1.0.0");
  EXPECT_EQ(manifest["command"], "run");
  for (const auto& f : manifest["outputs"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>())) << f;
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, manifest["outputs"].size() + 1);
}

TEST(CmdRun, ZeroIterationsMatchesBaseline) {
  const auto dir = scratch("t0");
  auto cfg = parse(R"({"problem": {"kind": "gear", "p": 4}, "surf": {"segments": 6, "iterations": 0}})");
  cfg.out_dir = dir.string();
  cmd_run(cfg);
  const auto rows = lines(dir / "samples.csv");
  ASSERT_EQ(rows.size(), 15u);
  for (std::size_t n = 0; n < 7; ++n) {
    EXPECT_EQ(rows[1 + n].substr(rows[1 + n].find(',')), rows[8 + n].substr(rows[8 + n].find(',')));
  }
}

TEST(CmdRun, ByteIdenticalReruns) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  cmd_run(small_run(a, 5));
  cmd_run(small_run(b, 5));
  for (const char* f : {"samples.csv", "convergence.csv", "final_cdf.csv", "metrics.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(CmdSweep, WritesAggregateAndPerRunLogs) {
  const auto dir = scratch("sweep");
  auto cfg = parse(R"({"problem": {"kind": "quadratic_1d"}, "surf": {"alpha": 1.0, "iterations": 5},
                       "sweep": {"axis": "N", "values": [8, 16]}})");
  cfg.out_dir = dir.string();
  cmd_sweep(cfg);
  const auto rows = lines(dir / "sweep.csv");
  EXPECT_EQ(rows.front(), "axis,value,final_sup_error,first_sup_error,cv,gap_ratio,kappa");
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "runs" / "N=8" / "convergence.csv"));
  EXPECT_TRUE(fs::exists(dir / "runs" / "N=16" / "convergence.csv"));
  EXPECT_TRUE(Json::parse(slurp(dir / "sweep_summary.json")).contains("loglog_slope_final_error"));
}

TEST(CmdSweep, AlphaAxisSharesTheFloor) {
  const auto cfg = load_config(std::string(SURF_CONFIG_DIR) + "/alpha_sweep.json");
  const auto out = execute_sweep(cfg);
  ASSERT_EQ(out.rows.size(), 3u);
  double lo = 1e300;
  double hi = 0.0;
  for (const auto& r : out.rows) {
    lo = std::min(lo, r.final_error);
    hi = std::max(hi, r.final_error);
  }
  EXPECT_LE(hi, 2.0 * lo);
  // Iterations until the error first gets within 2x of the shared floor.
  std::vector<std::size_t> reach;
  for (const auto& r : out.results) {
    std::size_t t = 0;
    while (t < r.diagnostics.size() && *r.diagnostics[t].sup_to_reference > 2.0 * hi) ++t;
    reach.push_back(t);
  }
  EXPECT_GT(reach[0], reach[1]);
  EXPECT_GT(reach[1], reach[2]);
}

TEST(CmdSweep, NeedsSweepSection) {
  auto cfg = parse(R"({"problem": {"kind": "gear"}})");
  EXPECT_THROW(cmd_sweep(cfg), ConfigError);
}

TEST(CmdBanditError, NoiselessErrorsVanish) {
  const auto dir = scratch("bandit");
  auto cfg = parse(R"({"problem": {"kind": "bandit", "arms": 4},
                       "bandit_error": {"pulls": [8, 80], "trials": 2, "sigma": 0}})");
  cfg.out_dir = dir.string();
  cmd_bandit_error(cfg);
  const auto rows = lines(dir / "bandit_error.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows.front(), "T,mean_sup_error,std_sup_error,trials,seed");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto first = rows[i].find(',');
    EXPECT_LE(std::stod(rows[i].substr(first + 1)), 1e-8) << rows[i];
  }
  EXPECT_TRUE(fs::exists(dir / "bandit_error_fit.json"));
}

TEST(CmdFront, ReferenceFrontIsMonotone) {
  const auto dir = scratch("front");
  auto cfg = parse(R"({"problem": {"kind": "bandit", "arms": 6}, "surf": {"segments": 10}})");
  cfg.out_dir = dir.string();
  cmd_front(cfg);
  const auto rows = lines(dir / "front.csv");
  ASSERT_EQ(rows.size(), 1u + 1001u + 11u + 11u);
  double prev_f1 = 1e300;
  double prev_f2 = -1e300;
  for (std::size_t i = 1; i <= 1001; ++i) {
    std::stringstream ss(rows[i]);
    std::string source, n, w, f1, f2;
    std::getline(ss, source, ',');
    std::getline(ss, n, ',');
    std::getline(ss, w, ',');
    std::getline(ss, f1, ',');
    std::getline(ss, f2, ',');
    EXPECT_EQ(source, "reference");
    EXPECT_LE(std::stod(f1), prev_f1 + 1e-12);
    EXPECT_GE(std::stod(f2), prev_f2 - 1e-12);
    prev_f1 = std::stod(f1);
    prev_f2 = std::stod(f2);
  }
  const auto summary = Json::parse(slurp(dir / "front_summary.json"));
  EXPECT_LE(summary["max_surf_distance_to_reference"].get<double>(), 1e-6);
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("exit");
  const auto good = write_config(dir, R"({"problem": {"kind": "gear"}, "surf": {"segments": 4, "iterations": 1}})");
  EXPECT_EQ(run_cli("run --config " + good.string() + " --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "samples.csv"));

  EXPECT_EQ(run_cli("run"), 2);
  EXPECT_EQ(run_cli("bogus --config " + good.string()), 2);
  EXPECT_EQ(run_cli("run --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("run --config " + good.string() + " --threads 0"), 2);

  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ \"problem\": ";
  EXPECT_EQ(run_cli("run --config " + broken.string()), 2);

  const fs::path trials = dir / "trials.json";
  std::ofstream(trials) << R"({"problem": {"kind": "bandit"}, "bandit_error": {"trials": 1}})";
  EXPECT_EQ(run_cli("bandit-error --config " + trials.string() + " --out " + (dir / "t").string()), 2);

  // Coincident minimizers: the front is a single point, a runtime failure.
  const fs::path flat = dir / "flat.json";
  std::ofstream(flat) << R"({"problem": {"kind": "quadratic_nd", "Q1": [[1]], "Q2": [[1]], "b1": [0.5], "b2": [0.5]}})";
  EXPECT_EQ(run_cli("run --config " + flat.string() + " --out " + (dir / "flat").string()), 1);
}

TEST(Binary, SeedOverrideReachesManifest) {
  const auto dir = scratch("seed");
  const auto cfg = write_config(dir, R"({"problem": {"kind": "gear"}, "surf": {"segments": 4, "iterations": 1},
                                         "seed": 3})");
  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --seed 99 --out " + (dir / "o").string()), 0);
  const auto manifest = Json::parse(slurp(dir / "o" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 99);
  EXPECT_EQ(manifest["config"]["seed"], 99);
}

TEST(Binary, ThreadsDoNotChangeOutputs) {
  const auto dir = scratch("threads");
  const auto cfg = write_config(dir, R"({"problem": {"kind": "grid_mdp"},
    "surf": {"segments": 8, "iterations": 2, "inner": {"steps": 20}}, "metrics": {"reference_points": 11}})");
  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --threads 1 --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --threads 3 --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "samples.csv"), slurp(dir / "b" / "samples.csv"));
  EXPECT_EQ(slurp(dir / "a" / "convergence.csv"), slurp(dir / "b" / "convergence.csv"));
}

}  // namespace
}  // namespace surf

#include "experiment.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace pinchlab::cli;
using nlohmann::json;

namespace {

std::filesystem::path out_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pinchlab_cli_test" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string l;
  std::getline(in, l);
  return l;
}

json growth_config() {
  return json::parse(R"({
    "schema_version": 1, "command": "growth-fit",
    "model": {"type": "warped_slice", "base_dim": 2},
    "q_grid": {"random": 3}, "t_grid": {"lo": -10, "hi": 10, "count": 21}, "seed": 4
  })");
}

}  // namespace

TEST(Cli, RejectsMalformedConfigs) {
  const auto dir = out_dir("bad");
  json c = growth_config();
  c["schema_version"] = 2;
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c = growth_config();
  c.erase("command");
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c = growth_config();
  c["command"] = "plot";
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c = growth_config();
  c["model"]["type"] = "sphere";
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c = growth_config();
  c["tol"] = -1.0;
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c = growth_config();
  c["t_grid"] = "all";
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c = growth_config();
  c["q_grid"] = {{"points", {{0.0, 1.0, 0.5}}}};  // not on the slice
  const RunResult r = run(c, dir);
  EXPECT_EQ(r.exit_code, kExitConfig);
  EXPECT_NE(r.diagnostic.find("hypersurface"), std::string::npos);
  EXPECT_EQ(run(json::array(), dir).exit_code, kExitConfig);
}

TEST(Cli, LoadConfigErrors) {
  const auto p = std::filesystem::temp_directory_path() / "pinchlab_cli_bad.json";
  std::ofstream(p) << "{ not json";
  EXPECT_THROW(load_config(p), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Cli, CurvatureOnConstantCurvatureModel) {
  const auto dir = out_dir("curv");
  const json c = json::parse(R"({
    "schema_version": 1, "command": "curvature",
    "model": {"type": "upper_half_space", "dim": 3, "b": 1.3},
    "grid": [{"lo": -1, "hi": 1, "count": 2}, {"lo": -1, "hi": 1, "count": 2}, {"lo": 0.5, "hi": 2, "count": 2}]
  })");
  const RunResult r = run(c, dir);
  EXPECT_EQ(r.exit_code, kExitOk) << r.diagnostic;
  EXPECT_EQ(r.summary, "curvature: range [-1.690, -1.690]");
  EXPECT_EQ(first_line(dir / "curvature_planes.csv"), "i,j,kappa_min,kappa_max");
  const json s = json::parse(slurp(dir / "curvature_summary.json"));
  EXPECT_NEAR(s["kappa_max"].get<double>(), -1.69, 1e-10);
}

TEST(Cli, GtReportTrivialCover) {
  const auto dir = out_dir("gt1");
  const RunResult r = run(json::parse(R"({"schema_version": 1, "command": "gt-report", "k": 1, "rho": 6})"), dir);
  EXPECT_EQ(r.exit_code, kExitOk) << r.diagnostic;
  EXPECT_EQ(r.summary, "gt-report: pinch_C=1.000");
  EXPECT_EQ(first_line(dir / "gt_pinching.csv"), "k,r0,rho,kappa_min,kappa_max,pinch_C,status");
  EXPECT_EQ(first_line(dir / "gt_curvature_profile.csv"), "k,r0,rho,r,K_rtheta,K_rx,K_thetax");
}

TEST(Cli, GtReportFlagsPositiveCurvature) {
  const auto dir = out_dir("gt8");
  const RunResult r =
      run(json::parse(R"({"schema_version": 1, "command": "gt-report", "k": 8, "rho": 0.4, "r0": 0.2})"), dir);
  EXPECT_EQ(r.exit_code, kExitValidation);
  EXPECT_TRUE(std::filesystem::exists(dir / "gt_pinching.csv"));
}

TEST(Cli, NumericalFailureExitCode) {
  const auto dir = out_dir("fail");
  const json c = json::parse(R"({
    "schema_version": 1, "command": "flow-norms",
    "model": {"type": "cone_chart", "r_max": 4, "sigma": {"type": "gt", "k": 2, "rho": 3}},
    "q_grid": {"points": [[3.0, 0.0, 0.0]]}, "t_grid": [1.0, 10.0]
  })");
  const RunResult r = run(c, dir);
  EXPECT_EQ(r.exit_code, kExitNumerical);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Cli, GrowthFitSummary) {
  const auto dir = out_dir("growth");
  const RunResult r = run(growth_config(), dir);
  ASSERT_EQ(r.exit_code, kExitOk) << r.diagnostic;
  EXPECT_EQ(r.summary.rfind("growth-fit: beta_hat=0.99", 0), 0u) << r.summary;
  const auto s = nlohmann::ordered_json::parse(slurp(dir / "growth_summary.json"));
  EXPECT_EQ(s.begin().key(), "beta_hat");
  EXPECT_EQ(first_line(dir / "growth_samples.csv"), "q_index,t,norm");
  EXPECT_EQ(first_line(dir / "growth_fit.csv"), "beta_hat,logC_hat,residual_rms,t_min,t_max,side");
}

TEST(Cli, OutputsIndependentOfWorkers) {
  const auto a = out_dir("w1"), b = out_dir("w3");
  ASSERT_EQ(run(growth_config(), a, Overrides{std::nullopt, 1u, std::nullopt}).exit_code, kExitOk);
  ASSERT_EQ(run(growth_config(), b, Overrides{std::nullopt, 3u, std::nullopt}).exit_code, kExitOk);
  for (const char* f : {"growth_samples.csv", "growth_fit.csv", "growth_summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, SeedOverrideChangesSamples) {
  const auto a = out_dir("s1"), b = out_dir("s2");
  const json c = json::parse(R"({
    "schema_version": 1, "command": "distortion",
    "model": {"type": "warped_slice", "base_dim": 2}, "pairs": {"n_pairs": 5}, "seed": 2
  })");
  ASSERT_EQ(run(c, a).exit_code, kExitOk);
  ASSERT_EQ(run(c, b, Overrides{3u, std::nullopt, std::nullopt}).exit_code, kExitOk);
  EXPECT_NE(slurp(a / "distortion_pairs.csv"), slurp(b / "distortion_pairs.csv"));
  const auto s = json::parse(slurp(b / "distortion_summary.json"));
  EXPECT_EQ(s["seed"].get<int>(), 3);
}

TEST(Cli, DistortionSummaryKeyOrder) {
  const auto dir = out_dir("dist");
  const json c = json::parse(R"({
    "schema_version": 1, "command": "distortion",
    "model": {"type": "warped_slice", "base_dim": 2},
    "base_map": {"type": "identity"}, "beta": 1, "pairs": {"n_pairs": 10}, "seed": 2
  })");
  const RunResult r = run(c, dir);
  ASSERT_EQ(r.exit_code, kExitOk) << r.diagnostic;
  const auto s = nlohmann::ordered_json::parse(slurp(dir / "distortion_summary.json"));
  std::vector<std::string> keys;
  for (auto it = s.begin(); it != s.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"C_emp", "c_emp", "beta", "L", "n_pairs", "seed", "n_skipped"}));
  EXPECT_NEAR(s["C_emp"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, DistanceCheckNeedsClosedForm) {
  const auto dir = out_dir("dc");
  json c = json::parse(R"({"schema_version": 1, "command": "distance-check",
                           "model": {"type": "cone_chart", "sigma": {"type": "sinh"}}})");
  EXPECT_EQ(run(c, dir).exit_code, kExitConfig);
  c["model"] = {{"type", "upper_half_space"}, {"dim", 3}};
  c["pairs"] = {{"n_pairs", 5}};
  const RunResult r = run(c, dir);
  EXPECT_EQ(r.exit_code, kExitOk) << r.diagnostic;
  EXPECT_EQ(first_line(dir / "distance_check.csv"), "pair,d_closed,d_bvp,rel_error,iterations,converged");
}

TEST(Cli, ParseModelVariants) {
  const auto m = parse_model(json::parse(R"({"type": "cone_chart", "fiber_dim": 2,
      "sigma": {"type": "gt", "k": 2, "rho": 6}, "rescale": "pinched"})"));
  EXPECT_EQ(m.dim(), 4);
  EXPECT_LT(m.scale(), 1.0);
  EXPECT_THROW(parse_model(json::parse(R"({"type": "cone_chart", "sigma": {"type": "sinh"}, "rescale": "pinched"})")),
               ConfigError);
  EXPECT_THROW(parse_model(json::parse(R"({"type": "upper_half_space", "dim": 1})")), ConfigError);
  EXPECT_THROW(parse_model(json::parse(R"({"type": "warped_slice", "base_dim": 2, "warp": "sinh"})")), ConfigError);
  EXPECT_THROW(parse_smoothing(json::parse(R"({"k": 2, "rho": 1, "r0": 2})")), ConfigError);
}

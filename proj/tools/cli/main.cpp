#include "experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace pinchlab::cli;
  CLI::App app{"pinchlab: numerical experiments on pinched negatively curved manifolds"};
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double tol = 0.0;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default: output_dir from the config, else .)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads, 0 = hardware concurrency");
  auto* tol_opt = app.add_option("--tol", tol, "override the integration tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  nlohmann::json config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  Overrides ov;
  if (*seed_opt) ov.seed = seed;
  if (*workers_opt) ov.workers = workers;
  if (*tol_opt) ov.tol = tol;
  if (!*out_opt) {
    out_dir = ".";
    if (config.is_object() && config.contains("output_dir") && config["output_dir"].is_string()) {
      out_dir = config["output_dir"].get<std::string>();
    }
  }

  const RunResult r = run(config, out_dir, ov);
  if (!r.summary.empty()) std::cout << r.summary << '\n';
  if (!r.diagnostic.empty()) std::cerr << r.diagnostic << '\n';
  return r.exit_code;
}

#pragma once

#include "pinchlab/flow.hpp"
#include "pinchlab/gtmetric.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinchlab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitValidation = 4,
};

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<double> tol;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string summary;  // one line
  std::string diagnostic;
  std::vector<std::filesystem::path> files;
};

// Reads a JSON config; throws ConfigError on I/O or parse failure.
nlohmann::json load_config(const std::filesystem::path& path);

// Model description, see README for the accepted fields.
MetricModel parse_model(const nlohmann::json& spec, unsigned workers = 0);
SmoothingSpec parse_smoothing(const nlohmann::json& spec);

// Runs one experiment and writes its artifacts into out_dir. Never throws;
// failures are mapped onto the exit codes above.
RunResult run(const nlohmann::json& config, const std::filesystem::path& out_dir, const Overrides& overrides = {});

}  // namespace pinchlab::cli

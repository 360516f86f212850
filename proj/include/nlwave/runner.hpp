#pragma once

// Experiment driver behind the `nlwave` executable.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlwave {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

const std::vector<std::string>& subcommands();

struct RunRequest {
  std::string subcommand;
  std::string config_text;
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;  // written outputs, manifest last
  std::string message;
};

/// Runs one experiment, writes its outputs and manifest.json. Never throws for
/// validation or numerical failures; they map to exit codes 1 and 2.
RunOutcome run_experiment(const RunRequest& request, std::ostream& log);

std::string tool_version();

}  // namespace nlwave

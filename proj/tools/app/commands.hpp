#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace noisewalk::app {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitCap = 3,
  kExitHypothesis = 4,
};

struct RunOptions {
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  unsigned workers = 1;
  bool strict = false;  // same as strict_hypotheses: true
};

/// exact-tv, limit-laws, separation, entropy.
const std::vector<std::string>& command_names();

/// Runs one command and maps library errors to exit codes. Progress and
/// error messages go to `log`.
int run_command(const std::string& command, Config config, const RunOptions& options, std::ostream& log);
int run_command(const std::string& command, const std::filesystem::path& config_path, const RunOptions& options,
                std::ostream& log);

}  // namespace noisewalk::app

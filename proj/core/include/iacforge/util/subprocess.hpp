#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iacforge::util {

struct RunOptions {
  std::optional<std::string> workdir;
  // Zero means no limit. On expiry the whole process group is killed.
  std::chrono::milliseconds timeout{0};
  std::string stdin_data;
  std::vector<std::pair<std::string, std::string>> extra_env;
};

struct RunResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;

  bool ok() const { return !timed_out && exit_code == 0; }
};

// Runs argv directly (no shell). Throws std::runtime_error if the binary
// cannot be spawned at all; a nonzero exit is reported, not thrown.
RunResult run_command(const std::vector<std::string>& argv, const RunOptions& opts = {});

bool is_executable_file(const std::string& path);

// Resolves a bare command name against PATH; absolute/relative paths are
// checked directly.
std::optional<std::string> resolve_binary(const std::string& name);

}  // namespace iacforge::util

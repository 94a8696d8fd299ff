#pragma once

#include <cstdint>
#include <string>

namespace sact::cli {

/// Exit codes: 0 clean, 1 diagnostics or violations, 2 usage/I-O.
struct command_result {
  int exit_code = 0;
  std::string output;
};

command_result cmd_check(const std::string& path);
command_result cmd_project(const std::string& path, const std::string& role,
                           const std::string& format);

struct run_options {
  std::uint64_t seed = 0;
  std::string transcript_path;
  std::string policy = "halt";  // halt | drop | log
  bool parallel = false;
  int join_timeout_ms = 5000;
};

command_result cmd_run(const std::string& scenario_name, const run_options& opts);
command_result cmd_replay(const std::string& fsm_path, const std::string& trace_path);
command_result cmd_bench(std::size_t messages, const std::string& monitor_mode);

/// Full argv entry point used by the binary.
int run_cli(int argc, const char* const* argv);

}  // namespace sact::cli

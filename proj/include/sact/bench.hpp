#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sact::bench {

struct bench_result {
  std::string mode;  // "on" | "off"
  std::size_t n = 0;
  std::uint64_t messages = 0;
  double elapsed_s = 0.0;
  double msgs_per_sec = 0.0;
};

/// Drives `n` ping/pong round trips through the full runtime over the
/// bundled two-role recursion, with monitoring enabled or bypassed.
bench_result run_pingpong(std::size_t n, bool monitored, std::uint64_t seed = 0);

/// {"mode","n","msgs_per_sec"}
nlohmann::ordered_json to_json(const bench_result& r);

struct latency_profile {
  std::vector<double> chunk_median_ns;  // per-step cost, chunked
  double first_decile_ns = 0.0;
  double last_decile_ns = 0.0;
  double spread = 0.0;  // max/min of the two decile medians
};

/// Times monitor.step over `steps` steps of a cyclic trace in chunks;
/// a flat profile has spread close to 1.
latency_profile step_latency_profile(std::size_t steps, std::size_t chunk = 1000);

}  // namespace sact::bench

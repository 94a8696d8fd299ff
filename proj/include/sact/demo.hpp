#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sact/runtime.hpp"

namespace sact::demo {

/// Scripted warehouse scenarios. The three conforming ones exercise the
/// purchase branches (buy, quit) and the dealer restock loop; the two
/// violation ones reproduce the double-update and early-put faults.
enum class scenario {
  happy_buy,
  browse_quit,
  restock,
  violation_double_request,
  violation_early_put,
};

const char* to_string(scenario s);
std::optional<scenario> scenario_from_name(std::string_view name);
std::vector<std::string> scenario_names();

struct demo_config {
  std::map<std::string, std::int64_t> stock = {{"widget", 5}};
  std::vector<std::string> customer_script;  // "request:<p>", "buy:<p>"; quit when exhausted
  std::int64_t restock_amount = 10;
  bool double_update = false;
  bool dealer_early_put = false;
};

/// Registers the Purchase/StoreLoad protocols and the warehouse,
/// customer, auth and dealer actor types on `sys`. Spawning and
/// session start are left to the caller.
void install_demo_types(actor_system& sys, const demo_config& cfg);

struct demo_result {
  int exit_code = 0;
  std::string transcript;  // JSON-lines, consumption order
  std::string policy_log;  // JSON-lines
  std::vector<envelope> messages;
  std::vector<violation> violations;
  std::vector<std::string> warnings;
  std::vector<session_record> sessions;
  std::vector<actor_fault> faults;
  bool all_monitors_final = false;
  bool dead_letters_empty = false;
  std::uint64_t monitor_steps = 0;
  std::uint64_t app_published = 0;
  std::uint64_t app_consumed = 0;
};

struct demo_options {
  std::uint64_t seed = 0;
  violation_policy policy = violation_policy::halt_session;
  bool parallel = false;
  std::chrono::milliseconds join_timeout{5000};
};

demo_result run_demo(scenario sc, const demo_options& opts = {});

}  // namespace sact::demo

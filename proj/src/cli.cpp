#include "sact/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sact/bench.hpp"
#include "sact/demo.hpp"
#include "sact/fsm.hpp"
#include "sact/parse.hpp"
#include "sact/project.hpp"
#include "sact/validate.hpp"

namespace sact::cli {
namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

struct loaded_protocol {
  std::optional<global_protocol> protocol;
  command_result failure;
};

loaded_protocol load_protocol(const std::string& path) {
  loaded_protocol out;
  std::string source;
  if (!read_file(path, source)) {
    out.failure = {2, "cannot read '" + path + "'\n"};
    return out;
  }
  auto parsed = parse_global(source);
  std::string rendered;
  for (const auto& d : parsed.diags)
    rendered += path + ":" + to_string(d) + "\n";
  if (!parsed.ok()) {
    out.failure = {1, rendered};
    return out;
  }
  auto diags = validate(*parsed.protocol);
  for (const auto& d : diags)
    rendered += path + ":" + to_string(d) + "\n";
  if (has_errors(diags)) {
    out.failure = {1, rendered};
    return out;
  }
  out.protocol = std::move(*parsed.protocol);
  out.failure = {0, rendered};
  return out;
}

}  // namespace

command_result cmd_check(const std::string& path) {
  auto loaded = load_protocol(path);
  if (!loaded.protocol)
    return loaded.failure;
  return {0, loaded.failure.output + "ok: " + loaded.protocol->name + " (" +
                 std::to_string(loaded.protocol->roles.size()) + " roles)\n"};
}

command_result cmd_project(const std::string& path, const std::string& role,
                           const std::string& format) {
  auto loaded = load_protocol(path);
  if (!loaded.protocol)
    return loaded.failure;
  const global_protocol& p = *loaded.protocol;
  if (!p.declares_role(role))
    return {2, "unknown role '" + role + "' in protocol " + p.name + "\n"};
  if (format != "text" && format != "dot" && format != "json")
    return {2, "unknown format '" + format + "' (expected text|dot|json)\n"};

  local_ptr l = project_role(p, role);
  if (format == "text")
    return {0, to_text(*l) + "\n"};
  fsm machine = build_fsm(*l);
  if (format == "dot")
    return {0, to_dot(machine)};
  return {0, to_json(machine).dump(2) + "\n"};
}

command_result cmd_run(const std::string& scenario_name, const run_options& opts) {
  auto sc = demo::scenario_from_name(scenario_name);
  if (!sc) {
    std::string names;
    for (const auto& n : demo::scenario_names())
      names += (names.empty() ? "" : ", ") + n;
    return {2, "unknown scenario '" + scenario_name + "' (expected one of: " + names +
                   ")\n"};
  }
  demo::demo_options dopts;
  dopts.seed = opts.seed;
  dopts.parallel = opts.parallel;
  dopts.join_timeout = std::chrono::milliseconds(opts.join_timeout_ms);
  if (opts.policy == "halt")
    dopts.policy = violation_policy::halt_session;
  else if (opts.policy == "drop")
    dopts.policy = violation_policy::drop_message;
  else if (opts.policy == "log")
    dopts.policy = violation_policy::log_only;
  else
    return {2, "unknown policy '" + opts.policy + "' (expected halt|drop|log)\n"};

  demo::demo_result r = demo::run_demo(*sc, dopts);

  if (!opts.transcript_path.empty()) {
    std::ofstream out(opts.transcript_path, std::ios::binary);
    if (!out)
      return {2, "cannot write transcript to '" + opts.transcript_path + "'\n"};
    out << r.transcript;
  }

  std::ostringstream out;
  out << "scenario: " << demo::to_string(*sc) << "\n";
  out << "messages: " << r.messages.size() << "\n";
  out << "violations: " << r.violations.size() << "\n";
  if (!r.violations.empty())
    out << r.policy_log;
  for (const auto& s : r.sessions)
    out << "session " << s.id << " (" << s.protocol << "): " << to_string(s.result)
        << "\n";
  for (const auto& f : r.faults)
    out << "actor fault: " << f.actor << " [" << f.label << "]: " << f.what << "\n";
  return {r.exit_code, out.str()};
}

command_result cmd_replay(const std::string& fsm_path, const std::string& trace_path) {
  std::string fsm_text, trace_text;
  if (!read_file(fsm_path, fsm_text))
    return {2, "cannot read '" + fsm_path + "'\n"};
  if (!read_file(trace_path, trace_text))
    return {2, "cannot read '" + trace_path + "'\n"};

  fsm machine;
  std::vector<action> trace;
  try {
    machine = fsm_from_json(nlohmann::json::parse(fsm_text));
    std::istringstream lines(trace_text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      trace.push_back(action_from_json(nlohmann::json::parse(line)));
    }
  } catch (const std::exception& e) {
    return {2, std::string("malformed input: ") + e.what() + "\n"};
  }

  accept_result r = fsm_accepts(machine, trace);
  if (r.accepted)
    return {0, "accepted: " + std::to_string(trace.size()) + " actions\n"};
  return {1, "rejected at index " + std::to_string(r.rejected_index) + " in state " +
                 machine.state_name(r.rejected_state) + ": " +
                 to_string(trace[r.rejected_index]) + "\n"};
}

command_result cmd_bench(std::size_t messages, const std::string& monitor_mode) {
  if (messages < 1000)
    return {2, "--messages must be at least 1000\n"};
  if (monitor_mode != "on" && monitor_mode != "off" && monitor_mode != "both")
    return {2, "unknown monitor mode '" + monitor_mode + "' (expected on|off|both)\n"};

  std::ostringstream out;
  std::optional<bench::bench_result> on, off;
  if (monitor_mode == "on" || monitor_mode == "both")
    on = bench::run_pingpong(messages, true);
  if (monitor_mode == "off" || monitor_mode == "both")
    off = bench::run_pingpong(messages, false);

  for (const auto* r : {&on, &off})
    if (r->has_value())
      out << bench::to_json(**r).dump() << "\n";

  if (on) {
    auto profile = bench::step_latency_profile(100000);
    out << "step latency: first decile " << profile.first_decile_ns << " ns, last decile "
        << profile.last_decile_ns << " ns, spread " << profile.spread << "x\n";
  }
  if (on && off && on->msgs_per_sec > 0 && off->msgs_per_sec > 0) {
    double ratio = on->msgs_per_sec / off->msgs_per_sec;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", ratio);
    out << "throughput ratio monitored/unmonitored: " << buf << "\n";
  }
  return {0, out.str()};
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"multiparty session actors: protocol tooling, demo runtime, benchmarks"};
  app.require_subcommand(1);

  std::string path, role, format = "text";
  auto* check = app.add_subcommand("check", "parse and validate a protocol file");
  check->add_option("file", path, "protocol source (.scr)")->required();

  auto* project = app.add_subcommand("project", "project a protocol onto one role");
  project->add_option("file", path, "protocol source (.scr)")->required();
  project->add_option("--role", role, "role to project")->required();
  project->add_option("--format", format, "text|dot|json");

  std::string scenario_name;
  run_options ropts;
  auto* run = app.add_subcommand("run", "run a warehouse demo scenario");
  run->add_option("scenario", scenario_name, "scenario name")->required();
  run->add_option("--seed", ropts.seed, "scheduler seed");
  run->add_option("--transcript", ropts.transcript_path, "transcript output path");
  run->add_option("--policy", ropts.policy, "halt|drop|log");
  run->add_flag("--parallel", ropts.parallel, "use the thread-pool scheduler");
  run->add_option("--join-timeout-ms", ropts.join_timeout_ms, "join barrier timeout");

  std::string fsm_path, trace_path;
  auto* replay = app.add_subcommand("replay", "replay a trace file against an FSM");
  replay->add_option("--fsm", fsm_path, "FSM json path")->required();
  replay->add_option("--trace", trace_path, "trace json-lines path")->required();

  std::size_t messages = 0;
  std::string monitor_mode = "on";
  auto* bench_cmd = app.add_subcommand("bench", "ping-pong monitor overhead benchmark");
  bench_cmd->add_option("--messages", messages, "round trips (>= 1000)")->required();
  bench_cmd->add_option("--monitor", monitor_mode, "on|off|both");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  command_result result;
  try {
    if (check->parsed())
      result = cmd_check(path);
    else if (project->parsed())
      result = cmd_project(path, role, format);
    else if (run->parsed())
      result = cmd_run(scenario_name, ropts);
    else if (replay->parsed())
      result = cmd_replay(fsm_path, trace_path);
    else if (bench_cmd->parsed())
      result = cmd_bench(messages, monitor_mode);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  (result.exit_code == 0 ? std::cout : std::cerr) << result.output;
  return result.exit_code;
}

}  // namespace sact::cli

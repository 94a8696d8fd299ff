#include "sact/bench.hpp"

#include <algorithm>
#include <chrono>
#include <memory>

#include <nlohmann/json.hpp>

#include "sact/corpus.hpp"
#include "sact/runtime.hpp"

namespace sact::bench {
namespace {

struct pinger_state {
  std::size_t remaining = 0;
  std::int64_t i = 0;
};

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point t0) {
  return std::chrono::duration<double>(clock::now() - t0).count();
}

}  // namespace

bench_result run_pingpong(std::size_t n, bool monitored, std::uint64_t seed) {
  if (n == 0)
    return {monitored ? "on" : "off", 0, 0, 0.0, 0.0};
  runtime_config rc;
  rc.seed = seed;
  rc.monitoring = monitored;
  rc.record_transcript = false;

  actor_system sys(rc);
  sys.add_protocol(corpus::pingpong());

  actor_type pinger("pinger", [n] { return std::any(pinger_state{n, 0}); });
  pinger.protocol("p", "PingPong", "P")
      .on_start("p", [](turn& t) { t.send("Q", "ping", {std::int64_t{0}}); })
      .on("p", "Q", "pong", [](turn& t) {
        auto& st = t.state<pinger_state>();
        if (--st.remaining > 0)
          t.send("Q", "ping", {++st.i});
        else
          t.send("Q", "stop");
      });
  sys.add_type(std::move(pinger));

  actor_type ponger("ponger");
  ponger.protocol("q", "PingPong", "Q")
      .on("q", "P", "ping",
          [](turn& t) { t.send("P", "pong", {std::get<std::int64_t>(t.message().payload[0])}); })
      .on("q", "P", "stop", [](turn&) {});
  sys.add_type(std::move(ponger));

  sys.spawn("pinger");
  sys.spawn("ponger");
  sys.start_session("PingPong");

  auto t0 = clock::now();
  sys.finish();
  double elapsed = seconds_since(t0);

  bench_result out;
  out.mode = monitored ? "on" : "off";
  out.n = n;
  out.messages = sys.app_published();
  out.elapsed_s = elapsed;
  out.msgs_per_sec = elapsed > 0 ? static_cast<double>(out.messages) / elapsed : 0.0;
  return out;
}

nlohmann::ordered_json to_json(const bench_result& r) {
  nlohmann::ordered_json doc;
  doc["mode"] = r.mode;
  doc["n"] = r.n;
  doc["msgs_per_sec"] = r.msgs_per_sec;
  return doc;
}

latency_profile step_latency_profile(std::size_t steps, std::size_t chunk) {
  auto machine =
      std::make_shared<const fsm>(build_fsm(*project_role(corpus::storeload(), "D")));
  monitor mon(machine, "bench", "D");
  const action recv_request = recv_action("S", "request", {sort::string_, sort::int_});
  const action send_put = send_action("S", "put", {sort::string_, sort::int_});

  latency_profile out;
  std::size_t done = 0;
  bool receiving = true;
  while (done < steps) {
    std::size_t batch = std::min(chunk, steps - done);
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < batch; ++i) {
      mon.step(receiving ? recv_request : send_put);
      receiving = !receiving;
    }
    double ns = std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0)
                    .count() /
                static_cast<double>(batch);
    out.chunk_median_ns.push_back(ns);
    done += batch;
  }

  auto median_of = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs.empty() ? 0.0 : xs[xs.size() / 2];
  };
  std::size_t decile = std::max<std::size_t>(1, out.chunk_median_ns.size() / 10);
  std::vector<double> first(out.chunk_median_ns.begin(),
                            out.chunk_median_ns.begin() + decile);
  std::vector<double> last(out.chunk_median_ns.end() - decile, out.chunk_median_ns.end());
  out.first_decile_ns = median_of(first);
  out.last_decile_ns = median_of(last);
  double lo = std::min(out.first_decile_ns, out.last_decile_ns);
  double hi = std::max(out.first_decile_ns, out.last_decile_ns);
  out.spread = lo > 0 ? hi / lo : 0.0;
  return out;
}

}  // namespace sact::bench

#include "sact/demo.hpp"

#include "sact/corpus.hpp"

namespace sact::demo {
namespace {

struct warehouse_state {
  std::map<std::string, std::int64_t> stock;
  std::int64_t restock_amount = 10;
  bool double_update = false;
};

struct customer_state {
  std::vector<std::string> script;
  std::map<std::string, std::size_t> cursor;  // per session
};

struct dealer_state {
  bool early_put = false;
};

std::string str_arg(const envelope& e, std::size_t i) {
  return std::get<std::string>(e.payload.at(i));
}

std::int64_t int_arg(const envelope& e, std::size_t i) {
  return std::get<std::int64_t>(e.payload.at(i));
}

// Plays the next scripted purchase move; quits when the script runs out.
void customer_advance(turn& t) {
  auto& st = t.state<customer_state>();
  std::size_t& i = st.cursor[t.ctx().session()];
  if (i >= st.script.size()) {
    t.send("S", "quit");
    return;
  }
  const std::string& op = st.script[i++];
  auto colon = op.find(':');
  std::string verb = op.substr(0, colon);
  std::string product = colon == std::string::npos ? "" : op.substr(colon + 1);
  if (verb == "request")
    t.send("S", "request", {product});
  else if (verb == "buy")
    t.send("S", "buy", {product});
  else
    t.send("S", "quit");
}

}  // namespace

const char* to_string(scenario s) {
  switch (s) {
    case scenario::happy_buy: return "happy-buy";
    case scenario::browse_quit: return "browse-quit";
    case scenario::restock: return "restock";
    case scenario::violation_double_request: return "violation-double-request";
    case scenario::violation_early_put: return "violation-early-put";
  }
  return "?";
}

std::optional<scenario> scenario_from_name(std::string_view name) {
  for (scenario s : {scenario::happy_buy, scenario::browse_quit, scenario::restock,
                     scenario::violation_double_request, scenario::violation_early_put})
    if (name == to_string(s))
      return s;
  return std::nullopt;
}

std::vector<std::string> scenario_names() {
  return {"happy-buy", "browse-quit", "restock", "violation-double-request",
          "violation-early-put"};
}

void install_demo_types(actor_system& sys, const demo_config& cfg) {
  sys.add_protocol(corpus::purchase());
  sys.add_protocol(corpus::storeload());

  actor_type warehouse("warehouse", [cfg] {
    return std::any(warehouse_state{cfg.stock, cfg.restock_amount, cfg.double_update});
  });
  warehouse.protocol("c", "Purchase", "S")
      .protocol("c1", "StoreLoad", "S")
      .on("c", "B", "login",
          [](turn& t) { t.send("A", "login", {str_arg(t.message(), 0)}); })
      .on("c", "A", "authenticate", [](turn&) {})
      .on("c", "B", "request",
          [](turn& t) {
            (void)str_arg(t.message(), 0);
            t.send("B", "", {std::int64_t{42}});
          })
      .on("c", "B", "buy",
          [](turn& t) {
            auto& st = t.state<warehouse_state>();
            std::string product = str_arg(t.message(), 0);
            st.stock[product] -= 1;
            t.send("B", "delivery", {product + " dispatched"});
            if (st.stock[product] <= 0 && t.context("c1")) {
              t.become("c1", "update", {product});
              if (st.double_update)
                t.become("c1", "update", {product});
            }
          })
      .on("c", "B", "quit", [](turn&) {})
      .on("c1", "self", "update",
          [](turn& t) {
            auto& st = t.state<warehouse_state>();
            t.send("D", "request", {str_arg(t.message(), 0), st.restock_amount});
          })
      .on("c1", "D", "put",
          [](turn& t) {
            auto& st = t.state<warehouse_state>();
            st.stock[str_arg(t.message(), 0)] += int_arg(t.message(), 1);
            t.send("D", "quit");
          })
      .on("c1", "D", "acc", [](turn&) {});
  sys.add_type(std::move(warehouse));

  actor_type customer("customer", [cfg] {
    return std::any(customer_state{cfg.customer_script, {}});
  });
  customer.protocol("c", "Purchase", "B")
      .on_start("c", [](turn& t) { t.send("S", "login", {"alice"}); })
      .on("c", "A", "authenticate", [](turn& t) { customer_advance(t); })
      .on("c", "S", "", [](turn& t) { customer_advance(t); })
      .on("c", "S", "delivery", [](turn&) {});
  sys.add_type(std::move(customer));

  actor_type auth("auth");
  auth.protocol("c", "Purchase", "A")
      .on("c", "S", "login", [](turn& t) {
        std::string token = "tok:" + str_arg(t.message(), 0);
        t.send("B", "authenticate", {token});
        t.send("S", "authenticate", {token});
      });
  sys.add_type(std::move(auth));

  actor_type dealer("dealer", [cfg] { return std::any(dealer_state{cfg.dealer_early_put}); });
  dealer.protocol("c", "StoreLoad", "D")
      .on_start("c",
                [](turn& t) {
                  if (t.state<dealer_state>().early_put)
                    t.system().inject_app_envelope(t.ctx().session(), "D", "S", "put",
                                                   {"widget", std::int64_t{5}});
                })
      .on("c", "S", "request",
          [](turn& t) {
            t.send("S", "put", {str_arg(t.message(), 0), int_arg(t.message(), 1)});
          })
      .on("c", "S", "quit", [](turn& t) { t.send("S", "acc"); });
  sys.add_type(std::move(dealer));
}

demo_result run_demo(scenario sc, const demo_options& opts) {
  demo_config cfg;
  switch (sc) {
    case scenario::happy_buy:
      cfg.customer_script = {"request:widget", "buy:widget"};
      break;
    case scenario::browse_quit:
      cfg.customer_script = {"request:widget"};
      break;
    case scenario::restock:
      cfg.stock = {{"widget", 1}};
      cfg.customer_script = {"request:widget", "buy:widget"};
      break;
    case scenario::violation_double_request:
      cfg.stock = {{"widget", 1}};
      cfg.customer_script = {"request:widget", "buy:widget"};
      cfg.double_update = true;
      break;
    case scenario::violation_early_put:
      cfg.dealer_early_put = true;
      break;
  }

  runtime_config rc;
  rc.seed = opts.seed;
  rc.policy = opts.policy;
  rc.parallel = opts.parallel;
  rc.join_timeout = opts.join_timeout;

  actor_system sys(rc);
  install_demo_types(sys, cfg);

  switch (sc) {
    case scenario::happy_buy:
    case scenario::browse_quit:
      sys.spawn("warehouse");
      sys.spawn("customer");
      sys.spawn("auth");
      sys.start_session("Purchase");
      break;
    case scenario::restock:
    case scenario::violation_double_request:
      sys.spawn("warehouse");
      sys.spawn("customer");
      sys.spawn("auth");
      sys.spawn("dealer");
      sys.start_session("Purchase");
      sys.start_session("StoreLoad");
      break;
    case scenario::violation_early_put:
      sys.spawn("warehouse");
      sys.spawn("dealer");
      sys.start_session("StoreLoad");
      break;
  }

  sys.finish();

  demo_result out;
  out.transcript = sys.transcript_jsonl();
  out.policy_log = sys.policy().log_jsonl();
  out.messages = sys.transcript();
  out.violations = sys.policy().log();
  out.warnings = sys.policy().warnings();
  out.sessions = sys.session_log();
  out.faults = sys.faults();
  out.dead_letters_empty = sys.net().dead_letters().empty();
  out.monitor_steps = sys.monitor_steps();
  out.app_published = sys.app_published();
  out.app_consumed = sys.app_consumed();
  out.all_monitors_final = !out.sessions.empty();
  for (const auto& rec : out.sessions) {
    bool ok = rec.result == session_record::outcome::completed;
    for (const auto& [role, fin] : rec.role_final)
      ok = ok && fin;
    out.all_monitors_final = out.all_monitors_final && ok;
  }
  out.exit_code = out.violations.empty() ? 0 : 1;
  return out;
}

}  // namespace sact::demo

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "sact/corpus.hpp"
#include "sact/monitor.hpp"
#include "sact/project.hpp"
#include "oracle.hpp"

using namespace sact;

namespace {

std::shared_ptr<const fsm> machine_for(const global_protocol& p, const std::string& r) {
  return std::make_shared<const fsm>(build_fsm(*project_role(p, r)));
}

const action sl_request_recv = recv_action("S", "request", {sort::string_, sort::int_});
const action sl_put_send = send_action("S", "put", {sort::string_, sort::int_});
const action sl_quit_recv = recv_action("S", "quit");
const action sl_acc_send = send_action("S", "acc");

}  // namespace

TEST_CASE("a fresh monitor sits on the initial state with zero steps") {
  monitor m(machine_for(corpus::storeload(), "D"), "s42", "D");
  CHECK(m.current() == 0);
  CHECK(m.step_count() == 0);
  CHECK(m.session() == "s42");
  CHECK(m.role() == "D");
  CHECK_FALSE(m.complete());
}

TEST_CASE("instances from one machine are independent") {
  auto machine = machine_for(corpus::storeload(), "D");
  monitor a(machine, "s1", "D");
  monitor b(machine, "s2", "D");
  CHECK_FALSE(a.step(sl_request_recv).has_value());
  CHECK(a.current() == 1);
  CHECK(b.current() == 0);
  CHECK(b.step_count() == 0);
}

TEST_CASE("stepping D through the loop and out") {
  monitor m(machine_for(corpus::storeload(), "D"), "s1", "D");
  CHECK_FALSE(m.step(sl_request_recv).has_value());
  CHECK(m.current() == 1);
  CHECK_FALSE(m.step(sl_put_send).has_value());
  CHECK(m.current() == 0);
  CHECK_FALSE(m.step(sl_quit_recv).has_value());
  CHECK_FALSE(m.step(sl_acc_send).has_value());
  CHECK(m.complete());
  CHECK(m.step_count() == 4);
}

TEST_CASE("two consecutive updates are detected as no-transition") {
  // the store side: after sending request, another request is impossible
  monitor m(machine_for(corpus::storeload(), "S"), "s1", "S");
  const action send_request = send_action("D", "request", {sort::string_, sort::int_});
  CHECK_FALSE(m.step(send_request).has_value());
  auto v = m.step(send_request);
  REQUIRE(v.has_value());
  CHECK(v->kind == violation_kind::no_transition);
  CHECK(v->state == "s1");
  CHECK(v->description.find("request") != std::string::npos);
}

TEST_CASE("put before request is detected as no-transition") {
  monitor m(machine_for(corpus::storeload(), "S"), "s1", "S");
  auto v = m.step(recv_action("D", "put", {sort::string_, sort::int_}));
  REQUIRE(v.has_value());
  CHECK(v->kind == violation_kind::no_transition);
  CHECK(m.current() == 0);
}

TEST_CASE("violations never advance the cursor") {
  monitor m(machine_for(corpus::storeload(), "D"), "s1", "D");
  CHECK(m.step(sl_put_send).has_value());
  CHECK(m.current() == 0);
  CHECK(m.step_count() == 0);
  // the valid action still works exactly as before
  CHECK_FALSE(m.step(sl_request_recv).has_value());
  CHECK(m.current() == 1);
}

TEST_CASE("violation kinds are the most specific applicable") {
  auto purchase_b = machine_for(corpus::purchase(), "B");

  SUBCASE("label mismatch: same direction and peer, wrong label") {
    monitor m(purchase_b, "s1", "B");
    auto v = m.step(send_action("S", "logim", {sort::string_}));
    REQUIRE(v);
    CHECK(v->kind == violation_kind::label_mismatch);
  }
  SUBCASE("role mismatch: same label and direction, wrong peer") {
    monitor m(purchase_b, "s1", "B");
    auto v = m.step(send_action("A", "login", {sort::string_}));
    REQUIRE(v);
    CHECK(v->kind == violation_kind::role_mismatch);
  }
  SUBCASE("direction mismatch: same label and peer, wrong direction") {
    monitor m(purchase_b, "s1", "B");
    CHECK_FALSE(m.step(send_action("S", "login", {sort::string_})));
    auto v = m.step(send_action("A", "authenticate", {sort::string_}));
    REQUIRE(v);
    CHECK(v->kind == violation_kind::direction_mismatch);
  }
  SUBCASE("arity mismatch: key would match but the payload is wrong") {
    monitor m(purchase_b, "s1", "B");
    auto v = m.step(send_action("S", "login", {sort::string_, sort::string_}));
    REQUIRE(v);
    CHECK(v->kind == violation_kind::arity_mismatch);
  }
  SUBCASE("sort mismatch at equal arity is reported as arity-mismatch") {
    monitor m(purchase_b, "s1", "B");
    auto v = m.step(send_action("S", "login", {sort::int_}));
    REQUIRE(v);
    CHECK(v->kind == violation_kind::arity_mismatch);
    CHECK(v->description.find("sorts") != std::string::npos);
  }
  SUBCASE("no transition otherwise") {
    monitor m(purchase_b, "s1", "B");
    auto v = m.step(recv_action("S", "zzz"));
    REQUIRE(v);
    CHECK(v->kind == violation_kind::no_transition);
  }
}

TEST_CASE("completion follows final states") {
  monitor d(machine_for(corpus::storeload(), "D"), "s1", "D");
  CHECK_FALSE(d.complete());
  CHECK_FALSE(d.step(sl_quit_recv).has_value());
  CHECK_FALSE(d.step(sl_acc_send).has_value());
  CHECK(d.complete());

  monitor a(machine_for(corpus::purchase(), "A"), "s1", "A");
  CHECK_FALSE(a.step(recv_action("S", "login", {sort::string_})).has_value());
  CHECK_FALSE(a.step(send_action("B", "authenticate", {sort::string_})).has_value());
  CHECK_FALSE(a.step(send_action("S", "authenticate", {sort::string_})).has_value());
  CHECK(a.complete());
}

TEST_CASE("folding step agrees with fsm_accepts, index for index") {
  testing::protocol_generator gen(77);
  for (std::size_t k = 0; k < 15; ++k) {
    auto p = gen.next();
    REQUIRE(p);
    for (const auto& role : p->role_names()) {
      auto machine = machine_for(*p, role);
      auto alphabet = testing::fsm_alphabet(*machine);
      for (std::size_t t = 0; t < 100; ++t) {
        auto trace = testing::random_trace(gen.rng(), alphabet, 8);
        monitor m(machine, "s", role);
        std::optional<std::size_t> failed_at;
        for (std::size_t i = 0; i < trace.size() && !failed_at; ++i)
          if (m.step(trace[i]).has_value())
            failed_at = i;
        auto verdict = fsm_accepts(*machine, trace);
        if (verdict.accepted) {
          REQUIRE_FALSE(failed_at.has_value());
          REQUIRE(m.step_count() == trace.size());
        } else {
          REQUIRE(failed_at.has_value());
          REQUIRE(*failed_at == verdict.rejected_index);
        }
      }
    }
  }
}

TEST_CASE("violation json uses the exact field names") {
  monitor m(machine_for(corpus::storeload(), "S"), "s-7", "S");
  auto v = m.step(recv_action("D", "put", {sort::string_, sort::int_}));
  REQUIRE(v);
  auto doc = to_json(*v);
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"kind", "session", "role", "state", "action",
                                         "description"});
  CHECK(doc["kind"] == "no-transition");
  CHECK(doc["session"] == "s-7");
  CHECK(doc["role"] == "S");
  CHECK(doc["state"] == "s0");
  std::vector<std::string> akeys;
  for (auto it = doc["action"].begin(); it != doc["action"].end(); ++it)
    akeys.push_back(it.key());
  CHECK(akeys == std::vector<std::string>{"dir", "peer", "label", "arity"});
  CHECK(doc["action"]["dir"] == "receive");
  CHECK(doc["action"]["arity"] == 2);
}

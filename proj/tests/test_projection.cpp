#include <doctest.h>

#include <functional>

#include "sact/corpus.hpp"
#include "sact/parse.hpp"
#include "sact/project.hpp"
#include "oracle.hpp"
#include "protocol_samples.hpp"

using namespace sact;

namespace {

global_protocol parsed(std::string_view src) {
  auto r = parse_global(src);
  REQUIRE(r.ok());
  return std::move(*r.protocol);
}

}  // namespace

TEST_CASE("purchase projects onto A as a linear local type") {
  // Hand projection: A receives the forwarded login, then broadcasts
  // authenticate to B and S in listed order, and is done.
  local_ptr l = project_role(corpus::purchase(), "A");
  CHECK(to_text(*l) ==
        "S?login(string) . B!authenticate(string) . S!authenticate(string) . end");
}

TEST_CASE("storeload projects onto D as an offered loop") {
  local_ptr l = project_role(corpus::storeload(), "D");
  CHECK(to_text(*l) ==
        "rec Rec { offer S { S?request(string,int) . S!put(string,int) . continue Rec"
        " or S?quit() . S!acc() . end } }");
}

TEST_CASE("storeload projects onto S as a selected loop") {
  local_ptr l = project_role(corpus::storeload(), "S");
  CHECK(to_text(*l) ==
        "rec Rec { choose { D!request(string,int) . D?put(string,int) . continue Rec"
        " or D!quit() . D?acc() . end } }");
}

TEST_CASE("a role that is never mentioned projects to end") {
  auto p = parsed(R"(global protocol P(role A, role B, role C) {
  m1() from A to B;
  rec X {
    m2(int) from B to A;
    continue X;
  }
})");
  local_ptr l = project_role(p, "C");
  CHECK(to_text(*l) == "end");
}

TEST_CASE("projection onto an undeclared role throws") {
  CHECK_THROWS_AS((void)project_role(corpus::purchase(), "Z"), std::invalid_argument);
}

TEST_CASE("purchase B projection selects among three branches") {
  local_ptr l = project_role(corpus::purchase(), "B");
  std::string text = to_text(*l);
  CHECK(text.find("S!login(string)") == 0);
  CHECK(text.find("A?authenticate(string)") != std::string::npos);
  CHECK(text.find("choose {") != std::string::npos);
  CHECK(text.find("S!request(string) . S?(int) . continue Browse") != std::string::npos);
  CHECK(text.find("S!buy(string) . S?delivery(string) . end") != std::string::npos);
  CHECK(text.find("S!quit() . end") != std::string::npos);
}

TEST_CASE("storeload D compiles to the four-state loop machine") {
  // s0 -S?request-> s1 -S!put-> s0 ; s0 -S?quit-> s2 -S!acc-> s3(final),
  // verified exhaustively against the oracle below.
  fsm f = build_fsm(*project_role(corpus::storeload(), "D"));
  CHECK(f.state_count() == 4);
  CHECK(f.transitions().size() == 4);
  CHECK(verify_fsm(f).empty());
  CHECK_FALSE(f.is_final(0));
  CHECK(f.is_final(3));

  const action req = recv_action("S", "request", {sort::string_, sort::int_});
  const action put = send_action("S", "put", {sort::string_, sort::int_});
  const action quit = recv_action("S", "quit");
  const action acc = send_action("S", "acc");

  REQUIRE(f.match(0, req));
  CHECK(f.match(0, req)->to == 1);
  REQUIRE(f.match(1, put));
  CHECK(f.match(1, put)->to == 0);
  REQUIRE(f.match(0, quit));
  CHECK(f.match(0, quit)->to == 2);
  REQUIRE(f.match(2, acc));
  CHECK(f.match(2, acc)->to == 3);
}

TEST_CASE("storeload D machine agrees with the oracle on every trace to depth 8") {
  local_ptr l = project_role(corpus::storeload(), "D");
  fsm f = build_fsm(*l);
  testing::local_type_oracle oracle(l);
  auto alphabet = testing::fsm_alphabet(f);
  REQUIRE(alphabet.size() == 4);

  // exhaustive enumeration over the 4-action alphabet
  std::vector<action> trace;
  std::size_t checked = 0;
  std::function<void(std::size_t)> walk = [&](std::size_t depth) {
    auto fsm_verdict = fsm_accepts(f, trace);
    auto oracle_verdict = oracle.run(trace);
    CHECK(fsm_verdict.accepted == oracle_verdict.accepted);
    if (!fsm_verdict.accepted)
      CHECK(fsm_verdict.rejected_index == oracle_verdict.rejected_index);
    ++checked;
    if (depth == 8)
      return;
    for (const auto& a : alphabet) {
      trace.push_back(a);
      walk(depth + 1);
      trace.pop_back();
    }
  };
  walk(0);
  CHECK(checked == (87381u));  // sum of 4^k for k = 0..8
}

TEST_CASE("a single send compiles to two states and one transition") {
  local_ptr l = local_type::make(
      local_type::send_t{"B", {"m", {}}, local_type::end()});
  fsm f = build_fsm(*l);
  CHECK(f.state_count() == 2);
  CHECK(f.transitions().size() == 1);
  CHECK(f.is_final(1));
}

TEST_CASE("purchase B machine loops from the request branch back to the choice") {
  fsm f = build_fsm(*project_role(corpus::purchase(), "B"));
  CHECK(verify_fsm(f).empty());

  state_id s = f.initial();
  const auto* t = f.match(s, send_action("S", "login", {sort::string_}));
  REQUIRE(t);
  s = t->to;
  t = f.match(s, recv_action("A", "authenticate", {sort::string_}));
  REQUIRE(t);
  state_id choice_state = t->to;

  auto out = f.outgoing(choice_state);
  CHECK(out.size() == 3);
  for (const auto* tr : out)
    CHECK(tr->act.dir == action_dir::send);

  const auto* req = f.match(choice_state, send_action("S", "request", {sort::string_}));
  REQUIRE(req);
  const auto* quote = f.match(req->to, recv_action("S", "", {sort::int_}));
  REQUIRE(quote);
  CHECK(quote->to == choice_state);  // back edge

  const auto* buy = f.match(choice_state, send_action("S", "buy", {sort::string_}));
  REQUIRE(buy);
  const auto* delivery = f.match(buy->to, recv_action("S", "delivery", {sort::string_}));
  REQUIRE(delivery);
  CHECK(f.is_final(delivery->to));
  const auto* quit = f.match(choice_state, send_action("S", "quit"));
  REQUIRE(quit);
  CHECK(f.is_final(quit->to));
}

TEST_CASE("purchase A machine is a linear four-state chain") {
  fsm f = build_fsm(*project_role(corpus::purchase(), "A"));
  CHECK(f.state_count() == 4);
  CHECK(f.transitions().size() == 3);
  CHECK(verify_fsm(f).empty());
  for (state_id s = 0; s < f.state_count(); ++s)
    CHECK(f.outgoing(s).size() == (f.is_final(s) ? 0u : 1u));
}

TEST_CASE("fsm_accepts on the storeload D examples") {
  fsm f = build_fsm(*project_role(corpus::storeload(), "D"));
  std::vector<action> good = {recv_action("S", "request", {sort::string_, sort::int_}),
                              send_action("S", "put", {sort::string_, sort::int_}),
                              recv_action("S", "quit"), send_action("S", "acc")};
  CHECK(fsm_accepts(f, good).accepted);

  std::vector<action> bad = {send_action("S", "put", {sort::string_, sort::int_})};
  auto r = fsm_accepts(f, bad);
  CHECK_FALSE(r.accepted);
  CHECK(r.rejected_index == 0);

  CHECK(fsm_accepts(f, {}).accepted);  // prefix semantics
}

TEST_CASE("dot output marks nodes, finals and edges") {
  fsm two = build_fsm(*local_type::make(
      local_type::send_t{"B", {"m", {}}, local_type::end()}));
  std::string dot = to_dot(two);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("s0 -> s1") != std::string::npos);
  CHECK(dot.find("label=\"B!m\"") != std::string::npos);

  fsm d = build_fsm(*project_role(corpus::storeload(), "D"));
  std::string ddot = to_dot(d);
  CHECK(ddot.find("s3 [shape=doublecircle]") != std::string::npos);
  CHECK(ddot.find("s0 -> s1 [label=\"S?request\"]") != std::string::npos);
  CHECK(ddot.find("s1 -> s0 [label=\"S!put\"]") != std::string::npos);

  fsm a = build_fsm(*project_role(corpus::purchase(), "A"));
  std::string adot = to_dot(a);
  // a linear chain: three edges
  std::size_t edges = 0, pos = 0;
  while ((pos = adot.find("label=", pos)) != std::string::npos) {
    ++edges;
    ++pos;
  }
  CHECK(edges == 3);
}

TEST_CASE("fsm json round-trips and uses the exact field names") {
  fsm f = build_fsm(*project_role(corpus::storeload(), "D"));
  auto doc = to_json(f);
  CHECK(doc.contains("states"));
  CHECK(doc.contains("initial"));
  CHECK(doc.contains("finals"));
  CHECK(doc.contains("transitions"));
  REQUIRE(doc["transitions"].size() == 4);
  const auto& t = doc["transitions"][0];
  std::vector<std::string> keys;
  for (auto it = t.begin(); it != t.end(); ++it)
    keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"from", "dir", "peer", "label", "sorts", "to"});

  fsm back = fsm_from_json(doc);
  CHECK(back.state_count() == f.state_count());
  CHECK(back.transitions().size() == f.transitions().size());
  CHECK(to_json(back) == doc);
}

TEST_CASE("every corpus machine satisfies the fsm invariants") {
  for (const auto& p : {corpus::purchase(), corpus::storeload(), corpus::pingpong()})
    for (const auto& r : p.role_names())
      CHECK(verify_fsm(build_fsm(*project_role(p, r))).empty());
}

TEST_CASE("random protocols: fsm agrees with the oracle everywhere") {
  testing::protocol_generator gen(1234);
  std::size_t protocols_checked = 0;
  for (std::size_t k = 0; k < 30; ++k) {
    auto p = gen.next();
    REQUIRE(p.has_value());
    for (const auto& role : p->role_names()) {
      local_ptr l = project_role(*p, role);
      fsm f = build_fsm(*l);
      CHECK(verify_fsm(f).empty());
      testing::local_type_oracle oracle(l);
      auto alphabet = testing::fsm_alphabet(f);
      for (std::size_t t = 0; t < 200; ++t) {
        auto trace = testing::random_trace(gen.rng(), alphabet, 8);
        auto fv = fsm_accepts(f, trace);
        auto ov = oracle.run(trace);
        REQUIRE(fv.accepted == ov.accepted);
        if (!fv.accepted)
          REQUIRE(fv.rejected_index == ov.rejected_index);
      }
    }
    ++protocols_checked;
  }
  CHECK(protocols_checked == 30);
}

TEST_CASE("uninvolved-role law holds on generated protocols") {
  testing::protocol_generator gen(99);
  for (std::size_t k = 0; k < 20; ++k) {
    auto p = gen.next();
    REQUIRE(p.has_value());
    global_protocol with_extra = *p;
    with_extra.roles.push_back({"Zed", {}});
    CHECK(to_text(*project_role(with_extra, "Zed")) == "end");
  }
}

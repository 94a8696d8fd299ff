#include <doctest.h>

#include "sact/corpus.hpp"
#include "sact/parse.hpp"
#include "sact/validate.hpp"
#include "protocol_samples.hpp"

using namespace sact;

namespace {

global_protocol parsed(std::string_view src) {
  auto r = parse_global(src);
  REQUIRE(r.ok());
  return std::move(*r.protocol);
}

bool any_message_contains(const std::vector<diagnostic>& diags, std::string_view text) {
  for (const auto& d : diags)
    if (d.message.find(text) != std::string::npos)
      return true;
  return false;
}

}  // namespace

TEST_CASE("the corpus validates with zero diagnostics") {
  CHECK(validate(corpus::purchase()).empty());
  CHECK(validate(corpus::storeload()).empty());
  CHECK(validate(corpus::pingpong()).empty());
  CHECK(validate(parsed(testing::purchase_literal)).empty());
  CHECK(validate(parsed(testing::storeload_literal)).empty());
}

TEST_CASE("validate is pure") {
  auto p = corpus::purchase();
  auto once = validate(p);
  auto twice = validate(p);
  CHECK(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].message == twice[i].message);
    CHECK(once[i].loc.line == twice[i].loc.line);
  }
}

TEST_CASE("a choice branch starting away from the chooser is rejected") {
  // branch 2's first transfer flipped to S -> B
  auto p = parsed(R"(global protocol Purchase(role B, role S, role A) {
  login(string:user) from B to S;
  login(string:user) from S to A;
  authenticate(string:token) from A to B, S;
  choice at B {
    request(string:product) from B to S;
    (int:quote) from S to B;
  } or {
    (int:quote) from S to B;
    buy(string:product) from B to S;
  } or {
    quit() from B to S;
  }
})");
  auto diags = validate(p);
  REQUIRE_FALSE(diags.empty());
  CHECK(any_message_contains(diags, "choice branch must start at chooser B"));
}

TEST_CASE("branches indistinguishable for the receiver are rejected") {
  auto p = parsed(R"(global protocol P(role B, role S) {
  choice at B {
    buy(string) from B to S;
  } or {
    buy(string:other) from B to S;
    ack() from S to B;
  }
})");
  auto diags = validate(p);
  REQUIRE_FALSE(diags.empty());
  CHECK(any_message_contains(diags, "indistinguishable branch labels for receiver S"));
}

TEST_CASE("same label with different arity is distinguishable") {
  auto p = parsed(R"(global protocol P(role B, role S) {
  choice at B {
    buy(string) from B to S;
  } or {
    buy(string, int) from B to S;
    ack() from S to B;
  }
})");
  CHECK(validate(p).empty());
}

TEST_CASE("self-messaging is rejected") {
  auto diags = validate(parsed("global protocol P(role A, role B) { m() from A to A; }"));
  CHECK(any_message_contains(diags, "cannot send to itself"));
}

TEST_CASE("undeclared roles are rejected") {
  auto diags = validate(parsed("global protocol P(role A, role B) { m() from A to Z; }"));
  CHECK(any_message_contains(diags, "role 'Z' is not declared"));

  diags = validate(parsed("global protocol P(role A, role B) { choice at C { m() from C to A; } }"));
  CHECK(any_message_contains(diags, "role 'C' is not declared"));
}

TEST_CASE("fewer than two roles is rejected") {
  auto diags = validate(parsed("global protocol P(role A) {}"));
  CHECK(any_message_contains(diags, "at least two roles"));
}

TEST_CASE("duplicate role names are rejected") {
  auto diags = validate(parsed("global protocol P(role A, role A) {}"));
  CHECK(any_message_contains(diags, "duplicate role name 'A'"));
}

TEST_CASE("a role that cannot tell branches apart is unprojectable") {
  // C hears nothing in branch two, so its views differ and plain merge fails.
  auto p = parsed(R"(global protocol P(role A, role B, role C) {
  choice at A {
    m1() from A to B;
    x() from B to C;
  } or {
    m2() from A to B;
  }
})");
  auto diags = validate(p);
  REQUIRE_FALSE(diags.empty());
  CHECK(any_message_contains(diags, "unprojectable"));
  CHECK(any_message_contains(diags, "'C'"));
}

TEST_CASE("receives from different peers across branches are unprojectable") {
  auto p = parsed(R"(global protocol P(role A, role B, role C) {
  choice at A {
    m1() from A to B;
    x() from B to C;
  } or {
    m2() from A to C;
    y() from A to B;
  }
})");
  auto diags = validate(p);
  CHECK(any_message_contains(diags, "unprojectable"));
}

TEST_CASE("identical branch tails merge even for an unknowing role") {
  auto p = parsed(R"(global protocol P(role A, role B, role C) {
  choice at A {
    m1() from A to B;
    x(int) from B to C;
  } or {
    m2() from A to B;
    x(int) from B to C;
  }
})");
  CHECK(validate(p).empty());
}

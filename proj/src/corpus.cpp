#include "sact/corpus.hpp"

#include <stdexcept>

#include "sact/parse.hpp"
#include "sact/validate.hpp"

namespace sact::corpus {
namespace {

constexpr std::string_view purchase_src = R"(// A buyer logs in through the store, gets authenticated, then browses
// quotes until buying a product or quitting.
global protocol Purchase(role B, role S, role A) {
  login(string:user) from B to S;
  login(string:user) from S to A;
  authenticate(string:token) from A to B, S;
  rec Browse {
    choice at B {
      request(string:product) from B to S;
      (int:quote) from S to B;
      continue Browse;
    } or {
      buy(string:product) from B to S;
      delivery(string) from S to B;
    } or {
      quit() from B to S;
    }
  }
}
)";

constexpr std::string_view storeload_src = R"(// A store keeps asking a dealer to restock products until it is done.
global protocol StoreLoad(role D, role S) {
  rec Rec {
    choice at S {
      request(string:product, int:n) from S to D;
      put(string:product, int:n) from D to S;
      continue Rec;
    } or {
      quit() from S to D;
      acc() from D to S;
    }
  }
}
)";

constexpr std::string_view pingpong_src = R"(// Two-party echo used by the benchmark harness.
global protocol PingPong(role P, role Q) {
  rec Loop {
    choice at P {
      ping(int) from P to Q;
      pong(int) from Q to P;
      continue Loop;
    } or {
      stop() from P to Q;
    }
  }
}
)";

global_protocol load(std::string_view src, const char* what) {
  auto parsed = parse_global(src);
  if (!parsed.ok())
    throw std::logic_error(std::string("bundled protocol failed to parse: ") + what);
  if (has_errors(validate(*parsed.protocol)))
    throw std::logic_error(std::string("bundled protocol failed to validate: ") + what);
  return std::move(*parsed.protocol);
}

}  // namespace

std::string_view purchase_source() { return purchase_src; }
std::string_view storeload_source() { return storeload_src; }
std::string_view pingpong_source() { return pingpong_src; }

global_protocol purchase() {
  static const global_protocol p = load(purchase_src, "Purchase");
  return p;
}

global_protocol storeload() {
  static const global_protocol p = load(storeload_src, "StoreLoad");
  return p;
}

global_protocol pingpong() {
  static const global_protocol p = load(pingpong_src, "PingPong");
  return p;
}

}  // namespace sact::corpus

// Shared protocol sources for tests: the literal two-protocol listing
// (split into one source per protocol, obvious typos in the original
// listing fixed) alongside the bundled variants from sact::corpus.
#pragma once

#include <string_view>

namespace sact::testing {

inline constexpr std::string_view purchase_literal = R"(global protocol Purchase
  (role B, role S, role A)
{
  login(string:user) from B to S;
  login(string:user) from S to A;
  authenticate(string:token) from A to B, S;
  choice at B
    {request(string:product) from B to S;
    (int:quote) from S to B;}
  or
    {buy(string:product) from B to S;
     delivery(string) from S to B; }
  or
    {quit() from B to S; }}
)";

inline constexpr std::string_view storeload_literal = R"(global protocol StoreLoad
  (role D, role S)
{
  rec Rec{
  choice at S
    {request(string:product, int:n) from S to D;
     put(string:product, int:n) from D to S;
     continue Rec;}
  or
    {quit() from S to D;
     acc() from D to S;}}}
)";

}  // namespace sact::testing

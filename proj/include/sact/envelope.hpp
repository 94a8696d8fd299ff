#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sact/ast.hpp"

namespace sact {

/// Scalar payload value matching the closed sort set.
using payload_value = std::variant<std::string, std::int64_t>;
using payload_list = std::vector<payload_value>;

inline sort sort_of(const payload_value& v) {
  return std::holds_alternative<std::string>(v) ? sort::string_ : sort::int_;
}

std::vector<sort> sorts_of(const payload_list& payload);

enum class envelope_kind : std::uint8_t { join, app, control };

const char* to_string(envelope_kind k);

/// The wire message. `seq` is a per-sender monotonic counter.
struct envelope {
  std::string protocol;
  std::string session;
  std::string from_role;
  std::string to_role;
  std::string label;
  payload_list payload;
  envelope_kind kind = envelope_kind::app;
  std::uint64_t seq = 0;

  bool operator==(const envelope& other) const = default;
};

/// {"protocol","session","from","to","label","payload","kind","seq"}
nlohmann::ordered_json to_json(const envelope& e);
envelope envelope_from_json(const nlohmann::json& doc);

}  // namespace sact

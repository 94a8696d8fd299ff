#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sact {

/// Position inside a protocol source, 1-based.
struct source_loc {
  int line = 0;
  int column = 0;
};

struct diagnostic {
  enum class severity { error, warning };
  severity sev = severity::error;
  std::string message;
  source_loc loc;
};

inline bool has_errors(const std::vector<diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.sev == diagnostic::severity::error)
      return true;
  return false;
}

std::string to_string(const diagnostic& d);

/// The closed set of payload sorts.
enum class sort : std::uint8_t { string_, int_ };

const char* to_string(sort s);
std::optional<sort> sort_from_name(std::string_view name);

/// One payload slot of a message signature. The name is documentation
/// only and never affects signature matching.
struct payload_item {
  sort ty;
  std::string name;  // may be empty

  bool operator==(const payload_item& other) const = default;
};

struct message_signature {
  std::string label;  // may be empty
  std::vector<payload_item> payload;

  std::size_t arity() const { return payload.size(); }
  std::vector<sort> sorts() const;

  bool operator==(const message_signature& other) const = default;
};

/// Renders "label(sort:name, sort)" exactly as the source syntax.
std::string to_string(const message_signature& sig);

struct role_decl {
  std::string name;
  source_loc loc;

  bool operator==(const role_decl& other) const { return name == other.name; }
};

struct global_interaction;
using interaction_seq = std::vector<global_interaction>;

/// `sig from A to B, C;`
struct transfer {
  message_signature sig;
  std::string from;
  std::vector<std::string> to;
};

/// `choice at A { ... } or { ... }`
struct choice {
  std::string at;
  std::vector<interaction_seq> branches;
};

/// `rec X { ... }`
struct recursion {
  std::string var;
  interaction_seq body;
};

/// `continue X;`
struct continuation {
  std::string var;
};

struct global_interaction {
  std::variant<transfer, choice, recursion, continuation> node;
  source_loc loc;

  bool operator==(const global_interaction& other) const;
};

struct global_protocol {
  std::string name;
  std::vector<role_decl> roles;
  interaction_seq body;
  source_loc loc;

  std::vector<std::string> role_names() const;
  bool declares_role(std::string_view r) const;

  // Structural equality; source locations are ignored.
  bool operator==(const global_protocol& other) const {
    return name == other.name && roles == other.roles && body == other.body;
  }
};

/// True if `r` occurs as sender or receiver anywhere in the sequence,
/// including nested choice branches and rec bodies.
bool mentions_role(const interaction_seq& seq, std::string_view r);

}  // namespace sact

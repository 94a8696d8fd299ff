#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sact/ast.hpp"

namespace sact {

class local_type;
using local_ptr = std::shared_ptr<const local_type>;

/// Message signature as seen by the projection: label plus payload
/// sorts. Payload names are erased; they never affect matching.
struct local_sig {
  std::string label;
  std::vector<sort> sorts;

  std::size_t arity() const { return sorts.size(); }
  bool operator==(const local_sig& other) const = default;
};

local_sig erase_names(const message_signature& sig);
std::string to_string(const local_sig& sig);

/// One role's view of a protocol: sends, receives, internal and
/// external choices, recursion. Immutable and freely shareable.
class local_type {
 public:
  struct send_t {
    std::string peer;
    local_sig sig;
    local_ptr cont;
  };
  struct recv_t {
    std::string peer;
    local_sig sig;
    local_ptr cont;
  };
  struct select_branch {
    std::string peer;
    local_sig sig;
    local_ptr cont;
  };
  /// The local role picks a branch by sending its first message.
  struct select_t {
    std::vector<select_branch> branches;
  };
  struct offer_branch {
    local_sig sig;
    local_ptr cont;
  };
  /// A single peer picks the branch; we learn it from the first receive.
  struct offer_t {
    std::string from;
    std::vector<offer_branch> branches;
  };
  struct rec_t {
    std::string var;
    local_ptr body;
  };
  struct var_t {
    std::string var;
  };
  struct end_t {};

  using node_t = std::variant<send_t, recv_t, select_t, offer_t, rec_t, var_t, end_t>;

  explicit local_type(node_t n) : node_(std::move(n)) {}

  const node_t& node() const { return node_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&node_);
  }

  static local_ptr make(node_t n) { return std::make_shared<local_type>(std::move(n)); }
  static local_ptr end() { return make(end_t{}); }

 private:
  node_t node_;
};

bool equal(const local_type& a, const local_type& b);
inline bool equal(const local_ptr& a, const local_ptr& b) {
  return equal(*a, *b);
}

/// Compact single-line rendering, e.g.
/// "S?login(string) . B!authenticate(string) . end".
std::string to_text(const local_type& l);

/// True if `var` occurs free (not bound by a nested rec of that name).
bool has_free_var(const local_type& l, const std::string& var);

}  // namespace sact

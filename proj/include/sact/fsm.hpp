#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sact/local_type.hpp"

namespace sact {

enum class action_dir : std::uint8_t { send, receive };

inline const char* to_string(action_dir d) {
  return d == action_dir::send ? "send" : "receive";
}

/// One observable step of a role: direction, peer, label, payload sorts.
/// Two actions share a transition key when (dir, peer, label, arity)
/// coincide; the sorts are checked once the key has matched.
struct action {
  action_dir dir;
  std::string peer;
  std::string label;
  std::vector<sort> sorts;

  std::size_t arity() const { return sorts.size(); }
  bool operator==(const action& other) const = default;
};

inline bool same_key(const action& a, const action& b) {
  return a.dir == b.dir && a.peer == b.peer && a.label == b.label &&
         a.sorts.size() == b.sorts.size();
}

/// "S!put(string,int)" / "S?request(string,int)"
std::string to_string(const action& a);

inline action send_action(std::string peer, std::string label, std::vector<sort> sorts = {}) {
  return {action_dir::send, std::move(peer), std::move(label), std::move(sorts)};
}
inline action recv_action(std::string peer, std::string label, std::vector<sort> sorts = {}) {
  return {action_dir::receive, std::move(peer), std::move(label), std::move(sorts)};
}

using state_id = std::uint32_t;

struct fsm_transition {
  state_id from;
  action act;
  state_id to;
};

/// Deterministic communicating FSM compiled from a local type. States
/// are numbered in construction order; s0 is initial.
class fsm {
 public:
  state_id initial() const { return 0; }
  std::size_t state_count() const { return final_.size(); }
  bool is_final(state_id s) const { return final_[s]; }
  std::string state_name(state_id s) const { return "s" + std::to_string(s); }

  const std::vector<fsm_transition>& transitions() const { return transitions_; }
  std::vector<const fsm_transition*> outgoing(state_id s) const;

  /// The unique transition from `s` whose key matches `a` and whose
  /// sorts agree, or nullptr.
  const fsm_transition* match(state_id s, const action& a) const;
  const fsm_transition* match_key(state_id s, const action& a) const;

 private:
  friend fsm build_fsm(const local_type&);
  friend fsm fsm_from_json(const nlohmann::json& doc);

  state_id add_state(bool is_final);
  void add_transition(state_id from, action a, state_id to);
  void reindex();

  std::vector<bool> final_;
  std::vector<fsm_transition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
};

/// Compiles a closed local type: one state per syntactic sub-term,
/// recursion as a back edge, a single shared final state for `end`.
fsm build_fsm(const local_type& l);

struct accept_result {
  bool accepted;
  std::size_t rejected_index = 0;  // meaningful when !accepted
  state_id rejected_state = 0;
};

/// Runs the trace from the initial state; prefix semantics, so the
/// empty trace and any conforming prefix are accepted.
accept_result fsm_accepts(const fsm& f, std::span<const action> trace);

/// Invariant check used by tests: determinism, reachability, and no
/// state mixing sends with receives. Returns human-readable problems.
std::vector<std::string> verify_fsm(const fsm& f);

std::string to_dot(const fsm& f);

/// {"states": [...], "initial": ..., "finals": [...], "transitions":
///  [{"from","dir","peer","label","sorts","to"}, ...]}
nlohmann::ordered_json to_json(const fsm& f);
fsm fsm_from_json(const nlohmann::json& doc);

/// {"dir","peer","label","sorts"} — the trace-file line format.
nlohmann::ordered_json to_json(const action& a);
action action_from_json(const nlohmann::json& doc);

}  // namespace sact

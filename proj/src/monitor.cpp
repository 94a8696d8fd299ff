#include "sact/monitor.hpp"

#include <nlohmann/json.hpp>

namespace sact {

const char* to_string(violation_kind k) {
  switch (k) {
    case violation_kind::label_mismatch: return "label-mismatch";
    case violation_kind::role_mismatch: return "role-mismatch";
    case violation_kind::direction_mismatch: return "direction-mismatch";
    case violation_kind::arity_mismatch: return "arity-mismatch";
    case violation_kind::no_transition: return "no-transition";
    case violation_kind::stuck_session: return "stuck-session";
  }
  return "?";
}

nlohmann::ordered_json to_json(const violation& v) {
  nlohmann::ordered_json doc;
  doc["kind"] = to_string(v.kind);
  doc["session"] = v.session;
  doc["role"] = v.role;
  doc["state"] = v.state;
  nlohmann::ordered_json act;
  act["dir"] = to_string(v.offending.dir);
  act["peer"] = v.offending.peer;
  act["label"] = v.offending.label;
  act["arity"] = v.offending.arity();
  doc["action"] = std::move(act);
  doc["description"] = v.description;
  return doc;
}

monitor::monitor(std::shared_ptr<const fsm> machine, std::string session, std::string role)
    : machine_(std::move(machine)), session_(std::move(session)), role_(std::move(role)) {
  current_.store(machine_->initial(), std::memory_order_relaxed);
}

monitor::monitor(monitor&& other) noexcept
    : machine_(std::move(other.machine_)),
      session_(std::move(other.session_)),
      role_(std::move(other.role_)) {
  current_.store(other.current(), std::memory_order_relaxed);
  step_count_.store(other.step_count(), std::memory_order_relaxed);
}

std::optional<violation> monitor::step(const action& a) {
  const fsm_transition* t = machine_->match(current(), a);
  if (t) {
    current_.store(t->to, std::memory_order_relaxed);
    step_count_.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  return classify(a);
}

bool monitor::complete() const {
  return machine_->is_final(current());
}

// Picks the most specific applicable kind: a key match with wrong
// payload, a (dir, peer, label) match with wrong arity, a (dir, peer)
// match with wrong label, the same label reachable elsewhere with a
// wrong peer or direction, and otherwise no-transition.
violation monitor::classify(const action& a) const {
  violation v;
  v.session = session_;
  v.role = role_;
  v.offending = a;
  v.state = state_name();

  auto out = machine_->outgoing(current());
  const std::string shown = to_string(a);

  if (const fsm_transition* key = machine_->match_key(current(), a)) {
    v.kind = violation_kind::arity_mismatch;
    v.description = shown + " carries payload sorts that do not match " +
                    to_string(key->act) + " at state " + v.state;
    return v;
  }
  for (const auto* t : out) {
    if (t->act.dir == a.dir && t->act.peer == a.peer && t->act.label == a.label) {
      v.kind = violation_kind::arity_mismatch;
      v.description = shown + " has arity " + std::to_string(a.arity()) + " but " +
                      to_string(t->act) + " expects " + std::to_string(t->act.arity());
      return v;
    }
  }
  for (const auto* t : out) {
    if (t->act.dir == a.dir && t->act.peer == a.peer) {
      v.kind = violation_kind::label_mismatch;
      v.description = shown + " does not match any label enabled towards " + a.peer +
                      " at state " + v.state;
      return v;
    }
  }
  for (const auto* t : out) {
    if (t->act.label == a.label && t->act.dir == a.dir) {
      v.kind = violation_kind::role_mismatch;
      v.description = shown + " names peer " + a.peer + " but label '" + a.label +
                      "' is enabled with peer " + t->act.peer;
      return v;
    }
  }
  for (const auto* t : out) {
    if (t->act.label == a.label) {
      v.kind = violation_kind::direction_mismatch;
      v.description = shown + " has the wrong direction; expected " + to_string(t->act);
      return v;
    }
  }
  v.kind = violation_kind::no_transition;
  v.description = "no transition for " + shown + " at state " + v.state;
  return v;
}

}  // namespace sact

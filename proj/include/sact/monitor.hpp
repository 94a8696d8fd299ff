#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "sact/fsm.hpp"

namespace sact {

enum class violation_kind : std::uint8_t {
  label_mismatch,
  role_mismatch,
  direction_mismatch,
  arity_mismatch,
  no_transition,
  stuck_session,
};

const char* to_string(violation_kind k);

struct violation {
  violation_kind kind;
  std::string session;
  std::string role;
  action offending;
  std::string state;
  std::string description;
};

/// {"kind","session","role","state","action":{"dir","peer","label","arity"},
///  "description"}
nlohmann::ordered_json to_json(const violation& v);

/// Conformance checker for one (session, role) endpoint. Owns a cursor
/// into a shared FSM; stepping either advances along the unique
/// matching transition or reports a violation and stays put.
class monitor {
 public:
  monitor(std::shared_ptr<const fsm> machine, std::string session, std::string role);

  monitor(monitor&& other) noexcept;
  monitor& operator=(monitor&&) = delete;
  monitor(const monitor&) = delete;

  /// nullopt on success (the cursor advanced); otherwise the most
  /// specific violation for the offending action, cursor unchanged.
  std::optional<violation> step(const action& a);

  /// True iff the cursor sits on a final state.
  bool complete() const;

  state_id current() const { return current_.load(std::memory_order_relaxed); }
  std::string state_name() const { return machine_->state_name(current()); }
  std::uint64_t step_count() const { return step_count_.load(std::memory_order_relaxed); }
  const std::string& session() const { return session_; }
  const std::string& role() const { return role_; }
  const fsm& machine() const { return *machine_; }

 private:
  violation classify(const action& a) const;

  std::shared_ptr<const fsm> machine_;
  std::string session_;
  std::string role_;
  // Stepped only from the owning actor's turn; atomic so the system
  // may snapshot progress from another thread.
  std::atomic<state_id> current_{0};
  std::atomic<std::uint64_t> step_count_{0};
};

}  // namespace sact

#pragma once

#include <any>
#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sact/ast.hpp"
#include "sact/broker.hpp"
#include "sact/fsm.hpp"
#include "sact/monitor.hpp"
#include "sact/project.hpp"

namespace sact {

class actor_system;
class session_actor;
class role_context;
class turn;

class session_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class violation_policy : std::uint8_t { halt_session, drop_message, log_only };

const char* to_string(violation_policy p);

struct runtime_config {
  std::uint64_t seed = 0;
  violation_policy policy = violation_policy::halt_session;
  std::chrono::milliseconds join_timeout{5000};
  bool monitoring = true;
  bool record_transcript = true;
  bool parallel = false;
  unsigned threads = 4;
};

using handler_fn = std::function<void(turn&)>;

/// Declaration of an actor type: which protocol roles it can fill
/// (one named slot per registration) and a handler per receivable
/// message label. Handlers whose sender is "self" are internal; they
/// are reachable only through `become` and never stepped by a monitor.
class actor_type {
 public:
  explicit actor_type(std::string name, std::function<std::any()> make_state = {});

  actor_type& protocol(std::string slot, std::string protocol_name, std::string self_role);
  actor_type& on(const std::string& slot, std::string sender, std::string label,
                 handler_fn fn);
  /// Runs once per session right after the session-start barrier opens.
  actor_type& on_start(const std::string& slot, handler_fn fn);

  const std::string& name() const { return name_; }

  struct handler_spec {
    std::string slot;
    std::string sender;  // peer role, or "self" for internal handlers
    std::string label;
    handler_fn fn;
  };

  struct registration {
    std::string slot;
    std::string protocol;
    std::string self_role;
    local_ptr ltype;
    std::shared_ptr<const fsm> machine;
    std::vector<std::string> peers;
  };

  const handler_spec* find_handler(const std::string& slot, const std::string& label) const;
  const handler_fn* find_start_hook(const std::string& slot) const;
  const registration* find_registration(const std::string& protocol,
                                        const std::string& role) const;
  const registration* slot_registration(const std::string& slot) const;
  const std::vector<registration>& registrations() const { return registrations_; }

 private:
  friend class actor_system;

  struct slot_decl {
    std::string slot;
    std::string protocol;
    std::string self_role;
  };

  std::string name_;
  std::function<std::any()> make_state_;
  std::vector<slot_decl> slots_;
  std::map<std::pair<std::string, std::string>, handler_spec> handlers_;  // (slot,label)
  std::map<std::string, handler_fn> start_hooks_;
  std::vector<registration> registrations_;  // filled when added to a system
};

/// One (session, role) endpoint owned by an actor: the monitor, the
/// peer set and the routing target for outbound sends.
class role_context {
 public:
  const std::string& session() const { return session_; }
  const std::string& protocol() const { return protocol_; }
  const std::string& self_role() const { return role_; }
  const std::string& slot() const { return slot_; }
  const std::vector<std::string>& peers() const { return peers_; }
  bool has_peer(const std::string& r) const;

  monitor& mon() { return monitor_; }
  const monitor& mon() const { return monitor_; }

  bool started() const { return started_.load(); }
  bool ended() const { return ended_.load(); }

 private:
  friend class actor_system;
  friend class session_actor;

  role_context(std::string session, std::string protocol, std::string role,
               std::string slot, monitor m, std::vector<std::string> peers)
      : session_(std::move(session)),
        protocol_(std::move(protocol)),
        role_(std::move(role)),
        slot_(std::move(slot)),
        monitor_(std::move(m)),
        peers_(std::move(peers)) {}

  std::string session_;
  std::string protocol_;
  std::string role_;
  std::string slot_;
  monitor monitor_;
  std::vector<std::string> peers_;
  std::atomic<bool> started_{false};
  std::atomic<bool> ended_{false};
};

class session_actor {
 public:
  const std::string& id() const { return id_; }
  const actor_type& type() const { return *type_; }
  std::any& state() { return state_; }

  role_context* context_for(const std::string& session);
  /// Live (not ended) contexts registered under `slot`.
  std::vector<role_context*> contexts_for_slot(const std::string& slot);

 private:
  friend class actor_system;

  struct internal_entry {
    envelope env;
    std::function<void(turn&)> script;  // set for synthetic turns
  };

  session_actor(std::string id, const actor_type* type, std::string queue,
                std::uint64_t consumer)
      : id_(std::move(id)), type_(type), queue_(std::move(queue)), consumer_(consumer) {}

  std::string id_;
  const actor_type* type_;
  std::string queue_;
  std::uint64_t consumer_;
  std::any state_;
  std::uint64_t seq_ = 0;

  std::mutex internal_mu_;
  std::deque<internal_entry> internal_;

  std::map<std::string, std::unique_ptr<role_context>> contexts_;
  std::atomic<bool> in_turn_{false};
  std::atomic<bool> queued_{false};  // parallel scheduler bookkeeping
};

/// Handler-side view of the message being processed.
class turn {
 public:
  const envelope& message() const { return *env_; }
  bool has_ctx() const { return ctx_ != nullptr; }
  role_context& ctx();

  template <class T>
  T& state() {
    return std::any_cast<T&>(actor_->state());
  }

  /// Monitored send on this turn's context.
  void send(const std::string& to, const std::string& label, payload_list payload = {});
  /// Monitored send on an explicit context of this actor.
  void send(role_context& via, const std::string& to, const std::string& label,
            payload_list payload = {});

  /// Enqueues an internal message; the handler for (slot, label) runs
  /// as this actor's next unit of work, under that slot's context.
  void become(const std::string& slot, const std::string& label,
              payload_list payload = {});
  void become(role_context& target, const std::string& label, payload_list payload = {});

  /// The unique live context for `slot`, or nullptr.
  role_context* context(const std::string& slot);

  session_actor& self() { return *actor_; }
  actor_system& system() { return *sys_; }

 private:
  friend class actor_system;
  turn(actor_system* sys, session_actor* actor, role_context* ctx, const envelope* env)
      : sys_(sys), actor_(actor), ctx_(ctx), env_(env) {}

  actor_system* sys_;
  session_actor* actor_;
  role_context* ctx_;
  const envelope* env_;
};

/// Receives every violation; applies the configured response and keeps
/// the serialized log.
class policy_actor {
 public:
  std::vector<violation> log() const;
  std::vector<std::string> warnings() const;
  std::string log_jsonl() const;
  std::size_t violation_count() const;

 private:
  friend class actor_system;
  mutable std::mutex mu_;
  std::deque<violation> pending_;
  std::vector<violation> log_;
  std::vector<std::string> warnings_;
};

struct session_record {
  enum class outcome { completed, halted, aborted, stuck };
  std::string id;
  std::string protocol;
  outcome result;
  std::vector<std::pair<std::string, bool>> role_final;  // (role, monitor completed)
};

const char* to_string(session_record::outcome o);

struct actor_fault {
  std::string actor;
  std::string session;
  std::string label;
  std::string what;
};

/// The session-actor runtime: type registration, discovery through
/// join/ack exchanges, monitored dispatch, cooperative multi-role
/// scheduling. The default scheduler is a single-threaded seeded loop
/// and fully deterministic; `parallel` opts into a thread pool with
/// the same per-actor turn exclusivity.
class actor_system {
 public:
  explicit actor_system(runtime_config cfg = {});
  ~actor_system();

  actor_system(const actor_system&) = delete;
  actor_system& operator=(const actor_system&) = delete;

  /// Registers a protocol; must validate cleanly.
  void add_protocol(const global_protocol& p);
  const global_protocol& protocol(const std::string& name) const;

  /// Resolves registrations (projection, FSM compilation, handler
  /// coverage) and binds the type exchange under each protocol
  /// exchange. Throws session_error on coverage failures.
  actor_type& add_type(actor_type def);

  session_actor& spawn(const std::string& type_name);

  /// Declares the session exchange, broadcasts one join per role and
  /// arms the join barrier. Returns the fresh session id immediately;
  /// the barrier resolves while the system runs.
  std::string start_session(const std::string& protocol_name);

  /// Pumps turns until quiescent. At quiescence, overdue join barriers
  /// are expired (sessions aborted) and pumping resumes.
  void run();

  /// run() plus the stuck-session sweep for sessions that can no
  /// longer make progress.
  void finish();

  broker& net() { return broker_; }
  const runtime_config& config() const { return cfg_; }
  policy_actor& policy() { return policy_; }

  const std::vector<envelope>& transcript() const { return transcript_; }
  std::string transcript_jsonl() const;
  const std::vector<session_record>& session_log() const { return session_log_; }
  const std::vector<actor_fault>& faults() const { return faults_; }

  std::uint64_t monitor_steps() const { return monitor_steps_.load(); }
  std::uint64_t app_published() const { return app_published_.load(); }
  std::uint64_t app_consumed() const { return app_consumed_.load(); }
  int reentrancy_detected() const { return reentrancy_detected_.load(); }

  /// Publishes a raw application envelope to the session exchange,
  /// bypassing the sender-side monitor. Fault injection for tests and
  /// the violation demo scenarios.
  void inject_app_envelope(const std::string& session, const std::string& from,
                           const std::string& to, const std::string& label,
                           payload_list payload = {});

  /// Schedules `fn` as a synthetic turn of `a` (turn exclusivity
  /// applies). Used by scripted drivers.
  void execute_turn(session_actor& a, std::function<void(turn&)> fn);

 private:
  friend class turn;
  friend class role_context;

  struct session_state {
    std::string id;
    std::string protocol;
    std::vector<std::string> roles;
    std::set<std::string> acked;
    bool started = false;
    bool ended = false;
    std::chrono::steady_clock::time_point deadline;
    std::vector<std::pair<session_actor*, role_context*>> contexts;
    std::uint64_t coord_seq = 0;
    std::string coord_queue;
    std::uint64_t coord_consumer = 0;
    std::atomic<bool> coord_queued{false};
  };

  // --- turn bodies ---------------------------------------------------
  std::size_t dispatch(session_actor& a);
  void process_internal(session_actor& a, session_actor::internal_entry entry);
  void process_external(session_actor& a, const envelope& e);
  void handle_join(session_actor& a, const envelope& e);
  void handle_control(session_actor& a, const envelope& e);
  void handle_app(session_actor& a, const envelope& e);
  void coordinator_turn(session_state& s);
  void policy_turn();

  void run_handler(session_actor& a, const handler_fn& fn, role_context* ctx,
                   const envelope& e);

  // --- send path ------------------------------------------------------
  void session_send(session_actor& a, role_context& ctx, const std::string& to,
                    const std::string& label, payload_list payload);
  void enqueue_become(session_actor& a, role_context& target, const std::string& label,
                      payload_list payload);

  // --- bookkeeping ----------------------------------------------------
  std::size_t publish_tracked(const std::string& exchange, const std::string& key,
                              envelope e);
  std::optional<envelope> consume_tracked(session_actor& a);
  void report(const violation& v);
  void warn(const std::string& msg);
  void halt_session(const std::string& session, session_record::outcome why);
  void teardown_scan();
  bool expire_due_barriers(bool force);
  void stuck_sweep();
  void record_session(session_state& s, session_record::outcome result);

  bool actor_has_work(session_actor& a);
  void cooperative_pump();
  void parallel_pump();
  void notify_queue(const std::string& queue);

  runtime_config cfg_;
  broker broker_;
  policy_actor policy_;

  std::map<std::string, global_protocol> protocols_;
  std::map<std::string, std::unique_ptr<actor_type>> types_;
  std::vector<std::unique_ptr<session_actor>> actors_;
  std::map<std::string, std::size_t> spawn_counts_;

  mutable std::mutex state_mu_;
  std::map<std::string, std::unique_ptr<session_state>> sessions_;
  std::map<std::string, std::int64_t> inflight_;
  std::map<std::string, std::int64_t> internal_inflight_;
  std::map<std::string, session_actor*> queue_owner_;
  std::vector<envelope> transcript_;
  std::vector<session_record> session_log_;
  std::vector<actor_fault> faults_;

  std::uint64_t session_counter_ = 0;
  std::uint64_t consumer_counter_ = 1;
  std::mt19937_64 rng_;

  std::atomic<std::uint64_t> monitor_steps_{0};
  std::atomic<std::uint64_t> app_published_{0};
  std::atomic<std::uint64_t> app_consumed_{0};
  std::atomic<int> reentrancy_detected_{0};
  std::atomic<bool> policy_queued_{false};
};

}  // namespace sact

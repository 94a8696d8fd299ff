#include "sact/runtime.hpp"

#include <algorithm>
#include <condition_variable>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sact/validate.hpp"

namespace sact {

namespace {
constexpr const char* initiator_key = "__init__";
constexpr const char* label_join = "join";
constexpr const char* label_join_ack = "join-ack";
constexpr const char* label_session_start = "session-start";
constexpr const char* label_session_abort = "session-abort";
}  // namespace

const char* to_string(violation_policy p) {
  switch (p) {
    case violation_policy::halt_session: return "halt-session";
    case violation_policy::drop_message: return "drop-message";
    case violation_policy::log_only: return "log-only";
  }
  return "?";
}

const char* to_string(session_record::outcome o) {
  switch (o) {
    case session_record::outcome::completed: return "completed";
    case session_record::outcome::halted: return "halted";
    case session_record::outcome::aborted: return "aborted";
    case session_record::outcome::stuck: return "stuck";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// actor_type

actor_type::actor_type(std::string name, std::function<std::any()> make_state)
    : name_(std::move(name)), make_state_(std::move(make_state)) {}

actor_type& actor_type::protocol(std::string slot, std::string protocol_name,
                                 std::string self_role) {
  for (const auto& s : slots_)
    if (s.slot == slot)
      throw session_error("slot '" + slot + "' declared twice on type " + name_);
  slots_.push_back({std::move(slot), std::move(protocol_name), std::move(self_role)});
  return *this;
}

actor_type& actor_type::on(const std::string& slot, std::string sender, std::string label,
                           handler_fn fn) {
  auto key = std::make_pair(slot, label);
  if (handlers_.count(key))
    throw session_error("handler (" + slot + ", " + label + ") declared twice on type " +
                        name_);
  handlers_[key] = {slot, std::move(sender), std::move(label), std::move(fn)};
  return *this;
}

actor_type& actor_type::on_start(const std::string& slot, handler_fn fn) {
  start_hooks_[slot] = std::move(fn);
  return *this;
}

const actor_type::handler_spec* actor_type::find_handler(const std::string& slot,
                                                         const std::string& label) const {
  auto it = handlers_.find(std::make_pair(slot, label));
  return it == handlers_.end() ? nullptr : &it->second;
}

const handler_fn* actor_type::find_start_hook(const std::string& slot) const {
  auto it = start_hooks_.find(slot);
  return it == start_hooks_.end() ? nullptr : &it->second;
}

const actor_type::registration* actor_type::find_registration(
    const std::string& protocol, const std::string& role) const {
  for (const auto& r : registrations_)
    if (r.protocol == protocol && r.self_role == role)
      return &r;
  return nullptr;
}

const actor_type::registration* actor_type::slot_registration(
    const std::string& slot) const {
  for (const auto& r : registrations_)
    if (r.slot == slot)
      return &r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// session_actor / role_context / turn

bool role_context::has_peer(const std::string& r) const {
  return std::find(peers_.begin(), peers_.end(), r) != peers_.end();
}

role_context* session_actor::context_for(const std::string& session) {
  auto it = contexts_.find(session);
  return it == contexts_.end() ? nullptr : it->second.get();
}

std::vector<role_context*> session_actor::contexts_for_slot(const std::string& slot) {
  std::vector<role_context*> out;
  for (auto& [_, ctx] : contexts_)
    if (ctx->slot() == slot && !ctx->ended())
      out.push_back(ctx.get());
  return out;
}

role_context& turn::ctx() {
  if (!ctx_)
    throw session_error("turn has no session context");
  return *ctx_;
}

void turn::send(const std::string& to, const std::string& label, payload_list payload) {
  sys_->session_send(*actor_, ctx(), to, label, std::move(payload));
}

void turn::send(role_context& via, const std::string& to, const std::string& label,
                payload_list payload) {
  sys_->session_send(*actor_, via, to, label, std::move(payload));
}

void turn::become(const std::string& slot, const std::string& label,
                  payload_list payload) {
  role_context* target = context(slot);
  if (!target)
    throw session_error("become: no live context for slot '" + slot + "'");
  become(*target, label, std::move(payload));
}

void turn::become(role_context& target, const std::string& label, payload_list payload) {
  sys_->enqueue_become(*actor_, target, label, std::move(payload));
}

role_context* turn::context(const std::string& slot) {
  auto live = actor_->contexts_for_slot(slot);
  if (live.empty())
    return nullptr;
  if (live.size() > 1)
    throw session_error("slot '" + slot + "' is ambiguous: " +
                        std::to_string(live.size()) + " live sessions");
  return live.front();
}

// ---------------------------------------------------------------------------
// policy_actor

std::vector<violation> policy_actor::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::vector<std::string> policy_actor::warnings() const {
  std::lock_guard lock(mu_);
  return warnings_;
}

std::size_t policy_actor::violation_count() const {
  std::lock_guard lock(mu_);
  return log_.size() + pending_.size();
}

std::string policy_actor::log_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& v : log_) {
    out += to_json(v).dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// actor_system

actor_system::actor_system(runtime_config cfg) : cfg_(cfg), rng_(cfg.seed) {
  broker_.on_dead_letter = [this](const envelope& e) {
    std::lock_guard lock(policy_.mu_);
    policy_.warnings_.push_back("unroutable message: " + to_json(e).dump());
  };
}

actor_system::~actor_system() = default;

void actor_system::add_protocol(const global_protocol& p) {
  auto diags = validate(p);
  if (has_errors(diags))
    throw session_error("protocol " + p.name + " does not validate: " +
                        to_string(diags.front()));
  if (!protocols_.emplace(p.name, p).second)
    throw session_error("protocol " + p.name + " already registered");
  broker_.declare_exchange(p.name, exchange_kind::broadcast);
}

const global_protocol& actor_system::protocol(const std::string& name) const {
  auto it = protocols_.find(name);
  if (it == protocols_.end())
    throw session_error("unknown protocol '" + name + "'");
  return it->second;
}

actor_type& actor_system::add_type(actor_type def) {
  if (types_.count(def.name()))
    throw session_error("actor type '" + def.name() + "' already registered");

  for (const auto& slot : def.slots_) {
    const global_protocol& p = protocol(slot.protocol);
    if (!p.declares_role(slot.self_role))
      throw session_error("type " + def.name() + ": protocol " + slot.protocol +
                          " has no role '" + slot.self_role + "'");

    actor_type::registration reg;
    reg.slot = slot.slot;
    reg.protocol = slot.protocol;
    reg.self_role = slot.self_role;
    reg.ltype = project_role(p, slot.self_role);
    reg.machine = std::make_shared<const fsm>(build_fsm(*reg.ltype));
    for (const auto& r : p.role_names())
      if (r != slot.self_role)
        reg.peers.push_back(r);

    // Handler coverage: every reachable receive needs a handler with a
    // matching sender annotation, and every external handler must name
    // a reachable receive.
    std::set<std::pair<std::string, std::string>> receives;  // (peer,label)
    for (const auto& t : reg.machine->transitions())
      if (t.act.dir == action_dir::receive)
        receives.insert({t.act.peer, t.act.label});
    std::vector<std::string> missing;
    for (const auto& [peer, label] : receives) {
      const auto* h = def.find_handler(slot.slot, label);
      if (!h || h->sender != peer)
        missing.push_back("'" + label + "' (from " + peer + ")");
    }
    if (!missing.empty()) {
      std::string joined;
      for (const auto& m : missing)
        joined += (joined.empty() ? "" : ", ") + m;
      throw session_error("handler coverage failure for type " + def.name() + ", slot " +
                          slot.slot + " (" + slot.protocol + ", " + slot.self_role +
                          "): missing handler for label " + joined);
    }
    for (const auto& [key, h] : def.handlers_) {
      if (key.first != slot.slot || h.sender == "self")
        continue;
      if (!receives.count({h.sender, h.label}))
        throw session_error("handler (" + slot.slot + ", " + h.label + ") of type " +
                            def.name() + " does not correspond to any reachable receive");
    }
    def.registrations_.push_back(std::move(reg));
  }
  for (const auto& [key, h] : def.handlers_) {
    if (!def.slot_registration(key.first))
      throw session_error("handler (" + key.first + ", " + key.second + ") of type " +
                          def.name() + " names an undeclared slot");
  }
  for (const auto& [slot, fn] : def.start_hooks_) {
    (void)fn;
    if (!def.slot_registration(slot))
      throw session_error("start hook of type " + def.name() +
                          " names an undeclared slot '" + slot + "'");
  }

  auto owned = std::make_unique<actor_type>(std::move(def));
  actor_type& ref = *owned;
  broker_.declare_exchange(ref.name(), exchange_kind::round_robin);
  for (const auto& reg : ref.registrations_)
    broker_.bind_exchange(reg.protocol, "", ref.name());
  types_[ref.name()] = std::move(owned);
  return ref;
}

session_actor& actor_system::spawn(const std::string& type_name) {
  auto it = types_.find(type_name);
  if (it == types_.end())
    throw session_error("unknown actor type '" + type_name + "'");
  actor_type& type = *it->second;

  std::size_t idx = spawn_counts_[type_name]++;
  std::string id = type_name + "." + std::to_string(idx);
  std::string queue = "q." + id;
  std::uint64_t consumer = consumer_counter_++;

  broker_.declare_queue(queue);
  broker_.set_consumer(queue, consumer);
  broker_.bind_queue(type_name, "", queue);

  auto actor = std::unique_ptr<session_actor>(new session_actor(id, &type, queue, consumer));
  if (type.make_state_)
    actor->state_ = type.make_state_();
  session_actor& ref = *actor;
  {
    std::lock_guard lock(state_mu_);
    queue_owner_[queue] = &ref;
  }
  actors_.push_back(std::move(actor));
  return ref;
}

std::string actor_system::start_session(const std::string& protocol_name) {
  const global_protocol& p = protocol(protocol_name);
  for (const auto& role : p.role_names()) {
    bool covered = false;
    for (const auto& [_, type] : types_)
      covered = covered || type->find_registration(protocol_name, role) != nullptr;
    if (!covered)
      throw session_error("no actor type registered for role '" + role +
                          "' of protocol " + protocol_name);
  }

  std::ostringstream sid_out;
  sid_out << "s-" << ++session_counter_;
  std::string sid = sid_out.str();

  auto s = std::make_unique<session_state>();
  s->id = sid;
  s->protocol = protocol_name;
  s->roles = p.role_names();
  s->deadline = std::chrono::steady_clock::now() + cfg_.join_timeout;
  s->coord_queue = "q.init." + sid;
  s->coord_consumer = consumer_counter_++;

  broker_.declare_exchange(sid, exchange_kind::direct);
  broker_.declare_queue(s->coord_queue);
  broker_.set_consumer(s->coord_queue, s->coord_consumer);
  broker_.bind_queue(sid, initiator_key, s->coord_queue);

  session_state& ref = *s;
  {
    std::lock_guard lock(state_mu_);
    sessions_[sid] = std::move(s);
  }
  for (const auto& role : ref.roles) {
    envelope join;
    join.protocol = protocol_name;
    join.session = sid;
    join.from_role = initiator_key;
    join.to_role = role;
    join.label = label_join;
    join.kind = envelope_kind::join;
    join.seq = ++ref.coord_seq;
    publish_tracked(protocol_name, "", std::move(join));
  }
  return sid;
}

// ---------------------------------------------------------------------------
// bookkeeping

std::size_t actor_system::publish_tracked(const std::string& exchange,
                                          const std::string& key, envelope e) {
  std::string session = e.session;
  std::size_t n = broker_.publish(exchange, key, std::move(e));
  if (n > 0) {
    std::lock_guard lock(state_mu_);
    inflight_[session] += static_cast<std::int64_t>(n);
  }
  return n;
}

std::optional<envelope> actor_system::consume_tracked(session_actor& a) {
  auto e = broker_.consume(a.queue_, a.consumer_);
  if (e) {
    std::lock_guard lock(state_mu_);
    inflight_[e->session] -= 1;
  }
  return e;
}

void actor_system::report(const violation& v) {
  {
    std::lock_guard lock(policy_.mu_);
    policy_.pending_.push_back(v);
  }
  if (cfg_.parallel)
    policy_queued_.store(true);
}

void actor_system::warn(const std::string& msg) {
  std::lock_guard lock(policy_.mu_);
  policy_.warnings_.push_back(msg);
}

void actor_system::record_session(session_state& s, session_record::outcome result) {
  session_record rec;
  rec.id = s.id;
  rec.protocol = s.protocol;
  rec.result = result;
  for (auto& [actor, ctx] : s.contexts)
    rec.role_final.emplace_back(ctx->self_role(), ctx->mon().complete());
  session_log_.push_back(std::move(rec));
}

void actor_system::halt_session(const std::string& session, session_record::outcome why) {
  std::lock_guard lock(state_mu_);
  auto it = sessions_.find(session);
  if (it == sessions_.end() || it->second->ended)
    return;
  session_state& s = *it->second;
  s.ended = true;
  for (auto& [actor, ctx] : s.contexts)
    ctx->ended_.store(true);
  record_session(s, why);
  broker_.delete_exchange(session);
}

void actor_system::teardown_scan() {
  std::vector<std::string> done;
  {
    std::lock_guard lock(state_mu_);
    for (auto& [sid, s] : sessions_) {
      if (s->ended || !s->started)
        continue;
      if (s->contexts.size() != s->roles.size())
        continue;
      bool all_final = true;
      for (auto& [actor, ctx] : s->contexts)
        all_final = all_final && ctx->mon().complete();
      if (!all_final)
        continue;
      if (inflight_[sid] != 0 || internal_inflight_[sid] != 0)
        continue;
      done.push_back(sid);
    }
    for (const auto& sid : done) {
      session_state& s = *sessions_[sid];
      s.ended = true;
      for (auto& [actor, ctx] : s.contexts)
        ctx->ended_.store(true);
      record_session(s, session_record::outcome::completed);
      broker_.delete_exchange(sid);
    }
  }
}

bool actor_system::expire_due_barriers(bool force) {
  std::vector<session_state*> due;
  {
    std::lock_guard lock(state_mu_);
    auto now = std::chrono::steady_clock::now();
    for (auto& [sid, s] : sessions_) {
      if (s->started || s->ended)
        continue;
      if (force || now >= s->deadline)
        due.push_back(s.get());
    }
  }
  for (session_state* s : due) {
    std::string missing;
    for (const auto& role : s->roles)
      if (!s->acked.count(role))
        missing += (missing.empty() ? "" : ", ") + role;
    violation v;
    v.kind = violation_kind::stuck_session;
    v.session = s->id;
    v.role = "";
    v.offending = {action_dir::receive, initiator_key, label_join_ack, {}};
    v.state = "join-barrier";
    v.description = "join timeout: missing join-acks from roles: " + missing;
    report(v);
    halt_session(s->id, session_record::outcome::aborted);
  }
  return !due.empty();
}

void actor_system::stuck_sweep() {
  std::vector<session_state*> stuck;
  {
    std::lock_guard lock(state_mu_);
    for (auto& [sid, s] : sessions_)
      if (!s->ended && s->started)
        stuck.push_back(s.get());
  }
  for (session_state* s : stuck) {
    std::string roles;
    for (auto& [actor, ctx] : s->contexts)
      if (!ctx->mon().complete())
        roles += (roles.empty() ? "" : ", ") + ctx->self_role() + "@" +
                 ctx->mon().state_name();
    violation v;
    v.kind = violation_kind::stuck_session;
    v.session = s->id;
    v.role = "";
    v.offending = {action_dir::receive, "", "", {}};
    v.state = "quiescent";
    v.description = "session ended with roles not in a final state: " + roles;
    report(v);
    halt_session(s->id, session_record::outcome::stuck);
  }
}

// ---------------------------------------------------------------------------
// turn bodies

std::size_t actor_system::dispatch(session_actor& a) {
  if (a.in_turn_.exchange(true))
    reentrancy_detected_.fetch_add(1);
  std::size_t processed = 0;
  while (true) {
    session_actor::internal_entry entry;
    {
      std::lock_guard lock(a.internal_mu_);
      if (a.internal_.empty())
        break;
      entry = std::move(a.internal_.front());
      a.internal_.pop_front();
    }
    process_internal(a, std::move(entry));
    ++processed;
  }
  if (auto e = consume_tracked(a)) {
    process_external(a, *e);
    ++processed;
  }
  a.in_turn_.store(false);
  teardown_scan();
  return processed;
}

void actor_system::process_internal(session_actor& a, session_actor::internal_entry entry) {
  if (entry.script) {
    turn t(this, &a, nullptr, &entry.env);
    try {
      entry.script(t);
    } catch (const std::exception& e) {
      std::lock_guard lock(state_mu_);
      faults_.push_back({a.id(), entry.env.session, entry.env.label, e.what()});
    }
    return;
  }
  {
    std::lock_guard lock(state_mu_);
    internal_inflight_[entry.env.session] -= 1;
  }
  role_context* ctx = a.context_for(entry.env.session);
  if (!ctx || ctx->ended())
    return;
  const auto* h = a.type().find_handler(ctx->slot(), entry.env.label);
  if (!h) {
    std::lock_guard lock(state_mu_);
    faults_.push_back({a.id(), entry.env.session, entry.env.label,
                       "no handler for internal message"});
    return;
  }
  run_handler(a, h->fn, ctx, entry.env);
}

void actor_system::process_external(session_actor& a, const envelope& e) {
  switch (e.kind) {
    case envelope_kind::join:
      handle_join(a, e);
      return;
    case envelope_kind::control:
      handle_control(a, e);
      return;
    case envelope_kind::app:
      handle_app(a, e);
      return;
  }
}

void actor_system::handle_join(session_actor& a, const envelope& e) {
  const auto* reg = a.type().find_registration(e.protocol, e.to_role);
  if (!reg)
    return;  // join for a role this type does not play
  if (a.context_for(e.session)) {
    warn("duplicate join for (" + e.session + ", " + e.to_role + ") at " + a.id() +
         "; ignored");
    return;
  }
  auto ctx = std::unique_ptr<role_context>(
      new role_context(e.session, e.protocol, e.to_role, reg->slot,
                       monitor(reg->machine, e.session, e.to_role), reg->peers));
  role_context* raw = ctx.get();
  a.contexts_[e.session] = std::move(ctx);
  {
    std::lock_guard lock(state_mu_);
    auto it = sessions_.find(e.session);
    if (it != sessions_.end())
      it->second->contexts.emplace_back(&a, raw);
  }
  try {
    broker_.bind_queue(e.session, e.to_role, a.queue_);
  } catch (const broker_error& err) {
    warn(std::string("join binding failed: ") + err.what());
    return;
  }
  envelope ack;
  ack.protocol = e.protocol;
  ack.session = e.session;
  ack.from_role = e.to_role;
  ack.to_role = initiator_key;
  ack.label = label_join_ack;
  ack.kind = envelope_kind::control;
  ack.seq = ++a.seq_;
  publish_tracked(e.session, initiator_key, std::move(ack));
}

void actor_system::handle_control(session_actor& a, const envelope& e) {
  role_context* ctx = a.context_for(e.session);
  if (!ctx)
    return;
  if (e.label == label_session_start) {
    if (ctx->ended())
      return;
    ctx->started_.store(true);
    if (const handler_fn* hook = a.type().find_start_hook(ctx->slot()))
      run_handler(a, *hook, ctx, e);
    return;
  }
  if (e.label == label_session_abort)
    ctx->ended_.store(true);
}

void actor_system::handle_app(session_actor& a, const envelope& e) {
  role_context* ctx = a.context_for(e.session);
  if (!ctx || ctx->ended())
    return;
  if (cfg_.record_transcript) {
    std::lock_guard lock(state_mu_);
    transcript_.push_back(e);
  }
  const auto* h = a.type().find_handler(ctx->slot(), e.label);
  if (cfg_.monitoring) {
    action act{action_dir::receive, e.from_role, e.label, sorts_of(e.payload)};
    if (auto v = ctx->mon().step(act)) {
      report(*v);
      if (cfg_.policy != violation_policy::log_only)
        return;  // handler skipped
    } else {
      monitor_steps_.fetch_add(1);
      app_consumed_.fetch_add(1);
    }
  }
  if (!h) {
    std::lock_guard lock(state_mu_);
    faults_.push_back({a.id(), e.session, e.label, "no handler for label"});
    return;
  }
  run_handler(a, h->fn, ctx, e);
}

void actor_system::run_handler(session_actor& a, const handler_fn& fn, role_context* ctx,
                               const envelope& e) {
  turn t(this, &a, ctx, &e);
  try {
    fn(t);
  } catch (const std::exception& err) {
    std::lock_guard lock(state_mu_);
    faults_.push_back({a.id(), e.session, e.label, err.what()});
  }
}

void actor_system::coordinator_turn(session_state& s) {
  while (auto e = broker_.consume(s.coord_queue, s.coord_consumer)) {
    {
      std::lock_guard lock(state_mu_);
      inflight_[e->session] -= 1;
    }
    if (e->label != label_join_ack)
      continue;
    if (!s.acked.insert(e->from_role).second) {
      warn("duplicate join-ack for (" + s.id + ", " + e->from_role + "); ignored");
      continue;
    }
  }
  if (!s.started && !s.ended && s.acked.size() == s.roles.size()) {
    s.started = true;
    for (const auto& role : s.roles) {
      envelope start;
      start.protocol = s.protocol;
      start.session = s.id;
      start.from_role = initiator_key;
      start.to_role = role;
      start.label = label_session_start;
      start.kind = envelope_kind::control;
      start.seq = ++s.coord_seq;
      publish_tracked(s.id, role, std::move(start));
    }
  }
}

void actor_system::policy_turn() {
  std::deque<violation> batch;
  {
    std::lock_guard lock(policy_.mu_);
    batch.swap(policy_.pending_);
  }
  for (auto& v : batch) {
    {
      std::lock_guard lock(policy_.mu_);
      policy_.log_.push_back(v);
    }
    if (cfg_.policy == violation_policy::halt_session)
      halt_session(v.session, session_record::outcome::halted);
  }
}

// ---------------------------------------------------------------------------
// send path

void actor_system::session_send(session_actor& a, role_context& ctx, const std::string& to,
                                const std::string& label, payload_list payload) {
  if (ctx.ended())
    throw session_error("send on ended session " + ctx.session());
  if (!ctx.started())
    throw session_error("session " + ctx.session() + " is not started yet");

  action act{action_dir::send, to, label, sorts_of(payload)};
  if (!ctx.has_peer(to)) {
    violation v;
    v.kind = violation_kind::role_mismatch;
    v.session = ctx.session();
    v.role = ctx.self_role();
    v.offending = act;
    v.state = ctx.mon().state_name();
    v.description = "send to role '" + to + "' which is not a peer of " + ctx.protocol();
    report(v);
    if (cfg_.policy != violation_policy::log_only)
      return;
  } else if (cfg_.monitoring) {
    if (auto v = ctx.mon().step(act)) {
      report(*v);
      if (cfg_.policy != violation_policy::log_only)
        return;  // nothing published
    } else {
      monitor_steps_.fetch_add(1);
    }
  }

  envelope e;
  e.protocol = ctx.protocol();
  e.session = ctx.session();
  e.from_role = ctx.self_role();
  e.to_role = to;
  e.label = label;
  e.payload = std::move(payload);
  e.kind = envelope_kind::app;
  e.seq = ++a.seq_;
  app_published_.fetch_add(1);
  publish_tracked(ctx.session(), to, std::move(e));
}

void actor_system::enqueue_become(session_actor& a, role_context& target,
                                  const std::string& label, payload_list payload) {
  if (target.ended())
    throw session_error("become on ended session " + target.session());
  if (!a.type().find_handler(target.slot(), label))
    throw session_error("become: no handler for (" + target.slot() + ", " + label + ")");

  envelope e;
  e.protocol = target.protocol();
  e.session = target.session();
  e.from_role = target.self_role();
  e.to_role = target.self_role();
  e.label = label;
  e.payload = std::move(payload);
  e.kind = envelope_kind::control;
  e.seq = ++a.seq_;
  {
    std::lock_guard lock(state_mu_);
    internal_inflight_[target.session()] += 1;
  }
  {
    std::lock_guard lock(a.internal_mu_);
    a.internal_.push_back({std::move(e), nullptr});
  }
}

void actor_system::inject_app_envelope(const std::string& session, const std::string& from,
                                       const std::string& to, const std::string& label,
                                       payload_list payload) {
  envelope e;
  {
    std::lock_guard lock(state_mu_);
    auto it = sessions_.find(session);
    if (it == sessions_.end())
      throw session_error("unknown session " + session);
    e.protocol = it->second->protocol;
  }
  e.session = session;
  e.from_role = from;
  e.to_role = to;
  e.label = label;
  e.payload = std::move(payload);
  e.kind = envelope_kind::app;
  e.seq = 0;
  publish_tracked(session, to, std::move(e));
}

void actor_system::execute_turn(session_actor& a, std::function<void(turn&)> fn) {
  session_actor::internal_entry entry;
  entry.script = std::move(fn);
  std::lock_guard lock(a.internal_mu_);
  a.internal_.push_back(std::move(entry));
}

// ---------------------------------------------------------------------------
// schedulers

bool actor_system::actor_has_work(session_actor& a) {
  {
    std::lock_guard lock(a.internal_mu_);
    if (!a.internal_.empty())
      return true;
  }
  return broker_.queue_depth(a.queue_) > 0;
}

void actor_system::cooperative_pump() {
  struct unit {
    session_actor* actor = nullptr;
    session_state* session = nullptr;
    bool policy = false;
  };
  while (true) {
    std::vector<unit> ready;
    for (auto& a : actors_)
      if (actor_has_work(*a))
        ready.push_back({a.get(), nullptr, false});
    {
      std::lock_guard lock(state_mu_);
      for (auto& [sid, s] : sessions_)
        if (broker_.queue_depth(s->coord_queue) > 0)
          ready.push_back({nullptr, s.get(), false});
    }
    {
      std::lock_guard lock(policy_.mu_);
      if (!policy_.pending_.empty())
        ready.push_back({nullptr, nullptr, true});
    }
    if (ready.empty()) {
      // Quiescent: with a deterministic single-threaded loop no ack can
      // arrive anymore, so pending join barriers expire now.
      if (expire_due_barriers(true))
        continue;
      return;
    }
    unit& pick = ready[rng_() % ready.size()];
    if (pick.actor)
      dispatch(*pick.actor);
    else if (pick.session)
      coordinator_turn(*pick.session);
    else
      policy_turn();
  }
}

void actor_system::parallel_pump() {
  struct workset {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<session_actor*> runq;
    bool stop = false;
    std::atomic<int> busy{0};
  } ws;

  auto schedule = [&](session_actor* a) {
    if (a->queued_.exchange(true))
      return;
    {
      std::lock_guard lock(ws.mu);
      ws.runq.push_back(a);
    }
    ws.cv.notify_one();
  };

  // queue_owner_ is fully built before run(); reading it here without
  // the state lock keeps the lock order broker -> scheduler only.
  broker_.on_deliver = [&](const std::string& queue) {
    auto it = queue_owner_.find(queue);
    if (it != queue_owner_.end())
      schedule(it->second);
  };

  auto worker = [&] {
    std::unique_lock lock(ws.mu);
    while (true) {
      ws.cv.wait(lock, [&] { return ws.stop || !ws.runq.empty(); });
      if (ws.stop && ws.runq.empty())
        return;
      session_actor* a = ws.runq.front();
      ws.runq.pop_front();
      ws.busy.fetch_add(1);
      lock.unlock();
      a->queued_.store(false);
      dispatch(*a);
      if (actor_has_work(*a))
        schedule(a);
      lock.lock();
      ws.busy.fetch_sub(1);
      ws.cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (unsigned i = 0; i < std::max(1u, cfg_.threads); ++i)
    pool.emplace_back(worker);

  // Coordinators and the policy actor run on this supervisory thread;
  // actor turns run on the pool.
  auto drain_supervisors = [&] {
    bool did = false;
    std::vector<session_state*> coords;
    {
      std::lock_guard lock(state_mu_);
      for (auto& [sid, s] : sessions_)
        if (broker_.queue_depth(s->coord_queue) > 0)
          coords.push_back(s.get());
    }
    for (auto* s : coords) {
      coordinator_turn(*s);
      did = true;
    }
    bool policy_pending;
    {
      std::lock_guard lock(policy_.mu_);
      policy_pending = !policy_.pending_.empty();
    }
    if (policy_pending) {
      policy_turn();
      did = true;
    }
    return did;
  };

  for (auto& a : actors_)
    if (actor_has_work(*a))
      schedule(a.get());

  while (true) {
    bool did = drain_supervisors();
    expire_due_barriers(false);
    bool idle;
    {
      std::lock_guard lock(ws.mu);
      idle = ws.runq.empty() && ws.busy.load() == 0;
    }
    if (idle && !did) {
      bool any_work = false;
      for (auto& a : actors_)
        any_work = any_work || actor_has_work(*a);
      {
        std::lock_guard lock(policy_.mu_);
        any_work = any_work || !policy_.pending_.empty();
      }
      {
        std::lock_guard lock(state_mu_);
        for (auto& [sid, s] : sessions_) {
          any_work = any_work || broker_.queue_depth(s->coord_queue) > 0;
          any_work = any_work || (!s->started && !s->ended);
        }
      }
      if (!any_work)
        break;
      for (auto& a : actors_)
        if (actor_has_work(*a))
          schedule(a.get());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    teardown_scan();
  }

  {
    std::lock_guard lock(ws.mu);
    ws.stop = true;
  }
  ws.cv.notify_all();
  for (auto& t : pool)
    t.join();
  broker_.on_deliver = nullptr;
}

void actor_system::run() {
  if (cfg_.parallel)
    parallel_pump();
  else
    cooperative_pump();
}

void actor_system::finish() {
  run();
  stuck_sweep();
  run();
}

std::string actor_system::transcript_jsonl() const {
  std::lock_guard lock(state_mu_);
  std::string out;
  for (const auto& e : transcript_) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

}  // namespace sact

#include "sact/broker.hpp"

namespace sact {

const char* to_string(exchange_kind k) {
  switch (k) {
    case exchange_kind::broadcast: return "broadcast";
    case exchange_kind::round_robin: return "round_robin";
    case exchange_kind::direct: return "direct";
  }
  return "?";
}

void broker::declare_exchange(const std::string& name, exchange_kind kind) {
  std::lock_guard lock(mu_);
  auto [it, inserted] = exchanges_.try_emplace(name, exchange_state{kind, {}, 0});
  if (!inserted && it->second.kind != kind)
    throw broker_error("exchange '" + name + "' already declared as " +
                       to_string(it->second.kind));
}

void broker::declare_queue(const std::string& name) {
  std::lock_guard lock(mu_);
  queues_.try_emplace(name);
}

void broker::delete_exchange(const std::string& name) {
  std::lock_guard lock(mu_);
  exchanges_.erase(name);
}

bool broker::has_exchange(const std::string& name) const {
  std::lock_guard lock(mu_);
  return exchanges_.count(name) > 0;
}

std::vector<binding> broker::bindings(const std::string& exchange) const {
  std::lock_guard lock(mu_);
  auto it = exchanges_.find(exchange);
  if (it == exchanges_.end())
    throw broker_error("unknown exchange '" + exchange + "'");
  return it->second.bindings;
}

void broker::bind_queue(const std::string& exchange, const std::string& key,
                        const std::string& queue) {
  std::lock_guard lock(mu_);
  if (!queues_.count(queue))
    throw broker_error("unknown queue '" + queue + "'");
  bind_locked(exchange, key, false, queue);
}

void broker::bind_exchange(const std::string& exchange, const std::string& key,
                           const std::string& target_exchange) {
  std::lock_guard lock(mu_);
  if (!exchanges_.count(target_exchange))
    throw broker_error("unknown exchange '" + target_exchange + "'");
  bind_locked(exchange, key, true, target_exchange);
}

void broker::bind_locked(const std::string& exchange, const std::string& key,
                         bool to_exchange, const std::string& target) {
  auto it = exchanges_.find(exchange);
  if (it == exchanges_.end())
    throw broker_error("unknown exchange '" + exchange + "'");
  exchange_state& ex = it->second;
  if (ex.kind == exchange_kind::direct) {
    if (key.empty())
      throw broker_error("direct exchange '" + exchange + "' requires a non-empty key");
    for (const auto& b : ex.bindings)
      if (b.key == key && b.to_exchange == to_exchange && b.target == target)
        throw broker_error("duplicate binding (" + key + ", " + target + ") on '" +
                           exchange + "'");
  } else if (!key.empty()) {
    throw broker_error(std::string(to_string(ex.kind)) + " exchange '" + exchange +
                       "' takes only empty binding keys");
  }
  ex.bindings.push_back({key, to_exchange, target});
}

std::size_t broker::publish(const std::string& exchange, const std::string& key,
                            envelope e) {
  std::lock_guard lock(mu_);
  if (on_publish)
    on_publish(exchange, key, e);
  std::size_t delivered = route(exchange, key, e);
  if (delivered == 0) {
    dead_letters_.push_back(e);
    if (on_dead_letter)
      on_dead_letter(e);
  }
  return delivered;
}

std::size_t broker::route(const std::string& exchange, const std::string& key,
                          const envelope& e) {
  auto it = exchanges_.find(exchange);
  if (it == exchanges_.end())
    throw broker_error("publish to unknown exchange '" + exchange + "'");
  exchange_state& ex = it->second;

  std::vector<const binding*> targets;
  switch (ex.kind) {
    case exchange_kind::broadcast:
      for (const auto& b : ex.bindings)
        targets.push_back(&b);
      break;
    case exchange_kind::direct:
      for (const auto& b : ex.bindings)
        if (b.key == key)
          targets.push_back(&b);
      break;
    case exchange_kind::round_robin:
      if (!ex.bindings.empty()) {
        targets.push_back(&ex.bindings[ex.rr_cursor % ex.bindings.size()]);
        ex.rr_cursor = (ex.rr_cursor + 1) % ex.bindings.size();
      }
      break;
  }

  std::size_t delivered = 0;
  for (const binding* b : targets) {
    if (b->to_exchange) {
      delivered += route(b->target, key, e);
      continue;
    }
    auto q = queues_.find(b->target);
    if (q == queues_.end())
      continue;
    q->second.buffer.push_back(e);
    ++delivered;
    if (on_deliver)
      on_deliver(b->target);
  }
  return delivered;
}

void broker::set_consumer(const std::string& queue, std::uint64_t consumer) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(queue);
  if (it == queues_.end())
    throw broker_error("unknown queue '" + queue + "'");
  if (it->second.consumer != 0 && it->second.consumer != consumer)
    throw broker_error("queue '" + queue + "' already has a consumer");
  it->second.consumer = consumer;
}

std::optional<envelope> broker::consume(const std::string& queue, std::uint64_t consumer) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(queue);
  if (it == queues_.end())
    throw broker_error("unknown queue '" + queue + "'");
  if (it->second.consumer != consumer)
    throw broker_error("consumer is not registered for queue '" + queue + "'");
  if (it->second.buffer.empty())
    return std::nullopt;
  envelope e = std::move(it->second.buffer.front());
  it->second.buffer.pop_front();
  return e;
}

std::size_t broker::queue_depth(const std::string& queue) const {
  std::lock_guard lock(mu_);
  auto it = queues_.find(queue);
  if (it == queues_.end())
    throw broker_error("unknown queue '" + queue + "'");
  return it->second.buffer.size();
}

std::vector<envelope> broker::dead_letters() const {
  std::lock_guard lock(mu_);
  return dead_letters_;
}

}  // namespace sact

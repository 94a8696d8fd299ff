#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sact/envelope.hpp"

namespace sact {

class broker_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class exchange_kind : std::uint8_t { broadcast, round_robin, direct };

const char* to_string(exchange_kind k);

/// A routing rule from an exchange to a queue or another exchange.
struct binding {
  std::string key;  // empty for broadcast/round_robin
  bool to_exchange = false;
  std::string target;
};

/// In-process message router with AMQP-shaped objects: named exchanges
/// of kind broadcast / round_robin / direct, FIFO queues with a single
/// consumer each, and keyed bindings. Publishes that match no binding
/// land in a dead-letter log instead of disappearing.
///
/// All operations are safe to call from any thread; ordering guarantees
/// are per queue.
class broker {
 public:
  void declare_exchange(const std::string& name, exchange_kind kind);
  void declare_queue(const std::string& name);
  void delete_exchange(const std::string& name);
  bool has_exchange(const std::string& name) const;

  /// Current bindings of an exchange, in bind order.
  std::vector<binding> bindings(const std::string& exchange) const;

  void bind_queue(const std::string& exchange, const std::string& key,
                  const std::string& queue);
  void bind_exchange(const std::string& exchange, const std::string& key,
                     const std::string& target_exchange);

  /// Routes a copy of `e` per matching binding; returns the number of
  /// queue deliveries (exchange-to-exchange hops recurse). Zero means
  /// the message was unroutable and went to the dead-letter log.
  std::size_t publish(const std::string& exchange, const std::string& key, envelope e);

  /// Registers the one consumer allowed to drain the queue.
  void set_consumer(const std::string& queue, std::uint64_t consumer);

  std::optional<envelope> consume(const std::string& queue, std::uint64_t consumer);
  std::size_t queue_depth(const std::string& queue) const;

  std::vector<envelope> dead_letters() const;

  /// Test/observability hooks, called with the lock held.
  std::function<void(const std::string& exchange, const std::string& key,
                     const envelope&)> on_publish;
  std::function<void(const std::string& queue)> on_deliver;
  std::function<void(const envelope&)> on_dead_letter;

 private:
  struct exchange_state {
    exchange_kind kind;
    std::vector<binding> bindings;
    std::size_t rr_cursor = 0;
  };
  struct queue_state {
    std::deque<envelope> buffer;
    std::uint64_t consumer = 0;
  };

  void bind_locked(const std::string& exchange, const std::string& key, bool to_exchange,
                   const std::string& target);
  std::size_t route(const std::string& exchange, const std::string& key,
                    const envelope& e);

  mutable std::mutex mu_;
  std::map<std::string, exchange_state> exchanges_;
  std::map<std::string, queue_state> queues_;
  std::vector<envelope> dead_letters_;
};

}  // namespace sact

#include "sact/fsm.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sact {

std::string to_string(const action& a) {
  std::string out = a.peer;
  out += a.dir == action_dir::send ? '!' : '?';
  out += a.label;
  out += '(';
  for (std::size_t i = 0; i < a.sorts.size(); ++i) {
    if (i > 0)
      out += ',';
    out += to_string(a.sorts[i]);
  }
  out += ')';
  return out;
}

state_id fsm::add_state(bool is_final) {
  final_.push_back(is_final);
  outgoing_.emplace_back();
  return static_cast<state_id>(final_.size() - 1);
}

void fsm::add_transition(state_id from, action a, state_id to) {
  outgoing_[from].push_back(transitions_.size());
  transitions_.push_back({from, std::move(a), to});
}

void fsm::reindex() {
  outgoing_.assign(final_.size(), {});
  for (std::size_t i = 0; i < transitions_.size(); ++i)
    outgoing_[transitions_[i].from].push_back(i);
}

std::vector<const fsm_transition*> fsm::outgoing(state_id s) const {
  std::vector<const fsm_transition*> out;
  for (std::size_t idx : outgoing_[s])
    out.push_back(&transitions_[idx]);
  return out;
}

const fsm_transition* fsm::match(state_id s, const action& a) const {
  for (std::size_t idx : outgoing_[s])
    if (transitions_[idx].act == a)
      return &transitions_[idx];
  return nullptr;
}

const fsm_transition* fsm::match_key(state_id s, const action& a) const {
  for (std::size_t idx : outgoing_[s])
    if (same_key(transitions_[idx].act, a))
      return &transitions_[idx];
  return nullptr;
}

namespace {

class fsm_builder {
 public:
  fsm run(const local_type& root) {
    state_of(root, {});
    out_.reindex();
    return std::move(out_);
  }

 private:
  fsm out_;
  std::optional<state_id> end_state_;
  std::map<std::string, state_id> rec_env_;

  state_id state_of(const local_type& l, std::map<std::string, state_id> env) {
    if (l.get_if<local_type::end_t>()) {
      if (!end_state_)
        end_state_ = out_.add_state(true);
      return *end_state_;
    }
    if (const auto* v = l.get_if<local_type::var_t>()) {
      auto it = env.find(v->var);
      if (it == env.end())
        throw std::invalid_argument("free recursion variable " + v->var);
      return it->second;
    }
    if (const auto* r = l.get_if<local_type::rec_t>()) {
      state_id s = out_.add_state(false);
      env[r->var] = s;
      build_into(s, *r->body, env);
      return s;
    }
    state_id s = out_.add_state(false);
    build_into(s, l, env);
    return s;
  }

  // Attaches the outgoing transitions of `l` to the pre-allocated
  // state `s`; used so a rec shares the state of its body.
  void build_into(state_id s, const local_type& l, std::map<std::string, state_id> env) {
    if (const auto* snd = l.get_if<local_type::send_t>()) {
      out_.add_transition(s, {action_dir::send, snd->peer, snd->sig.label, snd->sig.sorts},
                          state_of(*snd->cont, env));
    } else if (const auto* rcv = l.get_if<local_type::recv_t>()) {
      out_.add_transition(
          s, {action_dir::receive, rcv->peer, rcv->sig.label, rcv->sig.sorts},
          state_of(*rcv->cont, env));
    } else if (const auto* sel = l.get_if<local_type::select_t>()) {
      for (const auto& b : sel->branches)
        out_.add_transition(s, {action_dir::send, b.peer, b.sig.label, b.sig.sorts},
                            state_of(*b.cont, env));
    } else if (const auto* off = l.get_if<local_type::offer_t>()) {
      for (const auto& b : off->branches)
        out_.add_transition(s, {action_dir::receive, off->from, b.sig.label, b.sig.sorts},
                            state_of(*b.cont, env));
    } else if (const auto* r = l.get_if<local_type::rec_t>()) {
      env[r->var] = s;
      build_into(s, *r->body, env);
    } else if (l.get_if<local_type::end_t>()) {
      // rec around end; degenerate but closed
      out_.final_[s] = true;
    } else {
      throw std::invalid_argument("local type is not closed");
    }
  }
};

}  // namespace

fsm build_fsm(const local_type& l) {
  return fsm_builder().run(l);
}

accept_result fsm_accepts(const fsm& f, std::span<const action> trace) {
  state_id current = f.initial();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const fsm_transition* t = f.match(current, trace[i]);
    if (!t)
      return {false, i, current};
    current = t->to;
  }
  return {true, 0, current};
}

std::vector<std::string> verify_fsm(const fsm& f) {
  std::vector<std::string> problems;
  for (state_id s = 0; s < f.state_count(); ++s) {
    auto out = f.outgoing(s);
    bool has_send = false, has_recv = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
      (out[i]->act.dir == action_dir::send ? has_send : has_recv) = true;
      for (std::size_t j = i + 1; j < out.size(); ++j)
        if (same_key(out[i]->act, out[j]->act))
          problems.push_back("state " + f.state_name(s) + " has duplicate key " +
                             to_string(out[i]->act));
    }
    if (has_send && has_recv)
      problems.push_back("state " + f.state_name(s) + " mixes sends and receives");
  }
  std::set<state_id> reached{f.initial()};
  std::vector<state_id> frontier{f.initial()};
  while (!frontier.empty()) {
    state_id s = frontier.back();
    frontier.pop_back();
    for (const auto* t : f.outgoing(s))
      if (reached.insert(t->to).second)
        frontier.push_back(t->to);
  }
  for (state_id s = 0; s < f.state_count(); ++s)
    if (!reached.count(s))
      problems.push_back("state " + f.state_name(s) + " is unreachable");
  return problems;
}

std::string to_dot(const fsm& f) {
  std::ostringstream out;
  out << "digraph fsm {\n";
  out << "  rankdir=LR;\n";
  out << "  __start [shape=point];\n";
  for (state_id s = 0; s < f.state_count(); ++s)
    out << "  " << f.state_name(s) << " [shape="
        << (f.is_final(s) ? "doublecircle" : "circle") << "];\n";
  out << "  __start -> " << f.state_name(f.initial()) << ";\n";
  for (const auto& t : f.transitions()) {
    out << "  " << f.state_name(t.from) << " -> " << f.state_name(t.to) << " [label=\""
        << t.act.peer << (t.act.dir == action_dir::send ? "!" : "?") << t.act.label
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::ordered_json to_json(const fsm& f) {
  nlohmann::ordered_json doc;
  auto states = nlohmann::ordered_json::array();
  auto finals = nlohmann::ordered_json::array();
  for (state_id s = 0; s < f.state_count(); ++s) {
    states.push_back(f.state_name(s));
    if (f.is_final(s))
      finals.push_back(f.state_name(s));
  }
  doc["states"] = std::move(states);
  doc["initial"] = f.state_name(f.initial());
  doc["finals"] = std::move(finals);
  auto transitions = nlohmann::ordered_json::array();
  for (const auto& t : f.transitions()) {
    nlohmann::ordered_json entry;
    entry["from"] = f.state_name(t.from);
    entry["dir"] = to_string(t.act.dir);
    entry["peer"] = t.act.peer;
    entry["label"] = t.act.label;
    auto sorts = nlohmann::ordered_json::array();
    for (sort s : t.act.sorts)
      sorts.push_back(to_string(s));
    entry["sorts"] = std::move(sorts);
    entry["to"] = f.state_name(t.to);
    transitions.push_back(std::move(entry));
  }
  doc["transitions"] = std::move(transitions);
  return doc;
}

nlohmann::ordered_json to_json(const action& a) {
  nlohmann::ordered_json doc;
  doc["dir"] = to_string(a.dir);
  doc["peer"] = a.peer;
  doc["label"] = a.label;
  auto sorts = nlohmann::ordered_json::array();
  for (sort s : a.sorts)
    sorts.push_back(to_string(s));
  doc["sorts"] = std::move(sorts);
  return doc;
}

action action_from_json(const nlohmann::json& doc) {
  action a;
  const auto dir = doc.at("dir").get<std::string>();
  if (dir == "send")
    a.dir = action_dir::send;
  else if (dir == "receive")
    a.dir = action_dir::receive;
  else
    throw std::invalid_argument("action json: bad dir '" + dir + "'");
  a.peer = doc.at("peer").get<std::string>();
  a.label = doc.at("label").get<std::string>();
  for (const auto& s : doc.at("sorts")) {
    auto parsed = sort_from_name(s.get<std::string>());
    if (!parsed)
      throw std::invalid_argument("action json: bad sort '" + s.get<std::string>() + "'");
    a.sorts.push_back(*parsed);
  }
  return a;
}

fsm fsm_from_json(const nlohmann::json& doc) {
  fsm out;
  std::map<std::string, state_id> ids;
  const auto& states = doc.at("states");
  std::set<std::string> finals;
  for (const auto& name : doc.at("finals"))
    finals.insert(name.get<std::string>());
  const auto initial = doc.at("initial").get<std::string>();
  // The in-memory representation pins the initial state at id 0.
  ids[initial] = out.add_state(finals.count(initial) > 0);
  bool saw_initial = false;
  for (const auto& name : states) {
    auto n = name.get<std::string>();
    if (n == initial) {
      saw_initial = true;
      continue;
    }
    if (!ids.emplace(n, 0).second)
      throw std::invalid_argument("fsm json: duplicate state '" + n + "'");
    ids[n] = out.add_state(finals.count(n) > 0);
  }
  if (!saw_initial)
    throw std::invalid_argument("fsm json: initial state is not listed in states");
  for (const auto& entry : doc.at("transitions")) {
    action a;
    const auto dir = entry.at("dir").get<std::string>();
    if (dir == "send")
      a.dir = action_dir::send;
    else if (dir == "receive")
      a.dir = action_dir::receive;
    else
      throw std::invalid_argument("fsm json: bad dir '" + dir + "'");
    a.peer = entry.at("peer").get<std::string>();
    a.label = entry.at("label").get<std::string>();
    for (const auto& s : entry.at("sorts")) {
      auto parsed = sort_from_name(s.get<std::string>());
      if (!parsed)
        throw std::invalid_argument("fsm json: bad sort '" + s.get<std::string>() + "'");
      a.sorts.push_back(*parsed);
    }
    auto from = entry.at("from").get<std::string>();
    auto to = entry.at("to").get<std::string>();
    if (!ids.count(from) || !ids.count(to))
      throw std::invalid_argument("fsm json: transition references unknown state");
    out.add_transition(ids[from], std::move(a), ids[to]);
  }
  out.reindex();
  return out;
}

}  // namespace sact

#include "sact/ast.hpp"

#include <sstream>

namespace sact {

std::string to_string(const diagnostic& d) {
  std::ostringstream out;
  out << d.loc.line << ':' << d.loc.column << ": "
      << (d.sev == diagnostic::severity::error ? "error" : "warning") << ": "
      << d.message;
  return out.str();
}

const char* to_string(sort s) {
  return s == sort::string_ ? "string" : "int";
}

std::optional<sort> sort_from_name(std::string_view name) {
  if (name == "string")
    return sort::string_;
  if (name == "int")
    return sort::int_;
  return std::nullopt;
}

std::vector<sort> message_signature::sorts() const {
  std::vector<sort> out;
  out.reserve(payload.size());
  for (const auto& item : payload)
    out.push_back(item.ty);
  return out;
}

std::string to_string(const message_signature& sig) {
  std::string out = sig.label;
  out += '(';
  for (std::size_t i = 0; i < sig.payload.size(); ++i) {
    if (i > 0)
      out += ", ";
    out += to_string(sig.payload[i].ty);
    if (!sig.payload[i].name.empty()) {
      out += ':';
      out += sig.payload[i].name;
    }
  }
  out += ')';
  return out;
}

bool global_interaction::operator==(const global_interaction& other) const {
  if (node.index() != other.node.index())
    return false;
  if (const auto* t = std::get_if<transfer>(&node)) {
    const auto& o = std::get<transfer>(other.node);
    return t->sig == o.sig && t->from == o.from && t->to == o.to;
  }
  if (const auto* c = std::get_if<choice>(&node)) {
    const auto& o = std::get<choice>(other.node);
    return c->at == o.at && c->branches == o.branches;
  }
  if (const auto* r = std::get_if<recursion>(&node)) {
    const auto& o = std::get<recursion>(other.node);
    return r->var == o.var && r->body == o.body;
  }
  return std::get<continuation>(node).var == std::get<continuation>(other.node).var;
}

std::vector<std::string> global_protocol::role_names() const {
  std::vector<std::string> out;
  out.reserve(roles.size());
  for (const auto& r : roles)
    out.push_back(r.name);
  return out;
}

bool global_protocol::declares_role(std::string_view r) const {
  for (const auto& decl : roles)
    if (decl.name == r)
      return true;
  return false;
}

bool mentions_role(const interaction_seq& seq, std::string_view r) {
  for (const auto& item : seq) {
    if (const auto* t = std::get_if<transfer>(&item.node)) {
      if (t->from == r)
        return true;
      for (const auto& dst : t->to)
        if (dst == r)
          return true;
    } else if (const auto* c = std::get_if<choice>(&item.node)) {
      if (c->at == r)
        return true;
      for (const auto& branch : c->branches)
        if (mentions_role(branch, r))
          return true;
    } else if (const auto* rec = std::get_if<recursion>(&item.node)) {
      if (mentions_role(rec->body, r))
        return true;
    }
  }
  return false;
}

}  // namespace sact

#include "sact/local_type.hpp"

#include <sstream>

namespace sact {

local_sig erase_names(const message_signature& sig) {
  return {sig.label, sig.sorts()};
}

std::string to_string(const local_sig& sig) {
  std::string out = sig.label;
  out += '(';
  for (std::size_t i = 0; i < sig.sorts.size(); ++i) {
    if (i > 0)
      out += ",";
    out += to_string(sig.sorts[i]);
  }
  out += ')';
  return out;
}

bool equal(const local_type& a, const local_type& b) {
  if (a.node().index() != b.node().index())
    return false;
  if (const auto* s = a.get_if<local_type::send_t>()) {
    const auto& o = *b.get_if<local_type::send_t>();
    return s->peer == o.peer && s->sig == o.sig && equal(s->cont, o.cont);
  }
  if (const auto* r = a.get_if<local_type::recv_t>()) {
    const auto& o = *b.get_if<local_type::recv_t>();
    return r->peer == o.peer && r->sig == o.sig && equal(r->cont, o.cont);
  }
  if (const auto* s = a.get_if<local_type::select_t>()) {
    const auto& o = *b.get_if<local_type::select_t>();
    if (s->branches.size() != o.branches.size())
      return false;
    for (std::size_t i = 0; i < s->branches.size(); ++i) {
      if (s->branches[i].peer != o.branches[i].peer ||
          !(s->branches[i].sig == o.branches[i].sig) ||
          !equal(s->branches[i].cont, o.branches[i].cont))
        return false;
    }
    return true;
  }
  if (const auto* f = a.get_if<local_type::offer_t>()) {
    const auto& o = *b.get_if<local_type::offer_t>();
    if (f->from != o.from || f->branches.size() != o.branches.size())
      return false;
    for (std::size_t i = 0; i < f->branches.size(); ++i) {
      if (!(f->branches[i].sig == o.branches[i].sig) ||
          !equal(f->branches[i].cont, o.branches[i].cont))
        return false;
    }
    return true;
  }
  if (const auto* r = a.get_if<local_type::rec_t>()) {
    const auto& o = *b.get_if<local_type::rec_t>();
    return r->var == o.var && equal(r->body, o.body);
  }
  if (const auto* v = a.get_if<local_type::var_t>())
    return v->var == b.get_if<local_type::var_t>()->var;
  return true;  // end
}

namespace {

void render(std::ostringstream& out, const local_type& l) {
  if (const auto* s = l.get_if<local_type::send_t>()) {
    out << s->peer << '!' << to_string(s->sig) << " . ";
    render(out, *s->cont);
  } else if (const auto* r = l.get_if<local_type::recv_t>()) {
    out << r->peer << '?' << to_string(r->sig) << " . ";
    render(out, *r->cont);
  } else if (const auto* s = l.get_if<local_type::select_t>()) {
    out << "choose { ";
    for (std::size_t i = 0; i < s->branches.size(); ++i) {
      if (i > 0)
        out << " or ";
      out << s->branches[i].peer << '!' << to_string(s->branches[i].sig) << " . ";
      render(out, *s->branches[i].cont);
    }
    out << " }";
  } else if (const auto* f = l.get_if<local_type::offer_t>()) {
    out << "offer " << f->from << " { ";
    for (std::size_t i = 0; i < f->branches.size(); ++i) {
      if (i > 0)
        out << " or ";
      out << f->from << '?' << to_string(f->branches[i].sig) << " . ";
      render(out, *f->branches[i].cont);
    }
    out << " }";
  } else if (const auto* r = l.get_if<local_type::rec_t>()) {
    out << "rec " << r->var << " { ";
    render(out, *r->body);
    out << " }";
  } else if (const auto* v = l.get_if<local_type::var_t>()) {
    out << "continue " << v->var;
  } else {
    out << "end";
  }
}

}  // namespace

std::string to_text(const local_type& l) {
  std::ostringstream out;
  render(out, l);
  return out.str();
}

bool has_free_var(const local_type& l, const std::string& var) {
  if (const auto* s = l.get_if<local_type::send_t>())
    return has_free_var(*s->cont, var);
  if (const auto* r = l.get_if<local_type::recv_t>())
    return has_free_var(*r->cont, var);
  if (const auto* s = l.get_if<local_type::select_t>()) {
    for (const auto& b : s->branches)
      if (has_free_var(*b.cont, var))
        return true;
    return false;
  }
  if (const auto* f = l.get_if<local_type::offer_t>()) {
    for (const auto& b : f->branches)
      if (has_free_var(*b.cont, var))
        return true;
    return false;
  }
  if (const auto* r = l.get_if<local_type::rec_t>())
    return r->var != var && has_free_var(*r->body, var);
  if (const auto* v = l.get_if<local_type::var_t>())
    return v->var == var;
  return false;
}

}  // namespace sact

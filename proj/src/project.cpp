#include "sact/project.hpp"

#include <algorithm>
#include <set>

namespace sact {
namespace {

using send_t = local_type::send_t;
using recv_t = local_type::recv_t;
using select_t = local_type::select_t;
using offer_t = local_type::offer_t;
using rec_t = local_type::rec_t;
using var_t = local_type::var_t;
using end_t = local_type::end_t;

// Recursion variables referenced by `seq` but not bound inside it.
void free_rec_vars(const interaction_seq& seq, std::set<std::string>& bound,
                   std::set<std::string>& out) {
  for (const auto& item : seq) {
    if (const auto* c = std::get_if<choice>(&item.node)) {
      for (const auto& branch : c->branches)
        free_rec_vars(branch, bound, out);
    } else if (const auto* r = std::get_if<recursion>(&item.node)) {
      bool added = bound.insert(r->var).second;
      free_rec_vars(r->body, bound, out);
      if (added)
        bound.erase(r->var);
    } else if (const auto* k = std::get_if<continuation>(&item.node)) {
      if (!bound.count(k->var))
        out.insert(k->var);
    }
  }
}

std::set<std::string> free_rec_vars(const interaction_seq& seq) {
  std::set<std::string> bound, out;
  free_rec_vars(seq, bound, out);
  return out;
}

// Rewrites free occurrences of `continue from;` into `continue to;`,
// stopping at inner recs that rebind `from`.
interaction_seq rename_continue(const interaction_seq& seq, const std::string& from,
                                const std::string& to) {
  interaction_seq out;
  out.reserve(seq.size());
  for (const auto& item : seq) {
    global_interaction copy = item;
    if (const auto* c = std::get_if<choice>(&copy.node)) {
      choice renamed = *c;
      for (auto& branch : renamed.branches)
        branch = rename_continue(branch, from, to);
      copy.node = std::move(renamed);
    } else if (const auto* r = std::get_if<recursion>(&copy.node)) {
      if (r->var != from) {
        recursion renamed = *r;
        renamed.body = rename_continue(renamed.body, from, to);
        copy.node = std::move(renamed);
      }
    } else if (const auto* k = std::get_if<continuation>(&copy.node)) {
      if (k->var == from)
        copy.node = continuation{to};
    }
    out.push_back(std::move(copy));
  }
  return out;
}

class projector {
 public:
  projector(const global_protocol& p, std::string r) : protocol_(p), self_(std::move(r)) {}

  local_ptr run() { return project(protocol_.body, 0); }

 private:
  const global_protocol& protocol_;
  std::string self_;
  int fresh_counter_ = 0;

  [[noreturn]] void bail(source_loc loc, std::string reason) {
    throw unprojectable_error(self_, std::move(reason), loc);
  }

  local_ptr project(const interaction_seq& seq, std::size_t idx) {
    if (idx >= seq.size())
      return local_type::end();
    const global_interaction& item = seq[idx];

    if (const auto* t = std::get_if<transfer>(&item.node)) {
      local_ptr cont = project(seq, idx + 1);
      if (t->from == self_) {
        // One send per receiver, in listed order.
        for (auto it = t->to.rbegin(); it != t->to.rend(); ++it)
          cont = local_type::make(send_t{*it, erase_names(t->sig), cont});
        return cont;
      }
      if (std::find(t->to.begin(), t->to.end(), self_) != t->to.end())
        return local_type::make(recv_t{t->from, erase_names(t->sig), cont});
      return cont;
    }

    if (const auto* c = std::get_if<choice>(&item.node)) {
      if (c->at != self_) {
        bool involved = false;
        for (const auto& branch : c->branches)
          involved = involved || mentions_role(branch, self_);
        if (!involved)
          return project(seq, idx + 1);
      }
      std::vector<local_ptr> parts;
      parts.reserve(c->branches.size());
      for (const auto& branch : c->branches) {
        interaction_seq combined = branch;
        combined.insert(combined.end(), seq.begin() + idx + 1, seq.end());
        parts.push_back(project(combined, 0));
      }
      if (c->at == self_)
        return make_select(std::move(parts), item.loc);
      return merge(std::move(parts), item.loc);
    }

    if (const auto* r = std::get_if<recursion>(&item.node)) {
      if (!mentions_role(r->body, self_))
        return project(seq, idx + 1);
      // Inline the continuation into the rec body; rename the bound
      // variable first if the continuation refers to an outer rec of
      // the same name.
      interaction_seq rest(seq.begin() + idx + 1, seq.end());
      std::string var = r->var;
      interaction_seq body = r->body;
      if (free_rec_vars(rest).count(var)) {
        std::string fresh;
        do {
          fresh = var + "_" + std::to_string(++fresh_counter_);
        } while (free_rec_vars(rest).count(fresh));
        body = rename_continue(body, var, fresh);
        var = fresh;
      }
      body.insert(body.end(), rest.begin(), rest.end());
      local_ptr inner = project(body, 0);
      if (inner->get_if<var_t>() && inner->get_if<var_t>()->var == var)
        return local_type::end();
      if (!has_free_var(*inner, var))
        return inner;
      return local_type::make(rec_t{var, inner});
    }

    return local_type::make(var_t{std::get<continuation>(item.node).var});
  }

  local_ptr make_select(std::vector<local_ptr> parts, source_loc loc) {
    select_t sel;
    for (const auto& part : parts) {
      const auto* s = part->get_if<send_t>();
      if (!s)
        bail(loc, "choice branch does not start with a message from the chooser");
      for (const auto& existing : sel.branches) {
        if (existing.peer == s->peer && existing.sig.label == s->sig.label &&
            existing.sig.arity() == s->sig.arity())
          bail(loc, "indistinguishable selection '" + to_string(s->sig) + "' towards " +
                        s->peer);
      }
      sel.branches.push_back({s->peer, s->sig, s->cont});
    }
    return local_type::make(std::move(sel));
  }

  // Plain merge: either every branch projects identically, or every
  // branch is a receive from the same peer and branches with equal
  // (label, arity) are identical.
  local_ptr merge(std::vector<local_ptr> parts, source_loc loc) {
    bool all_equal = true;
    for (std::size_t i = 1; i < parts.size(); ++i)
      all_equal = all_equal && equal(parts[0], parts[i]);
    if (all_equal)
      return parts[0];

    offer_t merged;
    bool have_peer = false;
    for (const auto& part : parts) {
      std::string peer;
      std::vector<local_type::offer_branch> entries;
      if (const auto* r = part->get_if<recv_t>()) {
        peer = r->peer;
        entries.push_back({r->sig, r->cont});
      } else if (const auto* o = part->get_if<offer_t>()) {
        peer = o->from;
        entries = o->branches;
      } else {
        bail(loc, "branches are neither identical nor receives it can tell apart");
      }
      if (!have_peer) {
        merged.from = peer;
        have_peer = true;
      } else if (merged.from != peer) {
        bail(loc, "branches start with receives from different peers " + merged.from +
                      " and " + peer);
      }
      for (auto& entry : entries) {
        auto same_key = std::find_if(
            merged.branches.begin(), merged.branches.end(), [&](const auto& b) {
              return b.sig.label == entry.sig.label && b.sig.arity() == entry.sig.arity();
            });
        if (same_key == merged.branches.end()) {
          merged.branches.push_back(std::move(entry));
          continue;
        }
        if (!(same_key->sig == entry.sig) || !equal(same_key->cont, entry.cont))
          bail(loc, "branch '" + to_string(entry.sig) + "' from " + merged.from +
                        " continues differently across choice branches");
      }
    }
    return local_type::make(std::move(merged));
  }
};

}  // namespace

local_ptr project_role(const global_protocol& p, const std::string& r) {
  if (!p.declares_role(r))
    throw std::invalid_argument("role '" + r + "' is not declared by protocol " + p.name);
  return projector(p, r).run();
}

}  // namespace sact

#include "sact/validate.hpp"

#include <algorithm>
#include <set>

#include "sact/project.hpp"

namespace sact {
namespace {

class checker {
 public:
  explicit checker(const global_protocol& p) : protocol_(p) {}

  std::vector<diagnostic> run() {
    check_roles();
    check_seq(protocol_.body, {});
    if (!has_errors(diags_))
      check_projectability();
    return std::move(diags_);
  }

 private:
  const global_protocol& protocol_;
  std::vector<diagnostic> diags_;

  void error(source_loc loc, std::string msg) {
    diags_.push_back({diagnostic::severity::error, std::move(msg), loc});
  }

  void check_roles() {
    if (protocol_.roles.size() < 2)
      error(protocol_.loc, "protocol must declare at least two roles");
    std::set<std::string> seen;
    for (const auto& r : protocol_.roles)
      if (!seen.insert(r.name).second)
        error(r.loc, "duplicate role name '" + r.name + "'");
  }

  void check_declared(const std::string& r, source_loc loc) {
    if (!protocol_.declares_role(r))
      error(loc, "role '" + r + "' is not declared");
  }

  void check_seq(const interaction_seq& seq, std::set<std::string> bound) {
    for (const auto& item : seq) {
      if (const auto* t = std::get_if<transfer>(&item.node)) {
        check_transfer(*t, item.loc);
      } else if (const auto* c = std::get_if<choice>(&item.node)) {
        check_choice(*c, item.loc, bound);
      } else if (const auto* r = std::get_if<recursion>(&item.node)) {
        auto inner = bound;
        inner.insert(r->var);
        check_seq(r->body, std::move(inner));
      } else if (const auto* k = std::get_if<continuation>(&item.node)) {
        if (!bound.count(k->var))
          error(item.loc, "unbound recursion variable " + k->var);
      }
    }
  }

  void check_transfer(const transfer& t, source_loc loc) {
    check_declared(t.from, loc);
    std::set<std::string> receivers;
    for (const auto& dst : t.to) {
      check_declared(dst, loc);
      if (dst == t.from)
        error(loc, "role '" + t.from + "' cannot send to itself");
      if (!receivers.insert(dst).second)
        error(loc, "duplicate receiver '" + dst + "' in transfer");
    }
  }

  void check_choice(const choice& c, source_loc loc, const std::set<std::string>& bound) {
    check_declared(c.at, loc);
    for (const auto& branch : c.branches) {
      const transfer* first = branch.empty() ? nullptr : std::get_if<transfer>(&branch[0].node);
      if (!first || first->from != c.at)
        error(branch.empty() ? loc : branch[0].loc,
              "choice branch must start at chooser " + c.at);
      check_seq(branch, bound);
    }
    check_distinguishable(c, loc);
  }

  // Two branches offered to the same receiver must not share the first
  // message's (label, arity); the receiver could not tell them apart.
  void check_distinguishable(const choice& c, source_loc loc) {
    std::set<std::string> flagged;
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
      const transfer* a = c.branches[i].empty()
                              ? nullptr
                              : std::get_if<transfer>(&c.branches[i][0].node);
      if (!a)
        continue;
      for (std::size_t j = i + 1; j < c.branches.size(); ++j) {
        const transfer* b = c.branches[j].empty()
                                ? nullptr
                                : std::get_if<transfer>(&c.branches[j][0].node);
        if (!b)
          continue;
        if (a->sig.label != b->sig.label || a->sig.arity() != b->sig.arity())
          continue;
        for (const auto& dst : a->to)
          if (std::find(b->to.begin(), b->to.end(), dst) != b->to.end())
            flagged.insert(dst);
      }
    }
    for (const auto& dst : flagged)
      error(loc, "indistinguishable branch labels for receiver " + dst);
  }

  void check_projectability() {
    for (const auto& r : protocol_.roles) {
      try {
        project_role(protocol_, r.name);
      } catch (const unprojectable_error& e) {
        error(e.where(), e.what());
      }
    }
  }
};

}  // namespace

std::vector<diagnostic> validate(const global_protocol& p) {
  return checker(p).run();
}

}  // namespace sact

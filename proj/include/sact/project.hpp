#pragma once

#include <stdexcept>
#include <string>

#include "sact/ast.hpp"
#include "sact/local_type.hpp"

namespace sact {

/// Raised when a role cannot be given a sequential view of the
/// protocol, i.e. the branches of a choice it does not make are
/// neither identical for it nor distinguishable receives from one peer.
class unprojectable_error : public std::runtime_error {
 public:
  unprojectable_error(std::string role, std::string reason, source_loc loc)
      : std::runtime_error("role '" + role + "' is unprojectable: " + reason),
        role_(std::move(role)),
        reason_(std::move(reason)),
        loc_(loc) {}

  const std::string& role() const { return role_; }
  const std::string& reason() const { return reason_; }
  source_loc where() const { return loc_; }

 private:
  std::string role_;
  std::string reason_;
  source_loc loc_;
};

/// Syntactic projection with plain merge. A transfer sent by `r`
/// becomes one send per receiver in listed order; a transfer to `r`
/// becomes a receive; a choice made by `r` becomes a selection; a
/// choice observed by `r` is the plain merge of the branch projections
/// (identical, or distinguishable receives from one peer); constructs
/// that never mention `r` project to their continuation.
///
/// Expects a protocol whose structural invariants hold (see validate);
/// throws unprojectable_error when the merge fails.
local_ptr project_role(const global_protocol& p, const std::string& r);

}  // namespace sact

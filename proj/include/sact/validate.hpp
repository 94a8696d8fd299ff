#pragma once

#include <vector>

#include "sact/ast.hpp"

namespace sact {

/// Well-formedness check for a parsed protocol. Returns an empty list
/// iff every structural invariant holds and every declared role is
/// projectable. Pure; never throws.
std::vector<diagnostic> validate(const global_protocol& p);

}  // namespace sact

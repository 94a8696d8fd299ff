#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sact/ast.hpp"

namespace sact {

/// Outcome of parsing one protocol source. Exactly one of `protocol` /
/// `diags` is meaningful: on any error the AST is absent, never partial.
struct parse_result {
  std::optional<global_protocol> protocol;
  std::vector<diagnostic> diags;

  bool ok() const { return protocol.has_value(); }
};

/// Parses a single global protocol from UTF-8 source text.
///
/// The grammar is the Scribble subset used by the bundled protocols:
/// message transfers, `choice at`, `rec`/`continue`, payload sorts
/// `string` and `int`, `//` line comments. `parallel`, `interrupt`,
/// `interruptible` and `do` are recognized and rejected as unsupported
/// constructs. Recursion variables are scope-checked here, so an
/// unbound `continue` is a parse error.
parse_result parse_global(std::string_view source);

/// Byte-stable rendering: two-space indent, one interaction per line.
/// parse_global(pretty_print(p)) reproduces `p` exactly.
std::string pretty_print(const global_protocol& p);

}  // namespace sact

#pragma once

#include <string_view>

#include "sact/ast.hpp"

namespace sact::corpus {

/// Sources of the bundled protocols, identical to protocols/*.scr.
std::string_view purchase_source();
std::string_view storeload_source();
std::string_view pingpong_source();

/// Parsed and validated bundled protocols.
global_protocol purchase();
global_protocol storeload();
global_protocol pingpong();

}  // namespace sact::corpus

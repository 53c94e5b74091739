#pragma once

#include <string_view>

namespace schemashift::detail {

// Embedded template for a synthesis kind ("new_columns", ...). Throws
// InvalidArgument for unknown kinds.
std::string_view prompt_template(std::string_view kind);

}  // namespace schemashift::detail

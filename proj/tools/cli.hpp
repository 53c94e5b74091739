#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace schemashift::cli {

enum ExitCode { kOk = 0, kIoFailure = 1, kInvalidConfig = 2 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace schemashift::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace liesym::cli {

enum ExitCode { kOk = 0, kComputational = 1, kInput = 2, kInternal = 3 };

/// Runs one liesym invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace liesym::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmerge {

/// Runs one command-line invocation; args excludes the program name.
/// Returns 0 on success, 1 on usage errors and 2 on data or model errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmerge

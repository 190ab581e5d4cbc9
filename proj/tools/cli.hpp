#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kaczmarz::cli {

/// Runs the command line front end. `args` excludes the program name.
/// Returns 0 on success, 1 on data or domain errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kaczmarz::cli

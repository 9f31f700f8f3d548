#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wshart::cli {

/// Runs one command line (argv[0] is the program name). Output goes to `out`
/// unless --out is given; diagnostics go to `err`. Returns the exit code:
/// 0 success, 1 validation or numeric failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses start:stop:count (inclusive endpoints) into a strictly increasing grid.
std::vector<double> parse_grid(const std::string& text);

}  // namespace wshart::cli

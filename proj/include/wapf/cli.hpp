#pragma once

#include <iosfwd>

namespace wapf {

/// Command-line entry point: subcommands run, convergence, nbody-compare and
/// star-fraction. Returns 0 on success. Failures print one line
/// "error: <category>: <message>" to `err` and return 1 (2 for usage errors).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wapf

#pragma once

#include <iosfwd>

namespace wsc::cli {

/// Exit codes: 0 solved / valid, 2 not solved / invalid plan, 1 usage or
/// input errors. Documents go to `out` (or --out), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wsc::cli

#pragma once

#include <iosfwd>

namespace acsolve {

inline constexpr const char* kVersion = "0.1.0";

// Entry point of the acsolve tool. Commands: solve, ot, mmc, flow,
// spectraplex, check, bench. The JSON report goes to --output or, without
// it, to out; solutions are written next to the report. Diagnostics go to
// err. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace acsolve

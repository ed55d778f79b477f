#pragma once

#include <iosfwd>

namespace gridident {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitFormat = 3;
inline constexpr int kExitSolver = 4;

/// Entry point of the `gridident` tool. Data goes to `out`, progress and
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gridident

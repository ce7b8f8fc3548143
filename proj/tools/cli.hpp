#pragma once

#include <iosfwd>

namespace ihse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPathology = 3;

/// Parses argv, dispatches the subcommand and writes its output. Primary
/// output goes to --out (atomically) or `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ihse::cli

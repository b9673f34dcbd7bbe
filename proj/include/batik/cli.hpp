#pragma once

#include <ostream>

namespace batik {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;

/// Runs the `batik` command line. Subcommands: render, curve, lift, motif,
/// validate, presets, serve. Errors go to `err` as one "error: ..." line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace batik

#ifndef NULLITY_CLI_HPP
#define NULLITY_CLI_HPP

#include <iosfwd>

namespace nullity::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. JSON goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nullity::cli

#endif  // NULLITY_CLI_HPP

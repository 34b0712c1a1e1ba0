#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "equidist/exactfrac.hpp"

namespace equidist {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

/// Comma- or repeat-separated α coordinates. Each token is a decimal
/// fraction, a 0x raw word, "golden", "silver", or the lone token
/// random:<seed>, which expands to d coordinates.
AlphaVec parse_alpha(const std::vector<std::string>& tokens, int d);

/// Runs one subcommand; args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace equidist

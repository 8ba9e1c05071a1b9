#pragma once

// JSON input parsing and the batch command surface behind the `hkq` binary.

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hkq/rep_core.hpp"

namespace hkq {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitAssertion = 3;
inline constexpr int kExitUndecided = 4;

/// {"rank": k, "weights": [[...], ...], "theta": ["p/q", ...]}; "schema", when
/// present, must be 1. Throws ParseError with 1-based line and column.
WeightSystem parse_weights(std::string_view text);

/// {"coords": [...]} for V or {"x": [...], "z": [...]} for T*V. Each entry is a
/// real (number or rational string) or a [re, im] pair.
using PointInput = std::variant<ExactAmbientPoint, ExactCotangentPoint>;
PointInput parse_point(std::string_view text);

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hkq

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace piotrowski::cli {

inline constexpr std::string_view kToolName = "piotrowski";
inline constexpr std::string_view kVersion = "1.0.0";

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kFitFailure = 3,
};

// Runs one subcommand. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace piotrowski::cli

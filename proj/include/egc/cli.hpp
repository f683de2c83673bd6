#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace egc::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kUsageError = 2 };

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Stable 64-bit FNV-1a hash, used to name report folders.
std::uint64_t fnv1a64(const std::string& data) noexcept;

}  // namespace egc::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptspectra::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Subcommands: wedges, shoot, truncate, compare, wkbfit. args excludes the
/// program name. Results go to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptspectra::cli

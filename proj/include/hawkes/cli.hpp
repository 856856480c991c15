#pragma once

#include <string>
#include <vector>

namespace hawkes::cli {

inline constexpr const char* kVersion = "0.1.0";

// Subcommands: sim, scan, fit, bayes, changepoint, experiment. Exit codes:
// 0 success, 1 validation/usage error, 2 numerical failure.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

} // namespace hawkes::cli

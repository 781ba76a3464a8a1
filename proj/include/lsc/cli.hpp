// Command-line front end. cli_dispatch is the whole program minus process
// setup, so tests can drive it in-process.
#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace lsc {

/// Exit codes: 0 success, 1 negative verdict, 2 usage error or limit.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitError = 2;

/// args excludes the program name.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs f on a thread with the given stack size and returns its result.
/// Reduction and printing recurse on term depth.
int run_with_stack(std::size_t bytes, const std::function<int()>& f);

inline constexpr std::size_t kLargeStack = std::size_t{1} << 30;

}  // namespace lsc

#pragma once

// Command-line front end. Exit codes: 0 success, 1 internal error,
// 2 invalid parameters, 3 solver nonconvergence, 4 infeasible input or
// boundary estimate (the result is still printed, with its flag).

#include <iosfwd>
#include <string>
#include <vector>

namespace harmonic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitInfeasible = 4;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace harmonic::cli

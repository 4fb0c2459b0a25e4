#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rdecusum::cli {

// Exit codes.
inline constexpr int kAlarm = 0;
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kNoAlarm = 2;
inline constexpr int kViolations = 3;
inline constexpr int kMismatch = 4;

/// Entry point behind the `rdecusum` executable; `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rdecusum::cli

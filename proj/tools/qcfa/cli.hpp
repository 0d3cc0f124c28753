#pragma once

#include <ostream>

namespace qcfa::cli {

// Exit codes of the qcfa tool.
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;  // a verdict requested with --expect-* came out negative
inline constexpr int kUsage = 2;     // bad flags or unreadable input
inline constexpr int kInternal = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcfa::cli

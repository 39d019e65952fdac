#pragma once

#include <iosfwd>

namespace sfg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `sfg` tool; usable in-process by tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sfg

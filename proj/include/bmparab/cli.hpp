#pragma once

// Command-line front end. run() is the whole program minus process setup so
// tests can drive it with in-memory streams.

#include <iosfwd>
#include <string>
#include <vector>

namespace bmparab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

// "start:stop:step" with start <= stop, step > 0 and at most 1e6 steps.
// Points are start + i*step; the last one is kept while it lies within half a
// step of stop. Throws DomainError on malformed input.
std::vector<double> parse_grid(const std::string& text);

// 12 significant digits, shortest form ("%.12g").
std::string format_number(double v);

// Threads allowed by BMPARAB_THREADS (unset: hardware concurrency).
// Throws DomainError for a value that is not a positive integer.
unsigned thread_budget();

// args excludes the program name. Writes results to `out` unless --out is
// given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmparab::cli

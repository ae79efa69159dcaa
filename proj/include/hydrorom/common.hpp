#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rom {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (CLI exit code 2).
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Numerical failure: degenerate data, failed factorization (CLI exit code 3).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Filesystem failure: missing file, unwritable path (CLI exit code 4).
class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed file content: bad magic, inconsistent header (CLI exit code 4).
class FormatError : public Error {
public:
  using Error::Error;
};

/// Shortest decimal string that round-trips the double (17 significant digits).
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Pairwise (tree) summation over a contiguous range.  The reduction order is
/// a fixed balanced tree, so the result is independent of thread count and
/// identical across runs.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

/// Thread budget: ROM_THREADS if set and positive, otherwise 1.
int thread_budget();

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads.  Indices are
/// split into contiguous chunks; fn must not write shared state outside its
/// own index.  Results are bitwise independent of the thread count.  If fn
/// throws, the exception from the lowest chunk is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Opens an output stream, creating parent directories; throws IoError on failure.
std::ofstream open_output(const std::filesystem::path& path);

/// Opens an input stream in binary mode; throws IoError if missing/unreadable.
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace rom

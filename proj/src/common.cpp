#include "hydrorom/common.hpp"

#include <cstdlib>
#include <thread>

namespace rom {

int thread_budget() {
  const char* env = std::getenv("ROM_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<int>(v);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t k =
      std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), n);
  if (k <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(k);
  workers.reserve(k);
  for (std::size_t w = 0; w < k; ++w) {
    const std::size_t lo = n * w / k;
    const std::size_t hi = n * (w + 1) / k;
    workers.emplace_back([lo, hi, &fn, &err = errors[w]] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        err = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  // Rethrow from the lowest chunk so the surfaced error does not depend on
  // thread scheduling.
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path.string());
  return in;
}

}  // namespace rom

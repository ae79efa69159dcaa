#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <vector>

#include "hydrorom/common.hpp"

using namespace rom;

TEST_CASE("pairwise_sum matches long-double accumulation on random data") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(1000);
  long double exact = 0.0L;
  for (double& x : v) {
    x = dist(rng);
    exact += x;
  }
  const double got = pairwise_sum(std::span<const double>(v));
  CHECK(std::abs(got - static_cast<double>(exact)) < 1e-12);
}

TEST_CASE("pairwise_sum handles empty, single and exact integer data") {
  CHECK(pairwise_sum({}) == 0.0);
  const std::vector<double> one = {3.5};
  CHECK(pairwise_sum(std::span<const double>(one)) == 3.5);
  std::vector<double> ints(1 << 10);
  for (std::size_t i = 0; i < ints.size(); ++i)
    ints[i] = static_cast<double>(i % 7);
  // n*(0+..+6)/7 is exactly representable, so the tree sum is exact
  double expect = 0;
  for (double x : ints) expect += x;
  CHECK(pairwise_sum(std::span<const double>(ints)) == expect);
}

TEST_CASE("g17 round-trips doubles exactly") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 6.02214076e23, 2.5e-308, -19.995}) {
    const double back = std::strtod(g17(v).c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("parallel_for covers every index exactly once") {
  const std::size_t n = 10007;
  std::vector<std::atomic<int>> hits(n);
  parallel_for(n, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
}

TEST_CASE("parallel_for rethrows the lowest-index chunk's exception") {
  // Indices 100 and 900 both throw; the surfaced message must be the one
  // from the lower chunk regardless of scheduling.
  for (int rep = 0; rep < 5; ++rep) {
    try {
      parallel_for(1000, [](std::size_t i) {
        if (i == 100) throw ArgumentError("low");
        if (i == 900) throw ArgumentError("high");
      });
      FAIL("expected an exception");
    } catch (const ArgumentError& e) {
      CHECK(std::string(e.what()) == "low");
    }
  }
}

TEST_CASE("thread_budget defaults to 1 without ROM_THREADS") {
  // The test runner does not set ROM_THREADS.
  if (std::getenv("ROM_THREADS") == nullptr) CHECK(thread_budget() == 1);
}

TEST_CASE("open_output creates parent directories") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "romtest_common";
  fs::remove_all(dir);
  {
    auto f = open_output(dir / "a" / "b" / "c.txt");
    f << "x\n";
  }
  CHECK(fs::exists(dir / "a" / "b" / "c.txt"));
  fs::remove_all(dir);
}

TEST_CASE("open_input throws IoError on a missing file") {
  CHECK_THROWS_AS(open_input("/nonexistent/romtest/file.bin"), IoError);
}

TEST_CASE("error types map onto the documented exit-code families") {
  // All four are distinct types below a shared base.
  CHECK_THROWS_AS(throw ArgumentError("x"), Error);
  CHECK_THROWS_AS(throw NumericalError("x"), Error);
  CHECK_THROWS_AS(throw IoError("x"), Error);
  CHECK_THROWS_AS(throw FormatError("x"), Error);
}

#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hydrorom/metrics.hpp"

using namespace rom;
namespace fs = std::filesystem;

namespace {

SnapshotDataset tiny_dataset(int m, std::uint64_t seed) {
  const int n_cells = 5;
  std::vector<std::array<double, 3>> centers(n_cells);
  for (int i = 0; i < n_cells; ++i) centers[i] = {double(i), 0, 0};
  const Mesh mesh = Mesh::from_points(centers, std::vector<double>(n_cells, 1.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd snaps(2 * n_cells, m);  // layout u,p
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < 2 * n_cells; ++i) snaps(i, j) = dist(rng);
  std::vector<double> times(m);
  for (int k = 0; k < m; ++k) times[k] = 0.1 * k;
  return SnapshotDataset(mesh, FieldLayout({"u", "p"}), times, snaps);
}

double naive_error_percent(const Eigen::MatrixXd& x_hat,
                           const Eigen::MatrixXd& x_ref) {
  double num = 0, den = 0;
  for (Eigen::Index j = 0; j < x_ref.cols(); ++j)
    for (Eigen::Index i = 0; i < x_ref.rows(); ++i) {
      const double d = x_hat(i, j) - x_ref(i, j);
      num += d * d;
      den += x_ref(i, j) * x_ref(i, j);
    }
  return 100.0 * std::sqrt(num / den);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("relative error matches a naive elementwise oracle") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist;
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd ref(7, 4), hat(7, 4);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 7; ++i) {
        ref(i, j) = dist(rng);
        hat(i, j) = ref(i, j) + 0.01 * dist(rng);
      }
    CHECK(relative_frobenius_error(hat, ref) ==
          doctest::Approx(naive_error_percent(hat, ref)).epsilon(1e-12));
  }
  // vectors work the same way
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 1, 2, 4;
  CHECK(relative_frobenius_error(a, b) ==
        doctest::Approx(100.0 / std::sqrt(21.0)).epsilon(1e-12));
}

TEST_CASE("error definition is directional: reference sets the denominator") {
  Eigen::VectorXd ref(1), hat(1);
  ref << 2.0;
  hat << 1.0;
  CHECK(relative_frobenius_error(hat, ref) == doctest::Approx(50.0));
  CHECK(relative_frobenius_error(ref, hat) == doctest::Approx(100.0));
}

TEST_CASE("degenerate references are rejected") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(relative_frobenius_error(one, zero), NumericalError);
  Eigen::MatrixXd a(2, 2), b(2, 3);
  CHECK_THROWS_AS(relative_frobenius_error(a, b), ArgumentError);
}

TEST_CASE("error_sweep evaluates each reference snapshot per rank") {
  const auto ds = tiny_dataset(6, 40);
  // surrogate: exact for even snapshots, decays the odd ones by rank-scaled factor
  const Surrogate surrogate = [&](int rank, double t) -> Eigen::VectorXd {
    std::size_t k = static_cast<std::size_t>(std::lround(t / 0.1));
    Eigen::VectorXd x = ds.column(k);
    if (k % 2 == 1) x *= 1.0 - 0.01 / rank;
    return x;
  };
  const auto reports = error_sweep(surrogate, ds, {4, 2}, "prediction");
  REQUIRE(reports.size() == 2);
  // sorted ascending by rank regardless of request order
  CHECK(reports[0].rank == 2);
  CHECK(reports[1].rank == 4);
  for (const auto& rep : reports) {
    CHECK(rep.label == "prediction");
    REQUIRE(rep.per_snapshot.size() == 6);
    double mean = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      const auto& e = rep.per_snapshot[k];
      CHECK(e.snapshot_index == k);
      CHECK(e.time == doctest::Approx(ds.times()[k]));
      const double expect =
          (k % 2 == 1) ? 100.0 * 0.01 / rep.rank : 0.0;
      CHECK(e.error_percent == doctest::Approx(expect).epsilon(1e-10));
      mean += e.error_percent;
    }
    CHECK(rep.global_percent == doctest::Approx(mean / 6.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(error_sweep(surrogate, ds, {2, 2}, "x"), ArgumentError);
  CHECK_THROWS_AS(error_sweep(surrogate, ds, {}, "x"), ArgumentError);
}

TEST_CASE("pressure_gauge_offset shifts only the pressure rows") {
  const auto ds = tiny_dataset(3, 50);
  const auto shifted = pressure_gauge_offset(ds, 1.0);
  CHECK(shifted.snapshots().topRows(5) == ds.snapshots().topRows(5));
  CHECK((shifted.snapshots().bottomRows(5) - ds.snapshots().bottomRows(5))
            .isApproxToConstant(1.0, 1e-15));
}

TEST_CASE("compression bookkeeping matches the storage model") {
  // spectral ROM: r state-sized modes (conjugate pairs counted once) plus
  // 4r dynamic scalars; interpolatory ROM: r modes plus m_train knots per
  // mode (values + curvatures) and the shared time grid.
  const std::size_t n = 1000, m = 20, m_train = 10;
  const int r = 4;
  const auto dmd = compression_report(RomKind::dmd, n, m, m_train, r, 8.0, 2.0, 1.0);
  CHECK(dmd.fom_floats == doctest::Approx(1000.0 * 20.0));
  CHECK(dmd.rom_floats == doctest::Approx(1000.0 * 4.0 + 16.0));
  CHECK(dmd.compression_level == doctest::Approx(20000.0 / 4016.0));
  CHECK(dmd.fom_bytes == doctest::Approx(8.0 * 20000.0));
  CHECK(dmd.rom_bytes == doctest::Approx(8.0 * 4016.0));
  CHECK(dmd.speedup == doctest::Approx(2.0));

  const auto podi =
      compression_report(RomKind::podi, n, m, m_train, r, 4.0, 1.0, 1.0);
  CHECK(podi.rom_floats == doctest::Approx(1000.0 * 4.0 + 10.0 * 9.0));
  CHECK(podi.rom_bytes == doctest::Approx(4.0 * podi.rom_floats));

  CHECK_THROWS_AS(compression_report(RomKind::dmd, n, m, m_train, 0, 8.0, 1.0, 1.0),
                  ArgumentError);
  CHECK_THROWS_AS(compression_report(RomKind::dmd, n, m, m_train, r, 8.0, 1.0, 0.0),
                  ArgumentError);
}

TEST_CASE("error CSV layout: one row per rank and snapshot") {
  const fs::path dir = fs::temp_directory_path() / "romtest_metrics";
  fs::remove_all(dir);
  const auto ds = tiny_dataset(4, 60);
  const Surrogate exact = [&](int, double t) {
    return ds.column(static_cast<std::size_t>(std::lround(t / 0.1)));
  };
  const auto reports = error_sweep(exact, ds, {1, 2}, "reconstruction");
  write_error_csv(reports, dir / "err.csv");
  const std::string text = slurp(dir / "err.csv");
  CHECK(text.rfind("rank,snapshot_index,time,error_percent\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 4);
  CHECK(text.find("\n2,3,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("summary CSV pairs each rank with its compression row") {
  const fs::path dir = fs::temp_directory_path() / "romtest_metrics2";
  fs::remove_all(dir);
  const auto ds = tiny_dataset(4, 61);
  const Surrogate exact = [&](int, double t) {
    return ds.column(static_cast<std::size_t>(std::lround(t / 0.1)));
  };
  const auto reports = error_sweep(exact, ds, {1, 2}, "prediction");
  std::vector<CompressionReport> comp = {
      compression_report(RomKind::dmd, ds.n_dof(), 4, 2, 1, 8.0, 1.0, 1.0),
      compression_report(RomKind::dmd, ds.n_dof(), 4, 2, 2, 8.0, 1.0, 1.0)};
  write_summary_csv(reports, comp, dir / "summary.csv");
  const std::string text = slurp(dir / "summary.csv");
  CHECK(text.rfind("rank,label,global_error_percent,compression_level,speedup\n",
                   0) == 0);
  CHECK(text.find("1,prediction,0,") != std::string::npos);

  // a missing compression rank is a hard error
  comp.pop_back();
  CHECK_THROWS_AS(write_summary_csv(reports, comp, dir / "bad.csv"),
                  ArgumentError);
  fs::remove_all(dir);
}

#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hydrorom/snapshot.hpp"

using namespace rom;
namespace fs = std::filesystem;

namespace {

Mesh small_grid() {
  StructuredGrid g;
  g.nx = 4;
  g.ny = 3;
  g.nz = 2;
  g.hx = 0.5;
  g.hy = 1.0;
  g.hz = 2.0;
  g.origin = {10.0, 20.0, 30.0};
  return Mesh::structured(g);
}

SnapshotDataset random_dataset(int m, std::uint64_t seed,
                               FieldLayout layout = FieldLayout::full()) {
  const Mesh mesh = small_grid();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  const auto n = static_cast<Eigen::Index>(layout.n_dof(mesh.n_cells()));
  Eigen::MatrixXd snaps(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) snaps(i, j) = dist(rng);
  std::vector<double> times(m);
  for (int k = 0; k < m; ++k) times[k] = 0.25 + 0.01 * k;
  return SnapshotDataset(mesh, layout, times, snaps);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("structured mesh centers follow x-fastest ordering") {
  const Mesh mesh = small_grid();
  CHECK(mesh.n_cells() == 4 * 3 * 2);
  CHECK(mesh.is_structured());
  // cell (i,j,k) center = origin + (i+1/2) h
  const auto& c0 = mesh.center(0);
  CHECK(c0[0] == doctest::Approx(10.25));
  CHECK(c0[1] == doctest::Approx(20.5));
  CHECK(c0[2] == doctest::Approx(31.0));
  const auto& c5 = mesh.center(1 + 4 * 1);  // (1,1,0)
  CHECK(c5[0] == doctest::Approx(10.75));
  CHECK(c5[1] == doctest::Approx(21.5));
  // uniform volumes
  for (std::size_t i = 0; i < mesh.n_cells(); ++i)
    CHECK(mesh.volume(i) == doctest::Approx(0.5 * 1.0 * 2.0));
  CHECK(mesh.total_volume() == doctest::Approx(2.0 * 3.0 * 4.0));
}

TEST_CASE("nearest_cell picks the closest center, lowest index on ties") {
  const Mesh mesh = small_grid();
  CHECK(mesh.nearest_cell({10.25, 20.5, 31.0}) == 0);
  CHECK(mesh.nearest_cell({-100, 0, 0}) == 0);
  // midpoint between cells 0 and 1 along x: tie resolves to the lower index
  CHECK(mesh.nearest_cell({10.5, 20.5, 31.0}) == 0);
}

TEST_CASE("explicit point mesh rejects inconsistent and non-positive input") {
  CHECK_THROWS_AS(Mesh::from_points({{0, 0, 0}}, {1.0, 2.0}), ArgumentError);
  CHECK_THROWS_AS(Mesh::from_points({{0, 0, 0}}, {0.0}), ArgumentError);
  CHECK_THROWS_AS(Mesh::from_points({}, {}), ArgumentError);
  const Mesh m = Mesh::from_points({{1, 2, 3}, {4, 5, 6}}, {1.0, 3.0});
  CHECK(m.n_cells() == 2);
  CHECK_FALSE(m.is_structured());
  CHECK_THROWS_AS(m.grid(), ArgumentError);
}

TEST_CASE("field layout keeps canonical component order") {
  const FieldLayout layout({"u", "w", "p"});
  CHECK(layout.components() == std::vector<std::string>{"u", "w", "p"});
  CHECK(layout.block_of("u") == 0);
  CHECK(layout.block_of("w") == 1);
  CHECK(layout.block_of("p") == 2);
  CHECK(layout.offset_of("p", 10) == 20);
  CHECK_FALSE(layout.has_velocity());
  CHECK(FieldLayout::full().has_velocity());
  CHECK_THROWS_AS(layout.block_of("v"), ArgumentError);
  CHECK_THROWS_AS(FieldLayout({"u", "u"}), ArgumentError);
  CHECK_THROWS_AS(FieldLayout({"p", "u"}), ArgumentError);  // disordered
  CHECK_THROWS_AS(FieldLayout({"q"}), ArgumentError);
}

TEST_CASE("unpack_state groups velocity and names pressure") {
  const Mesh mesh = small_grid();
  const auto n_cells = mesh.n_cells();
  const FieldLayout layout = FieldLayout::full();
  Eigen::VectorXd state(static_cast<Eigen::Index>(layout.n_dof(n_cells)));
  for (Eigen::Index i = 0; i < state.size(); ++i) state(i) = i;
  const auto fields = unpack_state(state, layout, n_cells);
  REQUIRE(fields.size() == 2);
  CHECK(fields[0].name == "velocity");
  CHECK(fields[0].kind == FieldKind::vector3);
  CHECK(fields[1].name == "pressure");
  CHECK(fields[1].kind == FieldKind::scalar);
  CHECK(fields[0].comps[1](0) == doctest::Approx(static_cast<double>(n_cells)));
  CHECK(fields[1].comps[0](0) ==
        doctest::Approx(static_cast<double>(3 * n_cells)));
}

TEST_CASE("split_train_test decimates even/odd with exact double step") {
  const auto ds = random_dataset(10, 42);
  const auto [train, test] = split_train_test(ds);
  CHECK(train.m() == 5);
  CHECK(test.m() == 4);  // odd instants 1,3,5,7; the trailing 9 has no successor
  CHECK(train.dt() == doctest::Approx(2.0 * ds.dt()).epsilon(1e-15));
  for (std::size_t k = 0; k < train.m(); ++k) {
    CHECK(train.times()[k] == ds.times()[2 * k]);
    CHECK(train.snapshots().col(k) == ds.snapshots().col(2 * k));
  }
  for (std::size_t k = 0; k < test.m(); ++k)
    CHECK(test.times()[k] == ds.times()[2 * k + 1]);

  const auto odd = random_dataset(11, 43);
  const auto [tr2, te2] = split_train_test(odd);
  CHECK(tr2.m() == 6);
  CHECK(te2.m() == 5);
}

TEST_CASE("dataset accessors and validation") {
  const auto ds = random_dataset(6, 7);
  CHECK(ds.n_dof() == 4 * ds.n_cells());
  CHECK(ds.dt() == doctest::Approx(0.01));
  CHECK(ds.t0() == doctest::Approx(0.25));
  CHECK(ds.column(3) == ds.snapshots().col(3));
  CHECK(ds.component_block("w").rows() == static_cast<Eigen::Index>(ds.n_cells()));
  CHECK(ds.component_block("w")(0, 2) ==
        ds.snapshots()(static_cast<Eigen::Index>(2 * ds.n_cells()), 2));

  // non-uniform times are rejected
  const Mesh mesh = small_grid();
  Eigen::MatrixXd two(static_cast<Eigen::Index>(4 * mesh.n_cells()), 3);
  two.setZero();
  CHECK_THROWS_AS(
      SnapshotDataset(mesh, FieldLayout::full(), {0.0, 0.1, 0.3}, two),
      ArgumentError);
  // column/time count mismatch
  CHECK_THROWS_AS(SnapshotDataset(mesh, FieldLayout::full(), {0.0, 0.1}, two),
                  ArgumentError);
}

TEST_CASE("with_pressure_offset shifts only the pressure block") {
  const auto ds = random_dataset(4, 9);
  const auto shifted = ds.with_pressure_offset(2.5);
  const auto n = static_cast<Eigen::Index>(ds.n_cells());
  CHECK(shifted.snapshots().topRows(3 * n) == ds.snapshots().topRows(3 * n));
  CHECK((shifted.snapshots().bottomRows(n) - ds.snapshots().bottomRows(n))
            .isApproxToConstant(2.5, 1e-15));
}

TEST_CASE("probe resolution and sampling") {
  const auto ds = random_dataset(5, 3);
  const Probe probe = resolve_probe(ds.mesh(), {10.26, 20.4, 31.1});
  CHECK(probe.cell_index == 0);
  const TimeSeries ts = sample_probe(ds, probe, "v");
  REQUIRE(ts.times.size() == 5);
  const auto row = static_cast<Eigen::Index>(ds.n_cells() + probe.cell_index);
  for (int k = 0; k < 5; ++k) CHECK(ts.values[k] == ds.snapshots()(row, k));
  CHECK_THROWS_AS(sample_probe(ds, probe, "q"), ArgumentError);
}

TEST_CASE("save/load round-trips bit-exactly for both mesh kinds") {
  const fs::path dir = fs::temp_directory_path() / "romtest_snapshot";
  fs::remove_all(dir);

  const auto ds = random_dataset(7, 99);
  save_dataset(ds, dir / "a.romsnap");
  const auto back = load_dataset(dir / "a.romsnap");
  CHECK(back.layout() == ds.layout());
  CHECK(back.times() == ds.times());
  CHECK(back.snapshots() == ds.snapshots());
  CHECK(back.mesh().is_structured());
  CHECK(back.mesh().grid().nx == 4);
  CHECK(back.mesh().center(5) == ds.mesh().center(5));

  const Mesh pts = Mesh::from_points({{1, 2, 3}, {4, 5, 6}}, {1.0, 3.0});
  Eigen::MatrixXd snaps(2 * 2, 3);
  for (int i = 0; i < snaps.size(); ++i) snaps(i / 3, i % 3) = i;
  const SnapshotDataset ds2(pts, FieldLayout({"u", "p"}), {0.0, 0.5, 1.0}, snaps);
  save_dataset(ds2, dir / "b.romsnap");
  const auto back2 = load_dataset(dir / "b.romsnap");
  CHECK_FALSE(back2.mesh().is_structured());
  CHECK(back2.mesh().centers() == pts.centers());
  CHECK(back2.mesh().volumes() == pts.volumes());
  CHECK(back2.snapshots() == snaps);

  // identical content on disk for identical input
  save_dataset(ds, dir / "a2.romsnap");
  CHECK(slurp(dir / "a.romsnap") == slurp(dir / "a2.romsnap"));

  // corrupted magic is a format error
  {
    std::ofstream f(dir / "bad.romsnap", std::ios::binary);
    f << "NOTSNAP1\n{}";
  }
  CHECK_THROWS_AS(load_dataset(dir / "bad.romsnap"), FormatError);
  CHECK_THROWS_AS(load_dataset(dir / "missing.romsnap"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("timeseries CSV uses the documented header and full precision") {
  const fs::path dir = fs::temp_directory_path() / "romtest_snapshot_csv";
  fs::remove_all(dir);
  TimeSeries ts;
  ts.times = {0.0, 0.1};
  ts.values = {1.0 / 3.0, -2.0};
  write_timeseries_csv(ts, dir / "ts.csv");
  const std::string text = slurp(dir / "ts.csv");
  CHECK(text.rfind("t,value\n", 0) == 0);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  fs::remove_all(dir);
}

#include "hydrorom/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace rom {

static_assert(std::endian::native == std::endian::little,
              "romsnap payload is little-endian float64");

namespace {

constexpr char kMagic[] = "ROMSNAP1\n";
constexpr std::size_t kMagicLen = 9;
constexpr double kDtRelTol = 1e-10;

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw ArgumentError(std::string(what) + " contains NaN/Inf");
}

}  // namespace

Mesh Mesh::structured(const StructuredGrid& grid) {
  if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1)
    throw ArgumentError("structured grid needs nx,ny,nz >= 1");
  if (!(grid.hx > 0) || !(grid.hy > 0) || !(grid.hz > 0) ||
      !std::isfinite(grid.hx) || !std::isfinite(grid.hy) || !std::isfinite(grid.hz))
    throw ArgumentError("structured grid needs positive finite spacings");
  for (double o : grid.origin)
    if (!std::isfinite(o)) throw ArgumentError("structured grid origin not finite");

  Mesh mesh;
  mesh.grid_ = grid;
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz;
  mesh.centers_.resize(n);
  mesh.volumes_.assign(n, grid.hx * grid.hy * grid.hz);
  std::size_t idx = 0;
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        mesh.centers_[idx++] = {grid.origin[0] + (i + 0.5) * grid.hx,
                                grid.origin[1] + (j + 0.5) * grid.hy,
                                grid.origin[2] + (k + 0.5) * grid.hz};
      }
  return mesh;
}

Mesh Mesh::from_points(std::vector<std::array<double, 3>> centers,
                       std::vector<double> volumes) {
  if (centers.empty()) throw ArgumentError("mesh needs at least one cell");
  if (centers.size() != volumes.size())
    throw ArgumentError("mesh centers/volumes size mismatch");
  for (const auto& c : centers)
    for (double x : c)
      if (!std::isfinite(x)) throw ArgumentError("mesh center not finite");
  for (double v : volumes)
    if (!(v > 0) || !std::isfinite(v))
      throw ArgumentError("cell volumes must be positive and finite");
  Mesh mesh;
  mesh.centers_ = std::move(centers);
  mesh.volumes_ = std::move(volumes);
  return mesh;
}

double Mesh::total_volume() const {
  return pairwise_sum(std::span<const double>(volumes_));
}

const StructuredGrid& Mesh::grid() const {
  if (!grid_) throw ArgumentError("mesh is not structured");
  return *grid_;
}

std::size_t Mesh::nearest_cell(const std::array<double, 3>& p) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const auto& c = centers_[i];
    const double dx = c[0] - p[0], dy = c[1] - p[1], dz = c[2] - p[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

FieldLayout::FieldLayout(std::vector<std::string> components)
    : comps_(std::move(components)) {
  static const std::vector<std::string> canonical = {"u", "v", "w", "p"};
  if (comps_.empty()) throw ArgumentError("layout needs at least one component");
  std::size_t pos = 0;
  for (const auto& c : comps_) {
    auto it = std::find(canonical.begin() + pos, canonical.end(), c);
    if (it == canonical.end())
      throw ArgumentError("layout must be an ordered subset of u,v,w,p; got '" + c + "'");
    pos = static_cast<std::size_t>(it - canonical.begin()) + 1;
  }
}

bool FieldLayout::has(const std::string& name) const {
  return std::find(comps_.begin(), comps_.end(), name) != comps_.end();
}

std::size_t FieldLayout::block_of(const std::string& name) const {
  auto it = std::find(comps_.begin(), comps_.end(), name);
  if (it == comps_.end())
    throw ArgumentError("component '" + name + "' not in layout");
  return static_cast<std::size_t>(it - comps_.begin());
}

Field make_scalar_field(std::string name, Eigen::VectorXd values) {
  require_finite(values, "field values");
  Field f;
  f.kind = FieldKind::scalar;
  f.name = std::move(name);
  f.comps.push_back(std::move(values));
  return f;
}

Field make_vector_field(std::string name, Eigen::VectorXd x, Eigen::VectorXd y,
                        Eigen::VectorXd z) {
  if (x.size() != y.size() || x.size() != z.size())
    throw ArgumentError("vector field components must have equal length");
  require_finite(x, "field values");
  require_finite(y, "field values");
  require_finite(z, "field values");
  Field f;
  f.kind = FieldKind::vector3;
  f.name = std::move(name);
  f.comps.push_back(std::move(x));
  f.comps.push_back(std::move(y));
  f.comps.push_back(std::move(z));
  return f;
}

std::vector<Field> unpack_state(const Eigen::VectorXd& state,
                                const FieldLayout& layout, std::size_t n_cells) {
  const auto n = static_cast<Eigen::Index>(n_cells);
  if (state.size() != static_cast<Eigen::Index>(layout.n_dof(n_cells)))
    throw ArgumentError("state size does not match layout");
  auto block = [&](const std::string& c) {
    return state.segment(static_cast<Eigen::Index>(layout.offset_of(c, n_cells)), n);
  };
  std::vector<Field> fields;
  if (layout.has_velocity())
    fields.push_back(make_vector_field("velocity", block("u"), block("v"), block("w")));
  else
    for (const auto& c : {"u", "v", "w"})
      if (layout.has(c)) fields.push_back(make_scalar_field(c, block(c)));
  if (layout.has("p")) fields.push_back(make_scalar_field("pressure", block("p")));
  return fields;
}

void write_timeseries_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  if (ts.times.size() != ts.values.size())
    throw ArgumentError("time series times/values size mismatch");
  auto out = open_output(path);
  out << "t,value\n";
  for (std::size_t i = 0; i < ts.times.size(); ++i)
    out << g17(ts.times[i]) << ',' << g17(ts.values[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

SnapshotDataset::SnapshotDataset(Mesh mesh, FieldLayout layout,
                                 std::vector<double> times, Eigen::MatrixXd snapshots)
    : mesh_(std::move(mesh)),
      layout_(std::move(layout)),
      times_(std::move(times)),
      snapshots_(std::move(snapshots)) {
  if (layout_.n_blocks() == 0) throw ArgumentError("dataset needs a layout");
  if (snapshots_.rows() != static_cast<Eigen::Index>(layout_.n_dof(mesh_.n_cells())))
    throw ArgumentError("snapshot rows do not match layout x cells");
  if (snapshots_.cols() != static_cast<Eigen::Index>(times_.size()))
    throw ArgumentError("snapshot count mismatch: columns vs times");
  for (double t : times_)
    if (!std::isfinite(t)) throw ArgumentError("times contain NaN/Inf");
  if (times_.size() >= 2) {
    const double dt0 = (times_.back() - times_.front()) /
                       static_cast<double>(times_.size() - 1);
    if (!(dt0 > 0)) throw ArgumentError("times must be strictly increasing");
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
      const double step = times_[k + 1] - times_[k];
      if (std::abs(step - dt0) > kDtRelTol * dt0)
        throw ArgumentError("non-uniform time step");
    }
  }
}

double SnapshotDataset::dt() const {
  if (times_.size() < 2)
    throw ArgumentError("time step undefined for fewer than two snapshots");
  return (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
}

double SnapshotDataset::t0() const {
  if (times_.empty()) throw ArgumentError("empty dataset");
  return times_.front();
}

Eigen::VectorXd SnapshotDataset::column(std::size_t k) const {
  if (k >= m()) throw ArgumentError("snapshot index out of range");
  return snapshots_.col(static_cast<Eigen::Index>(k));
}

std::vector<Field> SnapshotDataset::fields_at(std::size_t k) const {
  return unpack_state(column(k), layout_, n_cells());
}

Eigen::Block<const Eigen::MatrixXd> SnapshotDataset::component_block(
    const std::string& name) const {
  const auto off = static_cast<Eigen::Index>(layout_.offset_of(name, n_cells()));
  return snapshots_.block(off, 0, static_cast<Eigen::Index>(n_cells()),
                          snapshots_.cols());
}

SnapshotDataset SnapshotDataset::with_pressure_offset(double offset) const {
  if (!std::isfinite(offset)) throw ArgumentError("pressure offset not finite");
  Eigen::MatrixXd shifted = snapshots_;
  const auto off = static_cast<Eigen::Index>(layout_.offset_of("p", n_cells()));
  shifted.middleRows(off, static_cast<Eigen::Index>(n_cells())).array() += offset;
  return SnapshotDataset(mesh_, layout_, times_, std::move(shifted));
}

std::pair<SnapshotDataset, SnapshotDataset> split_train_test(
    const SnapshotDataset& ds) {
  const std::size_t m = ds.m();
  if (m < 4) throw ArgumentError("split needs at least 4 snapshots");
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < m; i += 2) train_idx.push_back(i);
  for (std::size_t i = 1; i + 1 < m; i += 2) test_idx.push_back(i);

  auto take = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> t(idx.size());
    Eigen::MatrixXd s(ds.snapshots().rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      t[j] = ds.times()[idx[j]];
      s.col(static_cast<Eigen::Index>(j)) =
          ds.snapshots().col(static_cast<Eigen::Index>(idx[j]));
    }
    return SnapshotDataset(ds.mesh(), ds.layout(), std::move(t), std::move(s));
  };
  return {take(train_idx), take(test_idx)};
}

Probe resolve_probe(const Mesh& mesh, const std::array<double, 3>& location) {
  for (double x : location)
    if (!std::isfinite(x)) throw ArgumentError("probe location not finite");
  return Probe{location, mesh.nearest_cell(location)};
}

TimeSeries sample_probe(const SnapshotDataset& ds, const Probe& probe,
                        const std::string& component) {
  if (probe.cell_index >= ds.n_cells())
    throw ArgumentError("probe cell index out of range");
  const auto row = static_cast<Eigen::Index>(
      ds.layout().offset_of(component, ds.n_cells()) + probe.cell_index);
  TimeSeries ts;
  ts.times = ds.times();
  ts.values.resize(ds.m());
  for (std::size_t k = 0; k < ds.m(); ++k)
    ts.values[k] = ds.snapshots()(row, static_cast<Eigen::Index>(k));
  return ts;
}

namespace {

void write_doubles(std::ofstream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* p, std::size_t n,
                  const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double))
    throw FormatError("snapshot count mismatch: truncated payload in " + path.string());
}

}  // namespace

void save_dataset(const SnapshotDataset& ds, const std::filesystem::path& path) {
  if (ds.m() == 0) throw ArgumentError("empty dataset");

  nlohmann::json header;
  header["n_cells"] = ds.n_cells();
  header["m"] = ds.m();
  header["dt"] = ds.m() >= 2 ? ds.dt() : 0.0;
  header["t0"] = ds.t0();
  header["layout"] = ds.layout().components();
  if (ds.mesh().is_structured()) {
    const auto& g = ds.mesh().grid();
    header["mesh"] = {{"type", "structured"}, {"nx", g.nx}, {"ny", g.ny},
                      {"nz", g.nz},           {"hx", g.hx}, {"hy", g.hy},
                      {"hz", g.hz},           {"origin", g.origin}};
  } else {
    header["mesh"] = {{"type", "explicit"}};
  }

  auto out = open_output(path);
  out.write(kMagic, kMagicLen);
  const std::string hs = header.dump();
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.put('\n');

  write_doubles(out, ds.times().data(), ds.m());
  if (!ds.mesh().is_structured()) {
    const std::size_t n = ds.n_cells();
    std::vector<double> coord(n);
    for (int axis = 0; axis < 3; ++axis) {
      for (std::size_t i = 0; i < n; ++i) coord[i] = ds.mesh().center(i)[axis];
      write_doubles(out, coord.data(), n);
    }
    write_doubles(out, ds.mesh().volumes().data(), n);
  }
  write_doubles(out, ds.snapshots().data(),
                static_cast<std::size_t>(ds.snapshots().size()));
  if (!out) throw IoError("write failed: " + path.string());
}

SnapshotDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);

  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (static_cast<std::size_t>(in.gcount()) != kMagicLen ||
      std::string_view(magic, kMagicLen) != kMagic)
    throw FormatError("not a romsnap file (bad magic): " + path.string());

  std::string header_line;
  if (!std::getline(in, header_line))
    throw FormatError("missing header line: " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad header JSON in " + path.string() + ": " + e.what());
  }

  std::size_t n_cells = 0, m = 0;
  double dt = 0, t0 = 0;
  FieldLayout layout;
  bool structured = false;
  StructuredGrid grid;
  try {
    n_cells = header.at("n_cells").get<std::size_t>();
    m = header.at("m").get<std::size_t>();
    dt = header.at("dt").get<double>();
    t0 = header.at("t0").get<double>();
    layout = FieldLayout(header.at("layout").get<std::vector<std::string>>());
    const auto& mesh_j = header.at("mesh");
    const std::string type = mesh_j.at("type").get<std::string>();
    if (type == "structured") {
      structured = true;
      grid.nx = mesh_j.at("nx").get<int>();
      grid.ny = mesh_j.at("ny").get<int>();
      grid.nz = mesh_j.at("nz").get<int>();
      grid.hx = mesh_j.at("hx").get<double>();
      grid.hy = mesh_j.at("hy").get<double>();
      grid.hz = mesh_j.at("hz").get<double>();
      grid.origin = mesh_j.at("origin").get<std::array<double, 3>>();
    } else if (type != "explicit") {
      throw FormatError("unknown mesh type '" + type + "' in " + path.string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("incomplete header in " + path.string() + ": " + e.what());
  }
  if (m == 0) throw FormatError("empty dataset: " + path.string());
  if (n_cells == 0) throw FormatError("header declares zero cells: " + path.string());

  std::vector<double> times(m);
  read_doubles(in, times.data(), m, path);

  Mesh mesh = [&] {
    if (structured) {
      Mesh g = Mesh::structured(grid);
      if (g.n_cells() != n_cells)
        throw FormatError("header n_cells disagrees with grid dims: " + path.string());
      return g;
    }
    std::vector<std::array<double, 3>> centers(n_cells);
    std::vector<double> coord(n_cells), volumes(n_cells);
    for (int axis = 0; axis < 3; ++axis) {
      read_doubles(in, coord.data(), n_cells, path);
      for (std::size_t i = 0; i < n_cells; ++i) centers[i][axis] = coord[i];
    }
    read_doubles(in, volumes.data(), n_cells, path);
    return Mesh::from_points(std::move(centers), std::move(volumes));
  }();

  const std::size_t n_dof = layout.n_dof(n_cells);
  Eigen::MatrixXd snapshots(static_cast<Eigen::Index>(n_dof),
                            static_cast<Eigen::Index>(m));
  read_doubles(in, snapshots.data(), n_dof * m, path);
  if (in.peek() != std::ifstream::traits_type::eof())
    throw FormatError("snapshot count mismatch: trailing bytes in " + path.string());

  SnapshotDataset ds = [&] {
    try {
      return SnapshotDataset(std::move(mesh), layout, std::move(times),
                             std::move(snapshots));
    } catch (const ArgumentError& e) {
      throw FormatError(std::string(e.what()) + " in " + path.string());
    }
  }();

  if (m >= 2) {
    const double stored_dt = ds.dt();
    if (std::abs(stored_dt - dt) > kDtRelTol * std::abs(stored_dt))
      throw FormatError("time step mismatch between header and payload: " +
                        path.string());
  }
  return ds;
}

}  // namespace rom

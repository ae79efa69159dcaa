#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hydrorom/common.hpp"

namespace rom {

/// Axis-aligned uniform grid; cell (i,j,k) maps to flat index
/// i + nx*(j + ny*k), i.e. x varies fastest.
struct StructuredGrid {
  int nx = 0, ny = 0, nz = 0;
  double hx = 0, hy = 0, hz = 0;
  std::array<double, 3> origin{0, 0, 0};
};

/// Finite-volume mesh: cell centers plus positive cell volumes.  Structured
/// meshes derive both from the grid descriptor; explicit meshes store them.
class Mesh {
public:
  static Mesh structured(const StructuredGrid& grid);
  static Mesh from_points(std::vector<std::array<double, 3>> centers,
                          std::vector<double> volumes);

  std::size_t n_cells() const { return centers_.size(); }
  const std::array<double, 3>& center(std::size_t i) const { return centers_[i]; }
  double volume(std::size_t i) const { return volumes_[i]; }
  const std::vector<std::array<double, 3>>& centers() const { return centers_; }
  const std::vector<double>& volumes() const { return volumes_; }
  double total_volume() const;

  bool is_structured() const { return grid_.has_value(); }
  const StructuredGrid& grid() const;

  /// Index of the cell center nearest to p (first index on ties).
  std::size_t nearest_cell(const std::array<double, 3>& p) const;

private:
  Mesh() = default;
  std::optional<StructuredGrid> grid_;
  std::vector<std::array<double, 3>> centers_;
  std::vector<double> volumes_;
};

/// Ordered set of state components stacked into one snapshot column.
/// Components come from {u, v, w, p} and keep that canonical order; each
/// occupies a contiguous block of n_cells entries.
class FieldLayout {
public:
  FieldLayout() = default;
  explicit FieldLayout(std::vector<std::string> components);
  static FieldLayout full() { return FieldLayout({"u", "v", "w", "p"}); }

  const std::vector<std::string>& components() const { return comps_; }
  std::size_t n_blocks() const { return comps_.size(); }
  bool has(const std::string& name) const;
  bool has_velocity() const { return has("u") && has("v") && has("w"); }
  /// Block position of a component; throws ArgumentError if absent.
  std::size_t block_of(const std::string& name) const;
  std::size_t offset_of(const std::string& name, std::size_t n_cells) const {
    return block_of(name) * n_cells;
  }
  std::size_t n_dof(std::size_t n_cells) const { return comps_.size() * n_cells; }
  bool operator==(const FieldLayout&) const = default;

private:
  std::vector<std::string> comps_;
};

enum class FieldKind { scalar, vector3 };

/// Named per-cell data, scalar (1 component) or vector (3 components).
struct Field {
  FieldKind kind = FieldKind::scalar;
  std::string name;
  std::vector<Eigen::VectorXd> comps;
};

Field make_scalar_field(std::string name, Eigen::VectorXd values);
Field make_vector_field(std::string name, Eigen::VectorXd x, Eigen::VectorXd y,
                        Eigen::VectorXd z);

/// Splits a stacked state vector into fields per the layout: one vector field
/// "velocity" when u,v,w are all present, scalars otherwise ("pressure" for p).
std::vector<Field> unpack_state(const Eigen::VectorXd& state,
                                const FieldLayout& layout, std::size_t n_cells);

/// Uniformly sampled scalar time history.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// Writes `t,value` rows with 17-significant-digit decimals.
void write_timeseries_csv(const TimeSeries& ts, const std::filesystem::path& path);

/// Immutable bundle of snapshots: one state column per time instant, uniform
/// time step, column count equal to the number of instants.
class SnapshotDataset {
public:
  SnapshotDataset(Mesh mesh, FieldLayout layout, std::vector<double> times,
                  Eigen::MatrixXd snapshots);

  const Mesh& mesh() const { return mesh_; }
  const FieldLayout& layout() const { return layout_; }
  const std::vector<double>& times() const { return times_; }
  const Eigen::MatrixXd& snapshots() const { return snapshots_; }

  std::size_t n_cells() const { return mesh_.n_cells(); }
  std::size_t n_dof() const { return static_cast<std::size_t>(snapshots_.rows()); }
  std::size_t m() const { return times_.size(); }
  double dt() const;
  double t0() const;

  Eigen::VectorXd column(std::size_t k) const;
  std::vector<Field> fields_at(std::size_t k) const;
  /// n_cells x m view of one component's rows.
  Eigen::Block<const Eigen::MatrixXd> component_block(const std::string& name) const;

  /// Returns a copy with `offset` added to the pressure block of every snapshot.
  SnapshotDataset with_pressure_offset(double offset) const;

private:
  Mesh mesh_;
  FieldLayout layout_;
  std::vector<double> times_;
  Eigen::MatrixXd snapshots_;
};

/// Decimates into train (even instants 0,2,...) and test (odd instants
/// except the last when m is even).  The train step is exactly 2*dt.
std::pair<SnapshotDataset, SnapshotDataset> split_train_test(const SnapshotDataset& ds);

/// Sampling location pinned to its nearest cell.
struct Probe {
  std::array<double, 3> location{0, 0, 0};
  std::size_t cell_index = 0;
};

Probe resolve_probe(const Mesh& mesh, const std::array<double, 3>& location);

/// History of one component at a probe's cell.
TimeSeries sample_probe(const SnapshotDataset& ds, const Probe& probe,
                        const std::string& component);

/// Binary snapshot container: magic "ROMSNAP1\n", a single-line JSON header,
/// then little-endian float64 payload (times, explicit-mesh arrays if any,
/// snapshot matrix column-major).
void save_dataset(const SnapshotDataset& ds, const std::filesystem::path& path);
SnapshotDataset load_dataset(const std::filesystem::path& path);

}  // namespace rom

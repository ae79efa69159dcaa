#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "hydrorom/snapshot.hpp"
#include "hydrorom/surface.hpp"

namespace rom {

/// Per-cell velocity gradient tensors; g[i](a,b) = du_a/dx_b.
struct GradientField {
  std::vector<Eigen::Matrix3d> tensors;
};

/// Cells whose streamwise vorticity magnitude exceeds the wake threshold.
struct WakeMask {
  std::vector<std::uint8_t> active;
  std::size_t count = 0;
  double threshold = 0;
};

/// Volume-weighted histogram with uniform bins; densities integrate to 1.
struct WeightedHistogram {
  std::vector<double> bin_centers;
  std::vector<double> density;
  double lo = 0, hi = 0, bin_width = 0;
};

/// Drag/lift coefficient histories (drag along x, lift along z).
struct ForceHistory {
  std::vector<double> times;
  std::vector<double> cd;
  std::vector<double> cl;
};

/// Second-order finite-difference gradient on a structured mesh: central
/// stencils inside, one-sided second-order at boundaries.  Exact for fields
/// linear in the coordinates, and invariant under constant velocity shifts.
GradientField velocity_gradient(const Mesh& mesh, const Field& velocity);

/// curl(u) per cell from the gradient tensors.
Field vorticity(const GradientField& grad);

/// Q = 0.5 (|Omega|_F^2 - |S|_F^2) per cell: positive where rotation beats strain.
Field q_criterion(const GradientField& grad);

/// Marks cells with |omega_x| > threshold, omega_x = dw/dy - dv/dz.
WakeMask wake_mask(const GradientField& grad, double threshold = 1.0);

/// Histogram of the scalar field e over the masked cells, each sample
/// weighted by its normalized cell volume.  A degenerate value range widens
/// to unit width around the single value; the top edge sample lands in the
/// last bin.
WeightedHistogram wake_error_histogram(const Field& e, const WakeMask& mask,
                                       const Mesh& mesh, int n_bins = 64);

/// Exports centers of cells the iso-surface q = level passes through (sign
/// change against a face neighbor) as `x,y,z,q` rows.  When diameter and u0
/// are both supplied the level is taken in nondimensional units q*D^2/u0^2
/// and the exported values are nondimensionalized the same way.  A level
/// outside the field range produces an empty file and a warning on stderr.
/// Returns the number of exported cells.
std::size_t q_isosurface_export(const Field& q, const Mesh& mesh, double level,
                                const std::filesystem::path& path,
                                double diameter = 0, double u0 = 0);

/// Integrates surface pressure into drag/lift coefficients:
/// C = F / (0.5 rho0 u0^2 pi D^2 / 4), F = -sum(p n dA).
ForceHistory force_coefficients(const SphereSurface& surface,
                                const Eigen::MatrixXd& panel_pressures,
                                const std::vector<double>& times, double rho0,
                                double u0);

/// Nearest mesh cell per query point (deterministic first-match ties).
std::vector<std::size_t> nearest_cells(const Mesh& mesh,
                                       const std::vector<std::array<double, 3>>& points);

/// Writes `bin_center,density` rows.
void write_histogram_csv(const WeightedHistogram& hist,
                         const std::filesystem::path& path);

/// Writes `t,cd,cl` rows.
void write_forces_csv(const ForceHistory& forces, const std::filesystem::path& path);

/// Writes `x,y,z,value` rows for a scalar field over mesh cell centers.
void write_point_values_csv(const Mesh& mesh, const Eigen::VectorXd& values,
                            const std::filesystem::path& path);

}  // namespace rom

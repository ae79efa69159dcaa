#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hydrorom/snapshot.hpp"
#include "hydrorom/surface.hpp"

namespace rom {

/// Acoustic medium and mean-flow parameters.  The mean flow is uniform along
/// +x; the compact-source formulation evaluates all integrands at emission
/// time = reception time.
struct AcousticConfig {
  double c0 = 1500.0;    // m/s
  double rho0 = 1000.0;  // kg/m^3
  double u0 = 0.0;       // m/s mean flow along x
  double p_ref = 1e-6;   // Pa, level reference
  double mach() const { return u0 / c0; }
};

struct Microphone {
  std::string label;
  std::array<double, 3> position{0, 0, 0};
};

/// Advective radiation geometry between one source point and one observer.
/// With beta^2 = 1 - M^2 and d = x - y:
///   r_star = sqrt(d1^2 + beta^2 (d2^2 + d3^2))
///   r      = (-M d1 + r_star) / beta^2      (phase radius)
///   rhat_star = (d1, beta^2 d2, beta^2 d3) / r_star
///   rhat      = ((rhat_star_1 - M) / beta^2, d2 / r_star, d3 / r_star)
/// At M = 0 all four reduce to the classical |x - y| quantities.
struct RadiationGeometry {
  double r = 0;
  double r_star = 0;
  Eigen::Vector3d rhat = Eigen::Vector3d::Zero();
  Eigen::Vector3d rhat_star = Eigen::Vector3d::Zero();
};

RadiationGeometry radiation_geometry(const std::array<double, 3>& observer,
                                     const std::array<double, 3>& source,
                                     double mach);

/// Symmetric Lighthill stress per cell, columns [11, 22, 33, 12, 13, 23]:
/// T_ab = rho0 u_a u_b + p_tilde delta_ab (incompressible surrogate form).
using LighthillField = Eigen::Matrix<double, Eigen::Dynamic, 6>;

LighthillField lighthill_tensor(const Field& velocity, const Field& pressure,
                                double rho0);

/// Second-order first/second time derivatives on a uniform grid; one-sided
/// stencils at the ends keep the same order (second derivative ends use the
/// 4-point stencil, exact through cubics).  Order 1 needs >= 3 samples,
/// order 2 needs >= 5.
Eigen::VectorXd time_derivative(const Eigen::VectorXd& f, double dt);
Eigen::VectorXd second_time_derivative(const Eigen::VectorXd& f, double dt);

/// Loading-term signal at one microphone, split into its radial orders:
/// 4 pi p = d/dt[ sum p n.rhat / r_star dA ] / c0  (far, ~1/r)
///        + sum p n.rhat_star / r_star^2 dA        (near, ~1/r^2)
struct DipoleSignal {
  std::vector<double> times;
  Eigen::VectorXd far;
  Eigen::VectorXd near;
  Eigen::VectorXd total() const { return far + near; }
  TimeSeries total_series() const;
};

DipoleSignal dipole_pressure(const SphereSurface& surface,
                             const Eigen::MatrixXd& panel_pressures,
                             const std::vector<double>& times,
                             const std::array<double, 3>& microphone,
                             const AcousticConfig& config);

/// Quadrupole volume signal split by radial order:
/// 4 pi p = d2/dt2[ sum T:K1 V ] / c0^2 + d/dt[ sum T:K2 V ] / c0 + sum T:K3 V
/// with K1 = rhat rhat / r_star,
///      K2 = 2 rhat rhat_star / r_star^2
///         + (rhat_star rhat_star - R_star) / (beta^2 r_star^2),
///      K3 = (3 rhat_star rhat_star - R_star) / r_star^3,
/// and R_star_ab = rhat_star_a rhat_star_b.
struct QuadrupoleSignal {
  std::vector<double> times;
  Eigen::VectorXd far;
  Eigen::VectorXd mid;
  Eigen::VectorXd near;
  Eigen::VectorXd total() const { return far + mid + near; }
  TimeSeries total_series() const;
};

QuadrupoleSignal quadrupole_pressure(const Mesh& mesh,
                                     const std::vector<LighthillField>& history,
                                     const std::vector<double>& times,
                                     const std::array<double, 3>& microphone,
                                     const AcousticConfig& config);

/// Modes-per-frequency compactness measure: (c0 / f_max) / l_source, the
/// shortest radiated wavelength over the source extent.
double mfp(double c0, double f_max, double l_source);

/// Writes `t,p2d_pa,p3d_pa` rows (surface and volume totals side by side).
void write_acoustic_csv(const DipoleSignal& dipole, const QuadrupoleSignal& quadrupole,
                        const std::filesystem::path& path);

}  // namespace rom

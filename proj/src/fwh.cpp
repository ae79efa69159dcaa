#include "hydrorom/fwh.hpp"

#include <cmath>
#include <numbers>

namespace rom {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double uniform_dt(const std::vector<double>& times, std::size_t min_samples) {
  if (times.size() < min_samples)
    throw ArgumentError("acoustic signal needs at least " +
                        std::to_string(min_samples) + " samples");
  const double dt = (times.back() - times.front()) /
                    static_cast<double>(times.size() - 1);
  if (!(dt > 0)) throw ArgumentError("times must be strictly increasing");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    if (std::abs(times[k + 1] - times[k] - dt) > 1e-10 * dt)
      throw ArgumentError("non-uniform time step");
  return dt;
}

// Index pairs of the packed symmetric storage [11, 22, 33, 12, 13, 23].
constexpr int kPair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

// Packs a full kernel matrix for contraction against packed symmetric T:
// T : K = sum_c T6[c] * k6[c], off-diagonal entries absorb both (a,b) and (b,a).
std::array<double, 6> pack_kernel(const Eigen::Matrix3d& k) {
  std::array<double, 6> out;
  for (int c = 0; c < 6; ++c) {
    const int a = kPair[c][0], b = kPair[c][1];
    out[c] = a == b ? k(a, b) : k(a, b) + k(b, a);
  }
  return out;
}

}  // namespace

RadiationGeometry radiation_geometry(const std::array<double, 3>& observer,
                                     const std::array<double, 3>& source,
                                     double mach) {
  if (!(std::abs(mach) < 1.0))
    throw ArgumentError("advective formulation needs |M| < 1");
  const double beta2 = 1.0 - mach * mach;
  const double d1 = observer[0] - source[0];
  const double d2 = observer[1] - source[1];
  const double d3 = observer[2] - source[2];
  const double r_star = std::sqrt(d1 * d1 + beta2 * (d2 * d2 + d3 * d3));
  if (!(r_star > 0))
    throw ArgumentError("observer coincides with the source point");

  RadiationGeometry g;
  g.r_star = r_star;
  g.r = (-mach * d1 + r_star) / beta2;
  g.rhat_star = Eigen::Vector3d(d1, beta2 * d2, beta2 * d3) / r_star;
  g.rhat = Eigen::Vector3d((g.rhat_star(0) - mach) / beta2, d2 / r_star, d3 / r_star);
  return g;
}

LighthillField lighthill_tensor(const Field& velocity, const Field& pressure,
                                double rho0) {
  if (velocity.kind != FieldKind::vector3)
    throw ArgumentError("Lighthill tensor needs a vector velocity field");
  if (pressure.kind != FieldKind::scalar)
    throw ArgumentError("Lighthill tensor needs a scalar pressure field");
  if (!(rho0 > 0)) throw ArgumentError("rho0 must be positive");
  const Eigen::Index n = velocity.comps[0].size();
  if (pressure.comps[0].size() != n)
    throw ArgumentError("velocity/pressure cell counts differ");

  LighthillField t(n, 6);
  for (int c = 0; c < 6; ++c) {
    const int a = kPair[c][0], b = kPair[c][1];
    t.col(c) = rho0 * velocity.comps[a].cwiseProduct(velocity.comps[b]);
    if (a == b) t.col(c) += pressure.comps[0];
  }
  return t;
}

Eigen::VectorXd time_derivative(const Eigen::VectorXd& f, double dt) {
  const Eigen::Index n = f.size();
  if (n < 3) throw ArgumentError("first derivative needs at least 3 samples");
  if (!(dt > 0)) throw ArgumentError("dt must be positive");
  Eigen::VectorXd out(n);
  out(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * dt);
  for (Eigen::Index i = 1; i < n - 1; ++i) out(i) = (f(i + 1) - f(i - 1)) / (2.0 * dt);
  out(n - 1) = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * dt);
  return out;
}

Eigen::VectorXd second_time_derivative(const Eigen::VectorXd& f, double dt) {
  const Eigen::Index n = f.size();
  if (n < 5) throw ArgumentError("second derivative needs at least 5 samples");
  if (!(dt > 0)) throw ArgumentError("dt must be positive");
  const double dt2 = dt * dt;
  Eigen::VectorXd out(n);
  out(0) = (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / dt2;
  for (Eigen::Index i = 1; i < n - 1; ++i)
    out(i) = (f(i + 1) - 2.0 * f(i) + f(i - 1)) / dt2;
  out(n - 1) = (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / dt2;
  return out;
}

TimeSeries DipoleSignal::total_series() const {
  TimeSeries ts;
  ts.times = times;
  const Eigen::VectorXd tot = total();
  ts.values.assign(tot.data(), tot.data() + tot.size());
  return ts;
}

TimeSeries QuadrupoleSignal::total_series() const {
  TimeSeries ts;
  ts.times = times;
  const Eigen::VectorXd tot = total();
  ts.values.assign(tot.data(), tot.data() + tot.size());
  return ts;
}

DipoleSignal dipole_pressure(const SphereSurface& surface,
                             const Eigen::MatrixXd& panel_pressures,
                             const std::vector<double>& times,
                             const std::array<double, 3>& microphone,
                             const AcousticConfig& config) {
  const double dt = uniform_dt(times, 3);
  const std::size_t n = surface.n_panels();
  if (panel_pressures.rows() != static_cast<Eigen::Index>(n))
    throw ArgumentError("pressure rows do not match panel count");
  if (panel_pressures.cols() != static_cast<Eigen::Index>(times.size()))
    throw ArgumentError("pressure columns do not match time count");

  const double dx = microphone[0] - surface.center[0];
  const double dy = microphone[1] - surface.center[1];
  const double dz = microphone[2] - surface.center[2];
  if (std::sqrt(dx * dx + dy * dy + dz * dz) < 0.5 * surface.diameter)
    throw ArgumentError("microphone lies inside the integration surface");

  const double mach = config.mach();
  std::vector<double> k_far(n), k_near(n);
  parallel_for(n, [&](std::size_t j) {
    const RadiationGeometry g =
        radiation_geometry(microphone, surface.centers[j], mach);
    const Eigen::Vector3d normal(surface.normals[j][0], surface.normals[j][1],
                                 surface.normals[j][2]);
    k_far[j] = normal.dot(g.rhat) / g.r_star * surface.areas[j];
    k_near[j] = normal.dot(g.rhat_star) / (g.r_star * g.r_star) * surface.areas[j];
  });

  const auto m = static_cast<Eigen::Index>(times.size());
  Eigen::VectorXd far_integral(m);
  DipoleSignal sig;
  sig.times = times;
  sig.near.resize(m);
  std::vector<double> contrib(n);
  for (Eigen::Index t = 0; t < m; ++t) {
    for (std::size_t j = 0; j < n; ++j)
      contrib[j] = panel_pressures(static_cast<Eigen::Index>(j), t) * k_far[j];
    far_integral(t) = pairwise_sum(std::span<const double>(contrib));
    for (std::size_t j = 0; j < n; ++j)
      contrib[j] = panel_pressures(static_cast<Eigen::Index>(j), t) * k_near[j];
    sig.near(t) = pairwise_sum(std::span<const double>(contrib)) / kFourPi;
  }
  sig.far = time_derivative(far_integral, dt) / (config.c0 * kFourPi);
  return sig;
}

QuadrupoleSignal quadrupole_pressure(const Mesh& mesh,
                                     const std::vector<LighthillField>& history,
                                     const std::vector<double>& times,
                                     const std::array<double, 3>& microphone,
                                     const AcousticConfig& config) {
  const double dt = uniform_dt(times, 5);
  if (history.size() != times.size())
    throw ArgumentError("history length does not match time count");
  const std::size_t n = mesh.n_cells();
  for (const auto& step : history)
    if (step.rows() != static_cast<Eigen::Index>(n))
      throw ArgumentError("Lighthill rows do not match cell count");

  const double mach = config.mach();
  const double beta2 = 1.0 - mach * mach;
  std::vector<std::array<double, 6>> k1(n), k2(n), k3(n);
  parallel_for(n, [&](std::size_t c) {
    const RadiationGeometry g = radiation_geometry(microphone, mesh.center(c), mach);
    const double vol = mesh.volume(c);
    const double rs = g.r_star;
    const Eigen::Matrix3d rstar_outer = g.rhat_star * g.rhat_star.transpose();
    // The advective geometry gives R_star == rhat_star rhat_star^T, so the
    // bracketed difference in K2 vanishes identically; it is kept in kernel
    // form so the three integrands stay term-for-term recognizable.
    const Eigen::Matrix3d m1 = g.rhat * g.rhat.transpose() / rs;
    const Eigen::Matrix3d m2 =
        2.0 * g.rhat * g.rhat_star.transpose() / (rs * rs) +
        (rstar_outer - rstar_outer) / (beta2 * rs * rs);
    const Eigen::Matrix3d m3 = (3.0 * rstar_outer - rstar_outer) / (rs * rs * rs);
    k1[c] = pack_kernel(m1 * vol);
    k2[c] = pack_kernel(m2 * vol);
    k3[c] = pack_kernel(m3 * vol);
  });

  const auto m = static_cast<Eigen::Index>(times.size());
  Eigen::VectorXd q1(m), q2(m), q3(m);
  std::vector<double> contrib(n);
  auto contract = [&](const LighthillField& t6,
                      const std::vector<std::array<double, 6>>& kern) {
    for (std::size_t c = 0; c < n; ++c) {
      double s = 0;
      for (int p = 0; p < 6; ++p)
        s += t6(static_cast<Eigen::Index>(c), p) * kern[c][p];
      contrib[c] = s;
    }
    return pairwise_sum(std::span<const double>(contrib));
  };
  for (Eigen::Index t = 0; t < m; ++t) {
    q1(t) = contract(history[static_cast<std::size_t>(t)], k1);
    q2(t) = contract(history[static_cast<std::size_t>(t)], k2);
    q3(t) = contract(history[static_cast<std::size_t>(t)], k3);
  }

  QuadrupoleSignal sig;
  sig.times = times;
  sig.far = second_time_derivative(q1, dt) / (config.c0 * config.c0 * kFourPi);
  sig.mid = time_derivative(q2, dt) / (config.c0 * kFourPi);
  sig.near = q3 / kFourPi;
  return sig;
}

double mfp(double c0, double f_max, double l_source) {
  if (!(c0 > 0) || !(f_max > 0) || !(l_source > 0))
    throw ArgumentError("compactness measure needs positive c0, f_max, l_source");
  return (c0 / f_max) / l_source;
}

void write_acoustic_csv(const DipoleSignal& dipole, const QuadrupoleSignal& quadrupole,
                        const std::filesystem::path& path) {
  if (dipole.times != quadrupole.times)
    throw ArgumentError("dipole/quadrupole time grids differ");
  const Eigen::VectorXd p2 = dipole.total();
  const Eigen::VectorXd p3 = quadrupole.total();
  auto out = open_output(path);
  out << "t,p2d_pa,p3d_pa\n";
  for (std::size_t i = 0; i < dipole.times.size(); ++i)
    out << g17(dipole.times[i]) << ',' << g17(p2(static_cast<Eigen::Index>(i)))
        << ',' << g17(p3(static_cast<Eigen::Index>(i))) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rom

#include "hydrorom/flow_analysis.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace rom {

namespace {

struct Axis {
  Eigen::Index stride;
  Eigen::Index count;
  double h;
};

// d/dx along one grid axis at flat index idx with in-axis position pos.
double axis_derivative(const Eigen::VectorXd& f, Eigen::Index idx, Eigen::Index pos,
                       const Axis& ax) {
  if (ax.count < 2) return 0.0;
  const Eigen::Index s = ax.stride;
  if (pos > 0 && pos < ax.count - 1) return (f(idx + s) - f(idx - s)) / (2.0 * ax.h);
  if (ax.count == 2)
    return pos == 0 ? (f(idx + s) - f(idx)) / ax.h : (f(idx) - f(idx - s)) / ax.h;
  if (pos == 0)
    return (-3.0 * f(idx) + 4.0 * f(idx + s) - f(idx + 2 * s)) / (2.0 * ax.h);
  return (3.0 * f(idx) - 4.0 * f(idx - s) + f(idx - 2 * s)) / (2.0 * ax.h);
}

}  // namespace

GradientField velocity_gradient(const Mesh& mesh, const Field& velocity) {
  if (!mesh.is_structured())
    throw ArgumentError("gradients need a structured mesh");
  if (velocity.kind != FieldKind::vector3)
    throw ArgumentError("velocity gradient needs a vector field");
  const auto& g = mesh.grid();
  const auto n = static_cast<Eigen::Index>(mesh.n_cells());
  for (const auto& c : velocity.comps)
    if (c.size() != n) throw ArgumentError("field size does not match mesh");

  const Axis axes[3] = {{1, g.nx, g.hx},
                        {g.nx, g.ny, g.hy},
                        {static_cast<Eigen::Index>(g.nx) * g.ny, g.nz, g.hz}};

  GradientField out;
  out.tensors.resize(mesh.n_cells());
  parallel_for(mesh.n_cells(), [&](std::size_t cell) {
    const auto idx = static_cast<Eigen::Index>(cell);
    const Eigen::Index i = idx % g.nx;
    const Eigen::Index j = (idx / g.nx) % g.ny;
    const Eigen::Index k = idx / (static_cast<Eigen::Index>(g.nx) * g.ny);
    const Eigen::Index pos[3] = {i, j, k};
    Eigen::Matrix3d t;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        t(a, b) = axis_derivative(velocity.comps[a], idx, pos[b], axes[b]);
    out.tensors[cell] = t;
  });
  return out;
}

Field vorticity(const GradientField& grad) {
  const auto n = static_cast<Eigen::Index>(grad.tensors.size());
  Eigen::VectorXd wx(n), wy(n), wz(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Matrix3d& t = grad.tensors[i];
    wx(i) = t(2, 1) - t(1, 2);
    wy(i) = t(0, 2) - t(2, 0);
    wz(i) = t(1, 0) - t(0, 1);
  }
  return make_vector_field("vorticity", std::move(wx), std::move(wy), std::move(wz));
}

Field q_criterion(const GradientField& grad) {
  const auto n = static_cast<Eigen::Index>(grad.tensors.size());
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Matrix3d& t = grad.tensors[i];
    const Eigen::Matrix3d s = 0.5 * (t + t.transpose());
    const Eigen::Matrix3d o = 0.5 * (t - t.transpose());
    q(i) = 0.5 * (o.squaredNorm() - s.squaredNorm());
  }
  return make_scalar_field("q_criterion", std::move(q));
}

std::size_t q_isosurface_export(const Field& q, const Mesh& mesh, double level,
                                const std::filesystem::path& path, double diameter,
                                double u0) {
  if (!mesh.is_structured())
    throw ArgumentError("iso-surface export needs a structured mesh");
  if (q.kind != FieldKind::scalar)
    throw ArgumentError("iso-surface export needs a scalar field");
  const Eigen::VectorXd& vals = q.comps[0];
  if (vals.size() != static_cast<Eigen::Index>(mesh.n_cells()))
    throw ArgumentError("field size does not match mesh");

  const bool nondim = diameter > 0 && u0 != 0.0;
  const double scale = nondim ? diameter * diameter / (u0 * u0) : 1.0;
  // The level is given in the same units as the exported values.
  const double level_dim = level / scale;

  auto out = open_output(path);
  out << "x,y,z,q\n";
  if (mesh.n_cells() == 0) return 0;

  const double qmin = vals.minCoeff();
  const double qmax = vals.maxCoeff();
  if (level_dim < qmin || level_dim > qmax) {
    std::fprintf(stderr,
                 "warning: iso level %s is outside the field range [%s, %s]; "
                 "empty export\n",
                 g17(level).c_str(), g17(qmin * scale).c_str(),
                 g17(qmax * scale).c_str());
    if (!out) throw IoError("write failed: " + path.string());
    return 0;
  }

  const auto& g = mesh.grid();
  const Eigen::Index strides[3] = {1, g.nx, static_cast<Eigen::Index>(g.nx) * g.ny};
  const Eigen::Index counts[3] = {g.nx, g.ny, g.nz};
  std::size_t exported = 0;
  for (std::size_t cell = 0; cell < mesh.n_cells(); ++cell) {
    const auto idx = static_cast<Eigen::Index>(cell);
    const Eigen::Index pos[3] = {idx % g.nx, (idx / g.nx) % g.ny,
                                 idx / (static_cast<Eigen::Index>(g.nx) * g.ny)};
    const double di = vals(idx) - level_dim;
    bool straddles = di == 0.0;
    for (int ax = 0; ax < 3 && !straddles; ++ax)
      for (int dir = -1; dir <= 1 && !straddles; dir += 2) {
        const Eigen::Index npos = pos[ax] + dir;
        if (npos < 0 || npos >= counts[ax]) continue;
        const double dn = vals(idx + dir * strides[ax]) - level_dim;
        straddles = di * dn < 0.0;
      }
    if (!straddles) continue;
    const auto& c = mesh.center(cell);
    out << g17(c[0]) << ',' << g17(c[1]) << ',' << g17(c[2]) << ','
        << g17(vals(idx) * scale) << '\n';
    ++exported;
  }
  if (exported == 0)
    std::fprintf(stderr, "warning: no cells straddle iso level %s; empty export\n",
                 g17(level).c_str());
  if (!out) throw IoError("write failed: " + path.string());
  return exported;
}

WakeMask wake_mask(const GradientField& grad, double threshold) {
  WakeMask mask;
  mask.threshold = threshold;
  mask.active.resize(grad.tensors.size());
  for (std::size_t i = 0; i < grad.tensors.size(); ++i) {
    const Eigen::Matrix3d& t = grad.tensors[i];
    const bool in = std::abs(t(2, 1) - t(1, 2)) > threshold;
    mask.active[i] = in ? 1 : 0;
    if (in) ++mask.count;
  }
  return mask;
}

WeightedHistogram wake_error_histogram(const Field& e, const WakeMask& mask,
                                       const Mesh& mesh, int n_bins) {
  if (n_bins < 1) throw ArgumentError("histogram needs at least 1 bin");
  if (e.kind != FieldKind::scalar)
    throw ArgumentError("histogram needs a scalar field");
  const Eigen::VectorXd& cell_values = e.comps[0];
  if (mask.active.size() != mesh.n_cells() ||
      cell_values.size() != static_cast<Eigen::Index>(mesh.n_cells()))
    throw ArgumentError("mask/values size does not match mesh");
  if (mask.count == 0) throw NumericalError("wake mask selects no cells");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double total_volume = 0;
  for (std::size_t i = 0; i < mesh.n_cells(); ++i) {
    if (!mask.active[i]) continue;
    const double v = cell_values(static_cast<Eigen::Index>(i));
    if (!std::isfinite(v)) throw ArgumentError("histogram values contain NaN/Inf");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    total_volume += mesh.volume(i);
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }

  WeightedHistogram hist;
  hist.lo = lo;
  hist.hi = hi;
  hist.bin_width = (hi - lo) / n_bins;
  hist.bin_centers.resize(static_cast<std::size_t>(n_bins));
  hist.density.assign(static_cast<std::size_t>(n_bins), 0.0);
  for (int b = 0; b < n_bins; ++b)
    hist.bin_centers[b] = lo + (b + 0.5) * hist.bin_width;

  for (std::size_t i = 0; i < mesh.n_cells(); ++i) {
    if (!mask.active[i]) continue;
    const double v = cell_values(static_cast<Eigen::Index>(i));
    auto b = static_cast<std::ptrdiff_t>((v - lo) / hist.bin_width);
    b = std::clamp<std::ptrdiff_t>(b, 0, n_bins - 1);
    hist.density[static_cast<std::size_t>(b)] += mesh.volume(i) / total_volume;
  }
  for (double& d : hist.density) d /= hist.bin_width;
  return hist;
}

ForceHistory force_coefficients(const SphereSurface& surface,
                                const Eigen::MatrixXd& panel_pressures,
                                const std::vector<double>& times, double rho0,
                                double u0) {
  const auto n = static_cast<Eigen::Index>(surface.n_panels());
  if (panel_pressures.rows() != n)
    throw ArgumentError("pressure rows do not match panel count");
  if (panel_pressures.cols() != static_cast<Eigen::Index>(times.size()))
    throw ArgumentError("pressure columns do not match time count");
  if (!(rho0 > 0)) throw ArgumentError("rho0 must be positive");
  if (u0 == 0.0 || !std::isfinite(u0))
    throw ArgumentError("force normalization needs a nonzero free-stream speed");

  const double d = surface.diameter;
  const double q_inf = 0.5 * rho0 * u0 * u0;
  const double a_ref = std::numbers::pi * d * d / 4.0;

  ForceHistory forces;
  forces.times = times;
  forces.cd.resize(times.size());
  forces.cl.resize(times.size());
  std::vector<double> fx(surface.n_panels()), fz(surface.n_panels());
  for (std::size_t t = 0; t < times.size(); ++t) {
    for (std::size_t j = 0; j < surface.n_panels(); ++j) {
      const double p = panel_pressures(static_cast<Eigen::Index>(j),
                                       static_cast<Eigen::Index>(t));
      fx[j] = -p * surface.normals[j][0] * surface.areas[j];
      fz[j] = -p * surface.normals[j][2] * surface.areas[j];
    }
    forces.cd[t] = pairwise_sum(std::span<const double>(fx)) / (q_inf * a_ref);
    forces.cl[t] = pairwise_sum(std::span<const double>(fz)) / (q_inf * a_ref);
  }
  return forces;
}

std::vector<std::size_t> nearest_cells(
    const Mesh& mesh, const std::vector<std::array<double, 3>>& points) {
  std::vector<std::size_t> idx(points.size());
  parallel_for(points.size(),
               [&](std::size_t i) { idx[i] = mesh.nearest_cell(points[i]); });
  return idx;
}

void write_histogram_csv(const WeightedHistogram& hist,
                         const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "bin_center,density\n";
  for (std::size_t i = 0; i < hist.bin_centers.size(); ++i)
    out << g17(hist.bin_centers[i]) << ',' << g17(hist.density[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_forces_csv(const ForceHistory& forces, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "t,cd,cl\n";
  for (std::size_t i = 0; i < forces.times.size(); ++i)
    out << g17(forces.times[i]) << ',' << g17(forces.cd[i]) << ','
        << g17(forces.cl[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_point_values_csv(const Mesh& mesh, const Eigen::VectorXd& values,
                            const std::filesystem::path& path) {
  if (values.size() != static_cast<Eigen::Index>(mesh.n_cells()))
    throw ArgumentError("values size does not match mesh");
  auto out = open_output(path);
  out << "x,y,z,value\n";
  for (std::size_t i = 0; i < mesh.n_cells(); ++i) {
    const auto& c = mesh.center(i);
    out << g17(c[0]) << ',' << g17(c[1]) << ',' << g17(c[2]) << ','
        << g17(values(static_cast<Eigen::Index>(i))) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rom

#include "hydrorom/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hydrorom/config.hpp"

namespace rom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Smooth bump with exact compact support: 1 at the wake core, identically
// zero outside the unit ellipsoid, so probes placed outside see no signal.
double wake_envelope(double rho2) {
  if (rho2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho2));
}

struct WakeFrame {
  double cx, ax, ar;  // envelope center (x), axial and radial half-widths
};

WakeFrame wake_frame(const SynthConfig& cfg) {
  const double d = cfg.diameter;
  return {2.0 * d, 2.0 * d, 1.5 * d};
}

void validate(const SynthConfig& cfg) {
  if (cfg.nx < 1 || cfg.ny < 1 || cfg.nz < 1)
    throw ArgumentError("synthetic grid needs nx,ny,nz >= 1");
  if (!(cfg.diameter > 0)) throw ArgumentError("diameter must be positive");
  if (!(cfg.rho0 > 0)) throw ArgumentError("rho0 must be positive");
  if (!(cfg.sample_rate > 0)) throw ArgumentError("sample rate must be positive");
  if (cfg.m < 1) throw ArgumentError("snapshot count must be >= 1");
  if (!(cfg.noise >= 0)) throw ArgumentError("noise stddev must be >= 0");
  if (!std::isfinite(cfg.u0)) throw ArgumentError("u0 not finite");
  if (cfg.components.empty())
    throw ArgumentError("at least one wake component required");
  for (const auto& c : cfg.components) {
    if (!(c.frequency > 0) || !std::isfinite(c.frequency))
      throw ArgumentError("component frequency must be positive");
    if (!(c.amplitude >= 0) || !std::isfinite(c.amplitude))
      throw ArgumentError("component amplitude must be >= 0");
    if (!std::isfinite(c.phase)) throw ArgumentError("component phase not finite");
    if (!(c.frequency < 0.5 * cfg.sample_rate))
      throw ArgumentError("component at " + g17(c.frequency) +
                          " Hz violates the Nyquist limit of the " +
                          g17(cfg.sample_rate) + " Hz sample rate");
  }
}

}  // namespace

Mesh synth_mesh(const SynthConfig& cfg) {
  const double d = cfg.diameter;
  StructuredGrid g;
  g.nx = cfg.nx;
  g.ny = cfg.ny;
  g.nz = cfg.nz;
  g.origin = {-2.0 * d, -2.5 * d, -2.5 * d};
  g.hx = 8.0 * d / cfg.nx;
  g.hy = 5.0 * d / cfg.ny;
  g.hz = 5.0 * d / cfg.nz;
  return Mesh::structured(g);
}

Eigen::VectorXd synthetic_state(const SynthConfig& cfg, double t) {
  validate(cfg);
  const Mesh mesh = synth_mesh(cfg);
  const WakeFrame wf = wake_frame(cfg);
  const std::size_t n = mesh.n_cells();
  const double tau = t - cfg.t0;

  Eigen::VectorXd state = Eigen::VectorXd::Zero(4 * static_cast<Eigen::Index>(n));
  auto u = state.segment(0, n);
  auto v = state.segment(n, n);
  auto w = state.segment(2 * n, n);
  auto p = state.segment(3 * n, n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = mesh.center(i);
    const double xi = c[0] - wf.cx;
    const double rho2 = (xi / wf.ax) * (xi / wf.ax) +
                        (c[1] * c[1] + c[2] * c[2]) / (wf.ar * wf.ar);
    const double env = wake_envelope(rho2);
    u(i) = cfg.u0;
    if (env == 0.0) continue;

    for (const auto& comp : cfg.components) {
      const double omega = kTwoPi * comp.frequency;
      double osc;
      if (comp.standing) {
        osc = std::sin(omega * tau + comp.phase);
      } else {
        const double kappa = cfg.u0 != 0.0 ? omega / cfg.u0 : 0.0;
        osc = std::cos(kappa * xi - omega * tau + comp.phase);
      }
      const double g = comp.amplitude * env * osc;
      const double swirl_v = -(c[2] / wf.ar) * g;
      const double swirl_w = (c[1] / wf.ar) * g;
      double du = 0.0;  // streamwise perturbation drives the pressure companion
      switch (comp.pattern) {
        case WakePattern::streamwise:
          u(i) += g;
          du = g;
          break;
        case WakePattern::swirl:
          v(i) += swirl_v;
          w(i) += swirl_w;
          break;
        case WakePattern::mixed:
          u(i) += g;
          v(i) += 0.5 * swirl_v;
          w(i) += 0.5 * swirl_w;
          du = g;
          break;
      }
      p(i) -= cfg.rho0 * cfg.u0 * du;
    }
  }
  return state;
}

SnapshotDataset generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  const Mesh mesh = synth_mesh(cfg);
  const double dt = 1.0 / cfg.sample_rate;

  std::vector<double> times(static_cast<std::size_t>(cfg.m));
  for (int k = 0; k < cfg.m; ++k) times[k] = cfg.t0 + k * dt;

  Eigen::MatrixXd snapshots(static_cast<Eigen::Index>(4 * mesh.n_cells()), cfg.m);
  parallel_for(static_cast<std::size_t>(cfg.m), [&](std::size_t k) {
    snapshots.col(static_cast<Eigen::Index>(k)) = synthetic_state(cfg, times[k]);
  });

  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, cfg.noise);
    for (Eigen::Index k = 0; k < snapshots.cols(); ++k)
      for (Eigen::Index i = 0; i < snapshots.rows(); ++i) snapshots(i, k) += gauss(rng);
  }

  return SnapshotDataset(mesh, FieldLayout::full(), std::move(times),
                         std::move(snapshots));
}

bool in_source_region(const SynthConfig& cfg, const std::array<double, 3>& point) {
  const WakeFrame wf = wake_frame(cfg);
  const double xi = point[0] - wf.cx;
  const double rho2 = (xi / wf.ax) * (xi / wf.ax) +
                      (point[1] * point[1] + point[2] * point[2]) / (wf.ar * wf.ar);
  return rho2 < 1.0;
}

SphereSurface generate_sphere_surface(std::size_t n_panels, double diameter,
                                      const std::array<double, 3>& center,
                                      std::uint64_t seed) {
  if (n_panels < 8) throw ArgumentError("sphere surface needs at least 8 panels");
  if (!(diameter > 0)) throw ArgumentError("diameter must be positive");

  SphereSurface s;
  s.center = center;
  s.diameter = diameter;
  s.centers.resize(n_panels);
  s.normals.resize(n_panels);
  const double radius = 0.5 * diameter;
  const double area = std::numbers::pi * diameter * diameter /
                      static_cast<double>(n_panels);
  s.areas.assign(n_panels, area);

  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double offset = kTwoPi * static_cast<double>(seed % 997) / 997.0;
  for (std::size_t i = 0; i < n_panels; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n_panels);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double az = golden_angle * static_cast<double>(i) + offset;
    const std::array<double, 3> n{r * std::cos(az), r * std::sin(az), z};
    s.normals[i] = n;
    s.centers[i] = {center[0] + radius * n[0], center[1] + radius * n[1],
                    center[2] + radius * n[2]};
  }
  return s;
}

SynthConfig parse_synth_config(const KeyValues& kv) {
  SynthConfig cfg;
  cfg.nx = kv_int(kv, "synth.nx", cfg.nx);
  cfg.ny = kv_int(kv, "synth.ny", cfg.ny);
  cfg.nz = kv_int(kv, "synth.nz", cfg.nz);
  cfg.diameter = kv_double(kv, "synth.diameter", cfg.diameter);
  cfg.u0 = kv_double(kv, "synth.u0", cfg.u0);
  cfg.rho0 = kv_double(kv, "synth.rho0", cfg.rho0);
  cfg.sample_rate = kv_double(kv, "synth.sample_rate", cfg.sample_rate);
  cfg.m = kv_int(kv, "synth.m", cfg.m);
  cfg.t0 = kv_double(kv, "synth.t0", cfg.t0);
  cfg.noise = kv_double(kv, "synth.noise", cfg.noise);
  cfg.seed = kv_u64(kv, "synth.seed", cfg.seed);

  auto it = kv.find("synth.component");
  if (it != kv.end()) {
    cfg.components.clear();
    for (const std::string& spec : it->second) {
      const auto parts = split_csv(spec);
      if (parts.size() < 2)
        throw ArgumentError(
            "synth.component needs 'frequency,amplitude[,phase,pattern,standing]', got '" +
            spec + "'");
      SynthComponent c;
      c.frequency = to_double(parts[0], "synth.component frequency");
      c.amplitude = to_double(parts[1], "synth.component amplitude");
      if (parts.size() > 2 && !parts[2].empty())
        c.phase = to_double(parts[2], "synth.component phase");
      if (parts.size() > 3 && !parts[3].empty()) {
        if (parts[3] == "streamwise") c.pattern = WakePattern::streamwise;
        else if (parts[3] == "swirl") c.pattern = WakePattern::swirl;
        else if (parts[3] == "mixed") c.pattern = WakePattern::mixed;
        else throw ArgumentError("unknown wake pattern '" + parts[3] + "'");
      }
      if (parts.size() > 4 && !parts[4].empty())
        c.standing = to_int(parts[4], "synth.component standing") != 0;
      cfg.components.push_back(c);
    }
  }
  return cfg;
}

}  // namespace rom

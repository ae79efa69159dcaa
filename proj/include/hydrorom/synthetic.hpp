#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hydrorom/snapshot.hpp"
#include "hydrorom/surface.hpp"

namespace rom {

/// Spatial shape of one oscillatory wake component.
enum class WakePattern {
  streamwise,  // axial velocity pulse
  swirl,       // rotation about the x axis (nonzero streamwise vorticity)
  mixed        // both, swirl at half weight
};

/// One coherent oscillation: a compactly supported wake envelope carrying
/// either a wave travelling downstream at the free-stream speed or a standing
/// (space-time separable) oscillation.
struct SynthComponent {
  double frequency = 20.0;  // Hz
  double amplitude = 0.05;  // m/s
  double phase = 0.0;       // rad
  WakePattern pattern = WakePattern::mixed;
  bool standing = false;
};

/// Configuration for the manufactured shedding-wake dataset.  Defaults mirror
/// the reference cylinder case: D = 1 cm, U0 = 1 m/s, 500 Hz sampling,
/// 200 snapshots, dominant component at 20 Hz (Strouhal 0.2).
struct SynthConfig {
  int nx = 32, ny = 20, nz = 20;
  double diameter = 0.01;        // m
  double u0 = 1.0;               // m/s free-stream (x direction)
  double rho0 = 1000.0;          // kg/m^3, sets the pressure-companion scale
  double sample_rate = 500.0;    // Hz
  int m = 200;
  double t0 = 0.0;
  // Additive Gaussian noise stddev.  The default keeps the snapshot matrix
  // numerically full-rank (as measured data would be) while staying ~60 dB
  // under the dominant component; set 0 for exactly low-rank data.
  double noise = 1e-4;
  std::uint64_t seed = 0;
  std::vector<SynthComponent> components = {
      {20.0, 0.08, 0.0, WakePattern::mixed, false},
      {40.0, 0.03, 0.7, WakePattern::swirl, false},
      {60.0, 0.015, 1.9, WakePattern::streamwise, false},
  };
};

/// Mesh implied by the config: [-2D, 6D] x [-2.5D, 2.5D]^2 around the wake.
Mesh synth_mesh(const SynthConfig& cfg);

/// Exact (noise-free) state column at an arbitrary time.
Eigen::VectorXd synthetic_state(const SynthConfig& cfg, double t);

/// Samples the closed-form field at m uniform instants and adds seeded noise.
/// Identical config and seed give a bitwise-identical dataset.  Component
/// frequencies must stay below half the sample rate.
SnapshotDataset generate_synthetic(const SynthConfig& cfg);

/// True when the point lies inside the wake source support (the compact
/// envelope's ellipsoid); microphones must stay outside it.
bool in_source_region(const SynthConfig& cfg, const std::array<double, 3>& point);

/// Fibonacci-lattice panelization of a sphere; panel areas are equal and sum
/// to pi D^2 exactly.  The seed rotates the lattice about the z axis.
SphereSurface generate_sphere_surface(std::size_t n_panels, double diameter,
                                      const std::array<double, 3>& center,
                                      std::uint64_t seed = 0);

/// Parses a `key = value` config file into SynthConfig (see README for keys).
SynthConfig parse_synth_config(const std::map<std::string, std::vector<std::string>>& kv);

}  // namespace rom

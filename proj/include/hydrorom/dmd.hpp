#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <vector>

#include "hydrorom/snapshot.hpp"

namespace rom {

/// Rank-r dynamic mode decomposition of a uniformly sampled snapshot set.
/// State reconstruction: x(t) = Re( modes * diag(exp(omega (t - t0))) * amplitudes ),
/// omega = log(eigenvalue) / dt on the principal branch.
struct DMDModel {
  Eigen::MatrixXcd modes;        // n x r
  Eigen::VectorXcd eigenvalues;  // discrete-time, one per mode
  Eigen::VectorXcd amplitudes;   // least-squares fit of the first snapshot
  double dt = 0;                 // training sample interval
  double t0 = 0;
  double t_end = 0;              // last training instant
  int rank = 0;
  bool conjugate_complete = false;
  FieldLayout layout;            // carried for mode unpacking
  std::size_t n_cells = 0;

  std::size_t n_dof() const { return static_cast<std::size_t>(modes.rows()); }
};

/// Continuous-time exponent of one mode.
struct DMDSpectrumEntry {
  double growth_rate = 0;  // 1/s
  double frequency = 0;    // Hz
};

struct DMDEvaluation {
  Eigen::VectorXd state;
  double imag_residual_rel = 0;  // |Im| relative to |full reconstruction|
  bool extrapolated = false;     // t beyond the training window
};

/// Fits the rank-r low-order propagator from consecutive snapshot pairs.
/// Requires m >= 3 and 1 <= r <= m-1; a singular value below 1e-12 of the
/// largest means the data cannot support rank r and raises NumericalError.
DMDModel fit_dmd(const SnapshotDataset& train, int r);

/// Reconstruction at any t >= t0.  Times beyond the training window are
/// flagged, not rejected.
DMDEvaluation evaluate_dmd_detailed(const DMDModel& model, double t);

/// Convenience wrapper: returns the state; raises NumericalError when a
/// conjugate-complete model leaves more than 1e-6 relative imaginary residue.
Eigen::VectorXd evaluate_dmd(const DMDModel& model, double t);

/// Growth rate / frequency per mode; zero eigenvalues have no continuous log.
std::vector<DMDSpectrumEntry> continuous_spectrum(const DMDModel& model);

/// Real and imaginary parts of mode k, unpacked per the training layout.
struct DMDModeField {
  std::vector<Field> real_part;
  std::vector<Field> imag_part;
};
DMDModeField dmd_mode_field(const DMDModel& model, int k);

/// Binary model container: magic "DMDMODL1\n", single-line JSON header, then
/// little-endian float64 payload with re/im interleaved per complex entry.
void save_dmd_model(const DMDModel& model, const std::filesystem::path& path);
DMDModel load_dmd_model(const std::filesystem::path& path);

}  // namespace rom

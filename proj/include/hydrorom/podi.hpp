#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "hydrorom/decomposition.hpp"
#include "hydrorom/snapshot.hpp"

namespace rom {

/// Natural cubic spline: zero second derivative at both ends, C2 inside.
/// Interpolates the knots exactly and reproduces linear data exactly.
class CubicSpline {
public:
  CubicSpline(std::vector<double> knots, std::vector<double> values);
  /// Rebuilds a spline from stored second derivatives without re-solving.
  static CubicSpline from_data(std::vector<double> knots, std::vector<double> values,
                               std::vector<double> second_derivatives);

  /// Evaluates inside [front, back]; outside is an error, not extrapolation.
  double operator()(double t) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& second_derivatives() const { return m_; }

private:
  CubicSpline() = default;
  std::vector<double> x_, y_, m_;
};

/// POD basis with per-mode spline-interpolated coefficient histories.  The
/// basis is built on the raw snapshots (no mean removal), so the stored model
/// is exactly r modes plus the per-mode coefficient splines.
struct PODIModel {
  Eigen::MatrixXd modes;   // n x r
  Eigen::MatrixXd alpha;   // r x m coefficients at the train instants
  std::vector<CubicSpline> splines;  // one per mode
  SingularSpectrum spectrum;         // train-matrix spectrum, full length
  std::vector<double> train_times;
  double t0 = 0, t_end = 0;
  int rank = 0;
  FieldLayout layout;
  std::size_t n_cells = 0;

  std::size_t n_dof() const { return static_cast<std::size_t>(modes.rows()); }
};

/// Builds the rank-r interpolatory ROM; needs at least 4 snapshots.
PODIModel fit_podi(const SnapshotDataset& train, int r);

/// modes * alpha(t); t outside the training window is an error.
Eigen::VectorXd evaluate_podi(const PODIModel& model, double t);

/// Spline-resampled history of coefficient j over the training window.
TimeSeries coefficient_trace(const PODIModel& model, int j, std::size_t n_samples);

/// Binary model container: magic "PODIMDL1\n", single-line JSON header, then
/// little-endian float64 blocks (modes, spectrum, train times, alpha, spline
/// second derivatives).  Loaded models evaluate bit-identically.
void save_podi_model(const PODIModel& model, const std::filesystem::path& path);
PODIModel load_podi_model(const std::filesystem::path& path);

}  // namespace rom

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hydrorom/snapshot.hpp"

namespace rom {

/// Relative Frobenius error of one surrogate snapshot, in percent.
struct SnapshotError {
  std::size_t snapshot_index = 0;
  double time = 0;
  double error_percent = 0;
};

/// Per-snapshot errors at one rank.  `label` names the dataset the surrogate
/// was compared against ("reconstruction" for train-time replay,
/// "prediction" for unseen times).  Invariant: global_percent is the
/// arithmetic mean of the per-snapshot errors.
struct ErrorReport {
  int rank = 0;
  std::string label;
  std::vector<SnapshotError> per_snapshot;  // ordered by time
  double global_percent = 0;
};

/// Surrogate state at a given rank and time.
using Surrogate = std::function<Eigen::VectorXd(int rank, double t)>;

/// 100 * |x_hat - x_ref|_F / |x_ref|_F.  Accepts vectors (n x 1) or whole
/// snapshot matrices.  A zero-norm reference has no relative error and
/// raises NumericalError.
double relative_frobenius_error(const Eigen::MatrixXd& x_hat,
                                const Eigen::MatrixXd& x_ref);

/// Evaluates the surrogate against every reference snapshot, once per rank.
std::vector<ErrorReport> error_sweep(const Surrogate& surrogate,
                                     const SnapshotDataset& reference,
                                     const std::vector<int>& ranks,
                                     const std::string& label);

/// Shifts the pressure block by a constant (gauge offset) so that relative
/// pressure errors are computed against absolute rather than gauge values.
SnapshotDataset pressure_gauge_offset(const SnapshotDataset& ds, double offset);

enum class RomKind { dmd, podi };

/// Storage and runtime bookkeeping for one ROM at one rank.  Counts are
/// stored-value counts: the full-order bundle keeps n_dof * m_total values;
/// the ROM keeps r modes (a complex DMD mode and its conjugate count once)
/// plus its dynamic payload, i.e. eigenvalues and amplitudes for DMD or
/// spline knots and curvatures for interpolated-coefficient models.
struct CompressionReport {
  RomKind kind = RomKind::dmd;
  int rank = 0;
  double fom_floats = 0;
  double rom_floats = 0;
  double compression_level = 0;  // fom_floats / rom_floats
  double fom_bytes = 0;
  double rom_bytes = 0;
  double fom_seconds = 0;
  double rom_seconds = 0;
  double speedup = 0;            // fom_seconds / rom_seconds
};

CompressionReport compression_report(RomKind kind, std::size_t n_dof,
                                     std::size_t m_total, std::size_t m_train, int r,
                                     double bytes_per_value, double fom_seconds,
                                     double rom_seconds);

/// Writes `rank,snapshot_index,time,error_percent` rows for every report.
void write_error_csv(const std::vector<ErrorReport>& reports,
                     const std::filesystem::path& path);

/// Writes `rank,label,global_error_percent,compression_level,speedup` rows;
/// the compression entries must cover exactly the reports' ranks.
void write_summary_csv(const std::vector<ErrorReport>& reports,
                       const std::vector<CompressionReport>& compression,
                       const std::filesystem::path& path);

}  // namespace rom

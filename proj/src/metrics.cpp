#include "hydrorom/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace rom {

double relative_frobenius_error(const Eigen::MatrixXd& x_hat,
                                const Eigen::MatrixXd& x_ref) {
  if (x_hat.rows() != x_ref.rows() || x_hat.cols() != x_ref.cols())
    throw ArgumentError("surrogate/reference shape mismatch");
  const double ref_norm = x_ref.norm();
  if (!(ref_norm > 0))
    throw NumericalError("zero-norm reference has no relative error");
  return 100.0 * (x_hat - x_ref).norm() / ref_norm;
}

std::vector<ErrorReport> error_sweep(const Surrogate& surrogate,
                                     const SnapshotDataset& reference,
                                     const std::vector<int>& ranks,
                                     const std::string& label) {
  if (ranks.empty()) throw ArgumentError("rank list is empty");
  if (reference.m() == 0) throw ArgumentError("empty dataset");
  std::vector<int> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ArgumentError("rank list has duplicates");

  std::vector<ErrorReport> reports;
  reports.reserve(sorted.size());
  for (int r : sorted) {
    ErrorReport report;
    report.rank = r;
    report.label = label;
    report.per_snapshot.reserve(reference.m());
    std::vector<double> errors(reference.m());
    for (std::size_t k = 0; k < reference.m(); ++k) {
      const double t = reference.times()[k];
      const Eigen::VectorXd approx = surrogate(r, t);
      errors[k] = relative_frobenius_error(approx, reference.column(k));
      report.per_snapshot.push_back({k, t, errors[k]});
    }
    report.global_percent = pairwise_sum(std::span<const double>(errors)) /
                            static_cast<double>(errors.size());
    reports.push_back(std::move(report));
  }
  return reports;
}

SnapshotDataset pressure_gauge_offset(const SnapshotDataset& ds, double offset) {
  return ds.with_pressure_offset(offset);
}

CompressionReport compression_report(RomKind kind, std::size_t n_dof,
                                     std::size_t m_total, std::size_t m_train, int r,
                                     double bytes_per_value, double fom_seconds,
                                     double rom_seconds) {
  if (n_dof == 0 || m_total == 0) throw ArgumentError("empty full-order bundle");
  if (r < 1) throw ArgumentError("rank must be >= 1");
  if (!(bytes_per_value > 0)) throw ArgumentError("bytes per value must be positive");
  if (kind == RomKind::podi && m_train == 0)
    throw ArgumentError("interpolatory ROM needs a train count");

  CompressionReport rep;
  rep.kind = kind;
  rep.rank = r;
  rep.fom_floats = static_cast<double>(n_dof) * static_cast<double>(m_total);
  const double nr = static_cast<double>(n_dof) * r;
  if (kind == RomKind::dmd) {
    // r conjugate-reduced complex modes = n_dof*r reals, plus eigenvalues and
    // amplitudes (2 complex = 4 reals per mode).
    rep.rom_floats = nr + 4.0 * r;
  } else {
    // r modes, plus knots and per-mode coefficients + second derivatives.
    rep.rom_floats = nr + static_cast<double>(m_train) * (2.0 * r + 1.0);
  }
  rep.compression_level = rep.fom_floats / rep.rom_floats;
  rep.fom_bytes = rep.fom_floats * bytes_per_value;
  rep.rom_bytes = rep.rom_floats * bytes_per_value;
  rep.fom_seconds = fom_seconds;
  rep.rom_seconds = rom_seconds;
  if (!(rom_seconds > 0) || !(fom_seconds > 0))
    throw ArgumentError("timings must be positive");
  rep.speedup = fom_seconds / rom_seconds;
  return rep;
}

void write_error_csv(const std::vector<ErrorReport>& reports,
                     const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "rank,snapshot_index,time,error_percent\n";
  for (const auto& report : reports)
    for (const auto& e : report.per_snapshot)
      out << report.rank << ',' << e.snapshot_index << ',' << g17(e.time) << ','
          << g17(e.error_percent) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_summary_csv(const std::vector<ErrorReport>& reports,
                       const std::vector<CompressionReport>& compression,
                       const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "rank,label,global_error_percent,compression_level,speedup\n";
  for (const auto& report : reports) {
    auto it = std::find_if(compression.begin(), compression.end(),
                           [&](const CompressionReport& c) {
                             return c.rank == report.rank;
                           });
    if (it == compression.end())
      throw ArgumentError("no compression entry for rank " +
                          std::to_string(report.rank));
    out << report.rank << ',' << report.label << ',' << g17(report.global_percent)
        << ',' << g17(it->compression_level) << ',' << g17(it->speedup) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rom

#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "hydrorom/common.hpp"

namespace rom {

/// Full singular spectrum, descending and non-negative.
struct SingularSpectrum {
  Eigen::VectorXd sigma;
};

/// Rank-r proper orthogonal basis of a snapshot matrix, plus the full
/// spectrum and the matching right singular vectors.
struct PODBasis {
  Eigen::MatrixXd modes;          // n x r, orthonormal columns
  Eigen::MatrixXd right_vectors;  // m x r, orthonormal columns
  SingularSpectrum spectrum;      // length min(n, m)
  int rank = 0;
};

/// Modal coefficients: one column of coefficients per snapshot.
struct CoefficientMatrix {
  Eigen::MatrixXd alpha;  // r x m
};

/// Rank-r truncated SVD.  Uses a direct SVD when the matrix is not strongly
/// tall, otherwise the normal-equations (snapshot) route on S^T S.  Mode signs
/// follow a fixed convention: the largest-magnitude entry of each left vector
/// (first occurrence) is positive.  Singular values below 1e-12 of the largest
/// count as rank zero; missing basis columns are completed deterministically.
PODBasis truncated_svd(const Eigen::MatrixXd& S, int r);

/// alpha = modes^T S.
CoefficientMatrix pod_project(const PODBasis& basis, const Eigen::MatrixXd& S);

/// S_hat = modes * alpha.
Eigen::MatrixXd pod_reconstruct(const PODBasis& basis, const CoefficientMatrix& coeffs);

struct TruncationError {
  double spectral = 0;   // sigma_{r+1}
  double frobenius = 0;  // sqrt(sum of squared tail singular values)
};

/// Exact rank-r approximation error from the spectrum tail; requires
/// r < spectrum length.
TruncationError truncation_error(const SingularSpectrum& spectrum, int r);

/// Fraction of squared spectral energy captured by the leading r values.
double cumulative_energy(const SingularSpectrum& spectrum, int r);

/// Spectrum scaled so the first entry is exactly 1; errors on a zero spectrum.
Eigen::VectorXd normalized_singular_values(const SingularSpectrum& spectrum);

/// Writes `index,sigma_normalized` rows (1-based index).
void write_spectrum_csv(const SingularSpectrum& spectrum,
                        const std::filesystem::path& path);

}  // namespace rom

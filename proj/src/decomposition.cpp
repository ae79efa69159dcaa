#include "hydrorom/decomposition.hpp"

#include <algorithm>
#include <cmath>

namespace rom {

namespace {

constexpr double kRankCutoffRel = 1e-12;

// Gram-Schmidt completion against the first j columns of U.  Canonical basis
// candidates are tried in a fixed wrapping order, so the result depends only
// on the accepted columns, never on timing or threads.
void complete_column(Eigen::MatrixXd& U, Eigen::Index j) {
  const Eigen::Index n = U.rows();
  for (Eigen::Index trial = 0; trial < n; ++trial) {
    const Eigen::Index c = (j + trial) % n;
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, c);
    for (int pass = 0; pass < 2; ++pass)
      v -= U.leftCols(j) * (U.leftCols(j).transpose() * v);
    const double norm = v.norm();
    if (norm > 0.5) {
      U.col(j) = v / norm;
      return;
    }
  }
  throw NumericalError("failed to complete orthonormal basis");
}

void apply_sign_convention(Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index imax = 0;
    U.col(j).cwiseAbs().maxCoeff(&imax);
    if (U(imax, j) < 0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

}  // namespace

PODBasis truncated_svd(const Eigen::MatrixXd& S, int r) {
  const Eigen::Index n = S.rows(), m = S.cols();
  if (n == 0 || m == 0) throw ArgumentError("empty snapshot matrix");
  const Eigen::Index kmax = std::min(n, m);
  if (r < 1 || r > kmax)
    throw ArgumentError("rank out of range: r=" + std::to_string(r) +
                        ", min(n,m)=" + std::to_string(kmax));
  if (!S.allFinite()) throw NumericalError("snapshot matrix contains NaN/Inf");

  PODBasis basis;
  basis.rank = r;

  if (n <= 10 * m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD failed to converge");
    basis.spectrum.sigma = svd.singularValues();
    basis.modes = svd.matrixU().leftCols(r);
    basis.right_vectors = svd.matrixV().leftCols(r);
  } else {
    // Strongly tall matrix: eigen-decompose the m x m Gram matrix instead of
    // the n x m factor.  sigma_i = sqrt(lambda_i), U = S V Sigma^{-1}.
    const Eigen::MatrixXd G = S.transpose() * S;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    if (eig.info() != Eigen::Success)
      throw NumericalError("Gram eigen-decomposition failed to converge");
    basis.spectrum.sigma.resize(m);
    Eigen::MatrixXd V(m, r);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lambda = eig.eigenvalues()(m - 1 - i);
      basis.spectrum.sigma(i) = std::sqrt(std::max(lambda, 0.0));
      if (i < r) V.col(i) = eig.eigenvectors().col(m - 1 - i);
    }
    const double cutoff = kRankCutoffRel * basis.spectrum.sigma(0);
    basis.modes.resize(n, r);
    for (Eigen::Index j = 0; j < r; ++j) {
      const double s = basis.spectrum.sigma(j);
      if (s > cutoff && s > 0)
        basis.modes.col(j) = S * V.col(j) / s;
      else
        complete_column(basis.modes, j);
    }
    basis.right_vectors = std::move(V);
  }

  apply_sign_convention(basis.modes, basis.right_vectors);
  return basis;
}

CoefficientMatrix pod_project(const PODBasis& basis, const Eigen::MatrixXd& S) {
  if (S.rows() != basis.modes.rows())
    throw ArgumentError("snapshot rows do not match basis dimension");
  return CoefficientMatrix{basis.modes.transpose() * S};
}

Eigen::MatrixXd pod_reconstruct(const PODBasis& basis, const CoefficientMatrix& coeffs) {
  if (coeffs.alpha.rows() != basis.modes.cols())
    throw ArgumentError("coefficient rows do not match basis rank");
  return basis.modes * coeffs.alpha;
}

TruncationError truncation_error(const SingularSpectrum& spectrum, int r) {
  const Eigen::Index len = spectrum.sigma.size();
  if (r < 0 || r >= len)
    throw ArgumentError("truncation rank must satisfy 0 <= r < spectrum length");
  TruncationError err;
  err.spectral = spectrum.sigma(r);
  double sum = 0.0;  // smallest-first for an accurate tail
  for (Eigen::Index i = len - 1; i >= r; --i) sum += spectrum.sigma(i) * spectrum.sigma(i);
  err.frobenius = std::sqrt(sum);
  return err;
}

double cumulative_energy(const SingularSpectrum& spectrum, int r) {
  const Eigen::Index len = spectrum.sigma.size();
  if (r < 1 || r > len)
    throw ArgumentError("cumulative energy rank must satisfy 1 <= r <= length");
  double total = 0.0;
  for (Eigen::Index i = len - 1; i >= 0; --i)
    total += spectrum.sigma(i) * spectrum.sigma(i);
  if (!(total > 0)) throw NumericalError("zero spectrum has no energy fraction");
  double lead = 0.0;
  for (Eigen::Index i = r - 1; i >= 0; --i)
    lead += spectrum.sigma(i) * spectrum.sigma(i);
  return lead / total;
}

Eigen::VectorXd normalized_singular_values(const SingularSpectrum& spectrum) {
  if (spectrum.sigma.size() == 0) throw ArgumentError("empty spectrum");
  const double s0 = spectrum.sigma(0);
  if (!(s0 > 0) || !std::isfinite(s0))
    throw NumericalError("degenerate spectrum: leading singular value is zero");
  Eigen::VectorXd out = spectrum.sigma / s0;
  out(0) = 1.0;
  return out;
}

void write_spectrum_csv(const SingularSpectrum& spectrum,
                        const std::filesystem::path& path) {
  const Eigen::VectorXd norm = normalized_singular_values(spectrum);
  auto out = open_output(path);
  out << "index,sigma_normalized\n";
  for (Eigen::Index i = 0; i < norm.size(); ++i)
    out << (i + 1) << ',' << g17(norm(i)) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rom

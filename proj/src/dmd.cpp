#include "hydrorom/dmd.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "hydrorom/decomposition.hpp"

namespace rom {

namespace {

constexpr char kMagic[] = "DMDMODL1\n";
constexpr std::size_t kMagicLen = 9;

bool conjugate_closed(const Eigen::VectorXcd& lambda) {
  const Eigen::Index r = lambda.size();
  std::vector<bool> paired(static_cast<std::size_t>(r), false);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (paired[i]) continue;
    const double tol = 1e-8 * std::max(1.0, std::abs(lambda(i)));
    if (std::abs(lambda(i).imag()) <= tol) {
      paired[i] = true;
      continue;
    }
    Eigen::Index best = -1;
    double best_d = tol;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (j == i || paired[j]) continue;
      const double d = std::abs(lambda(j) - std::conj(lambda(i)));
      if (d <= best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0) return false;
    paired[i] = true;
    paired[best] = true;
  }
  return true;
}

Eigen::VectorXcd least_squares_amplitudes(const Eigen::MatrixXcd& modes,
                                          const Eigen::VectorXcd& x0) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(modes,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = 1e-12 * (s.size() > 0 ? s(0) : 0.0);
  Eigen::VectorXcd tmp = svd.matrixU().adjoint() * x0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    tmp(i) = s(i) > cutoff ? tmp(i) / s(i) : std::complex<double>(0, 0);
  return svd.matrixV() * tmp;
}

void write_complex(std::ofstream& out, const std::complex<double>* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p),
            static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
}

void read_complex(std::ifstream& in, std::complex<double>* p, std::size_t n,
                  const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(p),
          static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(std::complex<double>))
    throw FormatError("truncated model payload in " + path.string());
}

}  // namespace

DMDModel fit_dmd(const SnapshotDataset& train, int r) {
  const std::size_t m = train.m();
  if (m < 3) throw ArgumentError("DMD needs at least 3 snapshots");
  const Eigen::Index n = train.snapshots().rows();
  const Eigen::Index pairs = static_cast<Eigen::Index>(m) - 1;
  if (r < 1 || r > std::min(n, pairs))
    throw ArgumentError("rank out of range: r=" + std::to_string(r) +
                        ", max=" + std::to_string(std::min(n, pairs)));

  const auto X = train.snapshots().leftCols(pairs);
  const auto Y = train.snapshots().rightCols(pairs);

  PODBasis basis = truncated_svd(X, r);
  const Eigen::VectorXd& sigma = basis.spectrum.sigma;
  if (!(sigma(r - 1) > 1e-12 * sigma(0)))
    throw NumericalError("snapshot data is rank deficient below r=" +
                         std::to_string(r) + "; try a smaller rank");

  Eigen::MatrixXd atilde = basis.modes.transpose() * Y * basis.right_vectors;
  for (Eigen::Index j = 0; j < r; ++j) atilde.col(j) /= sigma(j);

  Eigen::EigenSolver<Eigen::MatrixXd> eig(atilde);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigen-decomposition of the low-order propagator failed");

  DMDModel model;
  model.rank = r;
  model.dt = train.dt();
  model.t0 = train.t0();
  model.t_end = train.times().back();
  model.layout = train.layout();
  model.n_cells = train.n_cells();
  model.eigenvalues = eig.eigenvalues();
  model.modes = basis.modes * eig.eigenvectors();
  model.amplitudes = least_squares_amplitudes(model.modes, train.column(0));
  model.conjugate_complete = conjugate_closed(model.eigenvalues);
  return model;
}

DMDEvaluation evaluate_dmd_detailed(const DMDModel& model, double t) {
  if (t < model.t0)
    throw ArgumentError("evaluation time precedes the model start");
  const double tau = t - model.t0;

  Eigen::VectorXcd weighted(model.rank);
  for (int j = 0; j < model.rank; ++j) {
    const std::complex<double> lambda = model.eigenvalues(j);
    std::complex<double> factor;
    if (lambda == std::complex<double>(0, 0))
      factor = tau == 0.0 ? 1.0 : 0.0;
    else
      factor = std::exp(std::log(lambda) / model.dt * tau);
    weighted(j) = factor * model.amplitudes(j);
  }

  const Eigen::VectorXcd y = model.modes * weighted;
  DMDEvaluation eval;
  eval.state = y.real();
  const double norm = y.norm();
  eval.imag_residual_rel = norm > 0 ? y.imag().norm() / norm : 0.0;
  eval.extrapolated = t > model.t_end + 1e-9 * model.dt;
  return eval;
}

Eigen::VectorXd evaluate_dmd(const DMDModel& model, double t) {
  DMDEvaluation eval = evaluate_dmd_detailed(model, t);
  if (model.conjugate_complete && eval.imag_residual_rel > 1e-6)
    throw NumericalError("imaginary residual " + g17(eval.imag_residual_rel) +
                         " exceeds 1e-6 on a conjugate-complete model");
  return std::move(eval.state);
}

std::vector<DMDSpectrumEntry> continuous_spectrum(const DMDModel& model) {
  std::vector<DMDSpectrumEntry> entries;
  entries.reserve(static_cast<std::size_t>(model.rank));
  for (int j = 0; j < model.rank; ++j) {
    const std::complex<double> lambda = model.eigenvalues(j);
    if (lambda == std::complex<double>(0, 0))
      throw NumericalError("zero eigenvalue has no continuous-time exponent");
    const std::complex<double> omega = std::log(lambda) / model.dt;
    entries.push_back({omega.real(), omega.imag() / (2.0 * std::numbers::pi)});
  }
  return entries;
}

DMDModeField dmd_mode_field(const DMDModel& model, int k) {
  if (k < 0 || k >= model.rank) throw ArgumentError("mode index out of range");
  DMDModeField f;
  f.real_part = unpack_state(model.modes.col(k).real(), model.layout, model.n_cells);
  f.imag_part = unpack_state(model.modes.col(k).imag(), model.layout, model.n_cells);
  return f;
}

void save_dmd_model(const DMDModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["n_dof"] = model.n_dof();
  header["rank"] = model.rank;
  header["dt"] = model.dt;
  header["t0"] = model.t0;
  header["t_end"] = model.t_end;
  header["conjugate_complete"] = model.conjugate_complete;
  header["n_cells"] = model.n_cells;
  header["layout"] = model.layout.components();

  auto out = open_output(path);
  out.write(kMagic, kMagicLen);
  const std::string hs = header.dump();
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.put('\n');
  write_complex(out, model.modes.data(), static_cast<std::size_t>(model.modes.size()));
  write_complex(out, model.eigenvalues.data(),
                static_cast<std::size_t>(model.eigenvalues.size()));
  write_complex(out, model.amplitudes.data(),
                static_cast<std::size_t>(model.amplitudes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

DMDModel load_dmd_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (static_cast<std::size_t>(in.gcount()) != kMagicLen ||
      std::string_view(magic, kMagicLen) != kMagic)
    throw FormatError("not a dmdmodel file (bad magic): " + path.string());

  std::string header_line;
  if (!std::getline(in, header_line))
    throw FormatError("missing header line: " + path.string());

  DMDModel model;
  std::size_t n_dof = 0;
  try {
    const auto header = nlohmann::json::parse(header_line);
    n_dof = header.at("n_dof").get<std::size_t>();
    model.rank = header.at("rank").get<int>();
    model.dt = header.at("dt").get<double>();
    model.t0 = header.at("t0").get<double>();
    model.t_end = header.at("t_end").get<double>();
    model.conjugate_complete = header.at("conjugate_complete").get<bool>();
    model.n_cells = header.at("n_cells").get<std::size_t>();
    model.layout = FieldLayout(header.at("layout").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad header in " + path.string() + ": " + e.what());
  }
  if (model.rank < 1 || n_dof == 0 ||
      n_dof != model.layout.n_dof(model.n_cells))
    throw FormatError("inconsistent model header: " + path.string());

  model.modes.resize(static_cast<Eigen::Index>(n_dof), model.rank);
  model.eigenvalues.resize(model.rank);
  model.amplitudes.resize(model.rank);
  read_complex(in, model.modes.data(), n_dof * static_cast<std::size_t>(model.rank),
               path);
  read_complex(in, model.eigenvalues.data(), static_cast<std::size_t>(model.rank), path);
  read_complex(in, model.amplitudes.data(), static_cast<std::size_t>(model.rank), path);
  if (in.peek() != std::ifstream::traits_type::eof())
    throw FormatError("trailing bytes in " + path.string());
  return model;
}

}  // namespace rom

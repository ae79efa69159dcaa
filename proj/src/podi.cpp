#include "hydrorom/podi.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace rom {

namespace {

constexpr char kMagic[] = "PODIMDL1\n";
constexpr std::size_t kMagicLen = 9;

void validate_knots(const std::vector<double>& x) {
  if (x.size() < 2) throw ArgumentError("spline needs at least 2 knots");
  for (double v : x)
    if (!std::isfinite(v)) throw ArgumentError("spline knots contain NaN/Inf");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i]))
      throw ArgumentError("spline knots must be strictly increasing");
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
    : x_(std::move(knots)), y_(std::move(values)) {
  validate_knots(x_);
  if (y_.size() != x_.size())
    throw ArgumentError("spline knots/values size mismatch");
  for (double v : y_)
    if (!std::isfinite(v)) throw ArgumentError("spline values contain NaN/Inf");

  const std::size_t n = x_.size();
  m_.assign(n, 0.0);
  if (n <= 2) return;

  // Tridiagonal system for the interior second derivatives (natural ends fix
  // the first and last to zero).  The matrix is strictly diagonally dominant,
  // so the Thomas sweep needs no pivoting.
  const std::size_t k = n - 2;
  std::vector<double> diag(k), upper(k), rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double h0 = x_[i + 1] - x_[i];
    const double h1 = x_[i + 2] - x_[i + 1];
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (y_[i + 2] - y_[i + 1]) / h1 - (y_[i + 1] - y_[i]) / h0;
  }
  for (std::size_t i = 1; i < k; ++i) {
    const double lower = (x_[i + 1] - x_[i]) / 6.0;
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t i = k - 1; i >= 1; --i)
    m_[i] = (rhs[i - 1] - upper[i - 1] * m_[i + 1]) / diag[i - 1];
}

CubicSpline CubicSpline::from_data(std::vector<double> knots,
                                   std::vector<double> values,
                                   std::vector<double> second_derivatives) {
  validate_knots(knots);
  if (values.size() != knots.size() || second_derivatives.size() != knots.size())
    throw ArgumentError("spline data arrays must have equal length");
  CubicSpline s;
  s.x_ = std::move(knots);
  s.y_ = std::move(values);
  s.m_ = std::move(second_derivatives);
  return s;
}

double CubicSpline::operator()(double t) const {
  if (!(t >= x_.front() && t <= x_.back()))
    throw ArgumentError("spline evaluation at " + g17(t) +
                        " is outside the knot range [" + g17(x_.front()) + ", " +
                        g17(x_.back()) + "]");
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);

  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

PODIModel fit_podi(const SnapshotDataset& train, int r) {
  const std::size_t m = train.m();
  if (m < 4) throw ArgumentError("spline interpolation needs at least 4 snapshots");
  const Eigen::Index n = train.snapshots().rows();
  if (r < 1 || r > std::min<Eigen::Index>(n, static_cast<Eigen::Index>(m)))
    throw ArgumentError("rank out of range: r=" + std::to_string(r));

  PODIModel model;
  PODBasis basis = truncated_svd(train.snapshots(), r);
  model.modes = std::move(basis.modes);
  model.spectrum = std::move(basis.spectrum);
  model.alpha = model.modes.transpose() * train.snapshots();
  model.train_times = train.times();
  model.t0 = train.t0();
  model.t_end = train.times().back();
  model.rank = r;
  model.layout = train.layout();
  model.n_cells = train.n_cells();

  model.splines.reserve(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    std::vector<double> y(m);
    for (std::size_t k = 0; k < m; ++k)
      y[k] = model.alpha(j, static_cast<Eigen::Index>(k));
    model.splines.emplace_back(model.train_times, std::move(y));
  }
  return model;
}

Eigen::VectorXd evaluate_podi(const PODIModel& model, double t) {
  if (!(t >= model.t0 && t <= model.t_end))
    throw ArgumentError("evaluation time " + g17(t) +
                        " is outside the training window [" + g17(model.t0) + ", " +
                        g17(model.t_end) + "]; the interpolatory ROM cannot extrapolate");
  Eigen::VectorXd coeffs(model.rank);
  for (int j = 0; j < model.rank; ++j) coeffs(j) = model.splines[j](t);
  return model.modes * coeffs;
}

TimeSeries coefficient_trace(const PODIModel& model, int j, std::size_t n_samples) {
  if (j < 0 || j >= model.rank) throw ArgumentError("coefficient index out of range");
  if (n_samples < 2) throw ArgumentError("trace needs at least 2 samples");
  TimeSeries ts;
  ts.times.resize(n_samples);
  ts.values.resize(n_samples);
  const double span = model.t_end - model.t0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double t = model.t0 + span * static_cast<double>(i) /
                              static_cast<double>(n_samples - 1);
    t = std::min(t, model.t_end);
    ts.times[i] = t;
    ts.values[i] = model.splines[j](t);
  }
  return ts;
}

namespace {

void write_block(std::ofstream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void read_block(std::ifstream& in, double* p, std::size_t n,
                const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double))
    throw FormatError("truncated model payload in " + path.string());
}

}  // namespace

void save_podi_model(const PODIModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["n_dof"] = model.n_dof();
  header["rank"] = model.rank;
  header["m_train"] = model.train_times.size();
  header["spectrum_len"] = model.spectrum.sigma.size();
  header["t0"] = model.t0;
  header["t_end"] = model.t_end;
  header["n_cells"] = model.n_cells;
  header["layout"] = model.layout.components();

  auto out = open_output(path);
  out.write(kMagic, kMagicLen);
  const std::string hs = header.dump();
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.put('\n');

  write_block(out, model.modes.data(), static_cast<std::size_t>(model.modes.size()));
  write_block(out, model.spectrum.sigma.data(),
              static_cast<std::size_t>(model.spectrum.sigma.size()));
  write_block(out, model.train_times.data(), model.train_times.size());
  write_block(out, model.alpha.data(), static_cast<std::size_t>(model.alpha.size()));
  for (const auto& s : model.splines)
    write_block(out, s.second_derivatives().data(), s.second_derivatives().size());
  if (!out) throw IoError("write failed: " + path.string());
}

PODIModel load_podi_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (static_cast<std::size_t>(in.gcount()) != kMagicLen ||
      std::string_view(magic, kMagicLen) != kMagic)
    throw FormatError("not a podimodel file (bad magic): " + path.string());

  std::string header_line;
  if (!std::getline(in, header_line))
    throw FormatError("missing header line: " + path.string());

  PODIModel model;
  std::size_t n_dof = 0, m_train = 0, spectrum_len = 0;
  try {
    const auto header = nlohmann::json::parse(header_line);
    n_dof = header.at("n_dof").get<std::size_t>();
    model.rank = header.at("rank").get<int>();
    m_train = header.at("m_train").get<std::size_t>();
    spectrum_len = header.at("spectrum_len").get<std::size_t>();
    model.t0 = header.at("t0").get<double>();
    model.t_end = header.at("t_end").get<double>();
    model.n_cells = header.at("n_cells").get<std::size_t>();
    model.layout = FieldLayout(header.at("layout").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad header in " + path.string() + ": " + e.what());
  }
  if (model.rank < 1 || n_dof == 0 || m_train < 4 ||
      n_dof != model.layout.n_dof(model.n_cells))
    throw FormatError("inconsistent model header: " + path.string());

  const auto r = static_cast<Eigen::Index>(model.rank);
  model.modes.resize(static_cast<Eigen::Index>(n_dof), r);
  model.spectrum.sigma.resize(static_cast<Eigen::Index>(spectrum_len));
  model.train_times.resize(m_train);
  model.alpha.resize(r, static_cast<Eigen::Index>(m_train));
  read_block(in, model.modes.data(), static_cast<std::size_t>(model.modes.size()), path);
  read_block(in, model.spectrum.sigma.data(), spectrum_len, path);
  read_block(in, model.train_times.data(), m_train, path);
  read_block(in, model.alpha.data(), static_cast<std::size_t>(model.alpha.size()), path);

  std::vector<double> second(m_train);
  for (int j = 0; j < model.rank; ++j) {
    read_block(in, second.data(), m_train, path);
    std::vector<double> y(m_train);
    for (std::size_t k = 0; k < m_train; ++k)
      y[k] = model.alpha(j, static_cast<Eigen::Index>(k));
    model.splines.push_back(
        CubicSpline::from_data(model.train_times, std::move(y), second));
  }
  if (in.peek() != std::ifstream::traits_type::eof())
    throw FormatError("trailing bytes in " + path.string());
  return model;
}

}  // namespace rom

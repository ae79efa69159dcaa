#include "hydrorom/spectral.hpp"

#include <cmath>
#include <numbers>

namespace rom {

namespace {

double uniform_dt(const TimeSeries& ts) {
  const std::size_t n = ts.times.size();
  if (n != ts.values.size())
    throw ArgumentError("time series times/values size mismatch");
  if (n < 2) throw ArgumentError("spectrum needs at least two samples");
  const double dt = (ts.times.back() - ts.times.front()) / static_cast<double>(n - 1);
  if (!(dt > 0)) throw ArgumentError("times must be strictly increasing");
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (std::abs(ts.times[k + 1] - ts.times[k] - dt) > 1e-10 * dt)
      throw ArgumentError("non-uniform time step");
  return dt;
}

}  // namespace

Spectrum amplitude_spectrum(const TimeSeries& ts) {
  const double dt = uniform_dt(ts);
  const std::size_t n = ts.values.size();
  for (double v : ts.values)
    if (!std::isfinite(v)) throw ArgumentError("time series values contain NaN/Inf");

  std::vector<double> detrended(ts.values);
  const double mean =
      pairwise_sum(std::span<const double>(detrended)) / static_cast<double>(n);
  for (double& v : detrended) v -= mean;

  const std::size_t n_freq = n / 2;
  Spectrum spec;
  spec.frequencies.resize(n_freq);
  spec.amplitudes.resize(n_freq);
  const double fs = 1.0 / dt;
  const double two_pi = 2.0 * std::numbers::pi;
  // Direct DFT: record lengths here are small enough that O(N^2) with exact
  // per-bin phases beats pulling in an FFT dependency.
  for (std::size_t k = 1; k <= n_freq; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = two_pi * static_cast<double>((k * j) % n) /
                           static_cast<double>(n);
      re += detrended[j] * std::cos(phase);
      im -= detrended[j] * std::sin(phase);
    }
    spec.frequencies[k - 1] = static_cast<double>(k) * fs / static_cast<double>(n);
    spec.amplitudes[k - 1] = std::hypot(re, im) / static_cast<double>(n_freq);
  }
  return spec;
}

LevelSpectrum spectrum_level(const Spectrum& spectrum, double p_ref) {
  if (!(p_ref > 0) || !std::isfinite(p_ref))
    throw ArgumentError("reference amplitude must be positive and finite");
  LevelSpectrum out;
  out.frequencies = spectrum.frequencies;
  out.levels_db.resize(spectrum.amplitudes.size());
  const double lref = std::log10(p_ref);
  for (std::size_t i = 0; i < spectrum.amplitudes.size(); ++i) {
    const double a = spectrum.amplitudes[i];
    double level = -400.0;
    if (a > 0) level = std::max(20.0 * (std::log10(a) - lref), -400.0);
    out.levels_db[i] = level;
  }
  return out;
}

DominantBin dominant_frequency(const Spectrum& spectrum) {
  if (spectrum.amplitudes.empty()) throw ArgumentError("empty spectrum");
  std::size_t best = 0;
  for (std::size_t i = 1; i < spectrum.amplitudes.size(); ++i)
    if (spectrum.amplitudes[i] > spectrum.amplitudes[best]) best = i;
  return DominantBin{spectrum.frequencies[best], spectrum.amplitudes[best], best + 1};
}

void write_amplitude_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "frequency_hz,amplitude\n";
  for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i)
    out << g17(spectrum.frequencies[i]) << ',' << g17(spectrum.amplitudes[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_level_csv(const LevelSpectrum& spectrum, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "frequency_hz,spl_db\n";
  for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i)
    out << g17(spectrum.frequencies[i]) << ',' << g17(spectrum.levels_db[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rom

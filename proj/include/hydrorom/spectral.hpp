#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "hydrorom/snapshot.hpp"

namespace rom {

/// One-sided amplitude spectrum over bins k = 1 .. floor(N/2).
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
};

/// One-sided level spectrum in dB re a reference amplitude.
struct LevelSpectrum {
  std::vector<double> frequencies;
  std::vector<double> levels_db;
};

struct DominantBin {
  double frequency = 0;
  double amplitude = 0;
  std::size_t bin = 0;  // 1-based DFT bin
};

/// Amplitude spectrum of a detrended uniform series: the sample mean is
/// removed, then |DFT| / floor(N/2) over bins 1..floor(N/2).  A bin-aligned
/// sine of amplitude A reports A (N even).
Spectrum amplitude_spectrum(const TimeSeries& ts);

/// 20 log10(amplitude / p_ref) per bin, floored at -400 dB.
LevelSpectrum spectrum_level(const Spectrum& spectrum, double p_ref);

/// Highest-amplitude bin; ties resolve to the lowest frequency.
DominantBin dominant_frequency(const Spectrum& spectrum);

/// Writes `frequency_hz,amplitude` rows.
void write_amplitude_csv(const Spectrum& spectrum, const std::filesystem::path& path);

/// Writes `frequency_hz,spl_db` rows.
void write_level_csv(const LevelSpectrum& spectrum, const std::filesystem::path& path);

}  // namespace rom

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hydrorom/config.hpp"
#include "hydrorom/fwh.hpp"
#include "hydrorom/synthetic.hpp"

namespace rom {

/// Point sample of one state component, named for the output files.
struct ProbeSpec {
  std::string label;
  std::array<double, 3> position{0, 0, 0};
  std::string component = "w";
};

/// End-to-end run description: data acquisition, ROM construction, mid cast,
/// flow analysis and acoustic evaluation.  Every field has a working default;
/// parse_pipeline_config fills one from a `key = value` file.
struct PipelineConfig {
  // data acquisition: load `input_path` when set, else synthesize
  std::string input_path;
  SynthConfig synth;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;

  // ROM construction
  std::vector<int> ranks = {2, 6, 10, 20};
  int detail_rank = 0;  // 0 = largest entry of ranks; used for field artifacts
  std::string rom = "both";  // dmd | podi | both
  double gauge_offset = 1.0;
  double bytes_per_value = 8.0;
  std::string timing_mode = "fixed";  // fixed (deterministic) | measure

  // reference quantities for nondimensional outputs
  double diameter = 0.01;
  double u0 = 1.0;
  double rho0 = 1000.0;

  // probes and spectra; empty = defaults scaled by diameter
  std::vector<ProbeSpec> probes;

  // flow analysis
  double wake_threshold = 1.0;
  double q_level = 4.0;  // nondimensional q D^2 / u0^2
  int histogram_bins = 64;

  // acoustic evaluation; empty mics = defaults scaled by diameter
  AcousticConfig acoustics;
  std::vector<Microphone> mics;
  int surface_panels = 400;
};

PipelineConfig parse_pipeline_config(const KeyValues& kv);

struct PipelineResult {
  std::filesystem::path report_path;
  std::vector<std::filesystem::path> written;
};

/// Runs every stage and writes the full artifact bundle into cfg.out_dir.
/// Any failure removes the files written so far and rethrows with the stage
/// name prefixed.  Identical config and seed reproduce byte-identical files
/// (timing_mode `measure` exempts the measured columns).
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace rom

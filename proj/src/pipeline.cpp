#include "hydrorom/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include <json.hpp>

#include "hydrorom/decomposition.hpp"
#include "hydrorom/dmd.hpp"
#include "hydrorom/flow_analysis.hpp"
#include "hydrorom/metrics.hpp"
#include "hydrorom/podi.hpp"
#include "hydrorom/spectral.hpp"

namespace rom {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

/// Reruns of a failing stage should say which stage died; rethrow the same
/// error type with the stage name prefixed.
template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  auto tag = [name](const char* what) {
    return std::string("stage '") + name + "': " + what;
  };
  try {
    return fn();
  } catch (const ArgumentError& e) {
    throw ArgumentError(tag(e.what()));
  } catch (const NumericalError& e) {
    throw NumericalError(tag(e.what()));
  } catch (const FormatError& e) {
    throw FormatError(tag(e.what()));
  } catch (const IoError& e) {
    throw IoError(tag(e.what()));
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool filename_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      return false;
  return true;
}

double min_cell_extent(const Mesh& mesh) {
  if (mesh.is_structured()) {
    const auto& g = mesh.grid();
    return std::min({g.hx, g.hy, g.hz});
  }
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.n_cells(); ++i)
    vmin = std::min(vmin, mesh.volume(i));
  return std::cbrt(vmin);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return pairwise_sum(std::span<const double>(v)) / static_cast<double>(v.size());
}

Field velocity_of(const Eigen::VectorXd& state, const FieldLayout& layout,
                  std::size_t n_cells) {
  for (auto& f : unpack_state(state, layout, n_cells))
    if (f.name == "velocity") return f;
  throw ArgumentError("dataset has no velocity components");
}

const std::set<std::string> kKnownKeys = {
    "input",        "out_dir",        "seed",           "ranks",
    "detail_rank",  "rom",            "gauge_offset",   "bytes_per_value",
    "timing_mode",  "diameter",       "u0",             "rho0",
    "probe",        "wake_threshold", "q_level",        "histogram_bins",
    "c0",           "mean_flow",      "p_ref",          "mic",
    "surface_panels",
    "synth.nx",     "synth.ny",       "synth.nz",       "synth.diameter",
    "synth.u0",     "synth.rho0",     "synth.sample_rate", "synth.m",
    "synth.t0",     "synth.noise",    "synth.seed",     "synth.component",
};

}  // namespace

PipelineConfig parse_pipeline_config(const KeyValues& kv) {
  for (const auto& [key, values] : kv)
    if (!kKnownKeys.contains(key))
      throw ArgumentError("unknown config key '" + key + "'");

  PipelineConfig cfg;
  cfg.input_path = kv_string(kv, "input", "");
  cfg.synth = parse_synth_config(kv);
  cfg.seed = kv_u64(kv, "seed", cfg.seed);
  cfg.synth.seed = kv_u64(kv, "synth.seed", cfg.seed);
  cfg.out_dir = kv_string(kv, "out_dir", cfg.out_dir.string());

  if (kv.contains("ranks")) {
    cfg.ranks.clear();
    for (const auto& tok : split_csv(kv_string(kv, "ranks", "")))
      cfg.ranks.push_back(to_int(tok, "ranks"));
  }
  cfg.detail_rank = kv_int(kv, "detail_rank", cfg.detail_rank);
  cfg.rom = kv_string(kv, "rom", cfg.rom);
  cfg.gauge_offset = kv_double(kv, "gauge_offset", cfg.gauge_offset);
  cfg.bytes_per_value = kv_double(kv, "bytes_per_value", cfg.bytes_per_value);
  cfg.timing_mode = kv_string(kv, "timing_mode", cfg.timing_mode);

  const bool synthetic = cfg.input_path.empty();
  cfg.diameter = kv_double(kv, "diameter",
                           synthetic ? cfg.synth.diameter : cfg.diameter);
  cfg.u0 = kv_double(kv, "u0", synthetic ? cfg.synth.u0 : cfg.u0);
  cfg.rho0 = kv_double(kv, "rho0", synthetic ? cfg.synth.rho0 : cfg.rho0);

  if (auto it = kv.find("probe"); it != kv.end()) {
    for (const std::string& s : it->second) {
      const auto parts = split_csv(s);
      if (parts.size() < 4 || parts.size() > 5)
        throw ArgumentError("probe needs 'label,x,y,z[,component]', got '" + s + "'");
      ProbeSpec p;
      p.label = parts[0];
      p.position = {to_double(parts[1], "probe x"), to_double(parts[2], "probe y"),
                    to_double(parts[3], "probe z")};
      if (parts.size() > 4 && !parts[4].empty()) p.component = parts[4];
      cfg.probes.push_back(p);
    }
  }

  cfg.wake_threshold = kv_double(kv, "wake_threshold", cfg.wake_threshold);
  cfg.q_level = kv_double(kv, "q_level", cfg.q_level);
  cfg.histogram_bins = kv_int(kv, "histogram_bins", cfg.histogram_bins);

  cfg.acoustics.c0 = kv_double(kv, "c0", cfg.acoustics.c0);
  cfg.acoustics.rho0 = cfg.rho0;
  cfg.acoustics.u0 = kv_double(kv, "mean_flow", cfg.u0);
  cfg.acoustics.p_ref = kv_double(kv, "p_ref", cfg.acoustics.p_ref);

  if (auto it = kv.find("mic"); it != kv.end()) {
    for (const std::string& s : it->second) {
      const auto parts = split_csv(s);
      if (parts.size() != 4)
        throw ArgumentError("mic needs 'label,x,y,z', got '" + s + "'");
      Microphone m;
      m.label = parts[0];
      m.position = {to_double(parts[1], "mic x"), to_double(parts[2], "mic y"),
                    to_double(parts[3], "mic z")};
      cfg.mics.push_back(m);
    }
  }
  cfg.surface_panels = kv_int(kv, "surface_panels", cfg.surface_panels);
  return cfg;
}

PipelineResult run_pipeline(const PipelineConfig& user) {
  PipelineConfig cfg = user;
  const bool measure = cfg.timing_mode == "measure";

  stage("config", [&] {
    if (cfg.ranks.empty()) throw ArgumentError("rank list is empty");
    std::sort(cfg.ranks.begin(), cfg.ranks.end());
    cfg.ranks.erase(std::unique(cfg.ranks.begin(), cfg.ranks.end()),
                    cfg.ranks.end());
    if (cfg.ranks.front() < 1)
      throw ArgumentError("rank must be >= 1, got " +
                          std::to_string(cfg.ranks.front()));
    if (cfg.detail_rank == 0) cfg.detail_rank = cfg.ranks.back();
    if (std::find(cfg.ranks.begin(), cfg.ranks.end(), cfg.detail_rank) ==
        cfg.ranks.end())
      throw ArgumentError("detail_rank " + std::to_string(cfg.detail_rank) +
                          " is not in the rank list");
    if (cfg.rom != "dmd" && cfg.rom != "podi" && cfg.rom != "both")
      throw ArgumentError("rom must be dmd, podi or both, got '" + cfg.rom + "'");
    if (cfg.timing_mode != "fixed" && cfg.timing_mode != "measure")
      throw ArgumentError("timing_mode must be fixed or measure, got '" +
                          cfg.timing_mode + "'");
    if (cfg.histogram_bins < 1) throw ArgumentError("histogram_bins must be >= 1");
    if (cfg.surface_panels < 8) throw ArgumentError("surface_panels must be >= 8");
    if (!(cfg.bytes_per_value > 0))
      throw ArgumentError("bytes_per_value must be positive");
    if (!(cfg.diameter > 0)) throw ArgumentError("diameter must be positive");
    if (!(cfg.rho0 > 0)) throw ArgumentError("rho0 must be positive");
    if (!std::isfinite(cfg.u0)) throw ArgumentError("u0 not finite");
    if (!std::isfinite(cfg.gauge_offset))
      throw ArgumentError("gauge_offset not finite");
    if (!(cfg.acoustics.c0 > 0)) throw ArgumentError("c0 must be positive");
    if (!(cfg.acoustics.p_ref > 0)) throw ArgumentError("p_ref must be positive");
    if (std::abs(cfg.acoustics.mach()) >= 1.0)
      throw ArgumentError("mean flow must stay subsonic");

    const double d = cfg.diameter;
    if (cfg.probes.empty())
      cfg.probes = {{"wake", {2.0 * d, 0.0, 0.0}, "w"},
                    {"quiet", {2.0 * d, 0.0, 2.0 * d}, "w"}};
    if (cfg.mics.empty())
      cfg.mics = {{"A", {0.0, 2.0 * d, 0.0}}, {"B", {2.0 * d, 2.0 * d, 0.0}}};

    std::set<std::string> seen;
    for (const auto& p : cfg.probes) {
      if (!filename_safe(p.label))
        throw ArgumentError("probe label '" + p.label +
                            "' must be nonempty [A-Za-z0-9_-]");
      if (!seen.insert("p:" + p.label).second)
        throw ArgumentError("duplicate probe label '" + p.label + "'");
    }
    for (const auto& m : cfg.mics) {
      if (!filename_safe(m.label))
        throw ArgumentError("mic label '" + m.label +
                            "' must be nonempty [A-Za-z0-9_-]");
      if (!seen.insert("m:" + m.label).second)
        throw ArgumentError("duplicate mic label '" + m.label + "'");
    }
  });

  const bool want_dmd = cfg.rom == "dmd" || cfg.rom == "both";
  const bool want_podi = cfg.rom == "podi" || cfg.rom == "both";
  const fs::path out = cfg.out_dir;

  PipelineResult result;
  std::vector<fs::path>& written = result.written;
  auto track = [&written](fs::path p) {
    written.push_back(p);
    return p;
  };

  try {
    // -------- data acquisition --------
    const auto t_acquire = Clock::now();
    const SnapshotDataset raw = stage("acquire", [&] {
      if (!cfg.input_path.empty()) return load_dataset(cfg.input_path);
      SnapshotDataset ds = generate_synthetic(cfg.synth);
      save_dataset(ds, track(out / "dataset.romsnap"));
      return ds;
    });
    const double fom_seconds =
        measure ? std::max(seconds_since(t_acquire), 1e-9) : 1.0;

    const Mesh& mesh = raw.mesh();
    const FieldLayout& layout = raw.layout();
    const std::size_t n_cells = raw.n_cells();
    const bool has_p = layout.has("p");
    const bool has_vel = layout.has_velocity();

    stage("validate", [&] {
      if (raw.m() < 12)
        throw ArgumentError("pipeline needs at least 12 snapshots, got " +
                            std::to_string(raw.m()));
      const auto m_train = static_cast<int>((raw.m() + 1) / 2);
      for (int r : cfg.ranks) {
        if (r > m_train)
          throw ArgumentError("rank " + std::to_string(r) +
                              " outside [1, " + std::to_string(m_train) +
                              "] for " + std::to_string(raw.m()) + " snapshots");
        if (want_dmd && r > m_train - 1)
          throw ArgumentError("rank " + std::to_string(r) +
                              " exceeds the largest fittable propagator rank " +
                              std::to_string(m_train - 1));
      }
      for (const auto& p : cfg.probes)
        if (!layout.has(p.component))
          throw ArgumentError("probe '" + p.label + "' component '" +
                              p.component + "' not in dataset layout");
      const double h = min_cell_extent(mesh);
      for (const auto& mic : cfg.mics) {
        if (cfg.input_path.empty() && in_source_region(cfg.synth, mic.position))
          throw ArgumentError("microphone '" + mic.label +
                              "' lies inside the source region");
        const auto& c = mesh.center(mesh.nearest_cell(mic.position));
        const double dx = mic.position[0] - c[0];
        const double dy = mic.position[1] - c[1];
        const double dz = mic.position[2] - c[2];
        if (std::sqrt(dx * dx + dy * dy + dz * dz) < 0.5 * h)
          throw ArgumentError("microphone '" + mic.label +
                              "' sits on a source cell");
      }
    });

    // -------- ingest: gauge offset for comparable relative errors --------
    std::optional<SnapshotDataset> offset_ds;
    if (has_p && cfg.gauge_offset != 0.0)
      offset_ds = stage("ingest", [&] {
        return pressure_gauge_offset(raw, cfg.gauge_offset);
      });
    const SnapshotDataset& metric = offset_ds ? *offset_ds : raw;

    // -------- basis functions --------
    const int max_rank = cfg.ranks.back();
    const PODBasis basis =
        stage("basis", [&] { return truncated_svd(metric.snapshots(), max_rank); });
    stage("basis", [&] {
      write_spectrum_csv(basis.spectrum, track(out / "spectrum.csv"));
      auto file = open_output(track(out / "energy.csv"));
      file << "rank,cumulative_energy,truncation_spectral_rel,"
              "truncation_frobenius_rel\n";
      const auto len = static_cast<int>(basis.spectrum.sigma.size());
      const double s1 = basis.spectrum.sigma(0);
      const double fro = basis.spectrum.sigma.norm();
      for (int r = 1; r <= len; ++r) {
        const TruncationError te =
            r < len ? truncation_error(basis.spectrum, r) : TruncationError{};
        file << r << ',' << g17(cumulative_energy(basis.spectrum, r)) << ','
             << g17(s1 > 0 ? te.spectral / s1 : 0.0) << ','
             << g17(fro > 0 ? te.frobenius / fro : 0.0) << '\n';
      }
      if (!file) throw IoError("write failed: energy.csv");
    });

    // -------- train/test split --------
    const auto split = stage("split", [&] { return split_train_test(metric); });
    const SnapshotDataset& train = split.first;
    const SnapshotDataset& test = split.second;

    // -------- construct ROMs --------
    std::map<int, DMDModel> dmd_models;
    std::map<int, PODIModel> podi_models;
    std::map<int, double> dmd_seconds, podi_seconds;
    if (want_dmd) stage("fit-dmd", [&] {
      for (int r : cfg.ranks) {
        const auto t0 = Clock::now();
        dmd_models.emplace(r, fit_dmd(train, r));
        dmd_seconds[r] = seconds_since(t0);
      }
      save_dmd_model(dmd_models.at(cfg.detail_rank),
                     track(out / ("dmd_r" + std::to_string(cfg.detail_rank) +
                                  ".dmdmodel")));
    });
    if (want_podi) stage("fit-podi", [&] {
      for (int r : cfg.ranks) {
        const auto t0 = Clock::now();
        podi_models.emplace(r, fit_podi(train, r));
        podi_seconds[r] = seconds_since(t0);
      }
      save_podi_model(podi_models.at(cfg.detail_rank),
                      track(out / ("podi_r" + std::to_string(cfg.detail_rank) +
                                   ".podimodel")));
    });

    // -------- error sweeps --------
    const auto& tv = metric.times();
    auto index_of = [&tv](double t) {
      const auto it = std::lower_bound(tv.begin(), tv.end(), t);
      if (it == tv.end() || *it != t)
        throw ArgumentError("time " + g17(t) + " not on the snapshot grid");
      return static_cast<std::size_t>(std::distance(tv.begin(), it));
    };
    const Surrogate pod_surrogate = [&](int r, double t) -> Eigen::VectorXd {
      const auto U = basis.modes.leftCols(r);
      return U * (U.transpose() * metric.snapshots().col(
                                      static_cast<Eigen::Index>(index_of(t))));
    };
    const Surrogate dmd_surrogate = [&](int r, double t) {
      return evaluate_dmd(dmd_models.at(r), t);
    };
    const Surrogate podi_surrogate = [&](int r, double t) {
      return evaluate_podi(podi_models.at(r), t);
    };

    std::vector<ErrorReport> pod_recon, dmd_recon, dmd_pred, podi_recon, podi_pred;
    std::vector<CompressionReport> dmd_comp, podi_comp;
    stage("errors", [&] {
      pod_recon = error_sweep(pod_surrogate, metric, cfg.ranks, "reconstruction");
      for (std::size_t i = 1; i < pod_recon.size(); ++i) {
        const double prev = pod_recon[i - 1].global_percent;
        const double curr = pod_recon[i].global_percent;
        if (curr > prev + 1e-12 * std::max(1.0, prev))
          throw NumericalError(
              "reconstruction error increased with rank (r=" +
              std::to_string(pod_recon[i].rank) + ")");
      }
      write_error_csv(pod_recon, track(out / "errors_pod_reconstruction.csv"));

      auto sweep_kind = [&](const Surrogate& surrogate, RomKind kind,
                            const std::map<int, double>& fit_seconds,
                            std::vector<ErrorReport>& recon,
                            std::vector<ErrorReport>& pred,
                            std::vector<CompressionReport>& comp,
                            const std::string& name) {
        for (int r : cfg.ranks) {
          auto rr = error_sweep(surrogate, train, {r}, "reconstruction");
          recon.insert(recon.end(), rr.begin(), rr.end());
          const auto t0 = Clock::now();
          auto pr = error_sweep(surrogate, test, {r}, "prediction");
          const double rom_seconds =
              measure ? std::max(fit_seconds.at(r) + seconds_since(t0), 1e-9)
                      : 1.0;
          pred.insert(pred.end(), pr.begin(), pr.end());
          comp.push_back(compression_report(kind, metric.n_dof(), metric.m(),
                                            train.m(), r, cfg.bytes_per_value,
                                            fom_seconds, rom_seconds));
        }
        write_error_csv(recon, track(out / ("errors_" + name +
                                            "_reconstruction.csv")));
        write_error_csv(pred, track(out / ("errors_" + name +
                                           "_prediction.csv")));
        write_summary_csv(pred, comp, track(out / ("summary_" + name + ".csv")));
      };
      if (want_dmd)
        sweep_kind(dmd_surrogate, RomKind::dmd, dmd_seconds, dmd_recon, dmd_pred,
                   dmd_comp, "dmd");
      if (want_podi)
        sweep_kind(podi_surrogate, RomKind::podi, podi_seconds, podi_recon,
                   podi_pred, podi_comp, "podi");

      if (want_dmd && want_podi) {
        auto file = open_output(track(out / "crosscomp_errors.csv"));
        file << "rank,dmd_reconstruction_percent,podi_reconstruction_percent,"
                "dmd_prediction_percent,podi_prediction_percent\n";
        for (std::size_t i = 0; i < cfg.ranks.size(); ++i)
          file << cfg.ranks[i] << ',' << g17(dmd_recon[i].global_percent) << ','
               << g17(podi_recon[i].global_percent) << ','
               << g17(dmd_pred[i].global_percent) << ','
               << g17(podi_pred[i].global_percent) << '\n';
        if (!file) throw IoError("write failed: crosscomp_errors.csv");
      }
    });

    if (want_dmd) stage("mode-spectrum", [&] {
      const DMDModel& model = dmd_models.at(cfg.detail_rank);
      const auto entries = continuous_spectrum(model);
      auto file = open_output(track(out / "dmd_modes.csv"));
      file << "mode,growth_rate_per_s,frequency_hz,amplitude_abs\n";
      for (std::size_t k = 0; k < entries.size(); ++k)
        file << k << ',' << g17(entries[k].growth_rate) << ','
             << g17(entries[k].frequency) << ','
             << g17(std::abs(model.amplitudes(static_cast<Eigen::Index>(k))))
             << '\n';
      if (!file) throw IoError("write failed: dmd_modes.csv");
    });

    // -------- mid cast: dense predictions at the unseen test instants ------
    const std::vector<double>& cast_times = test.times();
    const std::size_t m_cast = cast_times.size();
    const std::size_t p_row = has_p ? layout.offset_of("p", n_cells) : 0;

    Eigen::MatrixXd cast_fom(metric.n_dof(), m_cast);
    for (std::size_t k = 0; k < m_cast; ++k)
      cast_fom.col(static_cast<Eigen::Index>(k)) =
          raw.snapshots().col(static_cast<Eigen::Index>(2 * k + 1));

    auto cast_with = [&](const std::function<Eigen::VectorXd(double)>& eval) {
      Eigen::MatrixXd pred(metric.n_dof(), m_cast);
      parallel_for(m_cast, [&](std::size_t k) {
        pred.col(static_cast<Eigen::Index>(k)) = eval(cast_times[k]);
      });
      if (has_p && cfg.gauge_offset != 0.0)
        pred.middleRows(static_cast<Eigen::Index>(p_row),
                        static_cast<Eigen::Index>(n_cells))
            .array() -= cfg.gauge_offset;
      return pred;
    };
    Eigen::MatrixXd cast_dmd, cast_podi;
    stage("midcast", [&] {
      if (want_dmd)
        cast_dmd = cast_with(
            [&](double t) { return evaluate_dmd(dmd_models.at(cfg.detail_rank), t); });
      if (want_podi)
        cast_podi = cast_with([&](double t) {
          return evaluate_podi(podi_models.at(cfg.detail_rank), t);
        });
    });

    struct CastModel {
      std::string name;
      const Eigen::MatrixXd* states;
    };
    std::vector<CastModel> models;
    models.push_back({"fom", &cast_fom});
    if (want_dmd) models.push_back({"dmd", &cast_dmd});
    if (want_podi) models.push_back({"podi", &cast_podi});

    // -------- probes and spectra --------
    ordered_json probes_report = ordered_json::array();
    stage("probes", [&] {
      for (const auto& spec : cfg.probes) {
        const Probe probe = resolve_probe(mesh, spec.position);
        const auto row = static_cast<Eigen::Index>(
            layout.offset_of(spec.component, n_cells) + probe.cell_index);

        write_timeseries_csv(sample_probe(raw, probe, spec.component),
                             track(out / ("probe_" + spec.label + "_fom.csv")));

        ordered_json entry;
        entry["label"] = spec.label;
        entry["component"] = spec.component;
        entry["position"] = {spec.position[0], spec.position[1], spec.position[2]};
        entry["cell_index"] = probe.cell_index;
        ordered_json cast_report;
        for (const auto& model : models) {
          TimeSeries ts;
          ts.times = cast_times;
          ts.values.resize(m_cast);
          for (std::size_t k = 0; k < m_cast; ++k)
            ts.values[k] = (*model.states)(row, static_cast<Eigen::Index>(k));
          write_timeseries_csv(ts, track(out / ("probe_" + spec.label + "_cast_" +
                                                model.name + ".csv")));
          const Spectrum spec_amp = amplitude_spectrum(ts);
          write_amplitude_csv(spec_amp, track(out / ("spectrum_" + spec.label +
                                                     "_" + model.name + ".csv")));
          const DominantBin dom = dominant_frequency(spec_amp);
          cast_report[model.name] = {{"dominant_hz", dom.frequency},
                                     {"amplitude", dom.amplitude},
                                     {"bin", dom.bin}};
        }
        entry["cast"] = std::move(cast_report);
        probes_report.push_back(std::move(entry));
      }
    });

    // -------- coherent structures and wake statistics --------
    ordered_json flow_report;
    stage("flow", [&] {
      if (!mesh.is_structured() || !has_vel) {
        flow_report["skipped"] = !has_vel ? "dataset has no velocity components"
                                          : "mesh is not structured";
        return;
      }
      const std::size_t k_last = m_cast - 1;
      flow_report["snapshot_time"] = cast_times[k_last];
      flow_report["q_level_nondimensional"] = cfg.q_level;
      flow_report["wake_threshold"] = cfg.wake_threshold;

      const Field vel_fom = velocity_of(cast_fom.col(static_cast<Eigen::Index>(k_last)),
                                        layout, n_cells);
      const GradientField grad_fom = velocity_gradient(mesh, vel_fom);
      const WakeMask wake = wake_mask(grad_fom, cfg.wake_threshold);
      flow_report["wake_cells"] = wake.count;

      ordered_json iso_counts;
      iso_counts["fom"] =
          q_isosurface_export(q_criterion(grad_fom), mesh, cfg.q_level,
                              track(out / "q_iso_fom.csv"), cfg.diameter, cfg.u0);
      for (const auto& model : models) {
        if (model.name == "fom") continue;
        const Field vel =
            velocity_of(model.states->col(static_cast<Eigen::Index>(k_last)),
                        layout, n_cells);
        const GradientField grad = velocity_gradient(mesh, vel);
        iso_counts[model.name] = q_isosurface_export(
            q_criterion(grad), mesh, cfg.q_level,
            track(out / ("q_iso_" + model.name + ".csv")), cfg.diameter, cfg.u0);
        if (wake.count > 0) {
          const double scale = cfg.u0 != 0.0 ? std::abs(cfg.u0) : 1.0;
          Eigen::VectorXd err(static_cast<Eigen::Index>(n_cells));
          for (std::size_t i = 0; i < n_cells; ++i) {
            double s2 = 0;
            for (int c = 0; c < 3; ++c) {
              const double d = vel.comps[c](static_cast<Eigen::Index>(i)) -
                               vel_fom.comps[c](static_cast<Eigen::Index>(i));
              s2 += d * d;
            }
            err(static_cast<Eigen::Index>(i)) = std::sqrt(s2) / scale;
          }
          const WeightedHistogram hist = wake_error_histogram(
              make_scalar_field("velocity_error", std::move(err)), wake, mesh,
              cfg.histogram_bins);
          write_histogram_csv(hist, track(out / ("hist_" + model.name + ".csv")));
        }
      }
      if (wake.count == 0)
        flow_report["histograms_skipped"] = "wake mask selects no cells";
      flow_report["iso_cells"] = std::move(iso_counts);
    });

    // -------- surface loads --------
    ordered_json forces_report;
    SphereSurface surface;
    std::vector<std::size_t> panel_cells;
    const bool do_surface = has_p;
    if (do_surface) stage("forces", [&] {
      surface = generate_sphere_surface(
          static_cast<std::size_t>(cfg.surface_panels), cfg.diameter,
          {0.0, 0.0, 0.0}, cfg.seed);
      panel_cells = nearest_cells(mesh, surface.centers);
      if (cfg.u0 == 0.0) {
        forces_report["skipped"] = "u0 = 0 leaves no dynamic pressure";
        return;
      }
      for (const auto& model : models) {
        Eigen::MatrixXd panel_p(surface.n_panels(), m_cast);
        for (std::size_t j = 0; j < surface.n_panels(); ++j)
          panel_p.row(static_cast<Eigen::Index>(j)) = model.states->row(
              static_cast<Eigen::Index>(p_row + panel_cells[j]));
        const ForceHistory forces = force_coefficients(surface, panel_p,
                                                       cast_times, cfg.rho0,
                                                       cfg.u0);
        write_forces_csv(forces, track(out / ("forces_" + model.name + ".csv")));
        forces_report[model.name] = {{"cd_mean", mean_of(forces.cd)},
                                     {"cl_mean", mean_of(forces.cl)}};
      }
    });
    else forces_report["skipped"] = "dataset has no pressure block";

    // -------- acoustic evaluation --------
    ordered_json acoustics_report;
    stage("acoustics", [&] {
      const double dt_cast = test.dt();
      const double f_max = 0.5 / dt_cast;
      const double mfp_value = mfp(cfg.acoustics.c0, f_max, cfg.diameter);
      acoustics_report["f_max_hz"] = f_max;
      acoustics_report["source_extent_m"] = cfg.diameter;
      acoustics_report["mfp"] = mfp_value;
      acoustics_report["mach"] = cfg.acoustics.mach();

      struct MicSignals {
        std::vector<LevelSpectrum> levels;  // one per model
        std::vector<ordered_json> dominant;
      };
      std::vector<MicSignals> per_mic(cfg.mics.size());

      for (const auto& model : models) {
        std::vector<LighthillField> tensors;
        if (has_vel) {
          tensors.resize(m_cast);
          for (std::size_t k = 0; k < m_cast; ++k) {
            Field vel = velocity_of(model.states->col(static_cast<Eigen::Index>(k)),
                                    layout, n_cells);
            vel.comps[0].array() -= cfg.acoustics.u0;
            const Field p_field =
                has_p ? make_scalar_field(
                            "pressure",
                            model.states->col(static_cast<Eigen::Index>(k))
                                .segment(static_cast<Eigen::Index>(p_row),
                                         static_cast<Eigen::Index>(n_cells)))
                      : make_scalar_field(
                            "pressure",
                            Eigen::VectorXd::Zero(
                                static_cast<Eigen::Index>(n_cells)));
            tensors[k] = lighthill_tensor(vel, p_field, cfg.rho0);
          }
        }
        Eigen::MatrixXd panel_p;
        if (do_surface) {
          panel_p.resize(surface.n_panels(), m_cast);
          for (std::size_t j = 0; j < surface.n_panels(); ++j)
            panel_p.row(static_cast<Eigen::Index>(j)) = model.states->row(
                static_cast<Eigen::Index>(p_row + panel_cells[j]));
        }

        for (std::size_t mi = 0; mi < cfg.mics.size(); ++mi) {
          const Microphone& mic = cfg.mics[mi];
          DipoleSignal dipole;
          dipole.times = cast_times;
          dipole.far = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_cast));
          dipole.near = dipole.far;
          if (do_surface)
            dipole = dipole_pressure(surface, panel_p, cast_times, mic.position,
                                     cfg.acoustics);
          QuadrupoleSignal quad;
          quad.times = cast_times;
          quad.far = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_cast));
          quad.mid = quad.far;
          quad.near = quad.far;
          if (has_vel)
            quad = quadrupole_pressure(mesh, tensors, cast_times, mic.position,
                                       cfg.acoustics);
          write_acoustic_csv(dipole, quad,
                             track(out / ("acoustic_" + mic.label + "_" +
                                          model.name + ".csv")));

          TimeSeries total;
          total.times = cast_times;
          const Eigen::VectorXd sum = dipole.total() + quad.total();
          total.values.assign(sum.data(), sum.data() + sum.size());
          const Spectrum amp = amplitude_spectrum(total);
          per_mic[mi].levels.push_back(spectrum_level(amp, cfg.acoustics.p_ref));
          const DominantBin dom = dominant_frequency(amp);
          const double level_db =
              dom.amplitude > 0
                  ? 20.0 * (std::log10(dom.amplitude) -
                            std::log10(cfg.acoustics.p_ref))
                  : -400.0;
          per_mic[mi].dominant.push_back({{"model", model.name},
                                          {"dominant_hz", dom.frequency},
                                          {"spl_db", level_db}});
        }
      }

      ordered_json mics_report = ordered_json::array();
      for (std::size_t mi = 0; mi < cfg.mics.size(); ++mi) {
        const Microphone& mic = cfg.mics[mi];
        auto file = open_output(track(out / ("spl_" + mic.label + ".csv")));
        file << "frequency_hz";
        for (const auto& model : models) file << ',' << model.name << "_db";
        file << '\n';
        const auto& freqs = per_mic[mi].levels.front().frequencies;
        for (std::size_t b = 0; b < freqs.size(); ++b) {
          file << g17(freqs[b]);
          for (const auto& spectrum : per_mic[mi].levels)
            file << ',' << g17(spectrum.levels_db[b]);
          file << '\n';
        }
        if (!file) throw IoError("write failed: spl_" + mic.label + ".csv");

        ordered_json entry;
        entry["label"] = mic.label;
        entry["position"] = {mic.position[0], mic.position[1], mic.position[2]};
        entry["mfp"] = mfp_value;
        entry["compact"] = mfp_value > 1.0;
        entry["models"] = per_mic[mi].dominant;
        mics_report.push_back(std::move(entry));
      }
      acoustics_report["mics"] = std::move(mics_report);
    });

    // -------- report bundle --------
    result.report_path = out / "report.json";
    stage("report", [&] {
      ordered_json report;
      report["tool"] = "hydrorom";

      ordered_json config;
      config["source"] = cfg.input_path.empty() ? std::string("synthetic")
                                                : cfg.input_path;
      config["seed"] = cfg.seed;
      config["ranks"] = cfg.ranks;
      config["detail_rank"] = cfg.detail_rank;
      config["rom"] = cfg.rom;
      config["gauge_offset"] = cfg.gauge_offset;
      config["diameter"] = cfg.diameter;
      config["u0"] = cfg.u0;
      config["rho0"] = cfg.rho0;
      config["c0"] = cfg.acoustics.c0;
      config["mean_flow"] = cfg.acoustics.u0;
      config["p_ref"] = cfg.acoustics.p_ref;
      config["surface_panels"] = cfg.surface_panels;
      config["timing_mode"] = cfg.timing_mode;
      report["config"] = std::move(config);

      ordered_json dataset;
      dataset["n_cells"] = n_cells;
      dataset["n_dof"] = metric.n_dof();
      dataset["snapshots"] = metric.m();
      dataset["dt"] = metric.dt();
      dataset["t0"] = metric.t0();
      dataset["layout"] = layout.components();
      dataset["train_count"] = train.m();
      dataset["test_count"] = test.m();
      report["dataset"] = std::move(dataset);

      ordered_json energy = ordered_json::array();
      for (int r : cfg.ranks)
        energy.push_back({{"rank", r},
                          {"cumulative_energy",
                           cumulative_energy(basis.spectrum, r)}});
      report["pod"] = {{"max_rank", max_rank},
                       {"cumulative_energy", std::move(energy)}};

      auto globals = [](const std::vector<ErrorReport>& reports) {
        ordered_json arr = ordered_json::array();
        for (const auto& rep : reports)
          arr.push_back({{"rank", rep.rank},
                         {"global_percent", rep.global_percent}});
        return arr;
      };
      ordered_json errors;
      errors["pod_reconstruction"] = globals(pod_recon);
      if (want_dmd)
        errors["dmd"] = {{"reconstruction", globals(dmd_recon)},
                         {"prediction", globals(dmd_pred)}};
      if (want_podi)
        errors["podi"] = {{"reconstruction", globals(podi_recon)},
                          {"prediction", globals(podi_pred)}};
      report["errors"] = std::move(errors);

      ordered_json compression = ordered_json::array();
      auto comp_entry = [](const CompressionReport& c) {
        return ordered_json{{"kind", c.kind == RomKind::dmd ? "dmd" : "podi"},
                            {"rank", c.rank},
                            {"compression_level", c.compression_level},
                            {"fom_floats", c.fom_floats},
                            {"rom_floats", c.rom_floats},
                            {"fom_bytes", c.fom_bytes},
                            {"rom_bytes", c.rom_bytes},
                            {"speedup", c.speedup}};
      };
      for (const auto& c : dmd_comp) compression.push_back(comp_entry(c));
      for (const auto& c : podi_comp) compression.push_back(comp_entry(c));
      report["compression"] = std::move(compression);

      report["probes"] = std::move(probes_report);
      report["flow"] = std::move(flow_report);
      report["forces"] = std::move(forces_report);
      report["acoustics"] = std::move(acoustics_report);

      ordered_json timings;
      timings["mode"] = cfg.timing_mode;
      timings["fom_seconds"] = fom_seconds;
      auto second_list = [&](const std::map<int, double>& s) {
        ordered_json arr = ordered_json::array();
        for (const auto& [r, v] : s)
          arr.push_back({{"rank", r}, {"seconds", measure ? v : 1.0}});
        return arr;
      };
      if (want_dmd) timings["dmd_fit_seconds"] = second_list(dmd_seconds);
      if (want_podi) timings["podi_fit_seconds"] = second_list(podi_seconds);
      report["timings"] = std::move(timings);

      ordered_json files = ordered_json::array();
      for (const auto& p : written) files.push_back(p.filename().string());
      files.push_back("report.json");
      report["files"] = std::move(files);

      auto file = open_output(track(result.report_path));
      file << report.dump(2) << '\n';
      if (!file) throw IoError("write failed: report.json");
    });
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
  return result;
}

}  // namespace rom

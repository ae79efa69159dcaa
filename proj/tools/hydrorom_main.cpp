#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hydrorom/decomposition.hpp"
#include "hydrorom/dmd.hpp"
#include "hydrorom/flow_analysis.hpp"
#include "hydrorom/fwh.hpp"
#include "hydrorom/metrics.hpp"
#include "hydrorom/pipeline.hpp"
#include "hydrorom/podi.hpp"
#include "hydrorom/spectral.hpp"
#include "hydrorom/synthetic.hpp"

namespace {

using namespace rom;

std::vector<int> parse_rank_list(const std::string& s) {
  std::vector<int> ranks;
  for (const auto& tok : split_csv(s)) ranks.push_back(to_int(tok, "ranks"));
  if (ranks.empty()) throw ArgumentError("rank list is empty");
  return ranks;
}

Field velocity_field(const Eigen::VectorXd& state, const FieldLayout& layout,
                     std::size_t n_cells) {
  for (auto& f : unpack_state(state, layout, n_cells))
    if (f.name == "velocity") return f;
  throw ArgumentError("dataset has no velocity components");
}

/// "label,x,y,z[,component]"
ProbeSpec parse_probe_spec(const std::string& s) {
  const auto parts = split_csv(s);
  if (parts.size() < 4 || parts.size() > 5)
    throw ArgumentError("probe needs 'label,x,y,z[,component]', got '" + s + "'");
  ProbeSpec p;
  p.label = parts[0];
  p.position = {to_double(parts[1], "probe x"), to_double(parts[2], "probe y"),
                to_double(parts[3], "probe z")};
  if (parts.size() > 4 && !parts[4].empty()) p.component = parts[4];
  return p;
}

/// "A" | "B" (reference positions scaled by D) or "label,x,y,z".
Microphone parse_mic_spec(const std::string& s, double diameter) {
  const auto parts = split_csv(s);
  if (parts.size() == 1) {
    if (parts[0] == "A") return {"A", {0.0, 2.0 * diameter, 0.0}};
    if (parts[0] == "B") return {"B", {2.0 * diameter, 2.0 * diameter, 0.0}};
    throw ArgumentError("unknown microphone label '" + parts[0] +
                        "' (use A, B or label,x,y,z)");
  }
  if (parts.size() != 4)
    throw ArgumentError("mic needs 'label,x,y,z' or a reference label, got '" +
                        s + "'");
  return {parts[0], {to_double(parts[1], "mic x"), to_double(parts[2], "mic y"),
                     to_double(parts[3], "mic z")}};
}

SnapshotDataset apply_gauge(const SnapshotDataset& ds, double gauge) {
  if (gauge != 0.0 && ds.layout().has("p"))
    return pressure_gauge_offset(ds, gauge);
  return ds;
}

Eigen::MatrixXd panel_pressure_matrix(const SnapshotDataset& ds,
                                      const SphereSurface& surface,
                                      const std::vector<std::size_t>& cells) {
  const auto p_row = static_cast<Eigen::Index>(
      ds.layout().offset_of("p", ds.n_cells()));
  Eigen::MatrixXd panel_p(surface.n_panels(), ds.snapshots().cols());
  for (std::size_t j = 0; j < surface.n_panels(); ++j)
    panel_p.row(static_cast<Eigen::Index>(j)) =
        ds.snapshots().row(p_row + static_cast<Eigen::Index>(cells[j]));
  return panel_p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydrorom: snapshot ROMs (DMD / POD-interpolation) with flow and"
               " acoustic post-processing"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Synthesize a wake snapshot dataset");
  std::string gen_config, gen_out = "dataset.romsnap";
  std::uint64_t gen_seed = 0;
  int gen_m = 0, gen_nx = 0, gen_ny = 0, gen_nz = 0;
  double gen_noise = 0;
  gen->add_option("--config", gen_config, "key = value config file (synth.* keys)");
  gen->add_option("--out", gen_out, "output dataset path");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "noise / lattice seed");
  auto* gen_m_opt = gen->add_option("--m", gen_m, "snapshot count");
  auto* gen_noise_opt = gen->add_option("--noise", gen_noise, "noise stddev");
  auto* gen_nx_opt = gen->add_option("--nx", gen_nx, "cells in x");
  auto* gen_ny_opt = gen->add_option("--ny", gen_ny, "cells in y");
  auto* gen_nz_opt = gen->add_option("--nz", gen_nz, "cells in z");
  gen->callback([&] {
    const KeyValues kv =
        gen_config.empty() ? KeyValues{} : parse_key_values(gen_config);
    SynthConfig sc = parse_synth_config(kv);
    if (gen_seed_opt->count()) sc.seed = gen_seed;
    if (gen_m_opt->count()) sc.m = gen_m;
    if (gen_noise_opt->count()) sc.noise = gen_noise;
    if (gen_nx_opt->count()) sc.nx = gen_nx;
    if (gen_ny_opt->count()) sc.ny = gen_ny;
    if (gen_nz_opt->count()) sc.nz = gen_nz;
    const SnapshotDataset ds = generate_synthetic(sc);
    save_dataset(ds, gen_out);
    std::printf("wrote %s: %zu cells, %zu snapshots at %g Hz\n", gen_out.c_str(),
                ds.n_cells(), ds.m(), sc.sample_rate);
  });

  // ---- decompose ----
  auto* dec = app.add_subcommand("decompose",
                                 "Singular spectrum and storage summary");
  std::string dec_input, dec_ranks_str = "2,6,10,20", dec_out = ".";
  dec->add_option("--input", dec_input, "dataset path")->required();
  dec->add_option("--ranks,--rank", dec_ranks_str, "comma-separated rank list");
  dec->add_option("--out", dec_out, "output directory");
  dec->callback([&] {
    const SnapshotDataset ds = load_dataset(dec_input);
    std::vector<int> ranks = parse_rank_list(dec_ranks_str);
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    const PODBasis basis = truncated_svd(ds.snapshots(), ranks.back());
    const std::filesystem::path out = dec_out;
    write_spectrum_csv(basis.spectrum, out / "spectrum.csv");

    const std::size_t m_train = (ds.m() + 1) / 2;
    auto file = open_output(out / "decompose_summary.csv");
    file << "rank,cumulative_energy,truncation_spectral_rel,"
            "truncation_frobenius_rel,compression_level\n";
    const auto len = static_cast<int>(basis.spectrum.sigma.size());
    const double s1 = basis.spectrum.sigma(0);
    const double fro = basis.spectrum.sigma.norm();
    for (int r : ranks) {
      const TruncationError te =
          r < len ? truncation_error(basis.spectrum, r) : TruncationError{};
      const double level =
          0.5 * (compression_report(RomKind::dmd, ds.n_dof(), ds.m(), m_train, r,
                                    8.0, 1.0, 1.0)
                     .compression_level +
                 compression_report(RomKind::podi, ds.n_dof(), ds.m(), m_train,
                                    r, 8.0, 1.0, 1.0)
                     .compression_level);
      file << r << ',' << g17(cumulative_energy(basis.spectrum, r)) << ','
           << g17(s1 > 0 ? te.spectral / s1 : 0.0) << ','
           << g17(fro > 0 ? te.frobenius / fro : 0.0) << ',' << g17(level)
           << '\n';
      std::printf("rank %d: energy %.6f, compression level %.4f\n", r,
                  cumulative_energy(basis.spectrum, r), level);
    }
    if (!file) throw IoError("write failed: decompose_summary.csv");
  });

  // ---- fit-dmd / fit-podi ----
  auto* fdmd = app.add_subcommand("fit-dmd",
                                  "Fit a spectral propagator model on the train split");
  std::string fdmd_input, fdmd_out;
  int fdmd_rank = 10;
  double fdmd_gauge = 1.0;
  fdmd->add_option("--input", fdmd_input, "dataset path")->required();
  fdmd->add_option("--rank", fdmd_rank, "model rank");
  fdmd->add_option("--gauge", fdmd_gauge,
                   "pressure offset applied before fitting");
  fdmd->add_option("--out", fdmd_out, "model path (default dmd_r<rank>.dmdmodel)");
  fdmd->callback([&] {
    const SnapshotDataset metric = apply_gauge(load_dataset(fdmd_input), fdmd_gauge);
    const auto [train, test] = split_train_test(metric);
    const DMDModel model = fit_dmd(train, fdmd_rank);
    const std::string path = fdmd_out.empty()
                                 ? "dmd_r" + std::to_string(fdmd_rank) + ".dmdmodel"
                                 : fdmd_out;
    save_dmd_model(model, path);
    std::printf("wrote %s (rank %d, %zu train snapshots)\n", path.c_str(),
                model.rank, train.m());
  });

  auto* fpodi = app.add_subcommand(
      "fit-podi", "Fit an interpolated-coefficient model on the train split");
  std::string fpodi_input, fpodi_out;
  int fpodi_rank = 10;
  double fpodi_gauge = 1.0;
  fpodi->add_option("--input", fpodi_input, "dataset path")->required();
  fpodi->add_option("--rank", fpodi_rank, "model rank");
  fpodi->add_option("--gauge", fpodi_gauge,
                    "pressure offset applied before fitting");
  fpodi->add_option("--out", fpodi_out,
                    "model path (default podi_r<rank>.podimodel)");
  fpodi->callback([&] {
    const SnapshotDataset metric =
        apply_gauge(load_dataset(fpodi_input), fpodi_gauge);
    const auto [train, test] = split_train_test(metric);
    const PODIModel model = fit_podi(train, fpodi_rank);
    const std::string path =
        fpodi_out.empty() ? "podi_r" + std::to_string(fpodi_rank) + ".podimodel"
                          : fpodi_out;
    save_podi_model(model, path);
    std::printf("wrote %s (rank %d, %zu train snapshots)\n", path.c_str(),
                model.rank, train.m());
  });

  // ---- errors ----
  auto* errs = app.add_subcommand(
      "errors", "Reconstruction / prediction error sweeps for saved models");
  std::string errs_input, errs_out = ".";
  std::vector<std::string> errs_dmd, errs_podi;
  double errs_gauge = 1.0;
  errs->add_option("--input", errs_input, "dataset path")->required();
  errs->add_option("--dmd", errs_dmd, "spectral model file (repeatable)");
  errs->add_option("--podi", errs_podi,
                   "interpolated-coefficient model file (repeatable)");
  errs->add_option("--gauge", errs_gauge, "pressure offset used when fitting");
  errs->add_option("--out", errs_out, "output directory");
  errs->callback([&] {
    if (errs_dmd.empty() && errs_podi.empty())
      throw ArgumentError("errors needs at least one --dmd or --podi model");
    const SnapshotDataset metric = apply_gauge(load_dataset(errs_input), errs_gauge);
    const auto [train, test] = split_train_test(metric);
    const std::filesystem::path out = errs_out;

    auto sweep_models = [&](auto loader, auto evaluator,
                            const std::vector<std::string>& paths,
                            const std::string& name) {
      using Model = decltype(loader(std::string{}));
      std::vector<Model> models;
      for (const auto& p : paths) models.push_back(loader(p));
      std::sort(models.begin(), models.end(),
                [](const Model& a, const Model& b) { return a.rank < b.rank; });
      std::vector<ErrorReport> recon, pred;
      for (const Model& model : models) {
        const Surrogate surrogate = [&](int, double t) {
          return evaluator(model, t);
        };
        auto rr = error_sweep(surrogate, train, {model.rank}, "reconstruction");
        auto pr = error_sweep(surrogate, test, {model.rank}, "prediction");
        recon.insert(recon.end(), rr.begin(), rr.end());
        pred.insert(pred.end(), pr.begin(), pr.end());
        std::printf("%s r=%d: reconstruction %.6g %%, prediction %.6g %%\n",
                    name.c_str(), model.rank, rr.front().global_percent,
                    pr.front().global_percent);
      }
      write_error_csv(recon, out / ("errors_" + name + "_reconstruction.csv"));
      write_error_csv(pred, out / ("errors_" + name + "_prediction.csv"));
    };
    if (!errs_dmd.empty())
      sweep_models([](const std::string& p) { return load_dmd_model(p); },
                   [](const DMDModel& m, double t) { return evaluate_dmd(m, t); },
                   errs_dmd, "dmd");
    if (!errs_podi.empty())
      sweep_models([](const std::string& p) { return load_podi_model(p); },
                   [](const PODIModel& m, double t) { return evaluate_podi(m, t); },
                   errs_podi, "podi");
  });

  // ---- probes ----
  auto* prb = app.add_subcommand("probes", "Full-rate point samples");
  std::string prb_input, prb_out = ".";
  double prb_diameter = 0.01;
  std::vector<std::string> prb_specs;
  prb->add_option("--input", prb_input, "dataset path")->required();
  prb->add_option("--probe", prb_specs,
                  "'label,x,y,z[,component]' (repeatable; default wake/quiet pair)");
  prb->add_option("--diameter", prb_diameter,
                  "reference length for the default probe positions");
  prb->add_option("--out", prb_out, "output directory");
  prb->callback([&] {
    const SnapshotDataset ds = load_dataset(prb_input);
    std::vector<ProbeSpec> specs;
    for (const auto& s : prb_specs) specs.push_back(parse_probe_spec(s));
    if (specs.empty()) {
      const double d = prb_diameter;
      specs = {{"wake", {2.0 * d, 0.0, 0.0}, "w"},
               {"quiet", {2.0 * d, 0.0, 2.0 * d}, "w"}};
    }
    const std::filesystem::path out = prb_out;
    for (const auto& spec : specs) {
      const Probe probe = resolve_probe(ds.mesh(), spec.position);
      write_timeseries_csv(sample_probe(ds, probe, spec.component),
                           out / ("probe_" + spec.label + "_fom.csv"));
      std::printf("probe %s: cell %zu\n", spec.label.c_str(), probe.cell_index);
    }
  });

  // ---- fft ----
  auto* fft = app.add_subcommand("fft", "Amplitude spectrum at a probe");
  std::string fft_input, fft_probe, fft_out = "spectrum.csv";
  fft->add_option("--input", fft_input, "dataset path")->required();
  fft->add_option("--probe", fft_probe, "'x,y,z[,component]' (component default w)")
      ->required();
  fft->add_option("--out", fft_out, "spectrum CSV path");
  fft->callback([&] {
    const SnapshotDataset ds = load_dataset(fft_input);
    const auto parts = split_csv(fft_probe);
    if (parts.size() < 3 || parts.size() > 4)
      throw ArgumentError("probe needs 'x,y,z[,component]', got '" + fft_probe +
                          "'");
    const std::array<double, 3> pos = {to_double(parts[0], "probe x"),
                                       to_double(parts[1], "probe y"),
                                       to_double(parts[2], "probe z")};
    const std::string component = parts.size() > 3 ? parts[3] : "w";
    const Probe probe = resolve_probe(ds.mesh(), pos);
    const Spectrum spectrum =
        amplitude_spectrum(sample_probe(ds, probe, component));
    write_amplitude_csv(spectrum, fft_out);
    const DominantBin dom = dominant_frequency(spectrum);
    std::printf("dominant %.17g Hz (bin %zu, amplitude %.17g)\n", dom.frequency,
                dom.bin, dom.amplitude);
  });

  // ---- qcrit ----
  auto* qc = app.add_subcommand("qcrit", "Q-criterion iso-surface cell export");
  std::string qc_input, qc_out = "q_iso.csv";
  int qc_snapshot = -1;
  double qc_level = 4.0, qc_diameter = 0.01, qc_u0 = 1.0;
  qc->add_option("--input", qc_input, "dataset path")->required();
  qc->add_option("--snapshot", qc_snapshot, "snapshot index (default last)");
  qc->add_option("--level", qc_level, "iso level, q D^2 / u0^2");
  qc->add_option("--diameter", qc_diameter, "reference length D");
  qc->add_option("--u0", qc_u0, "reference velocity");
  qc->add_option("--out", qc_out, "iso export CSV path");
  qc->callback([&] {
    const SnapshotDataset ds = load_dataset(qc_input);
    const std::size_t k =
        qc_snapshot < 0 ? ds.m() - 1 : static_cast<std::size_t>(qc_snapshot);
    if (k >= ds.m())
      throw ArgumentError("snapshot index " + std::to_string(qc_snapshot) +
                          " outside [0, " + std::to_string(ds.m() - 1) + "]");
    const Field vel = velocity_field(ds.column(k), ds.layout(), ds.n_cells());
    const GradientField grad = velocity_gradient(ds.mesh(), vel);
    const std::size_t count = q_isosurface_export(
        q_criterion(grad), ds.mesh(), qc_level, qc_out, qc_diameter, qc_u0);
    std::printf("exported %zu cells at level %g\n", count, qc_level);
  });

  // ---- forces ----
  auto* frc = app.add_subcommand("forces",
                                 "Drag/lift coefficients on a panelized sphere");
  std::string frc_input, frc_out = "forces.csv";
  int frc_panels = 400;
  double frc_diameter = 0.01, frc_u0 = 1.0, frc_rho0 = 1000.0;
  std::uint64_t frc_seed = 0;
  frc->add_option("--input", frc_input, "dataset path")->required();
  frc->add_option("--panels", frc_panels, "panel count");
  frc->add_option("--diameter", frc_diameter, "sphere diameter");
  frc->add_option("--u0", frc_u0, "reference velocity");
  frc->add_option("--rho0", frc_rho0, "fluid density");
  frc->add_option("--seed", frc_seed, "panel lattice seed");
  frc->add_option("--out", frc_out, "forces CSV path");
  frc->callback([&] {
    const SnapshotDataset ds = load_dataset(frc_input);
    if (!ds.layout().has("p"))
      throw ArgumentError("dataset has no pressure block");
    if (frc_u0 == 0.0)
      throw ArgumentError("u0 must be nonzero to form a dynamic pressure");
    const SphereSurface surface = generate_sphere_surface(
        static_cast<std::size_t>(frc_panels), frc_diameter, {0, 0, 0}, frc_seed);
    const auto cells = nearest_cells(ds.mesh(), surface.centers);
    const ForceHistory forces =
        force_coefficients(surface, panel_pressure_matrix(ds, surface, cells),
                           ds.times(), frc_rho0, frc_u0);
    write_forces_csv(forces, frc_out);
    double cd = 0, cl = 0;
    for (std::size_t i = 0; i < forces.cd.size(); ++i) {
      cd += forces.cd[i];
      cl += forces.cl[i];
    }
    const auto n = static_cast<double>(forces.cd.size());
    std::printf("mean cd %.6g, mean cl %.6g over %zu instants\n", cd / n, cl / n,
                forces.cd.size());
  });

  // ---- fwh ----
  auto* fwhc = app.add_subcommand(
      "fwh", "Compact-source loading + volume acoustic signals at microphones");
  std::string fwh_input, fwh_out = ".";
  std::vector<std::string> fwh_mics;
  int fwh_panels = 400;
  double fwh_c0 = 1500.0, fwh_rho0 = 1000.0, fwh_pref = 1e-6, fwh_u0 = 0.0;
  double fwh_diameter = 0.01;
  std::uint64_t fwh_seed = 0;
  fwhc->add_option("--input", fwh_input, "dataset path")->required();
  fwhc->add_option("--mic", fwh_mics,
                   "'A' | 'B' | 'label,x,y,z' (repeatable; default A and B)");
  fwhc->add_option("--c0", fwh_c0, "sound speed");
  fwhc->add_option("--rho0", fwh_rho0, "fluid density");
  fwhc->add_option("--p-ref", fwh_pref, "level reference pressure");
  fwhc->add_option("--u0", fwh_u0, "uniform mean flow along x");
  fwhc->add_option("--diameter", fwh_diameter, "source body diameter");
  fwhc->add_option("--panels", fwh_panels, "loading surface panel count");
  fwhc->add_option("--seed", fwh_seed, "panel lattice seed");
  fwhc->add_option("--out", fwh_out, "output directory");
  fwhc->callback([&] {
    const SnapshotDataset ds = load_dataset(fwh_input);
    const AcousticConfig config{fwh_c0, fwh_rho0, fwh_u0, fwh_pref};
    std::vector<Microphone> mics;
    for (const auto& s : fwh_mics) mics.push_back(parse_mic_spec(s, fwh_diameter));
    if (mics.empty())
      mics = {parse_mic_spec("A", fwh_diameter), parse_mic_spec("B", fwh_diameter)};

    const std::vector<double>& times = ds.times();
    const std::size_t m = ds.m();
    const bool has_p = ds.layout().has("p");
    const bool has_vel = ds.layout().has_velocity();

    std::vector<LighthillField> tensors;
    if (has_vel) {
      tensors.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        Field vel = velocity_field(ds.column(k), ds.layout(), ds.n_cells());
        vel.comps[0].array() -= fwh_u0;
        const Field p_field =
            has_p ? make_scalar_field("pressure",
                                      ds.column(k).segment(
                                          static_cast<Eigen::Index>(
                                              ds.layout().offset_of("p", ds.n_cells())),
                                          static_cast<Eigen::Index>(ds.n_cells())))
                  : make_scalar_field("pressure",
                                      Eigen::VectorXd::Zero(
                                          static_cast<Eigen::Index>(ds.n_cells())));
        tensors[k] = lighthill_tensor(vel, p_field, fwh_rho0);
      }
    }
    SphereSurface surface;
    Eigen::MatrixXd panel_p;
    if (has_p) {
      surface = generate_sphere_surface(static_cast<std::size_t>(fwh_panels),
                                        fwh_diameter, {0, 0, 0}, fwh_seed);
      panel_p = panel_pressure_matrix(ds, surface,
                                      nearest_cells(ds.mesh(), surface.centers));
    }

    const std::filesystem::path out = fwh_out;
    for (const Microphone& mic : mics) {
      DipoleSignal dipole;
      dipole.times = times;
      dipole.far = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      dipole.near = dipole.far;
      if (has_p)
        dipole = dipole_pressure(surface, panel_p, times, mic.position, config);
      QuadrupoleSignal quad;
      quad.times = times;
      quad.far = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      quad.mid = quad.far;
      quad.near = quad.far;
      if (has_vel)
        quad = quadrupole_pressure(ds.mesh(), tensors, times, mic.position, config);
      write_acoustic_csv(dipole, quad, out / ("acoustic_" + mic.label + ".csv"));

      TimeSeries total;
      total.times = times;
      const Eigen::VectorXd sum = dipole.total() + quad.total();
      total.values.assign(sum.data(), sum.data() + sum.size());
      const Spectrum amp = amplitude_spectrum(total);
      write_level_csv(spectrum_level(amp, fwh_pref),
                      out / ("spl_" + mic.label + ".csv"));
      const DominantBin dom = dominant_frequency(amp);
      std::printf("mic %s: dominant %.17g Hz, amplitude %.17g Pa\n",
                  mic.label.c_str(), dom.frequency, dom.amplitude);
    }
  });

  // ---- report ----
  auto* rep = app.add_subcommand(
      "report", "Full pipeline: acquire, fit, cast, analyze, report bundle");
  std::string rep_config, rep_input, rep_ranks, rep_rom, rep_out;
  std::uint64_t rep_seed = 0;
  rep->add_option("--config", rep_config, "key = value pipeline config file");
  auto* rep_input_opt = rep->add_option("--input", rep_input, "dataset path");
  auto* rep_ranks_opt =
      rep->add_option("--ranks", rep_ranks, "comma-separated rank list");
  auto* rep_rom_opt = rep->add_option("--rom", rep_rom, "dmd | podi | both");
  auto* rep_out_opt = rep->add_option("--out", rep_out, "output directory");
  auto* rep_seed_opt = rep->add_option("--seed", rep_seed, "generator seed");
  rep->callback([&] {
    const KeyValues kv =
        rep_config.empty() ? KeyValues{} : parse_key_values(rep_config);
    PipelineConfig cfg = parse_pipeline_config(kv);
    if (rep_input_opt->count()) cfg.input_path = rep_input;
    if (rep_ranks_opt->count()) cfg.ranks = parse_rank_list(rep_ranks);
    if (rep_rom_opt->count()) cfg.rom = rep_rom;
    if (rep_out_opt->count()) cfg.out_dir = rep_out;
    if (rep_seed_opt->count()) {
      cfg.seed = rep_seed;
      cfg.synth.seed = rep_seed;
    }
    const PipelineResult result = run_pipeline(cfg);
    std::printf("wrote %zu files; report at %s\n", result.written.size(),
                result.report_path.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

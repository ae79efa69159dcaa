#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrorom/pipeline.hpp"

using namespace rom;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Small, fast end-to-end setup: 288 cells, 24 snapshots, two ranks.
PipelineConfig small_pipeline(const fs::path& out) {
  PipelineConfig cfg;
  cfg.out_dir = out;
  cfg.synth.nx = 8;
  cfg.synth.ny = 6;
  cfg.synth.nz = 6;
  cfg.synth.m = 24;
  cfg.synth.seed = 9;
  cfg.seed = 9;
  cfg.ranks = {2, 4};
  cfg.detail_rank = 4;
  cfg.surface_panels = 16;
  cfg.histogram_bins = 8;
  cfg.diameter = cfg.synth.diameter;
  cfg.u0 = cfg.synth.u0;
  cfg.rho0 = cfg.synth.rho0;
  return cfg;
}

std::map<std::string, std::string> file_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().lexically_relative(dir).string()] = slurp(e.path());
  return out;
}

std::size_t regular_file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

/// Runs the pipeline expecting an ArgumentError whose message names `where`.
void expect_stage_error(const PipelineConfig& cfg, const std::string& where) {
  try {
    run_pipeline(cfg);
    FAIL_CHECK("expected an error mentioning " << where);
  } catch (const ArgumentError& e) {
    CHECK_MESSAGE(std::string(e.what()).find(where) != std::string::npos, e.what());
  }
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, and rejections") {
  const PipelineConfig def = parse_pipeline_config({});
  CHECK(def.input_path.empty());
  CHECK(def.ranks == std::vector<int>{2, 6, 10, 20});
  CHECK(def.detail_rank == 0);
  CHECK(def.rom == "both");
  CHECK(def.gauge_offset == 1.0);
  CHECK(def.timing_mode == "fixed");
  CHECK(def.out_dir == fs::path("out"));
  CHECK(def.probes.empty());
  CHECK(def.mics.empty());
  // reference quantities inherit the generator's when no input file is named
  CHECK(def.diameter == def.synth.diameter);
  CHECK(def.u0 == def.synth.u0);
  // the acoustic mean flow defaults to the free stream
  CHECK(def.acoustics.u0 == def.u0);
  CHECK(def.acoustics.rho0 == def.rho0);

  KeyValues kv;
  kv["seed"] = {"5"};
  kv["ranks"] = {"8,2,4"};
  kv["detail_rank"] = {"4"};
  kv["rom"] = {"dmd"};
  kv["gauge_offset"] = {"101325"};
  kv["timing_mode"] = {"measure"};
  kv["synth.diameter"] = {"0.02"};
  kv["synth.u0"] = {"2.5"};
  kv["probe"] = {"near,0.01,0,0", "span,0.02,0,0.001,v"};
  kv["mic"] = {"C,0.5,0,0"};
  kv["mean_flow"] = {"0.25"};
  kv["p_ref"] = {"2e-5"};
  const PipelineConfig cfg = parse_pipeline_config(kv);
  CHECK(cfg.seed == 5);
  CHECK(cfg.synth.seed == 5);  // generator seed follows the run seed
  CHECK(cfg.ranks == std::vector<int>{8, 2, 4});
  CHECK(cfg.detail_rank == 4);
  CHECK(cfg.rom == "dmd");
  CHECK(cfg.gauge_offset == 101325.0);
  CHECK(cfg.timing_mode == "measure");
  CHECK(cfg.diameter == 0.02);
  CHECK(cfg.u0 == 2.5);
  REQUIRE(cfg.probes.size() == 2);
  CHECK(cfg.probes[0].label == "near");
  CHECK(cfg.probes[0].component == "w");  // default component
  CHECK(cfg.probes[1].component == "v");
  CHECK(cfg.probes[1].position[2] == 0.001);
  REQUIRE(cfg.mics.size() == 1);
  CHECK(cfg.mics[0].label == "C");
  CHECK(cfg.mics[0].position[0] == 0.5);
  CHECK(cfg.acoustics.u0 == 0.25);
  CHECK(cfg.acoustics.p_ref == 2e-5);

  KeyValues unknown;
  unknown["rank"] = {"4"};  // the key is `ranks`
  CHECK_THROWS_WITH_AS(parse_pipeline_config(unknown),
                       "unknown config key 'rank'", ArgumentError);
  KeyValues badprobe;
  badprobe["probe"] = {"wake,0.02"};
  CHECK_THROWS_AS(parse_pipeline_config(badprobe), ArgumentError);
  KeyValues badmic;
  badmic["mic"] = {"A,1,2"};
  CHECK_THROWS_AS(parse_pipeline_config(badmic), ArgumentError);
  KeyValues explicit_synth_seed;
  explicit_synth_seed["seed"] = {"5"};
  explicit_synth_seed["synth.seed"] = {"77"};
  CHECK(parse_pipeline_config(explicit_synth_seed).synth.seed == 77);
}

TEST_CASE("a full run writes the artifact bundle and a parseable report") {
  const fs::path dir = fs::temp_directory_path() / "romtest_pipeline_run";
  fs::remove_all(dir);
  const PipelineConfig cfg = small_pipeline(dir);
  const PipelineResult res = run_pipeline(cfg);

  CHECK(res.report_path == dir / "report.json");
  for (const auto& p : res.written) CHECK(fs::exists(p));

  for (const char* name :
       {"dataset.romsnap", "spectrum.csv", "energy.csv",
        "errors_pod_reconstruction.csv", "errors_dmd_reconstruction.csv",
        "errors_dmd_prediction.csv", "errors_podi_prediction.csv",
        "summary_dmd.csv", "summary_podi.csv", "crosscomp_errors.csv",
        "dmd_modes.csv", "dmd_r4.dmdmodel", "podi_r4.podimodel",
        "probe_wake_fom.csv", "probe_quiet_fom.csv", "spl_A.csv", "spl_B.csv",
        "acoustic_A_fom.csv", "acoustic_A_dmd.csv", "report.json"})
    CHECK_MESSAGE(fs::exists(dir / name), name);

  const nlohmann::json report = nlohmann::json::parse(slurp(dir / "report.json"));
  for (const char* key : {"tool", "config", "dataset", "pod", "errors",
                          "compression", "probes", "flow", "forces",
                          "acoustics", "timings", "files"})
    CHECK_MESSAGE(report.contains(key), key);
  CHECK(report["dataset"]["snapshots"] == 24);
  CHECK(report["dataset"]["n_cells"] == 288);
  CHECK(report["dataset"]["train_count"] == 12);
  CHECK(report["dataset"]["test_count"] == 11);
  // deterministic timing mode pins every wall-clock figure
  CHECK(report["timings"]["fom_seconds"] == 1.0);
  fs::remove_all(dir);
}

TEST_CASE("identical runs produce byte-identical artifacts") {
  const fs::path dir = fs::temp_directory_path() / "romtest_pipeline_det";
  fs::remove_all(dir);
  const PipelineConfig cfg = small_pipeline(dir);
  run_pipeline(cfg);
  const auto first = file_bytes(dir);
  run_pipeline(cfg);
  const auto second = file_bytes(dir);
  REQUIRE(first.size() == second.size());
  for (const auto& [name, bytes] : first) {
    REQUIRE_MESSAGE(second.contains(name), name);
    CHECK_MESSAGE(second.at(name) == bytes, name);
  }
  fs::remove_all(dir);
}

TEST_CASE("rom selection limits which models are built") {
  const fs::path dir = fs::temp_directory_path() / "romtest_pipeline_dmd";
  fs::remove_all(dir);
  PipelineConfig cfg = small_pipeline(dir);
  cfg.rom = "dmd";
  run_pipeline(cfg);
  CHECK(fs::exists(dir / "errors_dmd_prediction.csv"));
  CHECK_FALSE(fs::exists(dir / "errors_podi_prediction.csv"));
  CHECK_FALSE(fs::exists(dir / "podi_r4.podimodel"));
  CHECK_FALSE(fs::exists(dir / "summary_podi.csv"));
  fs::remove_all(dir);
}

TEST_CASE("failures name their stage and leave no partial artifacts") {
  const fs::path dir = fs::temp_directory_path() / "romtest_pipeline_fail";

  SUBCASE("detail rank missing from the rank list fails in config") {
    fs::remove_all(dir);
    PipelineConfig cfg = small_pipeline(dir);
    cfg.detail_rank = 7;
    expect_stage_error(cfg, "stage 'config'");
    CHECK(regular_file_count(dir) == 0);
  }

  SUBCASE("rank above the training budget fails validation after acquire") {
    fs::remove_all(dir);
    PipelineConfig cfg = small_pipeline(dir);
    cfg.ranks = {2, 99};
    cfg.detail_rank = 2;
    try {
      run_pipeline(cfg);
      FAIL("expected an error");
    } catch (const ArgumentError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("stage 'validate'") != std::string::npos);
      CHECK(msg.find("rank") != std::string::npos);
    }
    // the dataset written during acquisition is rolled back too
    CHECK(regular_file_count(dir) == 0);
  }

  SUBCASE("too few snapshots to split and fit") {
    fs::remove_all(dir);
    PipelineConfig cfg = small_pipeline(dir);
    cfg.synth.m = 8;
    expect_stage_error(cfg, "stage 'validate'");
    CHECK(regular_file_count(dir) == 0);
  }

  SUBCASE("a microphone inside the synthetic source region is rejected") {
    fs::remove_all(dir);
    PipelineConfig cfg = small_pipeline(dir);
    cfg.mics.push_back({"M", {2.0 * cfg.diameter, 0, 0}});
    expect_stage_error(cfg, "stage 'validate'");
    CHECK(regular_file_count(dir) == 0);
  }

  SUBCASE("duplicate probe labels collide in the artifact namespace") {
    fs::remove_all(dir);
    PipelineConfig cfg = small_pipeline(dir);
    cfg.probes.push_back({"wake", {0.02, 0, 0}, "w"});
    cfg.probes.push_back({"wake", {0.03, 0, 0}, "u"});
    CHECK_THROWS_AS(run_pipeline(cfg), ArgumentError);
    CHECK(regular_file_count(dir) == 0);
  }

  SUBCASE("unsupported rom selector") {
    fs::remove_all(dir);
    PipelineConfig cfg = small_pipeline(dir);
    cfg.rom = "galerkin";
    expect_stage_error(cfg, "stage 'config'");
    CHECK(regular_file_count(dir) == 0);
  }

  fs::remove_all(dir);
}

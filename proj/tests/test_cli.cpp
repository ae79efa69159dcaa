#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const fs::path& workdir, const std::string& args) {
  const fs::path log = workdir / "cli.log";
  const std::string cmd = "cd '" + workdir.string() + "' && '" + HYDROROM_BIN +
                          "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 288-cell, 24-snapshot exactly low-rank dataset
const std::string kSmallGen =
    "generate --out small.romsnap --nx 8 --ny 6 --nz 6 --m 24 --noise 0";

}  // namespace

TEST_CASE("--help exits cleanly and lists the subcommands") {
  const fs::path dir = fresh_dir("romcli_help");
  const RunResult r = run_cli(dir, "--help");
  CHECK(r.code == 0);
  for (const char* sub : {"generate", "decompose", "fit-dmd", "fit-podi",
                          "errors", "qcrit", "probes", "fft", "forces", "fwh",
                          "report"})
    CHECK_MESSAGE(r.output.find(sub) != std::string::npos, sub);
  fs::remove_all(dir);
}

TEST_CASE("exit codes separate usage, config, numerical, and I/O failures") {
  const fs::path dir = fresh_dir("romcli_codes");
  REQUIRE(run_cli(dir, kSmallGen).code == 0);

  // unreadable input
  CHECK(run_cli(dir, "decompose --input missing.romsnap").code == 4);

  // unusable rank, named in the message
  const RunResult rank0 = run_cli(dir, "fit-dmd --input small.romsnap --rank 0");
  CHECK(rank0.code == 2);
  CHECK(rank0.output.find("rank") != std::string::npos);

  // rank beyond what noise-free data can support
  const RunResult deficient =
      run_cli(dir, "fit-dmd --input small.romsnap --rank 10");
  CHECK(deficient.code == 3);

  // bad flag usage
  CHECK(run_cli(dir, "no-such-command").code == 2);
  CHECK(run_cli(dir, "decompose").code == 2);  // --input is required
  fs::remove_all(dir);
}

TEST_CASE("decompose writes the spectrum and identical bytes on rerun") {
  const fs::path dir = fresh_dir("romcli_decompose");
  REQUIRE(run_cli(dir, kSmallGen).code == 0);
  const RunResult first =
      run_cli(dir, "decompose --input small.romsnap --ranks 2,4,8 --out a");
  CHECK(first.code == 0);
  CHECK(fs::exists(dir / "a" / "spectrum.csv"));
  CHECK(fs::exists(dir / "a" / "decompose_summary.csv"));
  {
    std::ifstream in(dir / "a" / "decompose_summary.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "rank,cumulative_energy,truncation_spectral_rel,"
          "truncation_frobenius_rel,compression_level");
  }
  CHECK(run_cli(dir, "decompose --input small.romsnap --ranks 2,4,8 --out b")
            .code == 0);
  CHECK(slurp(dir / "a" / "spectrum.csv") == slurp(dir / "b" / "spectrum.csv"));
  CHECK(slurp(dir / "a" / "decompose_summary.csv") ==
        slurp(dir / "b" / "decompose_summary.csv"));
  fs::remove_all(dir);
}

TEST_CASE("fft finds the wake tone on an exact bin") {
  const fs::path dir = fresh_dir("romcli_fft");
  REQUIRE(run_cli(dir,
                  "generate --out tone.romsnap --nx 8 --ny 6 --nz 6 --m 50 "
                  "--noise 0")
              .code == 0);
  const RunResult r =
      run_cli(dir, "fft --input tone.romsnap --probe 0.02,0,0 --out spec.csv");
  CHECK(r.code == 0);
  // 50 samples at 500 Hz put the bins on 10 Hz marks; the 20 Hz component
  // dominates the default w signal through its half-weight swirl
  CHECK(r.output.find("dominant 20 Hz (bin 2") != std::string::npos);
  CHECK(fs::exists(dir / "spec.csv"));
  fs::remove_all(dir);
}

TEST_CASE("model fit, error sweep, and probes chain through files") {
  const fs::path dir = fresh_dir("romcli_chain");
  REQUIRE(run_cli(dir, kSmallGen).code == 0);
  CHECK(run_cli(dir, "fit-dmd --input small.romsnap --rank 4").code == 0);
  CHECK(run_cli(dir, "fit-podi --input small.romsnap --rank 4").code == 0);
  CHECK(fs::exists(dir / "dmd_r4.dmdmodel"));
  CHECK(fs::exists(dir / "podi_r4.podimodel"));

  const RunResult err = run_cli(dir,
                                "errors --input small.romsnap "
                                "--dmd dmd_r4.dmdmodel --podi podi_r4.podimodel");
  CHECK(err.code == 0);
  CHECK(fs::exists(dir / "errors_dmd_prediction.csv"));
  CHECK(fs::exists(dir / "errors_podi_reconstruction.csv"));

  CHECK(run_cli(dir, "probes --input small.romsnap").code == 0);
  CHECK(fs::exists(dir / "probe_wake_fom.csv"));
  CHECK(fs::exists(dir / "probe_quiet_fom.csv"));
  {
    std::ifstream in(dir / "probe_wake_fom.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,value");
  }
  fs::remove_all(dir);
}

TEST_CASE("quiescent fields radiate an exactly zero acoustic signal") {
  const fs::path dir = fresh_dir("romcli_fwh");
  {
    std::ofstream cfg(dir / "still.cfg");
    cfg << "synth.nx = 8\nsynth.ny = 6\nsynth.nz = 6\nsynth.m = 24\n"
        << "synth.noise = 0\nsynth.u0 = 0\nsynth.component = 20,0\n";
  }
  REQUIRE(run_cli(dir, "generate --config still.cfg --out still.romsnap").code == 0);
  const RunResult r =
      run_cli(dir, "fwh --input still.romsnap --mic A --u0 0 --panels 16");
  CHECK(r.code == 0);
  REQUIRE(fs::exists(dir / "acoustic_A.csv"));
  std::ifstream in(dir / "acoustic_A.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,p2d_pa,p3d_pa");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.find(',')) == ",0,0");
  }
  CHECK(rows == 24);
  CHECK(fs::exists(dir / "spl_A.csv"));
  CHECK_FALSE(fs::exists(dir / "acoustic_B.csv"));  // only the asked-for mic
  fs::remove_all(dir);
}

TEST_CASE("report drives the full pipeline from a config file") {
  const fs::path dir = fresh_dir("romcli_report");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "out_dir = bundle\nseed = 9\nranks = 2,4\ndetail_rank = 4\n"
        << "surface_panels = 16\nhistogram_bins = 8\n"
        << "synth.nx = 8\nsynth.ny = 6\nsynth.nz = 6\nsynth.m = 24\n";
  }
  const RunResult r = run_cli(dir, "report --config run.cfg");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "bundle" / "report.json"));
  CHECK(fs::exists(dir / "bundle" / "crosscomp_errors.csv"));
  CHECK(fs::exists(dir / "bundle" / "dataset.romsnap"));
  fs::remove_all(dir);
}

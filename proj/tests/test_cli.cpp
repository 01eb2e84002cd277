#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "feasproj/bench.hpp"
#include "feasproj/runner.hpp"

using namespace feasproj;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("feasproj-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path write_instance(const fs::path& dir, std::uint64_t seed, double obs_fraction = 0.0) {
  RandomSource rng(seed);
  const auto inst = gen_synthetic(60, 60, 3, 0.05, -500, 500, rng);
  write_matrix(inst.a, dir / "A.csv");
  if (obs_fraction > 0.0) {
    write_mask(gen_mask(60, 60, obs_fraction, rng), dir / "mask.mtx");
  }
  return dir / "A.csv";
}

RunManifest decompose_manifest(const fs::path& input, const fs::path& out) {
  RunManifest man;
  man.command = "decompose-rpca";
  man.input = input;
  man.out_dir = out;
  man.rank = 3;
  man.alpha = 0.05;
  man.tolerance = 1e-4;
  man.max_iterations = 300;
  return man;
}

}  // namespace

TEST_CASE("decompose-rpca writes artifacts and reports convergence") {
  TempDir dir;
  const fs::path input = write_instance(dir.path, 1);
  const RunManifest man = decompose_manifest(input, dir.path / "out");

  CHECK(run(man) == 0);
  CHECK(fs::exists(dir.path / "out/L.csv"));
  CHECK(fs::exists(dir.path / "out/S.csv"));
  CHECK(fs::exists(dir.path / "out/trace.csv"));
  CHECK(fs::exists(dir.path / "out/summary.csv"));

  // the emitted pair reassembles the input within the solve tolerance
  const Matrix a = read_matrix(input);
  const Matrix l = read_matrix(dir.path / "out/L.csv");
  const Matrix s = read_matrix(dir.path / "out/S.csv");
  CHECK((a - l - s).norm() <= 1e-4 * a.norm() * 1.01);

  const std::string summary = slurp(dir.path / "out/summary.csv");
  CHECK(summary.find("converged") != std::string::npos);
  CHECK(summary.substr(summary.find('\n') + 1, 2) == "1,");
}

TEST_CASE("identical manifests produce byte-identical artifacts") {
  TempDir dir;
  const fs::path input = write_instance(dir.path, 2);
  RunManifest man = decompose_manifest(input, dir.path / "out1");
  CHECK(run(man) == 0);
  man.out_dir = dir.path / "out2";
  CHECK(run(man) == 0);
  for (const char* name : {"L.csv", "S.csv", "trace.csv", "summary.csv"}) {
    CHECK(slurp(dir.path / "out1" / name) == slurp(dir.path / "out2" / name));
  }
}

TEST_CASE("missing input exits 2 and writes nothing") {
  TempDir dir;
  const RunManifest man = decompose_manifest(dir.path / "missing.csv", dir.path / "out");
  CHECK(run(man) == 2);
  CHECK_FALSE(fs::exists(dir.path / "out"));
}

TEST_CASE("non-convergence exits 1 with artifacts in place") {
  TempDir dir;
  const fs::path input = write_instance(dir.path, 3);
  RunManifest man = decompose_manifest(input, dir.path / "out");
  man.rank = 1;  // under the true rank: cannot converge
  man.max_iterations = 60;
  CHECK(run(man) == 1);
  CHECK(fs::exists(dir.path / "out/L.csv"));
  CHECK(fs::exists(dir.path / "out/trace.csv"));
}

TEST_CASE("decompose-rmc consumes a mask") {
  TempDir dir;
  const fs::path input = write_instance(dir.path, 4, 0.6);
  RunManifest man = decompose_manifest(input, dir.path / "out");
  man.command = "decompose-rmc";
  man.mask_path = dir.path / "mask.mtx";
  man.tolerance = 2e-4;
  CHECK(run(man) == 0);
  CHECK(fs::exists(dir.path / "out/summary.csv"));

  SUBCASE("mask flag is mandatory") {
    man.mask_path.clear();
    man.out_dir = dir.path / "out3";
    CHECK(run(man) == 2);
    CHECK_FALSE(fs::exists(dir.path / "out3"));
  }
}

TEST_CASE("phase-sweep emits one row per cell") {
  TempDir dir;
  RunManifest man;
  man.command = "phase-sweep";
  man.out_dir = dir.path / "sweep";
  man.rows = man.cols = 30;
  man.rho_axis = {0.1, 0.2};
  man.alpha_axis = {0.05, 0.1};
  man.runs_per_cell = 2;
  man.max_iterations = 120;
  man.seed = 9;

  CHECK(run(man) == 0);
  const std::string grid = slurp(dir.path / "sweep/grid.csv");
  CHECK(grid.rfind("rho,alpha,success_fraction,mean_rel_err,mean_rmse,runs\n", 0) == 0);
  const auto rows = std::count(grid.begin(), grid.end(), '\n');
  CHECK(rows == 5);  // header + 4 cells

  SUBCASE("rerun is byte-identical") {
    man.out_dir = dir.path / "sweep2";
    CHECK(run(man) == 0);
    CHECK(slurp(dir.path / "sweep2/grid.csv") == grid);
  }
}

TEST_CASE("sensitivity emits report and run tables") {
  TempDir dir;
  RunManifest man;
  man.command = "sensitivity";
  man.mode = "init";
  man.out_dir = dir.path / "sens";
  man.rows = man.cols = 30;
  man.rank = 2;
  man.alpha = 0.05;
  man.num_starts = 3;
  man.tolerance = 1e-4;
  man.max_iterations = 120;
  CHECK(run(man) == 0);
  CHECK(slurp(dir.path / "sens/report.csv").rfind("iteration,best,median,worst\n", 0) == 0);
  CHECK(slurp(dir.path / "sens/runs.csv").rfind("start,converged,", 0) == 0);

  man.mode = "params";
  man.out_dir = dir.path / "sens2";
  CHECK(run(man) == 0);
  CHECK(slurp(dir.path / "sens2/runs.csv").rfind("rank_solver,alpha_solver,", 0) == 0);

  man.mode = "nonsense";
  man.out_dir = dir.path / "sens3";
  CHECK(run(man) == 2);
}

TEST_CASE("svd-check reports the tail bound") {
  TempDir dir;
  RandomSource rng(11);
  write_matrix(gaussian_matrix(80, 50, rng), dir.path / "A.csv");
  RunManifest man;
  man.command = "svd-check";
  man.input = dir.path / "A.csv";
  man.out_dir = dir.path / "check";
  man.rank = 5;
  man.bksvd_epsilon = 0.1;
  man.seed = 3;
  CHECK(run(man) == 0);
  const std::string summary = slurp(dir.path / "check/summary.csv");
  CHECK(summary.find("within_bound") != std::string::npos);
}

TEST_CASE("unknown command exits 2") {
  RunManifest man;
  man.command = "frobnicate";
  man.out_dir = fs::temp_directory_path() / "feasproj-nowhere";
  CHECK(run(man) == 2);
}

#ifdef FEASPROJ_CLI_PATH
TEST_CASE("binary end-to-end") {
  TempDir dir;
  const fs::path input = write_instance(dir.path, 12);
  const std::string cmd = std::string(FEASPROJ_CLI_PATH) +
                          " decompose-rpca --input " + input.string() + " --out " +
                          (dir.path / "out").string() +
                          " --rank 3 --alpha 0.05 --tol 1e-4 --max-iters 300" +
                          " > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir.path / "out/summary.csv"));

  const std::string help = std::string(FEASPROJ_CLI_PATH) + " --help > /dev/null 2>&1";
  CHECK(std::system(help.c_str()) == 0);

  const std::string bad = std::string(FEASPROJ_CLI_PATH) + " --bogus > /dev/null 2>&1";
  CHECK(std::system(bad.c_str()) != 0);
}
#endif

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "feasproj/bench.hpp"
#include "feasproj/io.hpp"

namespace feasproj {

/// Parsed command invocation. Inputs are validated and fully parsed before
/// any output is written, so a bad manifest never leaves partial artifacts.
struct RunManifest {
  std::string command;  // decompose-rpca | decompose-rmc | phase-sweep |
                        // sensitivity | svd-check
  std::filesystem::path input;
  std::filesystem::path mask_path;
  std::filesystem::path out_dir;

  // solver settings
  Index rank = 1;
  double alpha = 0.1;
  double tolerance = 2e-4;
  int max_iterations = 500;
  std::string svd = "exact";  // exact | bksvd
  double bksvd_epsilon = 0.1;
  std::uint64_t seed = 0;

  // phase-sweep settings
  Index rows = 100;
  Index cols = 100;
  std::vector<double> rho_axis;
  std::vector<double> alpha_axis;
  int runs_per_cell = 5;
  std::string rule = "rpca";  // rpca | rmc-rel | rmse
  double threshold = 0.01;
  double unobserved_fraction = 0.0;

  // sensitivity settings
  std::string mode = "init";  // init | omega | params
  int num_starts = 50;
  std::vector<double> observed_fractions = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
  std::vector<Index> rank_offsets = {-2, 0, 2};
  std::vector<double> alpha_factors = {0.5, 1.0, 2.0};
};

/// Executes a manifest and writes its artifact files under out_dir.
/// Exit status: 0 on success, 1 when a decompose command ran to the
/// iteration cap without converging (artifacts are still written), 2 on any
/// input or configuration error (nothing is written).
int run(const RunManifest& manifest);

}  // namespace feasproj

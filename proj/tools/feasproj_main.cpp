#include <CLI11.hpp>

#include "feasproj/runner.hpp"

namespace {

using feasproj::RunManifest;

void add_solver_options(CLI::App* cmd, RunManifest& man) {
  cmd->add_option("--rank", man.rank, "Target rank r");
  cmd->add_option("--alpha", man.alpha, "Sparsity level in (0,1]");
  cmd->add_option("--tol", man.tolerance, "Relative residual tolerance");
  cmd->add_option("--max-iters", man.max_iterations, "Iteration cap");
  cmd->add_option("--svd", man.svd, "SVD backend: exact or bksvd");
  cmd->add_option("--bksvd-eps", man.bksvd_epsilon, "Block Krylov accuracy in (0,1)");
  cmd->add_option("--seed", man.seed, "Random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank plus sparse matrix decomposition by alternating projections"};
  app.require_subcommand(1);

  RunManifest man;

  auto* rpca = app.add_subcommand("decompose-rpca",
                                  "Split a fully observed matrix into L + S");
  rpca->add_option("--input", man.input, "Matrix file (CSV or MatrixMarket) or PGM frame directory")
      ->required();
  rpca->add_option("--out", man.out_dir, "Output directory")->required();
  add_solver_options(rpca, man);

  auto* rmc = app.add_subcommand("decompose-rmc",
                                 "Split a partially observed matrix into L + S");
  rmc->add_option("--input", man.input, "Matrix file (CSV or MatrixMarket) or PGM frame directory")
      ->required();
  rmc->add_option("--mask", man.mask_path, "Observed-entry mask (MatrixMarket pattern)")
      ->required();
  rmc->add_option("--out", man.out_dir, "Output directory")->required();
  add_solver_options(rmc, man);

  auto* sweep = app.add_subcommand("phase-sweep",
                                   "Recovery success over a (rho, alpha) grid");
  sweep->add_option("--out", man.out_dir, "Output directory")->required();
  sweep->add_option("--m", man.rows, "Instance rows");
  sweep->add_option("--n", man.cols, "Instance cols");
  sweep->add_option("--rho", man.rho_axis, "Comma-separated rho = rank/m axis")
      ->required()
      ->delimiter(',');
  sweep->add_option("--alpha-grid", man.alpha_axis, "Comma-separated alpha axis")
      ->required()
      ->delimiter(',');
  sweep->add_option("--runs", man.runs_per_cell, "Runs per cell");
  sweep->add_option("--rule", man.rule, "Success rule: rpca, rmc-rel or rmse");
  sweep->add_option("--threshold", man.threshold, "Success threshold");
  sweep->add_option("--unobserved", man.unobserved_fraction,
                    "Unobserved fraction for rmc-rel/rmse rules");
  add_solver_options(sweep, man);

  auto* sens = app.add_subcommand("sensitivity", "Sensitivity experiment modes");
  sens->add_option("--mode", man.mode, "init, omega or params")->required();
  sens->add_option("--out", man.out_dir, "Output directory")->required();
  sens->add_option("--m", man.rows, "Instance rows");
  sens->add_option("--n", man.cols, "Instance cols");
  sens->add_option("--starts", man.num_starts, "Random starts (init mode)");
  sens->add_option("--fractions", man.observed_fractions,
                   "Observed fractions (omega mode)")
      ->delimiter(',');
  sens->add_option("--rank-offsets", man.rank_offsets,
                   "Rank offsets around the true rank (params mode)")
      ->delimiter(',');
  sens->add_option("--alpha-factors", man.alpha_factors,
                   "Multipliers on the true alpha (params mode)")
      ->delimiter(',');
  add_solver_options(sens, man);

  auto* svdcheck = app.add_subcommand("svd-check",
                                      "Randomized low-rank basis quality report");
  svdcheck->add_option("--input", man.input, "Matrix file")->required();
  svdcheck->add_option("--out", man.out_dir, "Output directory")->required();
  add_solver_options(svdcheck, man);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  man.command = app.get_subcommands().front()->get_name();
  return feasproj::run(man);
}

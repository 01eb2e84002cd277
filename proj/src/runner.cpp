#include "feasproj/runner.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "feasproj/solver.hpp"

namespace feasproj {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix load_input(const fs::path& path) {
  if (fs::is_directory(path)) return read_frame_stack(path);
  return read_matrix(path);
}

SvdBackend backend_from(const RunManifest& man) {
  if (man.svd == "exact") return SvdBackend::exact();
  if (man.svd == "bksvd") return SvdBackend::block_krylov(man.bksvd_epsilon, man.seed);
  throw ConfigError("unknown --svd backend '" + man.svd + "' (use exact or bksvd)");
}

SolverConfig solver_config_from(const RunManifest& man) {
  SolverConfig cfg;
  cfg.rank = man.rank;
  cfg.alpha = SparsityLevel(man.alpha);
  cfg.tolerance = man.tolerance;
  cfg.max_iterations = man.max_iterations;
  cfg.svd = backend_from(man);
  return cfg;
}

void write_decompose_artifacts(const fs::path& out_dir, const DecompositionResult& res) {
  fs::create_directories(out_dir);
  write_matrix(res.low_rank, out_dir / "L.csv");
  write_matrix(res.sparse, out_dir / "S.csv");

  Table trace;
  trace.columns = {"iteration", "residual"};
  for (std::size_t k = 0; k < res.residual_trace.size(); ++k) {
    trace.rows.push_back({double(k + 1), res.residual_trace[k]});
  }
  write_table_csv(trace, out_dir / "trace.csv");

  double rate_c = kNaN, rate_r2 = kNaN;
  try {
    const RateEstimate rate = estimate_rate(res.residual_trace);
    rate_c = rate.c_hat;
    rate_r2 = rate.r_squared;
  } catch (const ConfigError&) {
    // trace too short or flat at zero; leave the rate columns as nan
  }
  Table summary;
  summary.columns = {"converged", "iterations", "final_residual",
                     "rate_c_hat", "rate_r_squared", "rank_ambiguous",
                     "krylov_fallback", "degenerate_basis"};
  summary.rows.push_back({res.converged ? 1.0 : 0.0, double(res.iterations),
                          res.residual_trace.empty() ? kNaN : res.residual_trace.back(),
                          rate_c, rate_r2, res.metadata.rank_ambiguous ? 1.0 : 0.0,
                          res.metadata.krylov_fallback ? 1.0 : 0.0,
                          res.metadata.degenerate_input ? 1.0 : 0.0});
  write_table_csv(summary, out_dir / "summary.csv");
}

int run_decompose(const RunManifest& man, bool masked) {
  const Matrix a = load_input(man.input);
  std::optional<ObservationMask> mask;
  if (masked) {
    if (man.mask_path.empty()) throw ConfigError("decompose-rmc requires --mask");
    mask = read_mask(man.mask_path);
  }
  const SolverConfig cfg = solver_config_from(man);

  const DecompositionResult res =
      masked ? solve_rmc(a, *mask, cfg) : solve_rpca(a, cfg);
  write_decompose_artifacts(man.out_dir, res);
  return res.converged ? 0 : 1;
}

SuccessRule rule_from(const std::string& name) {
  if (name == "rpca") return SuccessRule::RpcaCombined;
  if (name == "rmc-rel") return SuccessRule::RmcRelative;
  if (name == "rmse") return SuccessRule::Rmse;
  throw ConfigError("unknown --rule '" + name + "' (use rpca, rmc-rel or rmse)");
}

int run_phase_sweep(const RunManifest& man) {
  SweepConfig cfg;
  cfg.rows = man.rows;
  cfg.cols = man.cols;
  cfg.rho_axis = man.rho_axis;
  cfg.alpha_axis = man.alpha_axis;
  cfg.runs_per_cell = man.runs_per_cell;
  cfg.rule = rule_from(man.rule);
  cfg.success_threshold = man.threshold;
  cfg.unobserved_fraction = man.unobserved_fraction;
  cfg.solver_tolerance = man.tolerance;
  cfg.solver_max_iterations = man.max_iterations;
  cfg.svd = backend_from(man);
  cfg.base_seed = man.seed;

  const PhaseGrid grid = phase_sweep(cfg);

  Table out;
  out.columns = {"rho", "alpha", "success_fraction", "mean_rel_err", "mean_rmse", "runs"};
  for (std::size_t ri = 0; ri < grid.rho_axis.size(); ++ri) {
    for (std::size_t ai = 0; ai < grid.alpha_axis.size(); ++ai) {
      const PhaseCell& cell = grid.cell(ri, ai);
      out.rows.push_back({grid.rho_axis[ri], grid.alpha_axis[ai], cell.success_fraction,
                          cell.mean_relative_error, cell.mean_rmse, double(cell.runs)});
    }
  }
  fs::create_directories(man.out_dir);
  write_table_csv(out, man.out_dir / "grid.csv");
  return 0;
}

SensitivityMode mode_from(const std::string& name) {
  if (name == "init") return SensitivityMode::InitSensitivity;
  if (name == "omega") return SensitivityMode::OmegaSweep;
  if (name == "params") return SensitivityMode::ParamMisspecification;
  throw ConfigError("unknown --mode '" + name + "' (use init, omega or params)");
}

int run_sensitivity(const RunManifest& man) {
  SensitivityConfig cfg;
  cfg.mode = mode_from(man.mode);
  cfg.rows = man.rows;
  cfg.cols = man.cols;
  cfg.rank = man.rank;
  cfg.alpha = man.alpha;
  cfg.num_starts = man.num_starts;
  cfg.observed_fractions = man.observed_fractions;
  cfg.rank_offsets = man.rank_offsets;
  cfg.alpha_factors = man.alpha_factors;
  cfg.solver_tolerance = man.tolerance;
  cfg.solver_max_iterations = man.max_iterations;
  cfg.svd = backend_from(man);
  cfg.base_seed = man.seed;

  const SensitivityReport report = sensitivity_suite(cfg);
  fs::create_directories(man.out_dir);
  write_table_csv(report.per_iteration, man.out_dir / "report.csv");
  write_table_csv(report.runs, man.out_dir / "runs.csv");
  return 0;
}

int run_svd_check(const RunManifest& man) {
  const Matrix a = load_input(man.input);
  const Index cap = std::min(a.rows(), a.cols());
  if (man.rank < 1 || man.rank > cap) {
    throw ConfigError("svd-check: rank outside [1, " + std::to_string(cap) + "]");
  }

  RandomSource rng(man.seed);
  const KrylovBasis kb = block_krylov_svd(a, man.rank, man.bksvd_epsilon, rng);
  const Matrix projected = kb.basis * (kb.basis.transpose() * a);
  const double krylov_tail = (a - projected).norm();
  const double ortho_error =
      (kb.basis.transpose() * kb.basis - Matrix::Identity(man.rank, man.rank)).norm();

  const Matrix best = hard_threshold_rank(a, man.rank, SvdBackend::exact());
  const double exact_tail = (a - best).norm();
  const double bound = (1.0 + man.bksvd_epsilon) * exact_tail;

  Table summary;
  summary.columns = {"rows", "cols", "rank", "epsilon", "ortho_error",
                     "exact_tail", "krylov_tail", "bound", "within_bound",
                     "exact_fallback", "degenerate_input"};
  summary.rows.push_back({double(a.rows()), double(a.cols()), double(man.rank),
                          man.bksvd_epsilon, ortho_error, exact_tail, krylov_tail,
                          bound, krylov_tail <= bound ? 1.0 : 0.0,
                          kb.used_exact_fallback ? 1.0 : 0.0,
                          kb.degenerate_input ? 1.0 : 0.0});
  fs::create_directories(man.out_dir);
  write_table_csv(summary, man.out_dir / "summary.csv");
  return 0;
}

}  // namespace

int run(const RunManifest& manifest) {
  try {
    if (manifest.out_dir.empty()) throw ConfigError("--out is required");
    if (manifest.command == "decompose-rpca") return run_decompose(manifest, false);
    if (manifest.command == "decompose-rmc") return run_decompose(manifest, true);
    if (manifest.command == "phase-sweep") return run_phase_sweep(manifest);
    if (manifest.command == "sensitivity") return run_sensitivity(manifest);
    if (manifest.command == "svd-check") return run_svd_check(manifest);
    throw ConfigError("unknown command '" + manifest.command + "'");
  } catch (const std::exception& err) {
    std::cerr << "feasproj: " << err.what() << "\n";
    return 2;
  }
}

}  // namespace feasproj

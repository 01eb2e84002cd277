#include "feasproj/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace feasproj {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Index rank_from_rho(double rho, Index rows, Index cols) {
  const Index r = Index(std::llround(rho * double(rows)));
  const Index cap = std::min(rows, cols);
  if (r < 1 || r > cap) {
    throw ConfigError("phase_sweep: rho " + std::to_string(rho) + " maps to rank " +
                      std::to_string(r) + " outside [1, " + std::to_string(cap) + "]");
  }
  return r;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// trace value at 1-based iteration k, carrying the final value forward
double trace_at(const std::vector<double>& trace, std::size_t k) {
  if (trace.empty()) return kNaN;
  return k <= trace.size() ? trace[k - 1] : trace.back();
}

struct RunOutcome {
  bool solved = false;       // false: numeric failure
  bool success = false;
  double relative_error = kNaN;
  double rmse_value = kNaN;
};

}  // namespace

SyntheticInstance gen_synthetic(Index rows, Index cols, Index rank, double alpha,
                                double magnitude_lo, double magnitude_hi,
                                RandomSource& rng) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("gen_synthetic: dimensions must be positive");
  }
  if (rank < 1 || rank > std::min(rows, cols)) {
    throw ConfigError("gen_synthetic: rank " + std::to_string(rank) +
                      " outside [1, " + std::to_string(std::min(rows, cols)) + "]");
  }
  if (!(std::isfinite(magnitude_lo) && std::isfinite(magnitude_hi)) ||
      !(magnitude_lo < magnitude_hi)) {
    throw ConfigError("gen_synthetic: magnitude range must be finite with lo < hi");
  }
  SparsityLevel level(alpha);

  SyntheticInstance inst;
  inst.params = {rows, cols, rank, alpha, magnitude_lo, magnitude_hi, rng.seed()};

  const Matrix g1 = gaussian_matrix(rows, rank, rng);
  const Matrix g2 = gaussian_matrix(cols, rank, rng);
  inst.low_rank_true = g1 * g2.transpose();

  Matrix dense(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      dense(i, j) = rng.next_uniform(magnitude_lo, magnitude_hi);
    }
  }
  inst.sparse_true = sparsify_alpha(dense, level);

  inst.a = inst.low_rank_true + inst.sparse_true;
  // re-derive S from the rounded sum so A - L - S evaluates to exact zero
  inst.sparse_true = inst.a - inst.low_rank_true;
  return inst;
}

ObservationMask gen_mask(Index rows, Index cols, double observed_fraction,
                         RandomSource& rng) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("gen_mask: dimensions must be positive");
  }
  if (!(observed_fraction > 0.0) || !(observed_fraction <= 1.0)) {
    throw ConfigError("gen_mask: observed fraction must lie in (0,1], got " +
                      std::to_string(observed_fraction));
  }
  const std::uint64_t total = std::uint64_t(rows) * std::uint64_t(cols);
  const std::uint64_t take =
      std::uint64_t(std::llround(observed_fraction * double(total)));

  std::vector<std::uint64_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::uint64_t(0));
  for (std::uint64_t i = 0; i < take; ++i) {
    const std::uint64_t j = i + rng.next_below(total - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return ObservationMask::from_linear(rows, cols, std::move(pool));
}

double relative_error_rpca(const Matrix& l, const Matrix& s, const Matrix& l_hat,
                           const Matrix& s_hat, const Matrix& a) {
  require_same_shape(l, l_hat, "relative_error_rpca");
  require_same_shape(s, s_hat, "relative_error_rpca");
  require_same_shape(l, a, "relative_error_rpca");
  const double denom = a.norm();
  if (denom == 0.0) {
    throw ConfigError("relative_error_rpca: ||A||_F must be positive");
  }
  return ((l - l_hat).norm() + (s - s_hat).norm()) / denom;
}

double relative_error_rmc(const Matrix& l, const Matrix& l_hat) {
  require_same_shape(l, l_hat, "relative_error_rmc");
  const double denom = l.norm();
  if (denom == 0.0) {
    throw ConfigError("relative_error_rmc: ||L||_F must be positive");
  }
  return (l - l_hat).norm() / denom;
}

double rmse(const Matrix& l, const Matrix& l_hat) {
  require_same_shape(l, l_hat, "rmse");
  return (l - l_hat).norm() / std::sqrt(double(l.rows()) * double(l.cols()));
}

double proximity_measure(const Matrix& x, const Matrix& y, double epsilon) {
  require_same_shape(x, y, "proximity_measure");
  if (!(epsilon >= 0.0) || !(epsilon <= 1.0)) {
    throw ConfigError("proximity_measure: epsilon must lie in [0,1]");
  }
  if ((x.array() < 0.0).any() || (x.array() > 1.0).any() ||
      (y.array() < 0.0).any() || (y.array() > 1.0).any()) {
    throw ConfigError("proximity_measure: values must be pre-scaled to [0,1]");
  }
  std::uint64_t hits = 0;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (std::abs(x(i, j) - y(i, j)) <= epsilon) ++hits;
    }
  }
  return double(hits) / (double(x.rows()) * double(x.cols()));
}

int worker_count() {
  if (const char* env = std::getenv("FEASPROJ_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
}

namespace {

RunOutcome sweep_run(const SweepConfig& cfg, std::size_t rho_idx, std::size_t alpha_idx,
                     int run) {
  const std::uint64_t run_seed = RandomSource::derive_seed(
      cfg.base_seed, {std::uint64_t(rho_idx), std::uint64_t(alpha_idx), std::uint64_t(run)});
  RandomSource rng(run_seed);

  const Index rank = rank_from_rho(cfg.rho_axis[rho_idx], cfg.rows, cfg.cols);
  const double alpha = cfg.alpha_axis[alpha_idx];
  const SyntheticInstance inst = gen_synthetic(cfg.rows, cfg.cols, rank, alpha,
                                               cfg.magnitude_lo, cfg.magnitude_hi, rng);

  SolverConfig sc;
  sc.rank = rank;
  sc.alpha = SparsityLevel(alpha);
  sc.tolerance = cfg.solver_tolerance;
  sc.max_iterations = cfg.solver_max_iterations;
  sc.svd = cfg.svd;
  if (sc.svd.kind == SvdBackend::Kind::BlockKrylov) {
    sc.svd.seed = RandomSource::derive_seed(run_seed, {0x51});
  }

  RunOutcome out;
  try {
    DecompositionResult res;
    if (cfg.rule == SuccessRule::RpcaCombined) {
      res = solve_rpca(inst.a, sc);
      out.relative_error = relative_error_rpca(inst.low_rank_true, inst.sparse_true,
                                               res.low_rank, res.sparse, inst.a);
    } else {
      const ObservationMask mask =
          gen_mask(cfg.rows, cfg.cols, 1.0 - cfg.unobserved_fraction, rng);
      res = solve_rmc(inst.a, mask, sc);
      out.relative_error = relative_error_rmc(inst.low_rank_true, res.low_rank);
    }
    out.rmse_value = rmse(inst.low_rank_true, res.low_rank);
    out.solved = true;
    switch (cfg.rule) {
      case SuccessRule::RpcaCombined:
      case SuccessRule::RmcRelative:
        out.success = out.relative_error < cfg.success_threshold;
        break;
      case SuccessRule::Rmse:
        out.success = res.converged;
        break;
    }
  } catch (const NumericError&) {
    out.solved = false;
    out.success = false;
  }
  return out;
}

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1) throw ConfigError("phase_sweep: bad dimensions");
  if (cfg.rho_axis.empty() || cfg.alpha_axis.empty()) {
    throw ConfigError("phase_sweep: axes must be nonempty");
  }
  if (cfg.runs_per_cell < 1) throw ConfigError("phase_sweep: runs_per_cell must be >= 1");
  for (double rho : cfg.rho_axis) rank_from_rho(rho, cfg.rows, cfg.cols);
  for (double alpha : cfg.alpha_axis) SparsityLevel{alpha};
  if (cfg.rule != SuccessRule::Rmse && !(cfg.success_threshold > 0.0)) {
    throw ConfigError("phase_sweep: success threshold must be positive");
  }
  if (cfg.rule != SuccessRule::RpcaCombined) {
    if (!(cfg.unobserved_fraction >= 0.0) || !(cfg.unobserved_fraction < 1.0)) {
      throw ConfigError("phase_sweep: unobserved fraction must lie in [0,1)");
    }
  }
  if (!(cfg.solver_tolerance > 0.0) || cfg.solver_max_iterations < 1) {
    throw ConfigError("phase_sweep: bad solver settings");
  }
}

}  // namespace

PhaseGrid phase_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg);

  const std::size_t n_rho = cfg.rho_axis.size();
  const std::size_t n_alpha = cfg.alpha_axis.size();
  const std::size_t runs = std::size_t(cfg.runs_per_cell);
  const std::size_t n_tasks = n_rho * n_alpha * runs;

  std::vector<RunOutcome> outcomes(n_tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_tasks) return;
      const std::size_t run = t % runs;
      const std::size_t cell = t / runs;
      try {
        outcomes[t] = sweep_run(cfg, cell / n_alpha, cell % n_alpha, int(run));
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int workers = std::min<int>(worker_count(), int(n_tasks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  PhaseGrid grid;
  grid.rho_axis = cfg.rho_axis;
  grid.alpha_axis = cfg.alpha_axis;
  grid.cells.resize(n_rho * n_alpha);
  for (std::size_t cell = 0; cell < grid.cells.size(); ++cell) {
    int successes = 0;
    int scored = 0;
    double rel_sum = 0.0, rmse_sum = 0.0;
    for (std::size_t run = 0; run < runs; ++run) {
      const RunOutcome& out = outcomes[cell * runs + run];
      successes += out.success ? 1 : 0;
      if (out.solved) {
        ++scored;
        rel_sum += out.relative_error;
        rmse_sum += out.rmse_value;
      }
    }
    PhaseCell& pc = grid.cells[cell];
    pc.runs = cfg.runs_per_cell;
    pc.success_fraction = double(successes) / double(runs);
    pc.mean_relative_error = scored > 0 ? rel_sum / double(scored) : kNaN;
    pc.mean_rmse = scored > 0 ? rmse_sum / double(scored) : kNaN;
  }
  return grid;
}

namespace {

struct SolveRecord {
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

SolveRecord run_recorded(const Matrix& a, const ObservationMask* mask,
                         const SolverConfig& sc) {
  SolveRecord rec;
  try {
    const DecompositionResult res =
        mask ? solve_rmc(a, *mask, sc) : solve_rpca(a, sc);
    rec.trace = res.residual_trace;
    rec.converged = res.converged;
    rec.iterations = res.iterations;
  } catch (const NumericError& err) {
    rec.trace = err.residual_trace;
    rec.converged = false;
    rec.iterations = int(rec.trace.size());
  }
  return rec;
}

double final_residual(const SolveRecord& rec) {
  return rec.trace.empty() ? kNaN : rec.trace.back();
}

}  // namespace

SensitivityReport sensitivity_suite(const SensitivityConfig& cfg) {
  if (!(cfg.solver_tolerance > 0.0) || cfg.solver_max_iterations < 1) {
    throw ConfigError("sensitivity_suite: bad solver settings");
  }
  RandomSource inst_rng(RandomSource::derive_seed(cfg.base_seed, {0}));
  const SyntheticInstance inst =
      gen_synthetic(cfg.rows, cfg.cols, cfg.rank, cfg.alpha, cfg.magnitude_lo,
                    cfg.magnitude_hi, inst_rng);

  SolverConfig base;
  base.rank = cfg.rank;
  base.alpha = SparsityLevel(cfg.alpha);
  base.tolerance = cfg.solver_tolerance;
  base.max_iterations = cfg.solver_max_iterations;
  base.svd = cfg.svd;

  SensitivityReport report;

  switch (cfg.mode) {
    case SensitivityMode::InitSensitivity: {
      if (cfg.num_starts < 1) throw ConfigError("sensitivity_suite: num_starts must be >= 1");
      std::vector<SolveRecord> records;
      records.reserve(std::size_t(cfg.num_starts));
      report.runs.columns = {"start", "converged", "iterations", "final_residual"};
      for (int s = 0; s < cfg.num_starts; ++s) {
        SolverConfig sc = base;
        sc.init = Initialization::random_gaussian(
            RandomSource::derive_seed(cfg.base_seed, {1, std::uint64_t(s)}));
        records.push_back(run_recorded(inst.a, nullptr, sc));
        const SolveRecord& rec = records.back();
        report.runs.rows.push_back({double(s), rec.converged ? 1.0 : 0.0,
                                    double(rec.iterations), final_residual(rec)});
      }
      std::size_t longest = 0;
      for (const auto& rec : records) longest = std::max(longest, rec.trace.size());
      report.per_iteration.columns = {"iteration", "best", "median", "worst"};
      for (std::size_t k = 1; k <= longest; ++k) {
        std::vector<double> at_k;
        at_k.reserve(records.size());
        for (const auto& rec : records) at_k.push_back(trace_at(rec.trace, k));
        const auto [lo, hi] = std::minmax_element(at_k.begin(), at_k.end());
        report.per_iteration.rows.push_back({double(k), *lo, median_of(at_k), *hi});
      }
      break;
    }
    case SensitivityMode::OmegaSweep: {
      if (cfg.observed_fractions.empty()) {
        throw ConfigError("sensitivity_suite: observed_fractions must be nonempty");
      }
      std::vector<SolveRecord> records;
      report.runs.columns = {"observed_fraction", "converged", "iterations",
                             "final_residual"};
      report.per_iteration.columns = {"iteration"};
      for (std::size_t f = 0; f < cfg.observed_fractions.size(); ++f) {
        const double frac = cfg.observed_fractions[f];
        RandomSource mask_rng(RandomSource::derive_seed(cfg.base_seed, {2, std::uint64_t(f)}));
        const ObservationMask mask = gen_mask(cfg.rows, cfg.cols, frac, mask_rng);
        records.push_back(run_recorded(inst.a, &mask, base));
        const SolveRecord& rec = records.back();
        report.runs.rows.push_back({frac, rec.converged ? 1.0 : 0.0,
                                    double(rec.iterations), final_residual(rec)});
        report.per_iteration.columns.push_back("residual_obs_" + std::to_string(frac));
      }
      std::size_t longest = 0;
      for (const auto& rec : records) longest = std::max(longest, rec.trace.size());
      for (std::size_t k = 1; k <= longest; ++k) {
        std::vector<double> row{double(k)};
        for (const auto& rec : records) row.push_back(trace_at(rec.trace, k));
        report.per_iteration.rows.push_back(std::move(row));
      }
      break;
    }
    case SensitivityMode::ParamMisspecification: {
      if (cfg.rank_offsets.empty() || cfg.alpha_factors.empty()) {
        throw ConfigError("sensitivity_suite: parameter grids must be nonempty");
      }
      std::vector<SolveRecord> records;
      std::vector<std::pair<Index, double>> combos;
      report.runs.columns = {"rank_solver", "alpha_solver", "converged", "iterations",
                             "final_residual"};
      report.per_iteration.columns = {"iteration"};
      for (Index dr : cfg.rank_offsets) {
        for (double fa : cfg.alpha_factors) {
          const Index r = std::clamp<Index>(cfg.rank + dr, 1, std::min(cfg.rows, cfg.cols));
          const double alpha = std::min(1.0, cfg.alpha * fa);
          SolverConfig sc = base;
          sc.rank = r;
          sc.alpha = SparsityLevel(alpha);
          records.push_back(run_recorded(inst.a, nullptr, sc));
          combos.emplace_back(r, alpha);
          const SolveRecord& rec = records.back();
          report.runs.rows.push_back({double(r), alpha, rec.converged ? 1.0 : 0.0,
                                      double(rec.iterations), final_residual(rec)});
          report.per_iteration.columns.push_back(
              "residual_r" + std::to_string(r) + "_a" + std::to_string(alpha));
        }
      }
      std::size_t longest = 0;
      for (const auto& rec : records) longest = std::max(longest, rec.trace.size());
      for (std::size_t k = 1; k <= longest; ++k) {
        std::vector<double> row{double(k)};
        for (const auto& rec : records) row.push_back(trace_at(rec.trace, k));
        report.per_iteration.rows.push_back(std::move(row));
      }
      break;
    }
  }
  return report;
}

}  // namespace feasproj

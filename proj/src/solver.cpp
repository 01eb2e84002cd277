#include "feasproj/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace feasproj {

namespace {

void validate_config(const Matrix& a, const SolverConfig& cfg, const char* where) {
  const Index cap = std::min(a.rows(), a.cols());
  if (cfg.rank < 1 || cfg.rank > cap) {
    throw ConfigError(std::string(where) + ": rank " + std::to_string(cfg.rank) +
                      " outside [1, " + std::to_string(cap) + "] for " +
                      shape_string(a.rows(), a.cols()));
  }
  if (!(cfg.tolerance > 0.0)) {
    throw ConfigError(std::string(where) + ": tolerance must be positive");
  }
  if (cfg.max_iterations < 1) {
    throw ConfigError(std::string(where) + ": max_iterations must be >= 1");
  }
  if (cfg.init.kind == Initialization::Kind::Given) {
    require_same_shape(a, cfg.init.l0, where);
    require_same_shape(a, cfg.init.s0, where);
    require_finite(cfg.init.l0, where);
    require_finite(cfg.init.s0, where);
  }
}

std::pair<Matrix, Matrix> starting_pair(const Matrix& a, const ObservationMask* mask,
                                        const SolverConfig& cfg) {
  switch (cfg.init.kind) {
    case Initialization::Kind::Given:
      return {cfg.init.l0, cfg.init.s0};
    case Initialization::Kind::RandomGaussian: {
      RandomSource rng(cfg.init.seed);
      Matrix l0 = gaussian_matrix(a.rows(), a.cols(), rng);
      Matrix s0 = gaussian_matrix(a.rows(), a.cols(), rng);
      return {std::move(l0), std::move(s0)};
    }
    case Initialization::Kind::Zeros:
      return {Matrix::Zero(a.rows(), a.cols()), Matrix::Zero(a.rows(), a.cols())};
    case Initialization::Kind::SparseFirst:
    default: {
      Matrix s0 = mask ? sparsify_alpha(restrict(a, *mask), cfg.alpha)
                       : sparsify_alpha(a, cfg.alpha);
      return {Matrix::Zero(a.rows(), a.cols()), std::move(s0)};
    }
  }
}

}  // namespace

DecompositionResult solve_rpca(const Matrix& a, const SolverConfig& cfg,
                               const IterationObserver& observer) {
  validate_config(a, cfg, "solve_rpca");
  require_finite(a, "solve_rpca");

  const double denom = std::max(a.norm(), 1.0);
  auto [l, s] = starting_pair(a, nullptr, cfg);
  RandomSource krylov_rng(cfg.svd.seed);

  DecompositionResult result;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    auto [lt, st] = project_linear(l, s, a);
    l = hard_threshold_rank(lt, cfg.rank, cfg.svd, &result.metadata, &krylov_rng);
    s = sparsify_alpha(st, cfg.alpha);

    const Matrix gap = a - l - s;
    const double residual = gap.norm() / denom;
    if (!std::isfinite(residual)) {
      throw NumericError("solve_rpca: non-finite residual at iteration " +
                         std::to_string(k), result.residual_trace);
    }
    result.residual_trace.push_back(residual);
    result.iterations = k;
    if (observer) observer(k, l, s, residual);
    if (residual <= cfg.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.low_rank = std::move(l);
  result.sparse = std::move(s);
  return result;
}

DecompositionResult solve_rmc(const Matrix& a, const ObservationMask& mask,
                              const SolverConfig& cfg,
                              const IterationObserver& observer) {
  validate_config(a, cfg, "solve_rmc");
  if (mask.rows() != a.rows() || mask.cols() != a.cols()) {
    throw DimensionError("solve_rmc: mask " + shape_string(mask.rows(), mask.cols()) +
                         " does not match matrix " + shape_string(a.rows(), a.cols()));
  }
  if (mask.is_empty()) {
    throw ConfigError("solve_rmc: empty observation mask, nothing to fit");
  }
  require_finite(a, "solve_rmc");

  const bool full = mask.is_full();
  const Matrix a_observed = restrict(a, mask);
  const double denom = std::max(a_observed.norm(), 1.0);
  auto [l, s] = starting_pair(a, &mask, cfg);
  RandomSource krylov_rng(cfg.svd.seed);

  DecompositionResult result;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    auto [lt, st] = project_linear_masked(l, s, a, mask);
    // unobserved entries of L carry over unchanged into the rank projection
    const Matrix rank_arg = full ? std::move(lt) : Matrix(lt + complement_restrict(l, mask));
    l = hard_threshold_rank(rank_arg, cfg.rank, cfg.svd, &result.metadata, &krylov_rng);
    s = sparsify_alpha(st, cfg.alpha);

    const Matrix diff = a - l - s;
    const Matrix gap = restrict(diff, mask);
    const double residual = gap.norm() / denom;
    if (!std::isfinite(residual)) {
      throw NumericError("solve_rmc: non-finite residual at iteration " +
                         std::to_string(k), result.residual_trace);
    }
    result.residual_trace.push_back(residual);
    result.iterations = k;
    if (observer) observer(k, l, s, residual);
    if (residual <= cfg.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.low_rank = std::move(l);
  result.sparse = std::move(s);
  return result;
}

RateEstimate estimate_rate(const std::vector<double>& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0) || !(tail_fraction <= 1.0)) {
    throw ConfigError("estimate_rate: tail_fraction must lie in (0,1]");
  }
  const std::size_t positives =
      std::size_t(std::count_if(trace.begin(), trace.end(), [](double v) { return v > 0.0; }));
  if (positives < 5) {
    throw ConfigError("estimate_rate: need at least 5 strictly positive residuals, got " +
                      std::to_string(positives));
  }

  const std::size_t n = trace.size();
  const std::size_t begin = std::size_t(std::floor(double(n) * (1.0 - tail_fraction)));

  std::vector<std::pair<double, double>> points;  // (k, log residual)
  for (std::size_t k = begin; k < n; ++k) {
    if (trace[k] > 0.0) points.emplace_back(double(k), std::log(trace[k]));
  }
  if (points.size() < 2) {
    throw ConfigError("estimate_rate: fit window has fewer than 2 positive residuals");
  }

  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= double(points.size());
  mean_y /= double(points.size());

  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;

  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [x, y] : points) {
    const double fit = intercept + slope * x;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean_y) * (y - mean_y);
  }

  RateEstimate est;
  est.c_hat = std::exp(slope);
  est.above_one = est.c_hat > 1.0;
  est.window_begin = int(begin);
  est.window_end = int(n);
  est.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
  return est;
}

}  // namespace feasproj

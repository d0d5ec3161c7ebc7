#pragma once

// Monte-Carlo checks of how subsampling m of M views perturbs the
// covariances and the objective:
//   delta_w = ‖R_w(m) − Σ_w‖₂,  delta_t = ‖R_t(m) − Σ_t‖₂,
//   rho_m versus rho on all M views.
// Pools hold unit-norm view vectors. Deviations use uncentered second
// moments; rho uses the usual centered estimate.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mvcorr/rng.hpp"

namespace mvcorr::bound {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Sampling { WithReplacement, WithoutReplacement };

struct ViewPool {
  std::vector<Matrix> views;  ///< M views, each d×N; column i belongs to instance i

  int m_views() const { return static_cast<int>(views.size()); }
  Index d() const { return views.front().rows(); }
  Index n() const { return views.front().cols(); }
};

struct PoolParams {
  Index n = 256;
  Index d = 16;
  Index k = 10;
  int m_views = 64;
  double alpha = 0.5;
  double beta = 0.7;
  std::uint64_t seed = 1;
};

/// Synthetic shared-signal pool with every view vector scaled to unit norm.
ViewPool make_pool(const PoolParams& params);

/// Wraps existing views, scaling every column to unit norm (zero columns stay zero).
ViewPool pool_from_views(std::vector<Matrix> views);

/// m slot matrices (d×N): slot j of instance i is a view drawn for that instance.
std::vector<Matrix> subsample(const ViewPool& pool, int m, Sampling sampling, Rng& rng);

struct Summary {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;
};

Summary deviation_within(const ViewPool& pool, int m, int trials, std::uint64_t seed,
                         Sampling sampling = Sampling::WithReplacement);
Summary deviation_total(const ViewPool& pool, int m, int trials, std::uint64_t seed,
                        Sampling sampling = Sampling::WithReplacement);

struct GapPoint {
  int m = 0;
  std::vector<double> rho_m;
  double mean_rho_m = 0.0;
  double rho_full = 0.0;
  double gap = 0.0;  ///< |mean rho_m − rho_full|
};
std::vector<GapPoint> rho_gap(const ViewPool& pool, const std::vector<int>& m_grid, int trials, std::uint64_t seed,
                              double nu, Sampling sampling = Sampling::WithReplacement);

/// Fraction of bootstrap resamples (of the trial values) in which the gap of
/// `far` exceeds the gap of `near`.
double gap_order_confidence(const GapPoint& far, const GapPoint& near, int resamples, std::uint64_t seed);

struct TrialRow {
  int m = 0;
  Index d = 0;
  Index n = 0;
  int trial = 0;
  double delta_w = 0.0;
  double delta_t = 0.0;
  double rho_m = 0.0;
  double rho_full = 0.0;
};

struct GridConfig {
  std::vector<int> m_grid{2, 4, 8, 16, 32};
  int trials = 50;
  double nu = 0.2;
  Sampling sampling = Sampling::WithReplacement;
  std::uint64_t seed = 1;
  double t_nominal = 1.0;  ///< deviation parameter t; reported only
};

struct GridSummaryRow {
  int m = 0;
  double mean_delta_w = 0.0;
  double mean_delta_t = 0.0;
  double max_delta_t_ratio = 0.0;  ///< max over trials of delta_t / (N m)
  double mean_rho_m = 0.0;
  double gap = 0.0;
};

struct DeviationReport {
  std::vector<TrialRow> rows;
  std::vector<GridSummaryRow> summary;
  double rho_full = 0.0;
  double slope_delta_w = 0.0;  ///< least-squares slope of log mean delta_w against log m
  double t_nominal = 1.0;
  bool delta_t_bound_holds = true;  ///< delta_t ≤ N·m on every trial
};

DeviationReport run_grid(const ViewPool& pool, const GridConfig& config);

/// Header "m,d,N,trial,delta_w,delta_t,rho_m,rho_full" then one row per trial.
void write_csv(std::ostream& out, const DeviationReport& report);

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mvcorr::bound

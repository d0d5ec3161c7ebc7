#include "mvcorr/boundlab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "mvcorr/covariance.hpp"
#include "mvcorr/errors.hpp"
#include "mvcorr/kernels.hpp"
#include "mvcorr/linalg.hpp"
#include "mvcorr/objective.hpp"
#include "mvcorr/synthdata.hpp"

namespace mvcorr::bound {

namespace {

std::uint64_t trial_stream(int m, int trial) {
  return (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint32_t>(trial);
}

void check_m(const ViewPool& pool, int m) {
  require(!pool.views.empty(), "boundlab: empty pool");
  require(m >= 1 && m <= pool.m_views(), "boundlab: m=" + std::to_string(m) + " must lie in [1, M=" +
                                             std::to_string(pool.m_views()) + "]");
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.values = std::move(values);
  const double n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = s.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return s;
}

// Same estimators as cov::within_view_cov / total_view_cov, but also defined for m = 1.
Matrix second_moment(const std::vector<Matrix>& slots) {
  return kernels::gram_sum(slots) / static_cast<double>(slots.size());
}

Matrix total_moment(const std::vector<Matrix>& slots) {
  Matrix sum = slots[0];
  for (std::size_t j = 1; j < slots.size(); ++j) sum += slots[j];
  return kernels::gram_sum(std::span<const Matrix>(&sum, 1)) / static_cast<double>(slots.size());
}

}  // namespace

ViewPool pool_from_views(std::vector<Matrix> views) {
  require(!views.empty(), "pool_from_views: no views");
  for (Matrix& v : views) {
    require(v.rows() == views[0].rows() && v.cols() == views[0].cols(), "pool_from_views: view shape mismatch");
    for (Index i = 0; i < v.cols(); ++i) {
      const double norm = v.col(i).norm();
      if (norm > 0.0) v.col(i) /= norm;
    }
  }
  return ViewPool{std::move(views)};
}

ViewPool make_pool(const PoolParams& p) {
  synth::SynthParams sp;
  sp.n = p.n;
  sp.dim = p.d;
  sp.k = p.k;
  sp.m_views = p.m_views;
  sp.alpha = p.alpha;
  sp.beta = p.beta;
  sp.seed = p.seed;
  return pool_from_views(synth::generate(sp).measurements);
}

std::vector<Matrix> subsample(const ViewPool& pool, int m, Sampling sampling, Rng& rng) {
  check_m(pool, m);
  const auto big_m = static_cast<std::size_t>(pool.m_views());
  std::vector<Matrix> slots(static_cast<std::size_t>(m), Matrix(pool.d(), pool.n()));
  std::vector<std::size_t> order(big_m);
  for (Index i = 0; i < pool.n(); ++i) {
    if (sampling == Sampling::WithReplacement) {
      for (auto& slot : slots) slot.col(i) = pool.views[rng.index(big_m)].col(i);
    } else {
      // Random m-subset kept in pool order, so m = M reproduces the pool.
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) std::swap(order[j], order[j + rng.index(big_m - j)]);
      std::sort(order.begin(), order.begin() + m);
      for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) slots[j].col(i) = pool.views[order[j]].col(i);
    }
  }
  return slots;
}

Summary deviation_within(const ViewPool& pool, int m, int trials, std::uint64_t seed, Sampling sampling) {
  check_m(pool, m);
  require(trials >= 1, "deviation_within: trials must be positive");
  const Matrix sigma_w = second_moment(pool.views);
  const Rng root(seed);
  std::vector<double> values(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.split(trial_stream(m, t));
    const auto slots = subsample(pool, m, sampling, rng);
    values[static_cast<std::size_t>(t)] = linalg::spectral_norm(second_moment(slots) - sigma_w);
  }
  return summarize(std::move(values));
}

Summary deviation_total(const ViewPool& pool, int m, int trials, std::uint64_t seed, Sampling sampling) {
  check_m(pool, m);
  require(trials >= 1, "deviation_total: trials must be positive");
  const Matrix sigma_t = total_moment(pool.views);
  const Rng root(seed);
  std::vector<double> values(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.split(trial_stream(m, t));
    const auto slots = subsample(pool, m, sampling, rng);
    values[static_cast<std::size_t>(t)] = linalg::spectral_norm(total_moment(slots) - sigma_t);
  }
  return summarize(std::move(values));
}

std::vector<GapPoint> rho_gap(const ViewPool& pool, const std::vector<int>& m_grid, int trials, std::uint64_t seed,
                              double nu, Sampling sampling) {
  require(trials >= 1, "rho_gap: trials must be positive");
  for (int m : m_grid) {
    check_m(pool, m);
    require(m >= 2, "rho_gap: m must be at least 2");
  }
  const double rho_full = objective::mv_corr(cov::estimate(pool.views, nu)).rho;
  const Rng root(seed);
  std::vector<GapPoint> out;
  for (int m : m_grid) {
    GapPoint g;
    g.m = m;
    g.rho_full = rho_full;
    g.rho_m.resize(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
      Rng rng = root.split(trial_stream(m, t));
      const auto slots = subsample(pool, m, sampling, rng);
      g.rho_m[static_cast<std::size_t>(t)] = objective::mv_corr(cov::estimate(slots, nu)).rho;
    }
    g.mean_rho_m = std::accumulate(g.rho_m.begin(), g.rho_m.end(), 0.0) / trials;
    g.gap = std::abs(g.mean_rho_m - rho_full);
    out.push_back(std::move(g));
  }
  return out;
}

double gap_order_confidence(const GapPoint& far, const GapPoint& near, int resamples, std::uint64_t seed) {
  require(resamples >= 1, "gap_order_confidence: resamples must be positive");
  require(!far.rho_m.empty() && !near.rho_m.empty(), "gap_order_confidence: no trial values");
  Rng rng(seed);
  auto resampled_gap = [&](const GapPoint& g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.rho_m.size(); ++i) sum += g.rho_m[rng.index(g.rho_m.size())];
    return std::abs(sum / static_cast<double>(g.rho_m.size()) - g.rho_full);
  };
  int wins = 0;
  for (int b = 0; b < resamples; ++b) {
    const double gf = resampled_gap(far);
    const double gn = resampled_gap(near);
    if (gf > gn) ++wins;
  }
  return static_cast<double>(wins) / resamples;
}

DeviationReport run_grid(const ViewPool& pool, const GridConfig& config) {
  require(!config.m_grid.empty(), "run_grid: empty m grid");
  require(config.trials >= 1, "run_grid: trials must be positive");
  for (int m : config.m_grid) {
    check_m(pool, m);
    require(m >= 2, "run_grid: m must be at least 2");
  }

  const Matrix sigma_w = second_moment(pool.views);
  const Matrix sigma_t = total_moment(pool.views);
  DeviationReport report;
  report.t_nominal = config.t_nominal;
  report.rho_full = objective::mv_corr(cov::estimate(pool.views, config.nu)).rho;

  const Rng root(config.seed);
  std::vector<double> log_m, log_dw;
  for (int m : config.m_grid) {
    std::vector<TrialRow> rows(static_cast<std::size_t>(config.trials));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < config.trials; ++t) {
      Rng rng = root.split(trial_stream(m, t));
      const auto slots = subsample(pool, m, config.sampling, rng);
      TrialRow& r = rows[static_cast<std::size_t>(t)];
      r.m = m;
      r.d = pool.d();
      r.n = pool.n();
      r.trial = t;
      r.delta_w = linalg::spectral_norm(second_moment(slots) - sigma_w);
      r.delta_t = linalg::spectral_norm(total_moment(slots) - sigma_t);
      r.rho_m = objective::mv_corr(cov::estimate(slots, config.nu)).rho;
      r.rho_full = report.rho_full;
    }

    GridSummaryRow s;
    s.m = m;
    const double bound = static_cast<double>(pool.n()) * m;
    for (const TrialRow& r : rows) {
      s.mean_delta_w += r.delta_w;
      s.mean_delta_t += r.delta_t;
      s.mean_rho_m += r.rho_m;
      s.max_delta_t_ratio = std::max(s.max_delta_t_ratio, r.delta_t / bound);
      if (!(r.delta_t <= bound)) report.delta_t_bound_holds = false;
    }
    s.mean_delta_w /= config.trials;
    s.mean_delta_t /= config.trials;
    s.mean_rho_m /= config.trials;
    s.gap = std::abs(s.mean_rho_m - report.rho_full);
    report.summary.push_back(s);
    log_m.push_back(static_cast<double>(m));
    log_dw.push_back(s.mean_delta_w);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  report.slope_delta_w = config.m_grid.size() >= 2 ? log_log_slope(log_m, log_dw) : 0.0;
  return report;
}

void write_csv(std::ostream& out, const DeviationReport& report) {
  out << "m,d,N,trial,delta_w,delta_t,rho_m,rho_full\n";
  out << std::setprecision(17);
  for (const TrialRow& r : report.rows)
    out << r.m << ',' << r.d << ',' << r.n << ',' << r.trial << ',' << r.delta_w << ',' << r.delta_t << ','
        << r.rho_m << ',' << r.rho_full << '\n';
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "log_log_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log_log_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace mvcorr::bound

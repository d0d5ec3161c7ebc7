#include <gtest/gtest.h>

#include <sstream>

#include "mvcorr/boundlab.hpp"
#include "mvcorr/errors.hpp"
#include "test_support.hpp"

using namespace mvcorr;
using namespace mvcorr::bound;

namespace {

PoolParams small_pool(int views = 8) {
  PoolParams p;
  p.n = 60;
  p.d = 6;
  p.k = 3;
  p.m_views = views;
  p.seed = 2;
  return p;
}

}  // namespace

TEST(Pool, UnitNormColumns) {
  const ViewPool pool = make_pool(small_pool());
  ASSERT_EQ(pool.m_views(), 8);
  for (const Matrix& v : pool.views)
    for (Index j = 0; j < v.cols(); ++j) EXPECT_NEAR(v.col(j).norm(), 1.0, 1e-12);
}

TEST(Pool, ZeroColumnsStayZero) {
  std::vector<Matrix> views{Matrix::Zero(3, 4), Matrix::Ones(3, 4)};
  const ViewPool pool = pool_from_views(views);
  EXPECT_EQ(pool.views[0], Matrix::Zero(3, 4));
}

TEST(Subsample, WithoutReplacementFullDrawIsAPermutation) {
  const ViewPool pool = make_pool(small_pool());
  Rng rng(1);
  const auto slots = subsample(pool, 8, Sampling::WithoutReplacement, rng);
  for (Index j = 0; j < pool.n(); ++j) {
    Matrix drawn(pool.d(), 8), full(pool.d(), 8);
    for (int s = 0; s < 8; ++s) {
      drawn.col(s) = slots[static_cast<std::size_t>(s)].col(j);
      full.col(s) = pool.views[static_cast<std::size_t>(s)].col(j);
    }
    for (int s = 0; s < 8; ++s) {
      bool found = false;
      for (int t = 0; t < 8; ++t) found = found || drawn.col(t) == full.col(s);
      EXPECT_TRUE(found);
    }
  }
}

TEST(DeviationWithin, FullDrawWithoutReplacementIsZero) {
  const ViewPool pool = make_pool(small_pool());
  const Summary s = deviation_within(pool, 8, 5, 3, Sampling::WithoutReplacement);
  for (double v : s.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(DeviationWithin, IdenticalViewsGiveZero) {
  Rng rng(4);
  const Matrix x = rng.normal_matrix(5, 1);
  const ViewPool pool = pool_from_views(std::vector<Matrix>(6, x));
  for (int m : {1, 2, 5}) {
    const Summary s = deviation_within(pool, m, 4, 5);
    for (double v : s.values) EXPECT_NEAR(v, 0.0, 1e-14);
  }
}

TEST(DeviationWithin, MeanShrinksAsMGrows) {
  const ViewPool pool = make_pool(small_pool(32));
  EXPECT_GT(deviation_within(pool, 2, 30, 6).mean, deviation_within(pool, 16, 30, 6).mean);
}

TEST(DeviationWithin, RejectsMAbovePool) {
  const ViewPool pool = make_pool(small_pool());
  EXPECT_THROW(deviation_within(pool, 9, 2, 0), ContractViolation);
  EXPECT_THROW(deviation_total(pool, 9, 2, 0), ContractViolation);
}

TEST(DeviationTotal, FullDrawWithoutReplacementIsZero) {
  const ViewPool pool = make_pool(small_pool());
  const Summary s = deviation_total(pool, 8, 5, 3, Sampling::WithoutReplacement);
  for (double v : s.values) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(DeviationTotal, NeverExceedsNm) {
  const ViewPool pool = make_pool(small_pool(32));
  for (int m : {2, 4, 8, 16, 32}) {
    const Summary s = deviation_total(pool, m, 20, 7);
    for (double v : s.values) EXPECT_LE(v, static_cast<double>(pool.n()) * m);
  }
}

TEST(DeviationTotal, GrowsWithM) {
  const ViewPool pool = make_pool(small_pool(32));
  double previous = 0.0;
  for (int m : {2, 4, 8, 16}) {
    const double mean = deviation_total(pool, m, 30, 8).mean;
    EXPECT_GT(mean, previous) << "m=" << m;
    previous = mean;
  }
}

TEST(RhoGap, FullDrawWithoutReplacementIsZero) {
  const ViewPool pool = make_pool(small_pool());
  const auto gaps = rho_gap(pool, {8}, 3, 9, 0.2, Sampling::WithoutReplacement);
  ASSERT_EQ(gaps.size(), 1u);
  EXPECT_NEAR(gaps[0].gap, 0.0, 1e-12);
}

TEST(RhoGap, BoundedAndShrinking) {
  PoolParams p = small_pool(16);
  p.n = 256;
  p.d = 16;
  p.k = 10;
  const ViewPool pool = make_pool(p);
  const auto gaps = rho_gap(pool, {2, 8}, 100, 10, 0.2, Sampling::WithoutReplacement);
  for (const auto& g : gaps)
    for (double r : g.rho_m) EXPECT_LE(r, 1.0 + 1e-8);
  EXPECT_LT(gaps[1].gap, gaps[0].gap);
  EXPECT_GE(gap_order_confidence(gaps[0], gaps[1], 200, 11), 0.95);
}

TEST(RhoGap, RejectsSingleView) {
  const ViewPool pool = make_pool(small_pool());
  EXPECT_THROW(rho_gap(pool, {1}, 2, 0, 0.2), ContractViolation);
}

TEST(Grid, CsvSchemaAndRowCount) {
  const ViewPool pool = make_pool(small_pool(8));
  GridConfig cfg;
  cfg.m_grid = {2, 4};
  cfg.trials = 3;
  const DeviationReport r = run_grid(pool, cfg);
  EXPECT_EQ(r.rows.size(), 6u);
  std::ostringstream out;
  write_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "m,d,N,trial,delta_w,delta_t,rho_m,rho_full");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.delta_w, 0.0);
    EXPECT_GE(row.delta_t, 0.0);
  }
}

TEST(Grid, Deterministic) {
  const ViewPool pool = make_pool(small_pool(8));
  GridConfig cfg;
  cfg.m_grid = {2, 4};
  cfg.trials = 4;
  std::ostringstream a, b;
  write_csv(a, run_grid(pool, cfg));
  write_csv(b, run_grid(pool, cfg));
  EXPECT_EQ(a.str(), b.str());
}

TEST(LogLogSlope, ExactPowerLaw) {
  const std::vector<double> x{2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 / v);
  EXPECT_NEAR(log_log_slope(x, y), -1.0, 1e-12);
  EXPECT_THROW(log_log_slope({1.0}, {1.0}), ContractViolation);
}

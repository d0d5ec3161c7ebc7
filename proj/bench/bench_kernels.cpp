// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to compare.

#include <benchmark/benchmark.h>

#include <vector>

#include "mvcorr/kernels.hpp"
#include "mvcorr/rng.hpp"

namespace {

using mvcorr::kernels::Matrix;

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  mvcorr::Rng rng(seed);
  return rng.normal_matrix(rows, cols);
}

std::vector<Matrix> make_views(benchmark::State& state) {
  const auto d = state.range(0);
  const auto n = state.range(1);
  std::vector<Matrix> views;
  for (int l = 0; l < 4; ++l) views.push_back(random_matrix(d, n, 100 + l));
  return views;
}

void BM_GramSumReference(benchmark::State& state) {
  const auto views = make_views(state);
  for (auto _ : state) benchmark::DoNotOptimize(mvcorr::kernels::reference::gram_sum(views));
  state.SetItemsProcessed(state.iterations() * state.range(1) * 4);
}

void BM_GramSumOmp(benchmark::State& state) {
  const auto views = make_views(state);
  for (auto _ : state) benchmark::DoNotOptimize(mvcorr::kernels::gram_sum(views));
  state.SetItemsProcessed(state.iterations() * state.range(1) * 4);
}

void BM_AssignReference(benchmark::State& state) {
  const Matrix points = random_matrix(state.range(0), 16, 7);
  const Matrix centers = random_matrix(state.range(1), 16, 8);
  for (auto _ : state) benchmark::DoNotOptimize(mvcorr::kernels::reference::assign_nearest(points, centers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AssignOmp(benchmark::State& state) {
  const Matrix points = random_matrix(state.range(0), 16, 7);
  const Matrix centers = random_matrix(state.range(1), 16, 8);
  for (auto _ : state) benchmark::DoNotOptimize(mvcorr::kernels::assign_nearest(points, centers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_GramSumReference)->Args({16, 2000})->Args({64, 2000});
BENCHMARK(BM_GramSumOmp)->Args({16, 2000})->Args({64, 2000});
BENCHMARK(BM_AssignReference)->Args({3000, 5})->Args({20000, 10});
BENCHMARK(BM_AssignOmp)->Args({3000, 5})->Args({20000, 10});

BENCHMARK_MAIN();

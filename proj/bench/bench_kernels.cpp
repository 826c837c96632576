// Serial reference vs OpenMP for the two hot loops. Worker count follows
// OMP_NUM_THREADS; on one core the omp rows only measure overhead.

#include <benchmark/benchmark.h>

#include "smoothcop/copula_models.hpp"
#include "smoothcop/kernels.hpp"
#include "smoothcop/partial_derivatives.hpp"

using namespace smoothcop;

namespace {

SmoothEmpiricalCopula fitted(std::size_t n, const SmoothingFamily& fam) {
  Rng rng = SeedStreams(11).engine();
  return SmoothEmpiricalCopula(compute_ranks(sample(CopulaModel::from_tau(CopulaFamily::Clayton, 0.5, 2), n, rng)), fam);
}

std::vector<std::vector<double>> axes(std::size_t g) {
  auto a = open_grid(g);
  return {a, a};
}

template <bool Omp>
void BM_EvalGrid(benchmark::State& state) {
  auto fam = state.range(1) == 0 ? SmoothingFamily::binomial() : SmoothingFamily::beta_binomial(4.0);
  auto cop = fitted(static_cast<std::size_t>(state.range(0)), fam);
  auto grid = axes(47);
  for (auto _ : state) {
    auto v = Omp ? kernels::omp::eval_grid(cop, grid) : kernels::serial::eval_grid(cop, grid);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Omp>
void BM_MultiplierProducts(benchmark::State& state) {
  const auto B = static_cast<std::size_t>(state.range(0)), n = static_cast<std::size_t>(state.range(1));
  const std::size_t cols = 100;
  Rng rng = SeedStreams(12).engine();
  std::vector<double> xi(B * n), a(n * cols), out(B * cols);
  for (auto& x : xi) x = uniform01(rng) - 0.5;
  for (auto& x : a) x = uniform01(rng);
  for (auto _ : state) {
    if (Omp)
      kernels::omp::multiplier_products(xi.data(), a.data(), B, n, cols, out.data());
    else
      kernels::serial::multiplier_products(xi.data(), a.data(), B, n, cols, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(B * n * cols));
}

}  // namespace

BENCHMARK(BM_EvalGrid<false>)->Args({80, 0})->Args({80, 1})->Args({400, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalGrid<true>)->Args({80, 0})->Args({80, 1})->Args({400, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplierProducts<false>)->Args({300, 80})->Args({1000, 400})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplierProducts<true>)->Args({300, 80})->Args({1000, 400})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

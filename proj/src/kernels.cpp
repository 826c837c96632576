#include "smoothcop/kernels.hpp"

#include <omp.h>

#include <Eigen/Core>

namespace smoothcop {

void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
  omp_set_max_active_levels(1);
}

int worker_count() { return omp_get_max_threads(); }

namespace kernels {

namespace {

struct GridTables {
  std::vector<std::vector<std::vector<double>>> tables;  // [axis][value] -> factors
  std::size_t points = 1;
};

GridTables build_tables(const SmoothEmpiricalCopula& cop, const std::vector<std::vector<double>>& axis_values,
                        bool parallel) {
  GridTables g;
  const std::size_t d = cop.d();
  g.tables.resize(d);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t j = 0; j < d; ++j) {
    g.tables[j].resize(axis_values[j].size());
    g.points *= axis_values[j].size();
    for (std::size_t k = 0; k < axis_values[j].size(); ++k) jobs.emplace_back(j, k);
  }
  auto job = [&](std::size_t t) {
    auto [j, k] = jobs[t];
    g.tables[j][k] = cop.axis_factors(j, axis_values[j][k]);
  };
  if (parallel) {
    parallel_for(jobs.size(), job);
  } else {
    for (std::size_t t = 0; t < jobs.size(); ++t) job(t);
  }
  return g;
}

double grid_point(const SmoothEmpiricalCopula& cop, const GridTables& g,
                  const std::vector<std::vector<double>>& axis_values, std::size_t p) {
  const std::size_t d = cop.d();
  const double* axes[16];
  for (std::size_t j = d; j-- > 0;) {
    std::size_t len = axis_values[j].size();
    axes[j] = g.tables[j][p % len].data();
    p /= len;
  }
  return cop.combine(std::span<const double* const>(axes, d));
}

}  // namespace

namespace serial {

std::vector<double> eval_grid(const SmoothEmpiricalCopula& cop, const std::vector<std::vector<double>>& axis_values) {
  auto g = build_tables(cop, axis_values, false);
  std::vector<double> out(g.points);
  for (std::size_t p = 0; p < g.points; ++p) out[p] = grid_point(cop, g, axis_values, p);
  return out;
}

void multiplier_products(const double* xi, const double* a, std::size_t rows, std::size_t inner, std::size_t cols,
                         double* out) {
  for (std::size_t b = 0; b < rows; ++b)
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < inner; ++i) s += xi[b * inner + i] * a[i * cols + c];
      out[b * cols + c] = s;
    }
}

}  // namespace serial

namespace omp {

std::vector<double> eval_grid(const SmoothEmpiricalCopula& cop, const std::vector<std::vector<double>>& axis_values) {
  auto g = build_tables(cop, axis_values, true);
  std::vector<double> out(g.points);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(g.points); ++p)
    out[p] = grid_point(cop, g, axis_values, static_cast<std::size_t>(p));
  return out;
}

void multiplier_products(const double* xi, const double* a, std::size_t rows, std::size_t inner, std::size_t cols,
                         double* out) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // Fixed row blocks: each block is one GEMM whose shape does not depend on
  // the thread count, which keeps the output bit-stable across workers.
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (rows + kBlock - 1) / kBlock;
  Eigen::Map<const RowMat> A(a, inner, cols);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
    std::size_t r0 = blk * kBlock;
    std::size_t nr = std::min(kBlock, rows - r0);
    Eigen::Map<const RowMat> X(xi + r0 * inner, nr, inner);
    Eigen::Map<RowMat> Y(out + r0 * cols, nr, cols);
    Y.noalias() = X * A;
  }
}

}  // namespace omp

}  // namespace kernels

}  // namespace smoothcop

#pragma once

#include <cstddef>
#include <vector>

#include "smoothcop/smoothing.hpp"

namespace smoothcop {

// Runs body(i) for i in [0, count). Work is spread over OpenMP threads but
// each index is handled exactly once, so results stored by index do not
// depend on the thread count.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) body(static_cast<std::size_t>(i));
}

void set_worker_count(int workers);
int worker_count();

// The two hot loops, each in a plain serial form (the reference used by the
// tests) and an OpenMP form. Both give bit-identical results for the grid
// kernel; the product kernel agrees to rounding.
namespace kernels {

// Values of cop on the tensor grid axis_values[0] x ... x axis_values[d-1],
// last axis fastest.
namespace serial {
std::vector<double> eval_grid(const SmoothEmpiricalCopula& cop, const std::vector<std::vector<double>>& axis_values);
// out (rows x cols) = xi (rows x inner) * a (inner x cols), all row-major.
void multiplier_products(const double* xi, const double* a, std::size_t rows, std::size_t inner, std::size_t cols,
                         double* out);
}  // namespace serial

namespace omp {
std::vector<double> eval_grid(const SmoothEmpiricalCopula& cop, const std::vector<std::vector<double>>& axis_values);
void multiplier_products(const double* xi, const double* a, std::size_t rows, std::size_t inner, std::size_t cols,
                         double* out);
}  // namespace omp

}  // namespace kernels

}  // namespace smoothcop

#pragma once

#include <span>
#include <string>
#include <vector>

#include "smoothcop/sample.hpp"

namespace smoothcop {

enum class SmoothingKind { Dirac, Binomial, BetaBinomial };

class SmoothingFamily {
 public:
  static SmoothingFamily dirac() { return SmoothingFamily(SmoothingKind::Dirac, 0.0); }
  // Indicators of R/(m + shift) <= u. shift = 1 is the rescaling common in
  // software for change-point tests; shift = 0 is the empirical copula.
  static SmoothingFamily dirac(int rank_shift) { return SmoothingFamily(SmoothingKind::Dirac, 0.0, rank_shift); }
  static SmoothingFamily binomial() { return SmoothingFamily(SmoothingKind::Binomial, 0.0); }
  static SmoothingFamily beta_binomial(double rho = 4.0);
  // "dirac", "bin" or "betab4" (also "betab<rho>").
  static SmoothingFamily parse(const std::string& name);

  SmoothingKind kind() const { return kind_; }
  double rho() const { return rho_; }
  int rank_shift() const { return shift_; }
  std::string name() const;
  bool smooth() const { return kind_ != SmoothingKind::Dirac; }

  friend bool operator==(const SmoothingFamily&, const SmoothingFamily&) = default;

 private:
  SmoothingFamily(SmoothingKind k, double rho, int shift = 0) : kind_(k), rho_(rho), shift_(shift) {}
  SmoothingKind kind_;
  double rho_;
  int shift_;
};

// out[r-1] = K_r(x) = P(W >= r/m) for the margin law of the family at x,
// r = 1..m. For the beta-binomial with m <= rho the law degenerates to its
// two-point limit on {0, 1}.
void margin_kernel(const SmoothingFamily& family, int m, double x, std::span<double> out);
double margin_kernel_at(const SmoothingFamily& family, int m, double x, int r);

// Beta-binomial survival P(S > w) with alpha, beta built from (t, rho);
// t in {0, 1} are handled as limits.
double beta_binomial_survival_t(int p, double t, double rho, int w);
double beta_binomial_cdf_t(int p, double t, double rho, int w);

// The smooth empirical copula of one window. Evaluation goes through
// per-axis factor tables: a point u is the mean over "cells" of the product
// over j of axis_factors(j, u_j). Cells are the m rows for the Dirac and
// binomial kinds and the m*m (row, inner row) pairs for the beta-binomial.
class SmoothEmpiricalCopula {
 public:
  SmoothEmpiricalCopula(RankMatrix ranks, SmoothingFamily family);

  const RankMatrix& ranks() const { return ranks_; }
  const SmoothingFamily& family() const { return family_; }
  std::size_t m() const { return ranks_.m(); }
  std::size_t d() const { return ranks_.d(); }
  std::size_t cells() const { return cells_; }

  std::vector<double> axis_factors(std::size_t j, double x) const;
  void axis_factors(std::size_t j, double x, std::span<double> out) const;

  // Mean over cells of prod_j axes[j][cell].
  double combine(std::span<const double* const> axes) const;
  // out[i] = K_{R_i}(u) for each row i.
  void row_kernels(std::span<const double* const> axes, std::span<double> out) const;

  double operator()(std::span<const double> u) const;
  std::vector<double> row_kernels(std::span<const double> u) const;
  double kernel(std::span<const int> r, std::span<const double> u) const;

 private:
  RankMatrix ranks_;
  SmoothingFamily family_;
  std::size_t cells_;
};

double kernel_K(const SmoothEmpiricalCopula& cop, std::span<const int> r, std::span<const double> u);
double smooth_eval(const SmoothEmpiricalCopula& cop, std::span<const double> u);
double beta_copula_closed_form(const RankMatrix& ranks, std::span<const double> u);

}  // namespace smoothcop

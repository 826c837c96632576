#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

inline double binom_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p == 0.0) return k == 0;
  if (p == 1.0) return k == n;
  return std::exp(log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

// P(Binomial(n, p) > w) by direct summation.
inline double binom_survival(int n, double p, int w) {
  double s = 0.0;
  for (int k = w + 1; k <= n; ++k) s += binom_pmf(n, k, p);
  return s;
}

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);
  double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta) / a;
  const double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    int m = i / 2;
    double num;
    if (i == 0)
      num = 1.0;
    else if (i % 2 == 0)
      num = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    else
      num = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    double cd = c * d;
    f *= cd;
    if (std::abs(1.0 - cd) < 1e-16) break;
  }
  return front * (f - 1.0);
}

// Empirical copula by its definition: indicators of R_ij / m <= u_j.
inline double empirical_copula(const std::vector<std::vector<int>>& ranks, const std::vector<double>& u) {
  const std::size_t m = ranks.size();
  int c = 0;
  for (const auto& r : ranks) {
    bool in = true;
    for (std::size_t j = 0; j < u.size(); ++j) in = in && static_cast<double>(r[j]) / m <= u[j];
    c += in;
  }
  return static_cast<double>(c) / m;
}

// O(m^2) rank definition.
inline std::vector<int> ranks_by_counting(const std::vector<double>& x) {
  std::vector<int> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int c = 0;
    for (double y : x) c += y <= x[i];
    r[i] = c;
  }
  return r;
}

// Concordant minus discordant pairs over all pairs.
inline double kendall_by_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = (x[i] - x[j]) * (y[i] - y[j]);
      s += a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
    }
  return s / (0.5 * n * (n - 1.0));
}

}  // namespace oracle

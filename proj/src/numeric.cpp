#include "smoothcop/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/special_functions/erf.hpp>

#include "smoothcop/errors.hpp"

namespace smoothcop {

namespace {

constexpr double kUnderflow = 1e-290;

// Fill out[0..m] with an unnormalised pmf from its successive ratios
// ratio(k) = p(k+1)/p(k), starting from the anchor k0, then normalise.
// Tails that fall below the underflow guard are set to zero.
template <class Ratio>
void pmf_from_ratios(int m, int k0, Ratio ratio, std::span<double> out) {
  std::fill(out.begin(), out.begin() + m + 1, 0.0);
  out[k0] = 1.0;
  double scale = 1.0;
  for (int k = k0; k < m; ++k) {
    double v = out[k] * ratio(k);
    if (v < kUnderflow * scale) break;
    if (v > 1e200) {
      for (int i = k0; i <= k; ++i) out[i] *= 1e-200;
      v *= 1e-200;
      scale *= 1e-200;
    }
    out[k + 1] = v;
    scale = std::max(scale, v);
  }
  for (int k = k0; k > 0; --k) {
    double v = out[k] / ratio(k - 1);
    if (v < kUnderflow * scale) break;
    if (v > 1e200) {
      for (int i = k; i <= m; ++i) out[i] *= 1e-200;
      v *= 1e-200;
      scale *= 1e-200;
    }
    out[k - 1] = v;
    scale = std::max(scale, v);
  }
  double total = 0.0;
  for (int k = 0; k <= m; ++k) total += out[k];
  for (int k = 0; k <= m; ++k) out[k] /= total;
}

void tail_from_pmf(int m, std::span<double> out) {
  // Upper sums from the top keep small upper tails precise. Where the tail is
  // above 1/2 use 1 - (lower sum) instead, which is accurate near 1 and
  // monotone whenever the lower sums are.
  double lower = 0.0;
  std::vector<double> low(m + 1);
  for (int k = 0; k <= m; ++k) {
    low[k] = lower;  // P(S < k)
    lower += out[k];
  }
  double acc = 0.0;
  for (int k = m; k >= 0; --k) {
    acc += out[k];
    out[k] = acc > 0.5 ? 1.0 - low[k] : acc;
  }
  out[0] = 1.0;
}

}  // namespace

void binomial_pmf(int m, double x, std::span<double> out) {
  if (m < 0 || out.size() < static_cast<std::size_t>(m) + 1) throw DomainError("binomial_pmf: bad size");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binomial_pmf: x outside [0,1]");
  std::fill(out.begin(), out.begin() + m + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return;
  }
  if (x == 1.0) {
    out[m] = 1.0;
    return;
  }
  const double odds = x / (1.0 - x);
  int k0 = std::clamp(static_cast<int>(std::floor((m + 1) * x)), 0, m);
  pmf_from_ratios(
      m, k0, [&](int k) { return (m - k) / (k + 1.0) * odds; }, out);
}

void binomial_tail(int m, double x, std::span<double> out) {
  binomial_pmf(m, x, out);
  tail_from_pmf(m, out);
}

double binomial_survival(int m, double x, int w) {
  if (w < 0) return 1.0;
  if (w >= m) return 0.0;
  std::vector<double> buf(m + 1);
  binomial_tail(m, x, buf);
  return buf[w + 1];
}

namespace {

double lower_sum(std::span<const double> pmf, int w) {
  double acc = 0.0;
  for (int k = 0; k <= w; ++k) acc += pmf[k];
  return std::min(acc, 1.0);
}

}  // namespace

double binomial_cdf(int m, double x, int w) {
  if (w < 0) return 0.0;
  if (w >= m) return 1.0;
  std::vector<double> buf(m + 1);
  binomial_pmf(m, x, buf);
  return lower_sum(buf, w);
}

double beta_binomial_cdf(int m, double a, double b, int w) {
  if (w < 0) return 0.0;
  if (w >= m) return 1.0;
  std::vector<double> buf(m + 1);
  beta_binomial_pmf(m, a, b, buf);
  return lower_sum(buf, w);
}

double binomial_pmf_at(int m, double x, int k) {
  if (k < 0 || k > m) return 0.0;
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  if (x == 1.0) return k == m ? 1.0 : 0.0;
  double lc = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
  return std::exp(lc + k * std::log(x) + (m - k) * std::log1p(-x));
}

void beta_binomial_pmf(int m, double a, double b, std::span<double> out) {
  if (m < 0 || out.size() < static_cast<std::size_t>(m) + 1) throw DomainError("beta_binomial_pmf: bad size");
  if (!(a > 0.0 && b > 0.0)) throw DomainError("beta_binomial_pmf: shape parameters must be positive");
  int k0;
  if (a >= 1.0 && b >= 1.0 && a + b > 2.0) {
    k0 = static_cast<int>(std::lround(m * (a - 1.0) / (a + b - 2.0)));
  } else {
    k0 = static_cast<int>(std::lround(m * a / (a + b)));
  }
  k0 = std::clamp(k0, 0, m);
  pmf_from_ratios(
      m, k0, [&](int k) { return (m - k) / (k + 1.0) * (k + a) / (m - k - 1.0 + b); }, out);
}

void beta_binomial_tail(int m, double a, double b, std::span<double> out) {
  beta_binomial_pmf(m, a, b, out);
  tail_from_pmf(m, out);
}

double beta_binomial_survival(int m, double a, double b, int w) {
  if (w < 0) return 1.0;
  if (w >= m) return 0.0;
  std::vector<double> buf(m + 1);
  beta_binomial_tail(m, a, b, buf);
  return buf[w + 1];
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p outside (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  std::sort(values.begin(), values.end());
  double h = (values.size() - 1) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double debye1(double x) {
  if (x == 0.0) return 1.0;
  if (x < 0.0) return debye1(-x) - x / 2.0;
  auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  double fa = f(0.0), fb = f(x), fm = f(x / 2);
  double whole = x / 6.0 * (fa + 4 * fm + fb);
  return simpson_step(f, 0.0, x, fa, fm, fb, whole, 1e-13, 50) / x;
}

}  // namespace smoothcop

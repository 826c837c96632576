#include "smoothcop/smoothing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "smoothcop/csv.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop {

SmoothingFamily SmoothingFamily::beta_binomial(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw DomainError("beta-binomial smoothing needs rho > 1");
  return SmoothingFamily(SmoothingKind::BetaBinomial, rho);
}

SmoothingFamily SmoothingFamily::parse(const std::string& name) {
  if (name == "dirac") return dirac();
  if (name == "bin") return binomial();
  if (name.rfind("betab", 0) == 0) {
    std::string tail = name.substr(5);
    if (tail.empty()) return beta_binomial(4.0);
    double rho = 0;
    auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), rho);
    if (ec == std::errc() && p == tail.data() + tail.size()) return beta_binomial(rho);
  }
  throw ConfigError("unknown smoothing family '" + name + "' (expected dirac, bin or betab4)");
}

std::string SmoothingFamily::name() const {
  switch (kind_) {
    case SmoothingKind::Dirac: return rank_shift() == 0 ? "dirac" : "dirac+" + std::to_string(rank_shift());
    case SmoothingKind::Binomial: return "bin";
    case SmoothingKind::BetaBinomial: return "betab" + format_double(rho_);
  }
  return "?";
}

double beta_binomial_survival_t(int p, double t, double rho, int w) {
  if (w < 0) return 1.0;
  if (w >= p) return 0.0;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double c = (p - rho) / (rho - 1.0);
  return beta_binomial_survival(p, t * c, (1.0 - t) * c, w);
}

double beta_binomial_cdf_t(int p, double t, double rho, int w) {
  if (w < 0) return 0.0;
  if (w >= p) return 1.0;
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  double c = (p - rho) / (rho - 1.0);
  return beta_binomial_cdf(p, t * c, (1.0 - t) * c, w);
}

void margin_kernel(const SmoothingFamily& family, int m, double x, std::span<double> out) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("margin kernel: x outside [0,1]");
  switch (family.kind()) {
    case SmoothingKind::Dirac: {
      int t = std::min(rank_threshold(m + family.rank_shift(), x), m);
      for (int r = 1; r <= m; ++r) out[r - 1] = r <= t ? 1.0 : 0.0;
      return;
    }
    case SmoothingKind::Binomial: {
      std::vector<double> tail(m + 1);
      binomial_tail(m, x, tail);
      std::copy(tail.begin() + 1, tail.end(), out.begin());
      return;
    }
    case SmoothingKind::BetaBinomial: {
      if (x == 0.0 || x == 1.0 || m <= family.rho()) {
        std::fill(out.begin(), out.begin() + m, x);
        return;
      }
      double c = (m - family.rho()) / (family.rho() - 1.0);
      std::vector<double> tail(m + 1);
      beta_binomial_tail(m, x * c, (1.0 - x) * c, tail);
      std::copy(tail.begin() + 1, tail.end(), out.begin());
      return;
    }
  }
}

double margin_kernel_at(const SmoothingFamily& family, int m, double x, int r) {
  std::vector<double> v(m);
  margin_kernel(family, m, x, v);
  return v[r - 1];
}

SmoothEmpiricalCopula::SmoothEmpiricalCopula(RankMatrix ranks, SmoothingFamily family)
    : ranks_(std::move(ranks)), family_(family) {
  if (ranks_.m() == 0) throw WindowError("smooth empirical copula of an empty window");
  cells_ = family_.kind() == SmoothingKind::BetaBinomial ? m() * m() : m();
}

void SmoothEmpiricalCopula::axis_factors(std::size_t j, double x, std::span<double> out) const {
  const int m = static_cast<int>(this->m());
  const std::size_t d = this->d();
  std::vector<double> mk(m);
  margin_kernel(family_, m, x, mk);
  if (family_.kind() != SmoothingKind::BetaBinomial) {
    for (int i = 0; i < m; ++i) out[i] = mk[ranks_(i, j) - 1];
    return;
  }
  // G[r-1][s] = P(Binomial(m, K_r(x)) >= s): the beta copula margin at K_r(x)
  std::vector<double> g(static_cast<std::size_t>(m) * (m + 1));
  for (int r = 0; r < m; ++r) binomial_tail(m, mk[r], std::span<double>(g.data() + r * (m + 1), m + 1));
  const auto& R = ranks_.data();
  for (int i = 0; i < m; ++i) {
    const double* gi = g.data() + (R[i * d + j] - 1) * (m + 1);
    double* row = out.data() + static_cast<std::size_t>(i) * m;
    for (int k = 0; k < m; ++k) row[k] = gi[R[k * d + j]];
  }
}

std::vector<double> SmoothEmpiricalCopula::axis_factors(std::size_t j, double x) const {
  std::vector<double> out(cells_);
  axis_factors(j, x, out);
  return out;
}

double SmoothEmpiricalCopula::combine(std::span<const double* const> axes) const {
  const std::size_t d = axes.size();
  double sum = 0.0;
  for (std::size_t c = 0; c < cells_; ++c) {
    double p = axes[0][c];
    for (std::size_t j = 1; j < d; ++j) p *= axes[j][c];
    sum += p;
  }
  return sum / static_cast<double>(cells_);
}

void SmoothEmpiricalCopula::row_kernels(std::span<const double* const> axes, std::span<double> out) const {
  const std::size_t d = axes.size(), m = this->m();
  const std::size_t width = cells_ / m;
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      std::size_t c = i * width + k;
      double p = axes[0][c];
      for (std::size_t j = 1; j < d; ++j) p *= axes[j][c];
      sum += p;
    }
    out[i] = sum / static_cast<double>(width);
  }
}

namespace {

void check_point(std::span<const double> u, std::size_t d) {
  if (u.size() != d) throw DomainError("point has the wrong dimension");
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point outside [0,1]^d");
}

}  // namespace

double SmoothEmpiricalCopula::operator()(std::span<const double> u) const {
  check_point(u, d());
  std::vector<std::vector<double>> tables(d());
  std::vector<const double*> axes(d());
  for (std::size_t j = 0; j < d(); ++j) {
    tables[j] = axis_factors(j, u[j]);
    axes[j] = tables[j].data();
  }
  return combine(axes);
}

std::vector<double> SmoothEmpiricalCopula::row_kernels(std::span<const double> u) const {
  check_point(u, d());
  std::vector<std::vector<double>> tables(d());
  std::vector<const double*> axes(d());
  for (std::size_t j = 0; j < d(); ++j) {
    tables[j] = axis_factors(j, u[j]);
    axes[j] = tables[j].data();
  }
  std::vector<double> out(m());
  row_kernels(axes, out);
  return out;
}

double SmoothEmpiricalCopula::kernel(std::span<const int> r, std::span<const double> u) const {
  check_point(u, d());
  if (r.size() != d()) throw DomainError("rank vector has the wrong dimension");
  const int m = static_cast<int>(this->m());
  for (int x : r)
    if (x < 1 || x > m) throw DomainError("rank outside 1..m");
  std::vector<double> mk(m), v(d());
  for (std::size_t j = 0; j < d(); ++j) {
    margin_kernel(family_, m, u[j], mk);
    v[j] = mk[r[j] - 1];
  }
  if (family_.kind() != SmoothingKind::BetaBinomial) {
    double p = 1.0;
    for (double x : v) p *= x;
    return p;
  }
  // survival copula: empirical beta copula of the same window
  std::vector<double> tail(m + 1);
  std::vector<double> prod(m, 1.0);
  for (std::size_t j = 0; j < d(); ++j) {
    binomial_tail(m, v[j], tail);
    for (int k = 0; k < m; ++k) prod[k] *= tail[ranks_(k, j)];
  }
  double s = 0.0;
  for (double p : prod) s += p;
  return s / m;
}

double kernel_K(const SmoothEmpiricalCopula& cop, std::span<const int> r, std::span<const double> u) {
  return cop.kernel(r, u);
}

double smooth_eval(const SmoothEmpiricalCopula& cop, std::span<const double> u) { return cop(u); }

double beta_copula_closed_form(const RankMatrix& ranks, std::span<const double> u) {
  check_point(u, ranks.d());
  const std::size_t m = ranks.m();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < ranks.d(); ++j) {
      double r = ranks(i, j);
      p *= boost::math::ibeta(r, static_cast<double>(m) + 1.0 - r, u[j]);
    }
    s += p;
  }
  return s / static_cast<double>(m);
}

}  // namespace smoothcop

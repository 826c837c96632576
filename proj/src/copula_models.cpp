#include "smoothcop/copula_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "smoothcop/errors.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop {

CopulaFamily parse_copula_family(const std::string& name) {
  if (name == "independence" || name == "indep") return CopulaFamily::Independence;
  if (name == "clayton") return CopulaFamily::Clayton;
  if (name == "gumbel" || name == "gumbel-hougaard") return CopulaFamily::GumbelHougaard;
  if (name == "frank") return CopulaFamily::Frank;
  throw ConfigError("unknown copula family '" + name + "'");
}

std::string to_string(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::GumbelHougaard: return "gumbel";
    case CopulaFamily::Frank: return "frank";
  }
  return "?";
}

CopulaModel::CopulaModel(CopulaFamily family, double theta, std::size_t d) : family_(family), theta_(theta), d_(d) {
  if (d < 2) throw DomainError("copula dimension must be at least 2");
  if (!std::isfinite(theta)) throw DomainError("copula parameter must be finite");
  switch (family) {
    case CopulaFamily::Independence: break;
    case CopulaFamily::Clayton:
      if (!(theta > 0)) throw DomainError("Clayton requires theta > 0");
      break;
    case CopulaFamily::GumbelHougaard:
      if (!(theta >= 1)) throw DomainError("Gumbel-Hougaard requires theta >= 1");
      break;
    case CopulaFamily::Frank:
      if (theta == 0) throw DomainError("Frank requires theta != 0");
      if (d > 2 && theta < 0) throw DomainError("Frank with d > 2 requires theta > 0");
      break;
  }
}

CopulaModel CopulaModel::from_tau(CopulaFamily family, double tau, std::size_t d) {
  if (family == CopulaFamily::Independence) return CopulaModel(family, 0.0, d);
  if (tau == 0.0 && family != CopulaFamily::GumbelHougaard) return CopulaModel(CopulaFamily::Independence, 0.0, d);
  return CopulaModel(family, tau_to_theta(family, tau), d);
}

double frank_tau(double theta) {
  if (std::abs(theta) < 1e-5) return theta / 9.0;
  return 1.0 - 4.0 / theta + 4.0 * debye1(theta) / theta;
}

double tau_to_theta(CopulaFamily family, double tau) {
  if (!(tau > -1.0 && tau < 1.0)) throw RangeError("tau must lie in (-1, 1)");
  switch (family) {
    case CopulaFamily::Independence:
      if (tau != 0.0) throw RangeError("independence has tau = 0");
      return 0.0;
    case CopulaFamily::Clayton:
      if (!(tau > 0.0)) throw RangeError("Clayton needs tau > 0");
      return 2.0 * tau / (1.0 - tau);
    case CopulaFamily::GumbelHougaard:
      if (tau < 0.0) throw RangeError("Gumbel-Hougaard needs tau >= 0");
      return 1.0 / (1.0 - tau);
    case CopulaFamily::Frank: {
      if (tau == 0.0) throw RangeError("Frank cannot reach tau = 0");
      if (tau < 0.0) return -tau_to_theta(family, -tau);
      double lo = 0.0, hi = 1.0;
      while (frank_tau(hi) < tau) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw RangeError("Frank tau too close to 1");
      }
      double mid = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double t = frank_tau(mid);
        if (std::abs(t - tau) <= 1e-12) break;
        (t < tau ? lo : hi) = mid;
      }
      return mid;
    }
  }
  return 0.0;
}

namespace {

double exp1(Rng& rng) { return -std::log(uniform01(rng)); }

// Kemp's LK algorithm for the logarithmic series law P(V = k) prop. to p^k / k,
// with p = 1 - exp(-theta).
double log_series(double theta, Rng& rng) {
  double p = -std::expm1(-theta);
  double v = uniform01(rng);
  if (v > p) return 1.0;
  double q = -std::expm1(-theta * uniform01(rng));
  if (v < q * q) {
    double k = std::floor(1.0 + std::log(v) / std::log(q));
    return k < 1.0 ? 1.0 : k;
  }
  return v > q ? 1.0 : 2.0;
}

// Kanter's representation of a positive stable variable with Laplace
// transform exp(-s^alpha).
double positive_stable(double alpha, Rng& rng) {
  double u = std::numbers::pi * uniform01(rng);
  double w = exp1(rng);
  double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  double b = std::pow(std::sin((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
  return a * b;
}

}  // namespace

void draw(const CopulaModel& model, Rng& rng, std::span<double> out) {
  const std::size_t d = model.d();
  const double th = model.theta();
  switch (model.family()) {
    case CopulaFamily::Independence:
      for (std::size_t j = 0; j < d; ++j) out[j] = uniform01(rng);
      return;
    case CopulaFamily::Clayton: {
      std::gamma_distribution<double> gamma(1.0 / th, 1.0);
      double v = gamma(rng);
      for (std::size_t j = 0; j < d; ++j) out[j] = std::exp(-std::log1p(exp1(rng) / v) / th);
      return;
    }
    case CopulaFamily::GumbelHougaard: {
      if (th == 1.0) {
        for (std::size_t j = 0; j < d; ++j) out[j] = uniform01(rng);
        return;
      }
      double alpha = 1.0 / th;
      double s = positive_stable(alpha, rng);
      for (std::size_t j = 0; j < d; ++j) out[j] = std::exp(-std::pow(exp1(rng) / s, alpha));
      return;
    }
    case CopulaFamily::Frank: {
      if (th > 0) {
        double v = log_series(th, rng);
        double c = -std::expm1(-th);
        for (std::size_t j = 0; j < d; ++j) out[j] = -std::log1p(-c * std::exp(-exp1(rng) / v)) / th;
        return;
      }
      // bivariate, negative theta: invert the conditional law of U2 given U1
      double u1 = uniform01(rng), w = uniform01(rng);
      double num = w * std::expm1(-th);
      double den = w + (1.0 - w) * std::exp(-th * u1);
      out[0] = u1;
      out[1] = -std::log1p(num / den) / th;
      return;
    }
  }
}

Sample sample(const CopulaModel& model, std::size_t m, Rng& rng) {
  std::vector<double> v(m * model.d());
  for (std::size_t i = 0; i < m; ++i) draw(model, rng, std::span<double>(v.data() + i * model.d(), model.d()));
  return Sample(m, model.d(), std::move(v));
}

double cdf(const CopulaModel& model, std::span<const double> u) {
  const std::size_t d = model.d();
  if (u.size() != d) throw DomainError("cdf: dimension mismatch");
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cdf: point outside [0,1]^d");
    if (x == 0.0) return 0.0;
  }
  const double th = model.theta();
  switch (model.family()) {
    case CopulaFamily::Independence: {
      double p = 1.0;
      for (double x : u) p *= x;
      return p;
    }
    case CopulaFamily::Clayton: {
      double s = 1.0 - static_cast<double>(d);
      for (double x : u) s += std::pow(x, -th);
      return std::pow(s, -1.0 / th);
    }
    case CopulaFamily::GumbelHougaard: {
      double s = 0.0;
      for (double x : u) s += std::pow(-std::log(x), th);
      return std::exp(-std::pow(s, 1.0 / th));
    }
    case CopulaFamily::Frank: {
      double p = 1.0;
      for (double x : u) p *= std::expm1(-th * x);
      double D = std::expm1(-th);
      return -std::log1p(p / std::pow(D, static_cast<double>(d - 1))) / th;
    }
  }
  return 0.0;
}

double true_partial_derivative(const CopulaModel& model, std::size_t j, std::span<const double> u) {
  const std::size_t d = model.d();
  if (j >= d || u.size() != d) throw DomainError("partial derivative: bad coordinate");
  if (u[j] <= 0.0 || u[j] >= 1.0) return 0.0;
  for (std::size_t k = 0; k < d; ++k)
    if (k != j && u[k] <= 0.0) return 0.0;
  const double th = model.theta();
  double v = 0.0;
  switch (model.family()) {
    case CopulaFamily::Independence: {
      v = 1.0;
      for (std::size_t k = 0; k < d; ++k)
        if (k != j) v *= u[k];
      break;
    }
    case CopulaFamily::Clayton: {
      double s = 1.0 - static_cast<double>(d);
      for (double x : u) s += std::pow(x, -th);
      v = std::pow(u[j], -th - 1.0) * std::pow(s, -1.0 / th - 1.0);
      break;
    }
    case CopulaFamily::GumbelHougaard: {
      double s = 0.0;
      for (double x : u) s += std::pow(-std::log(x), th);
      double c = std::exp(-std::pow(s, 1.0 / th));
      v = c * std::pow(s, 1.0 / th - 1.0) * std::pow(-std::log(u[j]), th - 1.0) / u[j];
      break;
    }
    case CopulaFamily::Frank: {
      double p = 1.0;
      for (double x : u) p *= std::expm1(-th * x);
      double D = std::pow(std::expm1(-th), static_cast<double>(d - 1));
      v = std::exp(-th * u[j]) * (p / std::expm1(-th * u[j])) / (D + p);
      break;
    }
  }
  if (!std::isfinite(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

double frank_log_density(double theta, double u, double v) {
  if (theta == 0.0) return 0.0;
  if (theta < 0.0) return frank_log_density(-theta, u, 1.0 - v);
  double em = -std::expm1(-theta);
  // sum of two nonnegative terms, no cancellation near (1, 1)
  double base = -std::exp(-theta * u) * std::expm1(-theta * v) - std::exp(-theta * v) * std::expm1(-theta * (1.0 - v));
  return std::log(theta) + std::log(em) - theta * (u + v) - 2.0 * std::log(base);
}

}  // namespace smoothcop

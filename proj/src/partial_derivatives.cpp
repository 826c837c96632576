#include "smoothcop/partial_derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smoothcop/errors.hpp"
#include "smoothcop/kernels.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop {

PdEstimatorSpec PdEstimatorSpec::parse(const std::string& name, double L) {
  std::vector<std::string> tok;
  std::stringstream ss(name);
  for (std::string t; std::getline(ss, t, '-');) tok.push_back(t);
  PdEstimatorSpec s;
  s.bandwidth = BandwidthRule::fixed(L);
  std::size_t k = 0;
  auto bad = [&]() { return ConfigError("unknown partial derivative estimator '" + name + "'"); };
  if (k < tok.size() && tok[k] == "adap") {
    s.bandwidth = BandwidthRule::adaptive();
    ++k;
  }
  bool dts = false;
  if (k < tok.size() && tok[k] == "dts") {
    dts = true;
    ++k;
  }
  if (k >= tok.size()) throw bad();
  if (tok[k] == "bern") {
    if (dts) throw bad();
    s.placement = Placement::Bernstein;
    s.diff = DiffKind::Nabla;
    s.truncate = false;
    ++k;
  } else {
    try {
      s.family = SmoothingFamily::parse(tok[k]);
    } catch (const ConfigError&) {
      throw bad();
    }
    ++k;
    if (dts)
      s.placement = s.family.smooth() ? Placement::DiffThenSmooth : Placement::None;
    else
      s.placement = s.family.smooth() ? Placement::SmoothThenDiff : Placement::None;
    if (k < tok.size() && (tok[k] == "delta" || tok[k] == "nabla")) {
      s.diff = tok[k] == "delta" ? DiffKind::Delta : DiffKind::Nabla;
      ++k;
    }
  }
  if (k < tok.size() && tok[k] == "raw") {
    s.truncate = false;
    ++k;
  }
  if (k != tok.size()) throw bad();
  return s;
}

Bandwidths fixed_bandwidth(double L, std::size_t m) {
  double h = std::min(L / std::sqrt(static_cast<double>(m)), 0.5);
  return {h, h};
}

Bandwidths adaptive_bandwidth(const RankMatrix& window, const BandwidthRule& rule) {
  if (window.m() < 2) throw DomainError("adaptive bandwidth needs a window of length >= 2");
  double tau = std::abs(kendall_tau(window));
  double h = std::min((rule.M2 * std::pow(1.0 - tau, rule.a) + rule.M1) / std::sqrt(static_cast<double>(window.m())), 0.5);
  return {h, h};
}

int fixed_bernstein_degree(double L, std::size_t p) {
  return std::max(2, static_cast<int>(std::floor(L * std::sqrt(static_cast<double>(p)))));
}

int adaptive_bernstein_degree(const RankMatrix& window) {
  if (window.m() < 2) throw DomainError("adaptive degree needs a window of length >= 2");
  double tau = std::abs(kendall_tau(window));
  double f = 4.0 * std::pow(tau, 1.5) + 0.5;
  return std::max(2, static_cast<int>(std::floor(f * std::sqrt(static_cast<double>(window.m())))));
}

double pd_bernstein(const RankMatrix& ranks, std::size_t j, std::span<const double> u, int m) {
  const std::size_t p = ranks.m(), d = ranks.d();
  if (m < 2) throw DomainError("Bernstein degree must be at least 2");
  if (u.size() != d || j >= d) throw DomainError("bad point or coordinate");
  std::vector<std::vector<double>> f(d);
  for (std::size_t t = 0; t < d; ++t) {
    if (t == j) {
      f[t].resize(m);
      binomial_pmf(m - 1, u[t], f[t]);
    } else {
      f[t].resize(m + 1);
      binomial_tail(m, u[t], f[t]);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double prod = 1.0;
    for (std::size_t t = 0; t < d; ++t) {
      long long r = ranks(i, t);
      int s = static_cast<int>((m * r + static_cast<long long>(p) - 1) / static_cast<long long>(p)) - 1;
      prod *= t == j ? f[t][s] : f[t][s + 1];
    }
    sum += prod;
  }
  return static_cast<double>(m) / static_cast<double>(p) * sum;
}

namespace {

SmoothingFamily evaluation_family(const PdEstimatorSpec& spec) {
  if (spec.placement == Placement::SmoothThenDiff) return spec.family;
  // a rescaled Dirac family is kept
  if (spec.placement == Placement::None && spec.family.kind() == SmoothingKind::Dirac) return spec.family;
  return SmoothingFamily::dirac();
}

}  // namespace

PartialDerivativeEstimator::PartialDerivativeEstimator(const PdEstimatorSpec& spec, RankMatrix ranks)
    : spec_(spec), ranks_(ranks), cop_(std::move(ranks), evaluation_family(spec)) {
  const std::size_t m = ranks_.m(), d = ranks_.d();
  if (spec_.placement == Placement::Bernstein) {
    degree_ = spec_.bandwidth.kind == BandwidthRule::Kind::Adaptive ? adaptive_bernstein_degree(ranks_)
                                                                     : fixed_bernstein_degree(spec_.bandwidth.L, m);
    return;
  }
  bw_ = spec_.bandwidth.kind == BandwidthRule::Kind::Adaptive ? adaptive_bandwidth(ranks_, spec_.bandwidth)
                                                               : fixed_bandwidth(spec_.bandwidth.L, m);
  if (spec_.placement == Placement::DiffThenSmooth) {
    if (d > 3) throw DomainError("difference-then-smooth estimators are enumerated for d <= 3");
    std::size_t atoms = 1;
    for (std::size_t t = 0; t < d; ++t) atoms *= m + 1;
    lattice_.assign(d, std::vector<double>(atoms));
    std::vector<double> w(d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t a = 0; a < atoms; ++a) {
        std::size_t rest = a;
        for (std::size_t t = d; t-- > 0;) {
          w[t] = static_cast<double>(rest % (m + 1)) / static_cast<double>(m);
          rest /= m + 1;
        }
        double uj = w[j];
        double hi = std::min(uj + bw_.h, 1.0), lo = std::max(uj - bw_.hprime, 0.0);
        w[j] = hi;
        double chi = empirical_copula_eval(ranks_, w);
        w[j] = lo;
        double clo = empirical_copula_eval(ranks_, w);
        lattice_[j][a] = finite_difference(j, chi, clo, uj);
      }
  }
}

double PartialDerivativeEstimator::finite_difference(std::size_t, double chi, double clo, double uj) const {
  double denom;
  if (spec_.diff == DiffKind::Nabla) {
    denom = bw_.h + bw_.hprime;
  } else {
    denom = std::min(uj + bw_.h, 1.0) - std::max(uj - bw_.hprime, 0.0);
  }
  if (!(denom > 0.0)) throw BandwidthError("finite difference with a zero denominator");
  double v = (chi - clo) / denom;
  return spec_.truncate ? std::clamp(v, 0.0, 1.0) : v;
}

double PartialDerivativeEstimator::operator()(std::size_t j, std::span<const double> u) const {
  const std::size_t d = ranks_.d();
  if (j >= d || u.size() != d) throw DomainError("bad point or coordinate");
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point outside [0,1]^d");
  switch (spec_.placement) {
    case Placement::Bernstein: {
      double v = pd_bernstein(ranks_, j, u, degree_);
      return spec_.truncate ? std::clamp(v, 0.0, 1.0) : v;
    }
    case Placement::DiffThenSmooth:
      return diff_then_smooth(j, u);
    case Placement::None:
    case Placement::SmoothThenDiff: {
      std::vector<double> w(u.begin(), u.end());
      w[j] = std::min(u[j] + bw_.h, 1.0);
      double chi = cop_(w);
      w[j] = std::max(u[j] - bw_.hprime, 0.0);
      double clo = cop_(w);
      return finite_difference(j, chi, clo, u[j]);
    }
  }
  return 0.0;
}

double PartialDerivativeEstimator::diff_then_smooth(std::size_t j, std::span<const double> u) const {
  const std::size_t m = ranks_.m(), d = ranks_.d();
  const std::size_t side = m + 1;
  const auto& L = lattice_[j];
  const int mi = static_cast<int>(m);
  std::vector<double> weights(L.size());
  if (spec_.family.kind() == SmoothingKind::Binomial) {
    std::vector<std::vector<double>> pmf(d, std::vector<double>(side));
    for (std::size_t t = 0; t < d; ++t) binomial_pmf(mi, u[t], pmf[t]);
    for (std::size_t a = 0; a < L.size(); ++a) {
      std::size_t rest = a;
      double p = 1.0;
      for (std::size_t t = d; t-- > 0;) {
        p *= pmf[t][rest % side];
        rest /= side;
      }
      weights[a] = p;
    }
  } else {
    // joint survival P(m W_t >= s_t for all t) on {0..m+1}^d, then the pmf by
    // inclusion-exclusion
    const std::size_t sside = m + 2;
    std::vector<std::vector<double>> marg(d, std::vector<double>(sside));
    std::vector<double> mk(m);
    for (std::size_t t = 0; t < d; ++t) {
      margin_kernel(spec_.family, mi, u[t], mk);
      marg[t][0] = 1.0;
      for (std::size_t s = 1; s <= m; ++s) marg[t][s] = mk[s - 1];
      marg[t][m + 1] = 0.0;
    }
    // beta copula factors: A_t[s][k] = P(Binomial(m, marg_t[s]) >= R_kt)
    std::vector<std::vector<double>> A(d, std::vector<double>(sside * m));
    std::vector<double> tail(m + 1);
    for (std::size_t t = 0; t < d; ++t)
      for (std::size_t s = 0; s < sside; ++s) {
        binomial_tail(mi, marg[t][s], tail);
        for (std::size_t k = 0; k < m; ++k) A[t][s * m + k] = tail[ranks_(k, t)];
      }
    std::size_t satoms = 1;
    for (std::size_t t = 0; t < d; ++t) satoms *= sside;
    std::vector<double> S(satoms);
    std::vector<std::size_t> idx(d);
    for (std::size_t a = 0; a < satoms; ++a) {
      std::size_t rest = a;
      for (std::size_t t = d; t-- > 0;) {
        idx[t] = rest % sside;
        rest /= sside;
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double p = 1.0;
        for (std::size_t t = 0; t < d; ++t) p *= A[t][idx[t] * m + k];
        sum += p;
      }
      S[a] = sum / static_cast<double>(m);
    }
    for (std::size_t a = 0; a < L.size(); ++a) {
      std::size_t rest = a;
      for (std::size_t t = d; t-- > 0;) {
        idx[t] = rest % side;
        rest /= side;
      }
      double p = 0.0;
      for (std::size_t e = 0; e < (std::size_t{1} << d); ++e) {
        std::size_t flat = 0;
        int sign = 1;
        for (std::size_t t = 0; t < d; ++t) {
          std::size_t bit = (e >> t) & 1;
          if (bit) sign = -sign;
          flat = flat * sside + idx[t] + bit;
        }
        p += sign * S[flat];
      }
      weights[a] = p;
    }
  }
  double v = 0.0;
  for (std::size_t a = 0; a < L.size(); ++a)
    if (std::abs(weights[a]) >= 1e-14) v += weights[a] * L[a];
  return v;
}

std::vector<double> PartialDerivativeEstimator::eval_grid(std::size_t j,
                                                          const std::vector<std::vector<double>>& axis_values) const {
  const std::size_t d = ranks_.d();
  std::size_t points = 1;
  for (const auto& a : axis_values) points *= a.size();
  std::vector<double> out(points);
  if (spec_.placement == Placement::None || spec_.placement == Placement::SmoothThenDiff) {
    // factor tables for the shifted j-axis values and the plain other axes
    std::vector<std::vector<std::vector<double>>> plain(d);
    std::vector<std::vector<double>> up, down;
    for (std::size_t t = 0; t < d; ++t) {
      if (t == j) continue;
      for (double x : axis_values[t]) plain[t].push_back(cop_.axis_factors(t, x));
    }
    for (double x : axis_values[j]) {
      up.push_back(cop_.axis_factors(j, std::min(x + bw_.h, 1.0)));
      down.push_back(cop_.axis_factors(j, std::max(x - bw_.hprime, 0.0)));
    }
    std::vector<const double*> axes(d);
    for (std::size_t p = 0; p < points; ++p) {
      std::size_t rest = p, kj = 0;
      for (std::size_t t = d; t-- > 0;) {
        std::size_t k = rest % axis_values[t].size();
        rest /= axis_values[t].size();
        if (t == j)
          kj = k;
        else
          axes[t] = plain[t][k].data();
      }
      axes[j] = up[kj].data();
      double chi = cop_.combine(axes);
      axes[j] = down[kj].data();
      double clo = cop_.combine(axes);
      out[p] = finite_difference(j, chi, clo, axis_values[j][kj]);
    }
    return out;
  }
  std::vector<double> u(d);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rest = p;
    for (std::size_t t = d; t-- > 0;) {
      u[t] = axis_values[t][rest % axis_values[t].size()];
      rest /= axis_values[t].size();
    }
    out[p] = (*this)(j, u);
  }
  return out;
}

double pd_eval(const PdEstimatorSpec& spec, const RankMatrix& window, std::size_t j, std::span<const double> u) {
  return PartialDerivativeEstimator(spec, window)(j, u);
}

std::vector<double> open_grid(std::size_t g) {
  std::vector<double> v(g);
  for (std::size_t i = 0; i < g; ++i) v[i] = static_cast<double>(i + 1) / static_cast<double>(g + 1);
  return v;
}

ImseResult imse(const PdEstimatorSpec& spec, const CopulaModel& model, std::size_t j, std::size_t n, std::size_t reps,
                std::size_t grid, const SeedStreams& streams) {
  GridEstimator est = [&](const Sample& x, const std::vector<std::vector<double>>& axes) {
    return PartialDerivativeEstimator(spec, compute_ranks(x)).eval_grid(j, axes);
  };
  return imse(est, model, j, n, reps, grid, streams);
}

ImseResult imse(const GridEstimator& estimator, const CopulaModel& model, std::size_t j, std::size_t n,
                std::size_t reps, std::size_t grid, const SeedStreams& streams) {
  const std::size_t d = model.d();
  std::vector<std::vector<double>> axes(d, open_grid(grid));
  std::size_t points = 1;
  for (std::size_t t = 0; t < d; ++t) points *= grid;
  std::vector<double> truth(points), u(d);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rest = p;
    for (std::size_t t = d; t-- > 0;) {
      u[t] = axes[t][rest % grid];
      rest /= grid;
    }
    truth[p] = true_partial_derivative(model, j, u);
  }
  ImseResult res;
  res.per_rep.resize(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng = streams.child(r).engine();
    Sample x = sample(model, n, rng);
    auto v = estimator(x, axes);
    double s = 0.0;
    for (std::size_t p = 0; p < points; ++p) s += (v[p] - truth[p]) * (v[p] - truth[p]);
    res.per_rep[r] = s / static_cast<double>(points);
  });
  double total = 0.0;
  for (double v : res.per_rep) total += v;
  res.imse = total / static_cast<double>(reps);
  return res;
}

}  // namespace smoothcop

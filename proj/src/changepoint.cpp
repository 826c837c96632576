#include "smoothcop/changepoint.hpp"

#include <algorithm>
#include <cmath>

#include "smoothcop/errors.hpp"
#include "smoothcop/kernels.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop {

namespace {

// Everything the test needs from one sub-window evaluated at the n
// pseudo-observations of the whole stretch.
struct WindowTerms {
  std::vector<double> c;     // C^nu_window(u_p), p = 0..n-1
  std::vector<double> coef;  // w x n, centred kernels minus the pd correction
};

bool fast_pd(const PdEstimatorSpec& pd, const SmoothingFamily& family) {
  if (pd.placement == Placement::None) return family.kind() == SmoothingKind::Dirac;
  if (pd.placement == Placement::SmoothThenDiff) return pd.family == family;
  return false;
}

WindowTerms window_terms(const Sample& x, Stretch s, const std::vector<double>& points, const SmoothingFamily& family,
                         const PdEstimatorSpec* pd) {
  const std::size_t n = x.n(), d = x.d();
  RankMatrix ranks = compute_ranks(x, s);
  SmoothEmpiricalCopula cop(ranks, family);
  const std::size_t w = cop.m(), cells = cop.cells();
  const std::size_t width = cells / w;
  WindowTerms t;
  t.c.resize(n);
  if (pd) t.coef.assign(w * n, 0.0);

  std::optional<PartialDerivativeEstimator> est;
  bool fast = false;
  if (pd) {
    est.emplace(*pd, ranks);
    fast = fast_pd(*pd, family);
  }
  const Bandwidths bw = est ? est->bandwidths() : Bandwidths{};

  std::vector<std::vector<double>> tab(d, std::vector<double>(cells));
  std::vector<double> up(cells), down(cells);
  std::vector<const double*> axes(d);
  std::vector<double> k(w), kj(w);
  std::vector<double> uj(d);

  for (std::size_t p = 0; p < n; ++p) {
    const double* u = points.data() + p * d;
    for (std::size_t j = 0; j < d; ++j) {
      cop.axis_factors(j, u[j], tab[j]);
      axes[j] = tab[j].data();
    }
    cop.row_kernels(axes, k);
    double c = 0.0;
    for (double v : k) c += v;
    c /= static_cast<double>(w);
    t.c[p] = c;
    if (!pd) continue;
    for (std::size_t i = 0; i < w; ++i) t.coef[i * n + p] = k[i] - c;
    for (std::size_t j = 0; j < d; ++j) {
      double dj;
      if (fast) {
        double hi = std::min(u[j] + bw.h, 1.0), lo = std::max(u[j] - bw.hprime, 0.0);
        cop.axis_factors(j, hi, up);
        cop.axis_factors(j, lo, down);
        axes[j] = up.data();
        double chi = cop.combine(axes);
        axes[j] = down.data();
        double clo = cop.combine(axes);
        axes[j] = tab[j].data();
        double denom = pd->diff == DiffKind::Nabla ? bw.h + bw.hprime : hi - lo;
        if (!(denom > 0.0)) throw BandwidthError("finite difference with a zero denominator");
        dj = (chi - clo) / denom;
        if (pd->truncate) dj = std::clamp(dj, 0.0, 1.0);
      } else {
        std::copy(u, u + d, uj.begin());
        dj = (*est)(j, uj);
      }
      dj = std::clamp(dj, 0.0, 1.0);
      if (dj == 0.0) continue;
      // K_i at u^(j): every other axis sits at 1 where all factors are 1
      const double* f = tab[j].data();
      double cj = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        double s2 = 0.0;
        for (std::size_t q = 0; q < width; ++q) s2 += f[i * width + q];
        kj[i] = s2 / static_cast<double>(width);
        cj += kj[i];
      }
      cj /= static_cast<double>(w);
      for (std::size_t i = 0; i < w; ++i) t.coef[i * n + p] -= dj * (kj[i] - cj);
    }
  }
  return t;
}

std::vector<double> pseudo_points(const Sample& x) { return compute_ranks(x).pseudo_observations(); }

SmoothingFamily effective_family(const SmoothingFamily& f, const ChangePointOptions& opts) {
  return f.kind() == SmoothingKind::Dirac ? SmoothingFamily::dirac(opts.dirac_rank_shift) : f;
}

ChangePointResult scan(const Sample& x, const SmoothingFamily& given, const std::vector<double>* xi, std::size_t B,
                       const PdEstimatorSpec* pd, const ChangePointOptions& opts) {
  const SmoothingFamily family = effective_family(given, opts);
  const std::size_t n = x.n();
  if (n < 2) throw DomainError("change-point statistic needs n >= 2");
  const auto points = pseudo_points(x);
  const double rn = static_cast<double>(n), sqn = std::sqrt(rn);
  ChangePointResult res;
  res.replicate_values.assign(B, 0.0);
  std::vector<double> at(n * n), prod(B * n);
  double best = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double l0 = static_cast<double>(k) / rn, l1 = static_cast<double>(n - k) / rn;
    auto pre = window_terms(x, Stretch{0, k}, points, family, xi ? pd : nullptr);
    auto suf = window_terms(x, Stretch{k, n}, points, family, xi ? pd : nullptr);
    double sk = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      double dv = sqn * l0 * l1 * (pre.c[p] - suf.c[p]);
      sk += dv * dv;
    }
    sk /= rn;
    if (sk > best) {
      best = sk;
      res.argmax_s = l0;
    }
    if (!xi || B == 0) continue;
    // rows 0..k-1 from the prefix, k..n-1 from the suffix
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t p = 0; p < n; ++p) at[i * n + p] = l1 * pre.coef[i * n + p] / sqn;
    for (std::size_t i = 0; i < n - k; ++i)
      for (std::size_t p = 0; p < n; ++p) at[(k + i) * n + p] = -l0 * suf.coef[i * n + p] / sqn;
    kernels::omp::multiplier_products(xi->data(), at.data(), B, n, n, prod.data());
    for (std::size_t b = 0; b < B; ++b) {
      const double* row = prod.data() + b * n;
      double s = 0.0;
      for (std::size_t p = 0; p < n; ++p) s += row[p] * row[p];
      s /= rn;
      res.replicate_values[b] = std::max(res.replicate_values[b], s);
    }
  }
  res.statistic = best;
  if (B > 0) {
    std::size_t count = 0;
    for (double v : res.replicate_values) count += v >= res.statistic;
    res.p_value = static_cast<double>(count) / static_cast<double>(B);
  }
  return res;
}

}  // namespace

StatisticValue statistic_S(const Sample& x, const SmoothingFamily& family, const ChangePointOptions& opts) {
  auto r = scan(x, family, nullptr, 0, nullptr, opts);
  return {r.statistic, r.argmax_s};
}

PdEstimatorSpec default_changepoint_pd(const SmoothingFamily& family) {
  PdEstimatorSpec s;
  s.diff = DiffKind::Delta;
  s.placement = family.smooth() ? Placement::SmoothThenDiff : Placement::None;
  s.family = family;
  s.truncate = true;
  s.bandwidth = BandwidthRule::fixed(1.0);
  return s;
}

double replicate_S(const Sample& x, const SmoothingFamily& family, std::span<const double> xi,
                   const PdEstimatorSpec& pd, const ChangePointOptions& opts) {
  if (xi.size() != x.n()) throw DomainError("multiplier vector has the wrong length");
  std::vector<double> m(xi.begin(), xi.end());
  return scan(x, family, &m, 1, &pd, opts).replicate_values[0];
}

ChangePointResult run_test_with_multipliers(const Sample& x, const SmoothingFamily& family,
                                            const std::vector<double>& xi, std::size_t B,
                                            const PdEstimatorSpec& pd, const ChangePointOptions& opts) {
  if (xi.size() != B * x.n()) throw DomainError("multiplier matrix has the wrong shape");
  return scan(x, family, &xi, B, &pd, opts);
}

ChangePointResult run_test(const Sample& x, const SmoothingFamily& family, std::size_t B, const MultiplierConfig& cfg,
                           const SeedStreams& streams, const std::optional<PdEstimatorSpec>& pd,
                           const ChangePointOptions& opts) {
  if (B < 1) throw ConfigError("need at least one multiplier replicate");
  auto xi = gen_multiplier_matrix(cfg, x.n(), B, streams);
  return run_test_with_multipliers(x, family, xi, B, pd ? *pd : default_changepoint_pd(family), opts);
}

Sample generate_ar1(const Ar1Config& cfg, Rng& rng) {
  if (!(std::abs(cfg.beta) < 1.0)) throw DomainError("AR(1) coefficient must satisfy |beta| < 1");
  if (cfg.innovation_copula.d() != 2) throw DomainError("AR(1) generator is bivariate");
  const std::size_t total = cfg.n + cfg.burn_in;
  std::vector<double> out(cfg.n * 2);
  double prev[2] = {0.0, 0.0};
  double u[2];
  for (std::size_t t = 0; t < total; ++t) {
    bool after = cfg.k_star && cfg.post_copula && t >= cfg.burn_in && t - cfg.burn_in >= *cfg.k_star;
    draw(after ? *cfg.post_copula : cfg.innovation_copula, rng, u);
    for (int j = 0; j < 2; ++j) {
      double eps = normal_quantile(u[j]);
      prev[j] = t == 0 ? eps : cfg.beta * prev[j] + eps;
    }
    if (t >= cfg.burn_in) {
      out[(t - cfg.burn_in) * 2] = prev[0];
      out[(t - cfg.burn_in) * 2 + 1] = prev[1];
    }
  }
  return Sample(cfg.n, 2, std::move(out));
}

}  // namespace smoothcop

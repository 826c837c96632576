#include "smoothcop/smooth_bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "smoothcop/copula_models.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/kernels.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop {

MarginInverter::MarginInverter(const SmoothingFamily& family, int m, int nodes)
    : family_(family), m_(m), nodes_(nodes) {
  if (family.kind() == SmoothingKind::Dirac)
    throw UnsupportedFamilyError("Dirac margins are step functions and cannot be inverted");
  table_.resize(static_cast<std::size_t>(m) * (nodes + 1));
  std::vector<double> mk(m);
  for (int g = 0; g <= nodes; ++g) {
    margin_kernel(family_, m_, static_cast<double>(g) / nodes, mk);
    for (int r = 0; r < m; ++r) table_[static_cast<std::size_t>(r) * (nodes + 1) + g] = mk[r];
  }
}

double MarginInverter::invert(int r, double y) const {
  if (r < 1 || r > m_) throw DomainError("rank outside 1..m");
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("inversion target outside [0,1]");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;
  const double* col = table_.data() + static_cast<std::size_t>(r - 1) * (nodes_ + 1);
  // first node whose value exceeds y
  const double* it = std::upper_bound(col, col + nodes_ + 1, y);
  int g = static_cast<int>(it - col);
  if (g == 0 || g > nodes_) throw ToleranceError("margin inversion failed to bracket");
  double a = static_cast<double>(g - 1) / nodes_, b = static_cast<double>(g) / nodes_;
  double fa = col[g - 1] - y, fb = col[g] - y;
  if (fa == 0.0) return a;
  auto f = [&](double x) { return margin_kernel_at(family_, m_, x, r) - y; };
  std::uintmax_t iters = 100;
  auto tol = [](double lo, double hi) { return hi - lo <= 4e-16; };
  auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  double flo = std::abs(f(lo)), fhi = std::abs(f(hi));
  double x = flo <= fhi ? lo : hi;
  if (std::min(flo, fhi) > 1e-10) throw ToleranceError("margin inversion did not reach 1e-10");
  return x;
}

double margin_quantile_invert(const SmoothEmpiricalCopula& cop, std::size_t j, int r, double y) {
  if (j >= cop.d()) throw DomainError("margin index out of range");
  MarginInverter inv(cop.family(), static_cast<int>(cop.m()), 64);
  return inv.invert(r, y);
}

BootstrapSampler::BootstrapSampler(const SmoothEmpiricalCopula& cop) : cop_(cop) {
  const int m = static_cast<int>(cop.m());
  outer_ = std::make_shared<MarginInverter>(cop.family(), m);
  if (cop.family().kind() == SmoothingKind::BetaBinomial)
    inner_ = std::make_shared<MarginInverter>(SmoothingFamily::binomial(), m);
}

void BootstrapSampler::draw(Rng& rng, std::span<double> out) const {
  const std::size_t m = cop_.m(), d = cop_.d();
  const auto& R = cop_.ranks();
  std::size_t i = static_cast<std::size_t>(uniform01(rng) * m);
  if (i >= m) i = m - 1;
  double ustar[16];
  if (inner_) {
    std::size_t k = static_cast<std::size_t>(uniform01(rng) * m);
    if (k >= m) k = m - 1;
    for (std::size_t j = 0; j < d; ++j) ustar[j] = inner_->invert(R(k, j), uniform01(rng));
  } else {
    for (std::size_t j = 0; j < d; ++j) ustar[j] = uniform01(rng);
  }
  for (std::size_t j = 0; j < d; ++j) out[j] = outer_->invert(R(i, j), ustar[j]);
}

Sample BootstrapSampler::sample(std::size_t count, Rng& rng) const {
  const std::size_t d = cop_.d();
  std::vector<double> v(count * d);
  for (std::size_t i = 0; i < count; ++i) draw(rng, std::span<double>(v.data() + i * d, d));
  return Sample(count, d, std::move(v));
}

Sample draw_bootstrap_sample(const SmoothEmpiricalCopula& cop, Rng& rng) {
  return BootstrapSampler(cop).sample(cop.m(), rng);
}

IntervalKind parse_interval_kind(const std::string& name) {
  if (name == "percentile") return IntervalKind::Percentile;
  if (name == "basic") return IntervalKind::Basic;
  throw ConfigError("unknown interval kind '" + name + "' (expected percentile or basic)");
}

Interval bootstrap_interval(const std::vector<double>& replicates, double estimate, double level, IntervalKind kind) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0,1)");
  double qlo = quantile_type7(replicates, (1.0 - level) / 2.0);
  double qhi = quantile_type7(replicates, (1.0 + level) / 2.0);
  if (kind == IntervalKind::Percentile) return {qlo, qhi};
  return {2.0 * estimate - qhi, 2.0 * estimate - qlo};
}

namespace {

template <class Stat>
std::vector<double> bootstrap_stat(const Sample& x, const SmoothingFamily& family, std::size_t B,
                                   const SeedStreams& streams, Stat stat) {
  SmoothEmpiricalCopula cop(compute_ranks(x), family);
  BootstrapSampler sampler(cop);
  std::vector<double> out(B);
  parallel_for(B, [&](std::size_t b) {
    Rng rng = streams.child(b).engine();
    out[b] = stat(sampler.sample(x.n(), rng));
  });
  return out;
}

}  // namespace

std::vector<double> bootstrap_kendall(const Sample& x, const SmoothingFamily& family, std::size_t B,
                                      const SeedStreams& streams) {
  return bootstrap_stat(x, family, B, streams, [](const Sample& s) { return kendall_tau(s); });
}

std::vector<double> bootstrap_frank(const Sample& x, const SmoothingFamily& family, std::size_t B,
                                    const SeedStreams& streams) {
  return bootstrap_stat(x, family, B, streams, [](const Sample& s) { return frank_mpl_fit(s); });
}

Interval ci_kendall(const Sample& x, const SmoothingFamily& family, std::size_t B, double level,
                    const SeedStreams& streams, IntervalKind kind) {
  if (B < 2) throw ConfigError("need at least two bootstrap samples");
  return bootstrap_interval(bootstrap_kendall(x, family, B, streams), kendall_tau(x), level, kind);
}

Interval ci_frank_mpl(const Sample& x, const SmoothingFamily& family, std::size_t B, double level,
                      const SeedStreams& streams, IntervalKind kind) {
  if (x.d() != 2) throw DomainError("Frank MPL is bivariate");
  if (B < 2) throw ConfigError("need at least two bootstrap samples");
  return bootstrap_interval(bootstrap_frank(x, family, B, streams), frank_mpl_fit(x), level, kind);
}

double frank_mpl_fit(std::span<const double> pseudo) {
  const std::size_t n = pseudo.size() / 2;
  auto negll = [&](double th) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += frank_log_density(th, pseudo[2 * i], pseudo[2 * i + 1]);
    return -s;
  };
  bool any_finite = false;
  for (double th : {-40.0, -10.0, -1.0, 1.0, 10.0, 40.0}) any_finite = any_finite || std::isfinite(negll(th));
  if (!any_finite) throw OptimFailure("Frank pseudo-likelihood is not finite on [-40, 40]");
  std::uintmax_t iters = 500;
  auto [th, val] = boost::math::tools::brent_find_minima(negll, -40.0, 40.0, 45, iters);
  if (!std::isfinite(val)) throw OptimFailure("Frank pseudo-likelihood optimisation failed");
  return th;
}

double frank_mpl_fit(const Sample& x) {
  if (x.d() != 2) throw DomainError("Frank MPL is bivariate");
  return frank_mpl_fit(compute_ranks(x).pseudo_observations(1.0));
}

}  // namespace smoothcop

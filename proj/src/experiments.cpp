#include "smoothcop/experiments.hpp"

#include <cmath>

#include "smoothcop/errors.hpp"
#include "smoothcop/kernels.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop::experiments {

namespace {

SeedStreams data_streams(std::uint64_t seed) { return SeedStreams(seed).child(1); }
SeedStreams resample_streams(std::uint64_t seed) { return SeedStreams(seed).child(2); }

std::vector<std::vector<double>> thirds_points() {
  std::vector<std::vector<double>> pts;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) pts.push_back({i / 3.0, j / 3.0});
  return pts;
}

double unique_entry_mse(const std::vector<double>& a, const std::vector<double>& b, std::size_t k) {
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double e = a[i * k + j] - b[i * k + j];
      s += e * e;
      ++count;
    }
  return s / static_cast<double>(count);
}

std::vector<std::vector<double>> grid_points(std::size_t d, std::size_t g) {
  auto axis = open_grid(g);
  std::size_t total = 1;
  for (std::size_t t = 0; t < d; ++t) total *= g;
  std::vector<std::vector<double>> pts(total, std::vector<double>(d));
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (std::size_t t = d; t-- > 0;) {
      pts[p][t] = axis[rest % g];
      rest /= g;
    }
  }
  return pts;
}

}  // namespace

CiSummary run_ci(const CiConfig& cfg, const SmoothingFamily& family, std::uint64_t seed) {
  if (cfg.target == CiTarget::Frank && cfg.copula != CopulaFamily::Frank)
    throw ConfigError("Frank MPL intervals need Frank data");
  if (cfg.reps == 0) throw ConfigError("need at least one replication");
  const std::size_t d = 2;
  CopulaModel model = CopulaModel::from_tau(cfg.copula, cfg.tau, d);
  const double truth = cfg.target == CiTarget::Kendall ? cfg.tau : tau_to_theta(CopulaFamily::Frank, cfg.tau);
  CiSummary out;
  out.intervals.resize(cfg.reps);
  auto data = data_streams(seed);
  auto boot = resample_streams(seed);
  parallel_for(cfg.reps, [&](std::size_t r) {
    Rng rng = data.child(r).engine();
    Sample x = sample(model, cfg.n, rng);
    out.intervals[r] = cfg.target == CiTarget::Kendall
                           ? ci_kendall(x, family, cfg.B, cfg.level, boot.child(r), cfg.interval)
                           : ci_frank_mpl(x, family, cfg.B, cfg.level, boot.child(r), cfg.interval);
  });
  std::size_t covered = 0;
  double len = 0.0;
  for (const auto& iv : out.intervals) {
    covered += iv.covers(truth);
    len += iv.length();
  }
  out.coverage = static_cast<double>(covered) / static_cast<double>(cfg.reps);
  out.avg_length = len / static_cast<double>(cfg.reps);
  return out;
}

std::vector<double> target_covariance(const MultCovConfig& cfg, const SmoothingFamily& target, std::uint64_t seed) {
  CopulaModel model = CopulaModel::from_tau(cfg.copula, cfg.tau, 2);
  auto pts = thirds_points();
  const std::size_t P = pts.size(), N = cfg.target_samples;
  std::vector<double> truth(P);
  for (std::size_t p = 0; p < P; ++p) truth[p] = cdf(model, pts[p]);
  ReplicateSet vals{N, P, std::vector<double>(N * P)};
  auto streams = SeedStreams(seed).child(3);
  const double sqn = std::sqrt(static_cast<double>(cfg.n));
  parallel_for(N, [&](std::size_t s) {
    Rng rng = streams.child(s).engine();
    SmoothEmpiricalCopula cop(compute_ranks(sample(model, cfg.n, rng)), target);
    for (std::size_t p = 0; p < P; ++p) vals.values[s * P + p] = sqn * (cop(pts[p]) - truth[p]);
  });
  return estimate_covariance(vals);
}

std::vector<double> run_mult_cov(const MultCovConfig& cfg, const std::vector<double>& target_cov,
                                 const std::vector<SmoothingFamily>& replicate_families, std::uint64_t seed) {
  CopulaModel model = CopulaModel::from_tau(cfg.copula, cfg.tau, 2);
  auto pts = thirds_points();
  const std::size_t P = pts.size(), F = replicate_families.size();
  std::vector<double> err(cfg.reps * F);
  auto data = data_streams(seed);
  auto mult = resample_streams(seed);
  parallel_for(cfg.reps, [&](std::size_t r) {
    Rng rng = data.child(r).engine();
    Sample x = sample(model, cfg.n, rng);
    auto xi = gen_multiplier_matrix(MultiplierConfig::iid(), cfg.n, cfg.B, mult.child(r));
    for (std::size_t f = 0; f < F; ++f) {
      const auto& fam = replicate_families[f];
      ReplicateDesign design(x, SequentialWindow::full(cfg.n), fam, ReplicateScope::Global, pts,
                             PdSource(default_changepoint_pd(fam)));
      ReplicateSet reps{cfg.B, P, design.apply(xi, cfg.B)};
      err[r * F + f] = unique_entry_mse(estimate_covariance(reps), target_cov, P);
    }
  });
  std::vector<double> out(F, 0.0);
  for (std::size_t r = 0; r < cfg.reps; ++r)
    for (std::size_t f = 0; f < F; ++f) out[f] += err[r * F + f];
  for (double& v : out) v /= static_cast<double>(cfg.reps);
  return out;
}

namespace {

std::size_t cvm_grid(std::size_t d) { return d == 2 ? 10 : 5; }

}  // namespace

double target_functional_quantile(const MultQuantileConfig& cfg, const SmoothingFamily& target, std::uint64_t seed) {
  CopulaModel model = CopulaModel::from_tau(cfg.copula, cfg.tau, cfg.d);
  const std::size_t g = cvm_grid(cfg.d);
  auto pts = grid_points(cfg.d, g);
  std::vector<double> truth(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) truth[p] = cdf(model, pts[p]);
  std::vector<std::vector<double>> axes(cfg.d, open_grid(g));
  const double sqn = std::sqrt(static_cast<double>(cfg.n));
  std::vector<double> f(cfg.target_samples);
  auto streams = SeedStreams(seed).child(3);
  parallel_for(cfg.target_samples, [&](std::size_t s) {
    Rng rng = streams.child(s).engine();
    SmoothEmpiricalCopula cop(compute_ranks(sample(model, cfg.n, rng)), target);
    auto v = kernels::serial::eval_grid(cop, axes);
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = sqn * (v[p] - truth[p]);
    f[s] = apply_functional(cfg.functional, v);
  });
  return quantile_type7(std::move(f), cfg.q);
}

std::vector<double> run_mult_quantile(const MultQuantileConfig& cfg, double target_q,
                                      const std::vector<SmoothingFamily>& replicate_families, std::uint64_t seed) {
  CopulaModel model = CopulaModel::from_tau(cfg.copula, cfg.tau, cfg.d);
  auto pts = grid_points(cfg.d, cvm_grid(cfg.d));
  const std::size_t F = replicate_families.size();
  std::vector<double> err(cfg.reps * F);
  auto data = data_streams(seed);
  auto mult = resample_streams(seed);
  parallel_for(cfg.reps, [&](std::size_t r) {
    Rng rng = data.child(r).engine();
    Sample x = sample(model, cfg.n, rng);
    auto xi = gen_multiplier_matrix(MultiplierConfig::iid(), cfg.n, cfg.B, mult.child(r));
    for (std::size_t f = 0; f < F; ++f) {
      const auto& fam = replicate_families[f];
      ReplicateDesign design(x, SequentialWindow::full(cfg.n), fam, ReplicateScope::Global, pts,
                             PdSource(default_changepoint_pd(fam)));
      ReplicateSet reps{cfg.B, pts.size(), design.apply(xi, cfg.B)};
      double q = estimate_functional_quantile(reps, cfg.functional, cfg.q);
      err[r * F + f] = (q - target_q) * (q - target_q);
    }
  });
  std::vector<double> out(F, 0.0);
  for (std::size_t r = 0; r < cfg.reps; ++r)
    for (std::size_t f = 0; f < F; ++f) out[f] += err[r * F + f];
  for (double& v : out) v /= static_cast<double>(cfg.reps);
  return out;
}

Ar1Config make_ar1(const CpdConfig& cfg) {
  Ar1Config a;
  a.beta = cfg.beta;
  a.n = cfg.n;
  a.innovation_copula = CopulaModel::from_tau(cfg.copula, cfg.tau, 2);
  if (cfg.tau2) {
    if (!(cfg.t > 0.0 && cfg.t < 1.0)) throw ConfigError("change fraction t must lie in (0,1)");
    a.k_star = static_cast<std::size_t>(std::floor(cfg.n * cfg.t + 1e-9));
    a.post_copula = CopulaModel::from_tau(cfg.copula, *cfg.tau2, 2);
  }
  return a;
}

MultiplierConfig make_multipliers(const CpdConfig& cfg) {
  std::size_t ell = cfg.ell ? *cfg.ell : MultiplierConfig::default_ell(cfg.n);
  if (cfg.iid_multipliers) return MultiplierConfig::iid();
  return MultiplierConfig::dependent(ell);
}

std::vector<double> run_cpd_mc(const CpdConfig& cfg, const std::vector<SmoothingFamily>& families,
                               std::uint64_t seed) {
  auto ar = make_ar1(cfg);
  auto mc = make_multipliers(cfg);
  const std::size_t F = families.size();
  std::vector<char> reject(cfg.reps * F);
  auto data = data_streams(seed);
  auto mult = resample_streams(seed);
  parallel_for(cfg.reps, [&](std::size_t r) {
    Rng rng = data.child(r).engine();
    Sample x = generate_ar1(ar, rng);
    auto xi = gen_multiplier_matrix(mc, cfg.n, cfg.B, mult.child(r));
    for (std::size_t f = 0; f < F; ++f) {
      auto res = run_test_with_multipliers(x, families[f], xi, cfg.B, default_changepoint_pd(families[f]),
                                           cfg.options);
      reject[r * F + f] = res.p_value <= cfg.level;
    }
  });
  std::vector<double> out(F, 0.0);
  for (std::size_t r = 0; r < cfg.reps; ++r)
    for (std::size_t f = 0; f < F; ++f) out[f] += reject[r * F + f];
  for (double& v : out) v /= static_cast<double>(cfg.reps);
  return out;
}

}  // namespace smoothcop::experiments

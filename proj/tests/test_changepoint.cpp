#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "smoothcop/changepoint.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/numeric.hpp"

using namespace smoothcop;

namespace {

Sample frank(std::size_t n, std::uint64_t seed, double tau = 0.33) {
  Rng rng(seed);
  return sample(CopulaModel::from_tau(CopulaFamily::Frank, tau, 2), n, rng);
}

std::vector<std::vector<int>> sub_ranks(const Sample& x, std::size_t k0, std::size_t k1) {
  std::vector<std::vector<int>> out(k1 - k0, std::vector<int>(2));
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> c;
    for (std::size_t i = k0; i < k1; ++i) c.push_back(x.values()[i * 2 + j]);
    auto r = oracle::ranks_by_counting(c);
    for (std::size_t i = 0; i < r.size(); ++i) out[i][j] = r[i];
  }
  return out;
}

// Sub-window estimators: indicators of R/(m + shift) <= u, or the beta
// mixture for the binomial kind.
double window_copula(const std::vector<std::vector<int>>& R, const std::vector<double>& u, bool binomial, int shift) {
  if (!binomial) {
    int c = 0;
    for (const auto& r : R) c += r[0] / (R.size() + shift + 0.0) <= u[0] && r[1] / (R.size() + shift + 0.0) <= u[1];
    return static_cast<double>(c) / R.size();
  }
  const double m = R.size();
  double s = 0.0;
  for (const auto& r : R) {
    double p = 1.0;
    for (std::size_t j = 0; j < 2; ++j)
      p *= u[j] >= 1.0 ? 1.0 : (u[j] <= 0.0 ? 0.0 : oracle::incomplete_beta(r[j], m + 1.0 - r[j], u[j]));
    s += p;
  }
  return s / m;
}

double statistic_by_definition(const Sample& x, bool binomial, int shift = 0) {
  const std::size_t n = x.n();
  auto full = sub_ranks(x, 0, n);
  double best = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    auto pre = sub_ranks(x, 0, k), suf = sub_ranks(x, k, n);
    double w = std::sqrt(static_cast<double>(n)) * k * (n - k) / (static_cast<double>(n) * n), s = 0.0;
    for (const auto& r : full) {
      std::vector<double> u{r[0] / static_cast<double>(n), r[1] / static_cast<double>(n)};
      double dv = w * (window_copula(pre, u, binomial, shift) - window_copula(suf, u, binomial, shift));
      s += dv * dv;
    }
    best = std::max(best, s / n);
  }
  return best;
}

// The replicate through the generic multiplier code path: l1 C~(0, s) - l0 C~(s, 1)
// with each sub-window ranked on its own.
double replicate_by_designs(const Sample& x, const SmoothingFamily& f, const std::vector<double>& xi,
                            const PdEstimatorSpec& pd) {
  const std::size_t n = x.n();
  auto pts = compute_ranks(x).pseudo_observations();
  std::vector<std::vector<double>> points;
  for (std::size_t p = 0; p < n; ++p) points.push_back({pts[2 * p], pts[2 * p + 1]});
  double best = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double l0 = static_cast<double>(k) / n, l1 = 1.0 - l0;
    ReplicateDesign a(x, SequentialWindow::from_indices(0, k, n), f, ReplicateScope::Local, points, PdSource(pd));
    ReplicateDesign b(x, SequentialWindow::from_indices(k, n, n), f, ReplicateScope::Local, points, PdSource(pd));
    auto ra = a.apply(xi), rb = b.apply(xi);
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) s += (l1 * ra[p] - l0 * rb[p]) * (l1 * ra[p] - l0 * rb[p]);
    best = std::max(best, s / n);
  }
  return best;
}

}  // namespace

TEST(Statistic, FourPointComonotoneHandValue) {
  // splits 1|3 and 3|1 give 0.375^2 (1/9 + 4/9) / 4, the middle split gives 0
  Sample x(4, 2, {1, 1, 2, 2, 3, 3, 4, 4});
  auto s = statistic_S(x, SmoothingFamily::dirac(), ChangePointOptions{0});
  EXPECT_DOUBLE_EQ(s.S, 5.0 / 256.0);
  EXPECT_DOUBLE_EQ(s.argmax_s, 0.25);
}

TEST(Statistic, MatchesDefinition) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Sample x = frank(6 + seed * 3, seed);
    EXPECT_NEAR(statistic_S(x, SmoothingFamily::dirac(), ChangePointOptions{0}).S, statistic_by_definition(x, false), 1e-14);
    EXPECT_NEAR(statistic_S(x, SmoothingFamily::dirac()).S, statistic_by_definition(x, false, 1), 1e-14);
    EXPECT_NEAR(statistic_S(x, SmoothingFamily::binomial()).S, statistic_by_definition(x, true), 1e-12);
    // the rescaling only concerns the Dirac kind
    EXPECT_EQ(statistic_S(x, SmoothingFamily::binomial(), ChangePointOptions{0}).S,
              statistic_S(x, SmoothingFamily::binomial()).S);
  }
}

TEST(Statistic, BoundaryWeight) {
  // only the first split differs: weight sqrt(n) (1/n)((n-1)/n)
  const std::size_t n = 10;
  std::vector<double> v;
  v.push_back(10.0);
  v.push_back(0.0);
  for (std::size_t i = 1; i < n; ++i) {
    v.push_back(static_cast<double>(i));
    v.push_back(static_cast<double>(i));
  }
  Sample x(n, 2, v);
  EXPECT_NEAR(statistic_S(x, SmoothingFamily::dirac(), ChangePointOptions{0}).S, statistic_by_definition(x, false), 1e-15);
  EXPECT_DOUBLE_EQ(1.0 / n * (n - 1.0) / n, 0.09);
}

TEST(Statistic, InvariantUnderMonotoneTransforms) {
  Sample x = frank(30, 5);
  std::vector<double> v = x.values();
  for (std::size_t i = 0; i < 30; ++i) {
    v[2 * i] = std::exp(3.0 * v[2 * i]);
    v[2 * i + 1] = std::pow(v[2 * i + 1], 3.0) - 7.0;
  }
  Sample y(30, 2, v);
  for (auto f : {SmoothingFamily::dirac(), SmoothingFamily::binomial(), SmoothingFamily::beta_binomial()}) {
    auto a = statistic_S(x, f), b = statistic_S(y, f);
    EXPECT_EQ(a.S, b.S);
    EXPECT_EQ(a.argmax_s, b.argmax_s);
  }
}

TEST(Replicates, ZeroMultipliers) {
  Sample x = frank(20, 6);
  std::vector<double> zero(20, 0.0);
  for (auto f : {SmoothingFamily::dirac(), SmoothingFamily::binomial()})
    EXPECT_EQ(replicate_S(x, f, zero, default_changepoint_pd(f)), 0.0);
}

TEST(Replicates, FastPathMatchesGenericDesigns) {
  Sample x = frank(16, 7);
  Rng rng(8);
  auto xi = gen_multipliers(MultiplierConfig::dependent(2), 16, rng);
  for (auto f : {SmoothingFamily::dirac(), SmoothingFamily::binomial(), SmoothingFamily::beta_binomial()}) {
    auto pd = default_changepoint_pd(f);
    EXPECT_NEAR(replicate_S(x, f, xi, pd, ChangePointOptions{0}), replicate_by_designs(x, f, xi, pd), 1e-13) << f.name();
  }
  auto shifted = SmoothingFamily::dirac(1);
  EXPECT_NEAR(replicate_S(x, SmoothingFamily::dirac(), xi, default_changepoint_pd(SmoothingFamily::dirac())),
              replicate_by_designs(x, shifted, xi, default_changepoint_pd(shifted)), 1e-13);
  // a pd estimator that is not the family's own goes through the general path
  auto other = PdEstimatorSpec::parse("bern");
  EXPECT_NEAR(replicate_S(x, SmoothingFamily::binomial(), xi, other),
              replicate_by_designs(x, SmoothingFamily::binomial(), xi, other), 1e-13);
}

TEST(Replicates, BatchEqualsSingle) {
  Sample x = frank(25, 9);
  const std::size_t B = 4;
  auto xi = gen_multiplier_matrix(MultiplierConfig::iid(), 25, B, SeedStreams(3));
  auto f = SmoothingFamily::binomial();
  auto r = run_test_with_multipliers(x, f, xi, B, default_changepoint_pd(f));
  for (std::size_t b = 0; b < B; ++b)
    EXPECT_NEAR(r.replicate_values[b],
                replicate_S(x, f, std::span<const double>(xi.data() + b * 25, 25), default_changepoint_pd(f)), 1e-14);
}

TEST(PValue, Counting) {
  Sample x = frank(20, 10, 0.0);
  auto f = SmoothingFamily::dirac();
  std::vector<double> zero(20 * 5, 0.0);
  auto r = run_test_with_multipliers(x, f, zero, 5, default_changepoint_pd(f));
  ASSERT_GT(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 0.0);
  // a statistic of exactly 0 is matched by every replicate
  Sample two(2, 2, {0.1, 0.2, 0.3, 0.4});
  auto z = run_test_with_multipliers(two, f, std::vector<double>(2 * 3, 0.0), 3, default_changepoint_pd(f));
  EXPECT_EQ(z.statistic, 0.0);
  EXPECT_EQ(z.p_value, 1.0);
  auto t = run_test(x, f, 50, MultiplierConfig::iid(), SeedStreams(4));
  std::size_t c = std::count_if(t.replicate_values.begin(), t.replicate_values.end(),
                                [&](double v) { return v >= t.statistic; });
  EXPECT_DOUBLE_EQ(t.p_value, c / 50.0);
}

TEST(PValue, DeterministicUnderSeed) {
  Sample x = frank(40, 11);
  auto a = run_test(x, SmoothingFamily::binomial(), 30, MultiplierConfig::dependent(3), SeedStreams(5));
  auto b = run_test(x, SmoothingFamily::binomial(), 30, MultiplierConfig::dependent(3), SeedStreams(5));
  EXPECT_EQ(a.replicate_values, b.replicate_values);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(PValue, RoughlyUniformUnderNull) {
  const std::size_t reps = 200;
  std::vector<double> p(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Sample x = frank(100, 5000 + r);
    p[r] = run_test(x, SmoothingFamily::dirac(), 200, MultiplierConfig::iid(), SeedStreams(r)).p_value;
  }
  std::sort(p.begin(), p.end());
  double d = 0.0;
  for (std::size_t i = 0; i < reps; ++i)
    d = std::max({d, std::abs((i + 1.0) / reps - p[i]), std::abs(p[i] - static_cast<double>(i) / reps)});
  // KS critical value at 1% for 200 draws
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(reps)));
}

TEST(Ar1, NoFilterGivesInnovations) {
  Ar1Config cfg;
  cfg.innovation_copula = CopulaModel::from_tau(CopulaFamily::Clayton, 0.5, 2);
  cfg.n = 50;
  Rng a(12), b(12);
  Sample x = generate_ar1(cfg, a);
  double u[2];
  for (std::size_t t = 0; t < 150; ++t) {
    draw(cfg.innovation_copula, b, u);
    if (t < 100) continue;
    EXPECT_EQ(x.values()[(t - 100) * 2], normal_quantile(u[0]));
    EXPECT_EQ(x.values()[(t - 100) * 2 + 1], normal_quantile(u[1]));
  }
}

TEST(Ar1, TauAndAutocorrelation) {
  Ar1Config cfg;
  cfg.innovation_copula = CopulaModel::from_tau(CopulaFamily::Frank, 0.33, 2);
  cfg.n = 2000;
  Rng rng(13);
  EXPECT_NEAR(kendall_tau(generate_ar1(cfg, rng)), 0.33, 0.04);
  cfg.beta = 0.5;
  cfg.n = 5000;
  Sample x = generate_ar1(cfg, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    auto c = column(x, j);
    double m = 0.0;
    for (double v : c) m += v / c.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      den += (c[i] - m) * (c[i] - m);
      if (i + 1 < c.size()) num += (c[i] - m) * (c[i + 1] - m);
    }
    EXPECT_NEAR(num / den, 0.5, 0.05);
  }
  cfg.beta = 1.0;
  EXPECT_THROW(generate_ar1(cfg, rng), DomainError);
}

TEST(Ar1, ChangeInDependence) {
  Ar1Config cfg;
  cfg.innovation_copula = CopulaModel::from_tau(CopulaFamily::Frank, 0.2, 2);
  cfg.post_copula = CopulaModel::from_tau(CopulaFamily::Frank, 0.6, 2);
  cfg.n = 1000;
  cfg.k_star = 500;
  Rng rng(14);
  Sample x = generate_ar1(cfg, rng);
  EXPECT_LT(kendall_tau(compute_ranks(x, 1, 500)), kendall_tau(compute_ranks(x, 501, 1000)));
  auto s = statistic_S(x, SmoothingFamily::dirac());
  EXPECT_NEAR(s.argmax_s, 0.5, 0.1);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smoothcop/copula_models.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/smooth_bootstrap.hpp"

using namespace smoothcop;

namespace {

Sample clayton_sample(std::size_t n, double tau, std::uint64_t seed) {
  Rng rng(seed);
  return sample(CopulaModel::from_tau(CopulaFamily::Clayton, tau, 2), n, rng);
}

double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    d = std::max({d, std::abs((i + 1.0) / v.size() - v[i]), std::abs(v[i] - static_cast<double>(i) / v.size())});
  return d;
}

}  // namespace

TEST(MarginInversion, EndpointsAndIdentity) {
  Sample one(1, 2, {0.4, 0.6});
  SmoothEmpiricalCopula cop(compute_ranks(one), SmoothingFamily::binomial());
  EXPECT_EQ(margin_quantile_invert(cop, 0, 1, 0.0), 0.0);
  EXPECT_EQ(margin_quantile_invert(cop, 0, 1, 1.0), 1.0);
  for (double y : {0.1, 0.37, 0.9}) EXPECT_NEAR(margin_quantile_invert(cop, 1, 1, y), y, 1e-10);
}

TEST(MarginInversion, RoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U;
  for (auto f : {SmoothingFamily::binomial(), SmoothingFamily::beta_binomial()})
    for (int m : {3, 10, 80, 200}) {
      MarginInverter inv(f, m);
      for (int k = 0; k < 100; ++k) {
        int r = 1 + static_cast<int>(rng() % m);
        double y = U(rng);
        double u = inv.invert(r, y);
        EXPECT_NEAR(margin_kernel_at(f, m, u, r), y, 1e-10);
      }
    }
}

TEST(MarginInversion, DiracRejected) {
  Sample x = clayton_sample(10, 0.5, 1);
  SmoothEmpiricalCopula cop(compute_ranks(x), SmoothingFamily::dirac());
  Rng rng(1);
  EXPECT_THROW(draw_bootstrap_sample(cop, rng), UnsupportedFamilyError);
}

TEST(BootstrapDraw, SingleObservationIsUniform) {
  Sample one(1, 2, {0.4, 0.6});
  SmoothEmpiricalCopula cop(compute_ranks(one), SmoothingFamily::binomial());
  BootstrapSampler s(cop);
  Rng rng(5);
  Sample x = s.sample(10000, rng);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_LT(ks_uniform(column(x, j)), 1.63 / std::sqrt(10000.0));
}

TEST(BootstrapDraw, Deterministic) {
  Sample x = clayton_sample(30, 0.5, 2);
  SmoothEmpiricalCopula cop(compute_ranks(x), SmoothingFamily::beta_binomial());
  Rng a(9), b(9);
  EXPECT_EQ(draw_bootstrap_sample(cop, a).values(), draw_bootstrap_sample(cop, b).values());
}

TEST(BootstrapDraw, SmallSampleConsistency) {
  // empirical copula of many draws tracks the fitted estimator
  Sample x = clayton_sample(20, 0.5, 3);
  for (auto f : {SmoothingFamily::binomial(), SmoothingFamily::beta_binomial()}) {
    SmoothEmpiricalCopula cop(compute_ranks(x), f);
    Rng rng(4);
    auto draws = compute_ranks(BootstrapSampler(cop).sample(20000, rng));
    double sup = 0.0;
    for (int a = 1; a < 10; ++a)
      for (int b = 1; b < 10; ++b) {
        std::vector<double> u{a / 10.0, b / 10.0};
        sup = std::max(sup, std::abs(empirical_copula_eval(draws, u) - cop(u)));
      }
    EXPECT_LT(sup, 0.02) << f.name();
  }
}

TEST(Interval, DegenerateResamplesGiveZeroLength) {
  Sample x = clayton_sample(25, 0.5, 6);
  auto iv = ci_kendall(x, SmoothingFamily::binomial(), 100, 0.95, SeedStreams::constant(3));
  EXPECT_EQ(iv.lo, iv.hi);
  Rng rng = SeedStreams::constant(3).child(0).engine();
  SmoothEmpiricalCopula cop(compute_ranks(x), SmoothingFamily::binomial());
  EXPECT_DOUBLE_EQ(iv.lo, kendall_tau(draw_bootstrap_sample(cop, rng)));
}

TEST(Interval, OrderedInsideRangeAndReproducible) {
  Sample x = clayton_sample(40, 0.5, 7);
  for (auto kind : {IntervalKind::Percentile, IntervalKind::Basic}) {
    auto a = ci_kendall(x, SmoothingFamily::beta_binomial(), 120, 0.9, SeedStreams(11), kind);
    auto b = ci_kendall(x, SmoothingFamily::beta_binomial(), 120, 0.9, SeedStreams(11), kind);
    EXPECT_LE(a.lo, a.hi);
    EXPECT_GE(a.lo, -1.0);
    EXPECT_LE(a.hi, 1.0 + 1e-12);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
  }
}

TEST(Interval, BasicReflectsPercentile) {
  std::vector<double> reps{0.1, 0.2, 0.3, 0.4, 0.5};
  auto p = bootstrap_interval(reps, 0.35, 0.5, IntervalKind::Percentile);
  auto b = bootstrap_interval(reps, 0.35, 0.5, IntervalKind::Basic);
  EXPECT_NEAR(b.lo, 0.7 - p.hi, 1e-15);
  EXPECT_NEAR(b.hi, 0.7 - p.lo, 1e-15);
}

TEST(FrankMpl, IndependenceAndConsistency) {
  Rng rng(8);
  Sample ind = sample(CopulaModel(CopulaFamily::Independence, 0, 2), 200, rng);
  EXPECT_LT(std::abs(frank_mpl_fit(ind)), 1.0);
  Rng rng2(9);
  Sample fr = sample(CopulaModel(CopulaFamily::Frank, 5.74, 2), 2000, rng2);
  EXPECT_NEAR(frank_mpl_fit(fr), 5.74, 0.5);
  Rng rng3(10);
  Sample neg = sample(CopulaModel(CopulaFamily::Frank, -3.0, 2), 2000, rng3);
  EXPECT_NEAR(frank_mpl_fit(neg), -3.0, 0.5);
}

TEST(FrankMpl, StationaryPoint) {
  Rng rng(12);
  Sample fr = sample(CopulaModel(CopulaFamily::Frank, 8.0, 2), 300, rng);
  auto pseudo = compute_ranks(fr).pseudo_observations(1.0);
  double th = frank_mpl_fit(pseudo);
  auto ll = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < 300; ++i) s += frank_log_density(t, pseudo[2 * i], pseudo[2 * i + 1]);
    return s;
  };
  EXPECT_GE(ll(th), ll(th + 1e-4));
  EXPECT_GE(ll(th), ll(th - 1e-4));
}

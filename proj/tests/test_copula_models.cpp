#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "smoothcop/copula_models.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/numeric.hpp"
#include "smoothcop/sample.hpp"

using namespace smoothcop;

namespace {

// Frank tau by direct Simpson integration of t/(e^t - 1), then bisection.
double frank_theta_oracle(double tau) {
  auto d1 = [](double x) {
    const int N = 20000;
    double h = x / N, s = 0.0;
    for (int k = 0; k <= N; ++k) {
      double t = k * h;
      double f = t == 0.0 ? 1.0 : t / std::expm1(t);
      s += (k == 0 || k == N ? 1 : (k % 2 ? 4 : 2)) * f;
    }
    return s * h / 3.0 / x;
  };
  double lo = 1e-3, hi = 100.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    double t = 1.0 - 4.0 / mid + 4.0 * d1(mid) / mid;
    (t < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<CopulaModel> models() {
  return {CopulaModel(CopulaFamily::Independence, 0, 2), CopulaModel(CopulaFamily::Clayton, 2.0, 2),
          CopulaModel(CopulaFamily::GumbelHougaard, 2.5, 2), CopulaModel(CopulaFamily::Frank, 5.74, 2),
          CopulaModel(CopulaFamily::Frank, -4.0, 2),       CopulaModel(CopulaFamily::Clayton, 1.0, 3),
          CopulaModel(CopulaFamily::GumbelHougaard, 1.5, 3), CopulaModel(CopulaFamily::Frank, 3.0, 3)};
}

}  // namespace

TEST(TauToTheta, ClosedForms) {
  EXPECT_DOUBLE_EQ(tau_to_theta(CopulaFamily::Clayton, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(tau_to_theta(CopulaFamily::GumbelHougaard, 0.75), 4.0);
  EXPECT_THROW(tau_to_theta(CopulaFamily::GumbelHougaard, -0.2), RangeError);
  EXPECT_THROW(tau_to_theta(CopulaFamily::Clayton, 1.0), RangeError);
}

TEST(TauToTheta, FrankMatchesDebyeOracle) {
  double th = tau_to_theta(CopulaFamily::Frank, 0.5);
  EXPECT_NEAR(th, frank_theta_oracle(0.5), 1e-7);
  EXPECT_NEAR(th, 5.7363, 1e-3);
  EXPECT_NEAR(frank_tau(th), 0.5, 1e-10);
  EXPECT_NEAR(tau_to_theta(CopulaFamily::Frank, -0.3), -tau_to_theta(CopulaFamily::Frank, 0.3), 1e-12);
}

TEST(Sampling, IndependenceNull) {
  Rng rng(1);
  Sample x = sample(CopulaModel(CopulaFamily::Independence, 0, 2), 400, rng);
  EXPECT_LT(std::abs(kendall_tau(x)), 4.0 / std::sqrt(400.0));
}

TEST(Sampling, TauTargets) {
  struct Case {
    CopulaFamily f;
    double tau;
  };
  for (Case c : {Case{CopulaFamily::Clayton, 0.5}, Case{CopulaFamily::Frank, -0.4},
                 Case{CopulaFamily::GumbelHougaard, 0.6}, Case{CopulaFamily::Frank, 0.75}}) {
    Rng rng(42);
    Sample x = sample(CopulaModel::from_tau(c.f, c.tau, 2), 5000, rng);
    EXPECT_NEAR(kendall_tau(x), c.tau, 0.05) << to_string(c.f);
  }
}

TEST(Sampling, EmpiricalCopulaCloseToCdf) {
  for (const auto& model : models()) {
    Rng rng(7);
    Sample x = sample(model, 10000, rng);
    auto r = compute_ranks(x);
    const std::size_t d = model.d();
    const int g = d == 2 ? 20 : 8;
    std::size_t total = 1;
    for (std::size_t t = 0; t < d; ++t) total *= g;
    double sup = 0.0;
    std::vector<double> u(d);
    for (std::size_t p = 0; p < total; ++p) {
      std::size_t rest = p;
      for (std::size_t t = 0; t < d; ++t) {
        u[t] = (rest % g + 1.0) / (g + 1.0);
        rest /= g;
      }
      sup = std::max(sup, std::abs(empirical_copula_eval(r, u) - cdf(model, u)));
    }
    EXPECT_LT(sup, 0.03) << to_string(model.family()) << " theta " << model.theta();
  }
}

TEST(Cdf, FrechetBoundsAndMargins) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U;
  for (const auto& model : models()) {
    const std::size_t d = model.d();
    for (int k = 0; k < 200; ++k) {
      std::vector<double> u(d);
      double s = 0.0, mn = 1.0;
      for (double& x : u) {
        x = U(rng);
        s += x;
        mn = std::min(mn, x);
      }
      double c = cdf(model, u);
      EXPECT_GE(c, std::max(s - d + 1.0, 0.0) - 1e-12);
      EXPECT_LE(c, mn + 1e-12);
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> v(d, 1.0);
        v[j] = u[j];
        EXPECT_NEAR(cdf(model, v), u[j], 1e-12);
      }
    }
  }
}

TEST(PartialDerivative, IndependenceAndBoundary) {
  CopulaModel ind(CopulaFamily::Independence, 0, 2);
  std::vector<double> u{0.3, 0.8};
  EXPECT_DOUBLE_EQ(true_partial_derivative(ind, 0, u), 0.8);
  for (const auto& model : models()) {
    std::vector<double> v(model.d(), 1.0);
    v[0] = 0.37;
    EXPECT_NEAR(true_partial_derivative(model, 0, v), 1.0, 1e-12);
    v[0] = 0.0;
    EXPECT_EQ(true_partial_derivative(model, 0, v), 0.0);
  }
}

TEST(PartialDerivative, MatchesFiniteDifferences) {
  CopulaModel clayton(CopulaFamily::Clayton, 2.0, 2);
  std::vector<double> u{0.3, 0.7};
  auto fd = [&](const CopulaModel& m, std::size_t j, std::vector<double> p) {
    auto a = p, b = p;
    a[j] += 1e-6;
    b[j] -= 1e-6;
    return (cdf(m, a) - cdf(m, b)) / 2e-6;
  };
  EXPECT_NEAR(true_partial_derivative(clayton, 0, u), fd(clayton, 0, u), 1e-6);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (const auto& model : models())
    for (int k = 0; k < 20; ++k) {
      std::vector<double> p(model.d());
      for (double& x : p) x = U(rng);
      for (std::size_t j = 0; j < model.d(); ++j)
        EXPECT_NEAR(true_partial_derivative(model, j, p), fd(model, j, p), 1e-6);
    }
}

TEST(PartialDerivative, IntegratesBackToCdf) {
  for (const auto& model : models()) {
    std::vector<double> u(model.d(), 0.6);
    u[1] = 0.45;
    const int N = 20000;
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      u[0] = (k + 0.5) / N;
      s += true_partial_derivative(model, 0, u);
    }
    s /= N;
    u[0] = 1.0;
    EXPECT_NEAR(s, cdf(model, u), 1e-6);
  }
}

TEST(FrankDensity, LimitsSymmetryAndFiniteDifference) {
  EXPECT_NEAR(frank_log_density(1e-8, 0.3, 0.9), 0.0, 1e-7);
  EXPECT_DOUBLE_EQ(frank_log_density(7.0, 0.2, 0.6), frank_log_density(7.0, 0.6, 0.2));
  CopulaModel f(CopulaFamily::Frank, 5.0, 2);
  double h = 1e-4;
  auto c = [&](double a, double b) {
    std::vector<double> p{a, b};
    return cdf(f, p);
  };
  double mixed = (c(0.2 + h, 0.8 + h) - c(0.2 + h, 0.8 - h) - c(0.2 - h, 0.8 + h) + c(0.2 - h, 0.8 - h)) / (4 * h * h);
  EXPECT_NEAR(std::exp(frank_log_density(5.0, 0.2, 0.8)) / mixed, 1.0, 1e-4);
  // stability at the edge of the parameter range
  EXPECT_TRUE(std::isfinite(frank_log_density(40.0, 1e-3, 0.999)));
  EXPECT_TRUE(std::isfinite(frank_log_density(-40.0, 1e-3, 1e-3)));
  EXPECT_TRUE(std::isfinite(frank_log_density(40.0, 0.995, 0.995)));
  EXPECT_NEAR(frank_log_density(40.0, 0.995, 0.995), frank_log_density(40.0, 0.005, 0.005), 1e-9);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "smoothcop/csv.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/sample.hpp"

using namespace smoothcop;

namespace {

Sample random_sample(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U;
  std::vector<double> v(n * d);
  for (double& x : v) x = U(rng);
  return Sample(n, d, v);
}

std::vector<std::vector<int>> rows_of(const RankMatrix& r) {
  std::vector<std::vector<int>> out(r.m(), std::vector<int>(r.d()));
  for (std::size_t i = 0; i < r.m(); ++i)
    for (std::size_t j = 0; j < r.d(); ++j) out[i][j] = r(i, j);
  return out;
}

}  // namespace

TEST(Ranks, SingleRow) {
  Sample x(1, 3, {0.2, -4.0, 9.0});
  auto r = compute_ranks(x);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(r(0, j), 1);
}

TEST(Ranks, OrderStatistics) {
  auto r = rank_column(std::vector<double>{3.1, 1.2, 2.5});
  EXPECT_EQ(r, (std::vector<int>{3, 1, 2}));
}

TEST(Ranks, MatchCountingOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Sample x = random_sample(5, 2, seed);
    auto r = compute_ranks(x);
    for (std::size_t j = 0; j < 2; ++j) {
      auto want = oracle::ranks_by_counting(column(x, j));
      for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r(i, j), want[i]);
    }
  }
}

TEST(Ranks, WindowAndErrors) {
  Sample x(4, 1, {4.0, 1.0, 3.0, 2.0});
  auto r = compute_ranks(x, 2, 3);  // values 1, 3
  EXPECT_EQ(r.m(), 2u);
  EXPECT_EQ(r(0, 0), 1);
  EXPECT_EQ(r(1, 0), 2);
  EXPECT_THROW(compute_ranks(x, 3, 2), WindowError);
  EXPECT_THROW(Sample(3, 1, {1.0, 2.0, 1.0}), TieError);
  EXPECT_THROW(rank_column(std::vector<double>{0.5, 0.5}), TieError);
}

TEST(Ranks, InvariantUnderIncreasingTransforms) {
  Sample x = random_sample(30, 3, 9);
  std::vector<double> v = x.values();
  for (std::size_t i = 0; i < 30; ++i) {
    v[i * 3] = std::exp(5 * v[i * 3]);
    v[i * 3 + 1] = std::pow(v[i * 3 + 1], 3) - 2;
  }
  EXPECT_EQ(compute_ranks(x).data(), compute_ranks(Sample(30, 3, v)).data());
  EXPECT_DOUBLE_EQ(kendall_tau(x), kendall_tau(Sample(30, 3, v)));
}

TEST(EmpiricalCopula, Corners) {
  Sample x = random_sample(10, 2, 1);
  auto r = compute_ranks(x);
  std::vector<double> one{1.0, 1.0};
  EXPECT_EQ(empirical_copula_eval(r, one), 1.0);
  std::vector<double> small{0.09, 1.0};
  EXPECT_EQ(empirical_copula_eval(r, small), 0.0);
}

TEST(EmpiricalCopula, HandExample) {
  RankMatrix r(4, 2, {1, 2, 2, 1, 3, 4, 4, 3});
  std::vector<double> u{0.5, 0.5};
  EXPECT_EQ(empirical_copula_eval(r, u), 0.5);
}

TEST(EmpiricalCopula, MatchesDefinitionAndHasStepMargins) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Sample x = random_sample(13, 3, seed);
    auto r = compute_ranks(x);
    auto rows = rows_of(r);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> u{U(rng), U(rng), U(rng)};
      EXPECT_EQ(empirical_copula_eval(r, u), oracle::empirical_copula(rows, u));
    }
    for (int g = 0; g <= 20; ++g) {
      std::vector<double> u{1.0, g / 20.0, 1.0};
      EXPECT_NEAR(empirical_copula_eval(r, u), std::floor(13 * u[1] + 1e-12) / 13.0, 1e-15);
    }
  }
}

TEST(EmpiricalCopula, MonotoneInEachCoordinate) {
  Sample x = random_sample(25, 2, 2);
  auto r = compute_ranks(x);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U;
  for (int k = 0; k < 200; ++k) {
    std::vector<double> u{U(rng), U(rng)};
    auto v = u;
    v[k % 2] = std::min(1.0, v[k % 2] + 0.1 * U(rng));
    EXPECT_LE(empirical_copula_eval(r, u), empirical_copula_eval(r, v));
  }
}

TEST(KendallTau, ExtremesAndOracle) {
  std::vector<double> a{1, 2, 3, 4, 5, 6}, b{6, 5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(kendall_tau(std::span<const double>(a), std::span<const double>(a)), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(std::span<const double>(a), std::span<const double>(b)), -1.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Sample x = random_sample(6 + seed * 7, 2, seed);
    auto c0 = column(x, 0), c1 = column(x, 1);
    EXPECT_NEAR(kendall_tau(x), oracle::kendall_by_pairs(c0, c1), 1e-14);
  }
}

TEST(KendallTau, AverageOverPairs) {
  Sample x = random_sample(40, 3, 4);
  auto c0 = column(x, 0), c1 = column(x, 1), c2 = column(x, 2);
  double want = (oracle::kendall_by_pairs(c0, c1) + oracle::kendall_by_pairs(c0, c2) +
                 oracle::kendall_by_pairs(c1, c2)) / 3.0;
  EXPECT_NEAR(kendall_tau(x), want, 1e-14);
}

TEST(Csv, HeaderOptionalAndRejectsNonFinite) {
  std::istringstream with_header("a,b\n0.5,1e-3\n-2.25, 7\n");
  Sample x = read_sample_csv(with_header);
  EXPECT_EQ(x.n(), 2u);
  EXPECT_DOUBLE_EQ(x(1, 0), -2.25);
  std::istringstream plain("1,2\n3,4\n");
  EXPECT_EQ(read_sample_csv(plain).n(), 2u);
  std::istringstream nan("1,2\nnan,4\n");
  EXPECT_THROW(read_sample_csv(nan), DataError);
  std::istringstream inf("1,2\n3,inf\n");
  EXPECT_THROW(read_sample_csv(inf), DataError);
  std::istringstream ties("1,2\n1,4\n");
  EXPECT_THROW(read_sample_csv(ties), TieError);
}

TEST(Csv, RoundTripsDoubles) {
  Sample x = random_sample(20, 2, 11);
  std::istringstream in(sample_to_csv(x));
  EXPECT_EQ(read_sample_csv(in).values(), x.values());
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothcop/changepoint.hpp"
#include "smoothcop/copula_models.hpp"
#include "smoothcop/multiplier.hpp"
#include "smoothcop/partial_derivatives.hpp"
#include "smoothcop/smooth_bootstrap.hpp"
#include "smoothcop/smoothing.hpp"

// Monte Carlo designs behind the CLI subcommands. Replication r always draws
// its data from SeedStreams(seed).child(1).child(r) and its resampling
// randomness from .child(2).child(r), so different families compared in one
// run see the same data.
namespace smoothcop::experiments {

enum class CiTarget { Kendall, Frank };

struct CiConfig {
  CiTarget target = CiTarget::Kendall;
  CopulaFamily copula = CopulaFamily::Clayton;
  double tau = 0.5;
  std::size_t n = 80;
  std::size_t B = 250;
  std::size_t reps = 100;
  double level = 0.95;
  IntervalKind interval = IntervalKind::Percentile;
};

struct CiSummary {
  double coverage = 0.0;
  double avg_length = 0.0;
  std::vector<Interval> intervals;
};

CiSummary run_ci(const CiConfig& cfg, const SmoothingFamily& family, std::uint64_t seed);

struct MultCovConfig {
  CopulaFamily copula = CopulaFamily::Clayton;
  double tau = 0.25;
  std::size_t n = 80;
  std::size_t B = 300;
  std::size_t reps = 300;
  std::size_t target_samples = 100000;
};

// Covariance of sqrt(n)(C^nu_{1:n} - C) at the points (i/3, j/3), i, j = 1, 2,
// by Monte Carlo. Row-major 4 x 4.
std::vector<double> target_covariance(const MultCovConfig& cfg, const SmoothingFamily& target, std::uint64_t seed);

// Mean over reps of the mean squared error over the 10 distinct entries of
// the replicate covariance matrix, for each replicate family.
std::vector<double> run_mult_cov(const MultCovConfig& cfg, const std::vector<double>& target_cov,
                                 const std::vector<SmoothingFamily>& replicate_families, std::uint64_t seed);

struct MultQuantileConfig {
  CopulaFamily copula = CopulaFamily::Clayton;
  double tau = 0.25;
  std::size_t d = 2;
  std::size_t n = 80;
  std::size_t B = 300;
  std::size_t reps = 300;
  std::size_t target_samples = 20000;
  Functional functional = Functional::KS;
  double q = 0.95;
};

double target_functional_quantile(const MultQuantileConfig& cfg, const SmoothingFamily& target, std::uint64_t seed);
std::vector<double> run_mult_quantile(const MultQuantileConfig& cfg, double target_q,
                                      const std::vector<SmoothingFamily>& replicate_families, std::uint64_t seed);

struct CpdConfig {
  double beta = 0.0;
  CopulaFamily copula = CopulaFamily::Frank;
  double tau = 0.33;
  std::optional<double> tau2;  // change after floor(n t)
  double t = 0.5;
  std::size_t n = 100;
  std::size_t B = 250;
  std::size_t reps = 100;
  std::optional<std::size_t> ell;
  bool iid_multipliers = false;
  double level = 0.05;
  ChangePointOptions options;
};

Ar1Config make_ar1(const CpdConfig& cfg);
MultiplierConfig make_multipliers(const CpdConfig& cfg);

// Rejection rate of each family over reps data sets.
std::vector<double> run_cpd_mc(const CpdConfig& cfg, const std::vector<SmoothingFamily>& families,
                               std::uint64_t seed);

}  // namespace smoothcop::experiments

#pragma once

#include <optional>
#include <vector>

#include "smoothcop/copula_models.hpp"
#include "smoothcop/multiplier.hpp"
#include "smoothcop/partial_derivatives.hpp"
#include "smoothcop/rng.hpp"
#include "smoothcop/sample.hpp"
#include "smoothcop/smoothing.hpp"

namespace smoothcop {

struct ChangePointResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> replicate_values;
  double argmax_s = 0.0;
};

struct ChangePointOptions {
  // Rank scaling R/(m + shift) of the Dirac sub-window estimators. 1 matches
  // the usual software implementation of the non-smooth test, 0 is the plain
  // empirical copula, which is markedly anti-conservative for n <= 100.
  int dirac_rank_shift = 1;
};

struct StatisticValue {
  double S = 0.0;
  double argmax_s = 0.0;
};

// sup over s = k/n of the mean over the pseudo-observations of D(s, u)^2,
// D = sqrt(n) (k/n) ((n-k)/n) (C_{1:k} - C_{k+1:n}).
StatisticValue statistic_S(const Sample& x, const SmoothingFamily& family, const ChangePointOptions& opts = {});

// Truncated Delta estimator from smooth-then-difference with the same
// family, h = h' = min(m^{-1/2}, 1/2) on each sub-window.
PdEstimatorSpec default_changepoint_pd(const SmoothingFamily& family);

double replicate_S(const Sample& x, const SmoothingFamily& family, std::span<const double> xi,
                   const PdEstimatorSpec& pd, const ChangePointOptions& opts = {});

// Statistic and B replicates sharing one pass over the splits. Row b of the
// multiplier matrix comes from streams.child(b).
ChangePointResult run_test(const Sample& x, const SmoothingFamily& family, std::size_t B, const MultiplierConfig& cfg,
                           const SeedStreams& streams, const std::optional<PdEstimatorSpec>& pd = std::nullopt,
                           const ChangePointOptions& opts = {});

// Statistic and replicates for an explicit B x n multiplier matrix.
ChangePointResult run_test_with_multipliers(const Sample& x, const SmoothingFamily& family,
                                            const std::vector<double>& xi, std::size_t B,
                                            const PdEstimatorSpec& pd, const ChangePointOptions& opts = {});

struct Ar1Config {
  double beta = 0.0;
  CopulaModel innovation_copula = CopulaModel(CopulaFamily::Independence, 0.0, 2);
  std::size_t n = 100;
  std::optional<std::size_t> k_star;  // observations 1..k_star use the first copula
  std::optional<CopulaModel> post_copula;
  std::size_t burn_in = 100;
};

Sample generate_ar1(const Ar1Config& cfg, Rng& rng);

}  // namespace smoothcop

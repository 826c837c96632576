#pragma once

#include <memory>
#include <vector>

#include "smoothcop/rng.hpp"
#include "smoothcop/sample.hpp"
#include "smoothcop/smoothing.hpp"

namespace smoothcop {

// Inverts the margin kernels u -> K_r(u), r = 1..m, of a smooth family. A
// table on a fixed u-grid brackets the root, which is then refined by TOMS 748.
class MarginInverter {
 public:
  MarginInverter(const SmoothingFamily& family, int m, int nodes = 256);
  double invert(int r, double y) const;
  int m() const { return m_; }

 private:
  SmoothingFamily family_;
  int m_;
  int nodes_;
  std::vector<double> table_;  // [(r-1) * (nodes+1) + g]
};

double margin_quantile_invert(const SmoothEmpiricalCopula& cop, std::size_t j, int r, double y);

// Draws from a fitted smooth empirical copula: pick a row I, draw U# from the
// survival copula, invert each margin kernel at U#.
class BootstrapSampler {
 public:
  explicit BootstrapSampler(const SmoothEmpiricalCopula& cop);
  void draw(Rng& rng, std::span<double> out) const;
  Sample sample(std::size_t count, Rng& rng) const;

 private:
  const SmoothEmpiricalCopula& cop_;
  std::shared_ptr<const MarginInverter> outer_;
  std::shared_ptr<const MarginInverter> inner_;  // beta copula margins, beta-binomial only
};

Sample draw_bootstrap_sample(const SmoothEmpiricalCopula& cop, Rng& rng);

enum class IntervalKind { Percentile, Basic };
IntervalKind parse_interval_kind(const std::string& name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool covers(double x) const { return lo <= x && x <= hi; }
};

// Percentile interval of the replicate values, or the basic interval
// 2*estimate - [q_hi, q_lo].
Interval bootstrap_interval(const std::vector<double>& replicates, double estimate, double level, IntervalKind kind);

// B smooth-bootstrap resamples of the sample; resample b uses streams.child(b).
std::vector<double> bootstrap_kendall(const Sample& x, const SmoothingFamily& family, std::size_t B,
                                      const SeedStreams& streams);
std::vector<double> bootstrap_frank(const Sample& x, const SmoothingFamily& family, std::size_t B,
                                    const SeedStreams& streams);

Interval ci_kendall(const Sample& x, const SmoothingFamily& family, std::size_t B, double level,
                    const SeedStreams& streams, IntervalKind kind = IntervalKind::Percentile);
Interval ci_frank_mpl(const Sample& x, const SmoothingFamily& family, std::size_t B, double level,
                      const SeedStreams& streams, IntervalKind kind = IntervalKind::Percentile);

// Maximum pseudo-likelihood for the Frank parameter. pseudo is n x 2
// row-major in (0,1).
double frank_mpl_fit(std::span<const double> pseudo);
// Uses ranks / (n+1).
double frank_mpl_fit(const Sample& x);

}  // namespace smoothcop

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smoothcop/copula_models.hpp"
#include "smoothcop/rng.hpp"
#include "smoothcop/sample.hpp"
#include "smoothcop/smoothing.hpp"

namespace smoothcop {

enum class DiffKind { Nabla, Delta };
enum class Placement { None, SmoothThenDiff, DiffThenSmooth, Bernstein };

// Fixed(L): h = h' = (L m^{-1/2}) ^ 1/2, Bernstein degree floor(L p^{1/2}) v 2.
// Adaptive: h = h' = ([M2 (1-|tau|)^a + M1] m^{-1/2}) ^ 1/2 and degree
// floor((4 |tau|^{3/2} + 1/2) p^{1/2}) v 2, tau being Kendall's tau of the window.
struct BandwidthRule {
  enum class Kind { Fixed, Adaptive } kind = Kind::Fixed;
  double L = 1.0;
  double M1 = 0.5;
  double M2 = 4.0;
  double a = 6.0;

  static BandwidthRule fixed(double L) { return {Kind::Fixed, L}; }
  static BandwidthRule adaptive() { return {Kind::Adaptive}; }
};

struct PdEstimatorSpec {
  DiffKind diff = DiffKind::Delta;
  Placement placement = Placement::None;
  SmoothingFamily family = SmoothingFamily::dirac();
  bool truncate = true;
  BandwidthRule bandwidth;

  // Presets used by the CLI: dirac-delta, bin-nabla, betab4-delta,
  // adap-betab4, dts-bin-delta, bern, adap-bern, ... (see README).
  static PdEstimatorSpec parse(const std::string& name, double L = 1.0);
};

struct Bandwidths {
  double h = 0.0;
  double hprime = 0.0;
};

Bandwidths fixed_bandwidth(double L, std::size_t m);
Bandwidths adaptive_bandwidth(const RankMatrix& window, const BandwidthRule& rule = BandwidthRule::adaptive());
int adaptive_bernstein_degree(const RankMatrix& window);
int fixed_bernstein_degree(double L, std::size_t p);

double pd_bernstein(const RankMatrix& ranks, std::size_t j, std::span<const double> u, int m_degree);

// A partial derivative estimator fitted on one window.
class PartialDerivativeEstimator {
 public:
  PartialDerivativeEstimator(const PdEstimatorSpec& spec, RankMatrix ranks);

  double operator()(std::size_t j, std::span<const double> u) const;
  // Values of the j-th estimate on a tensor grid, last axis fastest.
  std::vector<double> eval_grid(std::size_t j, const std::vector<std::vector<double>>& axis_values) const;

  const PdEstimatorSpec& spec() const { return spec_; }
  Bandwidths bandwidths() const { return bw_; }
  int bernstein_degree() const { return degree_; }

 private:
  double finite_difference(std::size_t j, double hi_value, double lo_value, double uj) const;
  double diff_then_smooth(std::size_t j, std::span<const double> u) const;

  PdEstimatorSpec spec_;
  RankMatrix ranks_;
  SmoothEmpiricalCopula cop_;  // family used for smooth-then-diff, Dirac otherwise
  Bandwidths bw_;
  int degree_ = 0;
  std::vector<std::vector<double>> lattice_;  // per j, (m+1)^d non-smooth values
};

double pd_eval(const PdEstimatorSpec& spec, const RankMatrix& window, std::size_t j, std::span<const double> u);

using TruePartialDerivative = std::function<double(std::size_t j, std::span<const double> u)>;

struct ImseResult {
  double imse = 0.0;
  std::vector<double> per_rep;  // integrated squared error of each replication
};

// Grid mean of squared errors against the true partial derivative, averaged
// over reps independent samples of size n. Replication r uses streams.child(r).
ImseResult imse(const PdEstimatorSpec& spec, const CopulaModel& model, std::size_t j, std::size_t n, std::size_t reps,
                std::size_t grid, const SeedStreams& streams);

// Any estimator: maps a sample and the grid axes to values on the grid.
using GridEstimator = std::function<std::vector<double>(const Sample&, const std::vector<std::vector<double>>&)>;
ImseResult imse(const GridEstimator& estimator, const CopulaModel& model, std::size_t j, std::size_t n,
                std::size_t reps, std::size_t grid, const SeedStreams& streams);

std::vector<double> open_grid(std::size_t g);

}  // namespace smoothcop

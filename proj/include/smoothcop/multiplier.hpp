#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smoothcop/partial_derivatives.hpp"
#include "smoothcop/rng.hpp"
#include "smoothcop/sample.hpp"
#include "smoothcop/smoothing.hpp"

namespace smoothcop {

// Observations floor(ns)+1 .. floor(nt) of a stretch of length n.
class SequentialWindow {
 public:
  SequentialWindow(double s, double t, std::size_t n);
  static SequentialWindow from_indices(std::size_t k0, std::size_t k1, std::size_t n);
  static SequentialWindow full(std::size_t n) { return from_indices(0, n, n); }

  std::size_t begin() const { return k0_; }  // = floor(ns), zero-based first index
  std::size_t end() const { return k1_; }    // = floor(nt)
  std::size_t size() const { return k1_ - k0_; }
  std::size_t n() const { return n_; }
  bool empty() const { return k0_ == k1_; }
  double lambda() const { return static_cast<double>(size()) / static_cast<double>(n_); }
  Stretch stretch() const { return {k0_, k1_}; }

 private:
  SequentialWindow() = default;
  std::size_t k0_ = 0, k1_ = 0, n_ = 1;
};

enum class MultiplierKind { IID, Dependent };

struct MultiplierConfig {
  MultiplierKind kind = MultiplierKind::IID;
  std::size_t ell = 1;  // Dependent only

  static MultiplierConfig iid() { return {}; }
  static MultiplierConfig dependent(std::size_t ell) { return {MultiplierKind::Dependent, ell}; }
  // max(1, floor(1.25 n^{1/3}))
  static std::size_t default_ell(std::size_t n);
};

// Autocovariance of the dependent sequence at lag h/ell: the Bartlett kernel.
double multiplier_phi(double x);

// IID: Rademacher. Dependent: xi_i = (Z_i + ... + Z_{i+ell-1}) / sqrt(ell)
// with Z standard normal, which is ell-dependent with E(xi_0 xi_h) = phi(h/ell).
std::vector<double> gen_multipliers(const MultiplierConfig& cfg, std::size_t n, Rng& rng);
// Fills a B x n row-major matrix; row b uses streams.child(b).
std::vector<double> gen_multiplier_matrix(const MultiplierConfig& cfg, std::size_t n, std::size_t B,
                                          const SeedStreams& streams);

enum class ReplicateScope { Global, Local };

// Where the partial derivatives in the C replicates come from.
using PdSource = std::variant<PdEstimatorSpec, TruePartialDerivative>;

// Coefficients of a replicate as a linear form in the multipliers of one
// window: replicate(p) = (1/sqrt(n)) sum_i xi_{begin+i} coef(i, p).
class ReplicateDesign {
 public:
  // Process B when pd is empty, process C otherwise.
  ReplicateDesign(const Sample& x, const SequentialWindow& window, const SmoothingFamily& family,
                  ReplicateScope scope, const std::vector<std::vector<double>>& points,
                  const std::optional<PdSource>& pd);

  std::size_t rows() const { return rows_; }
  std::size_t points() const { return points_; }
  std::size_t begin() const { return begin_; }
  std::size_t n() const { return n_; }
  const std::vector<double>& coefficients() const { return coef_; }  // rows x points

  // One replicate per row of xi (B x n); result B x points.
  std::vector<double> apply(const std::vector<double>& xi, std::size_t B) const;
  std::vector<double> apply(std::span<const double> xi) const;

 private:
  std::size_t rows_ = 0, points_ = 0, begin_ = 0, n_ = 0;
  std::vector<double> coef_;
};

double replicate_B(const Sample& x, const SequentialWindow& window, std::span<const double> xi,
                   const SmoothingFamily& family, ReplicateScope scope, std::span<const double> u);
double replicate_C(const Sample& x, const SequentialWindow& window, std::span<const double> xi,
                   const SmoothingFamily& family, ReplicateScope scope, const PdSource& pd,
                   std::span<const double> u);

struct ReplicateSet {
  std::size_t B = 0;
  std::size_t P = 0;
  std::vector<double> values;  // B x P
  bool centered = false;

  double operator()(std::size_t b, std::size_t p) const { return values[b * P + p]; }
  ReplicateSet centered_copy() const;
};

// Empirical covariance (denominator B-1) between the selected columns; all
// columns when points is empty. Returned row-major.
std::vector<double> estimate_covariance(const ReplicateSet& reps, std::span<const std::size_t> points = {});

enum class Functional { KS, CvM };
Functional parse_functional(const std::string& name);
double apply_functional(Functional f, std::span<const double> trajectory);
// Centers the replicates, evaluates the functional per replicate and returns
// the type-7 q-quantile.
double estimate_functional_quantile(const ReplicateSet& reps, Functional f, double q);

}  // namespace smoothcop

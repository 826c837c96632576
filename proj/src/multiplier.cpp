#include "smoothcop/multiplier.hpp"

#include <algorithm>
#include <cmath>

#include "smoothcop/errors.hpp"
#include "smoothcop/kernels.hpp"
#include "smoothcop/numeric.hpp"

namespace smoothcop {

namespace {

std::size_t floor_index(double s, std::size_t n) {
  // guard against n*s landing just below an integer
  double v = std::floor(s * static_cast<double>(n) + 1e-9);
  return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n)));
}

}  // namespace

SequentialWindow::SequentialWindow(double s, double t, std::size_t n) : n_(n) {
  if (n == 0) throw WindowError("window over an empty stretch");
  if (!(0.0 <= s && s <= t && t <= 1.0)) throw WindowError("window requires 0 <= s <= t <= 1");
  k0_ = floor_index(s, n);
  k1_ = floor_index(t, n);
}

SequentialWindow SequentialWindow::from_indices(std::size_t k0, std::size_t k1, std::size_t n) {
  if (k0 > k1 || k1 > n || n == 0) throw WindowError("window indices out of order");
  SequentialWindow w;
  w.k0_ = k0;
  w.k1_ = k1;
  w.n_ = n;
  return w;
}

std::size_t MultiplierConfig::default_ell(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(1.25 * std::cbrt(static_cast<double>(n)))));
}

double multiplier_phi(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

std::vector<double> gen_multipliers(const MultiplierConfig& cfg, std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("need at least one multiplier");
  std::vector<double> xi(n);
  if (cfg.kind == MultiplierKind::IID) {
    for (std::size_t i = 0; i < n; ++i) xi[i] = (rng() >> 63) ? 1.0 : -1.0;
    return xi;
  }
  const std::size_t ell = cfg.ell;
  if (ell < 1) throw ConfigError("multiplier bandwidth must be at least 1");
  if (ell >= n) throw ConfigError("multiplier bandwidth must be below n");
  std::normal_distribution<double> normal;
  std::vector<double> z(n + ell - 1);
  for (double& v : z) v = normal(rng);
  const double scale = 1.0 / std::sqrt(static_cast<double>(ell));
  double run = 0.0;
  for (std::size_t k = 0; k < ell; ++k) run += z[k];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) run += z[i + ell - 1] - z[i - 1];
    xi[i] = run * scale;
  }
  return xi;
}

std::vector<double> gen_multiplier_matrix(const MultiplierConfig& cfg, std::size_t n, std::size_t B,
                                          const SeedStreams& streams) {
  std::vector<double> xi(B * n);
  for (std::size_t b = 0; b < B; ++b) {
    Rng rng = streams.child(b).engine();
    auto row = gen_multipliers(cfg, n, rng);
    std::copy(row.begin(), row.end(), xi.begin() + b * n);
  }
  return xi;
}

ReplicateDesign::ReplicateDesign(const Sample& x, const SequentialWindow& window, const SmoothingFamily& family,
                                 ReplicateScope scope, const std::vector<std::vector<double>>& points,
                                 const std::optional<PdSource>& pd)
    : points_(points.size()), begin_(window.begin()), n_(x.n()) {
  if (window.n() != x.n()) throw WindowError("window built for a different stretch length");
  if (window.empty()) return;
  const std::size_t d = x.d();
  rows_ = window.size();
  RankMatrix ranks = scope == ReplicateScope::Global ? compute_ranks(x) : compute_ranks(x, window.stretch());
  const std::size_t offset = scope == ReplicateScope::Global ? window.begin() : 0;
  SmoothEmpiricalCopula cop(ranks, family);

  std::optional<PartialDerivativeEstimator> est;
  const TruePartialDerivative* truth = nullptr;
  if (pd) {
    if (auto* spec = std::get_if<PdEstimatorSpec>(&*pd))
      est.emplace(*spec, ranks);
    else
      truth = &std::get<TruePartialDerivative>(*pd);
  }

  coef_.assign(rows_ * points_, 0.0);
  auto centred_rows = [&](std::span<const double> u) {
    auto k = cop.row_kernels(u);
    double c = 0.0;
    for (double v : k) c += v;
    c /= static_cast<double>(k.size());
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = k[offset + i] - c;
    return out;
  };
  for (std::size_t p = 0; p < points_; ++p) {
    const auto& u = points[p];
    if (u.size() != d) throw DomainError("evaluation point has the wrong dimension");
    auto base = centred_rows(u);
    for (std::size_t i = 0; i < rows_; ++i) coef_[i * points_ + p] = base[i];
    if (!pd) continue;
    std::vector<double> uj(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      double dj = est ? (*est)(j, u) : (*truth)(j, u);
      dj = std::clamp(dj, 0.0, 1.0);
      std::fill(uj.begin(), uj.end(), 1.0);
      uj[j] = u[j];
      auto side = centred_rows(uj);
      for (std::size_t i = 0; i < rows_; ++i) coef_[i * points_ + p] -= dj * side[i];
    }
  }
}

std::vector<double> ReplicateDesign::apply(const std::vector<double>& xi, std::size_t B) const {
  if (xi.size() != B * n_) throw DomainError("multiplier matrix has the wrong shape");
  std::vector<double> out(B * points_, 0.0);
  if (rows_ == 0 || points_ == 0) return out;
  std::vector<double> sub(B * rows_);
  for (std::size_t b = 0; b < B; ++b)
    std::copy_n(xi.begin() + b * n_ + begin_, rows_, sub.begin() + b * rows_);
  kernels::omp::multiplier_products(sub.data(), coef_.data(), B, rows_, points_, out.data());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> ReplicateDesign::apply(std::span<const double> xi) const {
  if (xi.size() != n_) throw DomainError("multiplier vector has the wrong length");
  std::vector<double> out(points_, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (std::size_t p = 0; p < points_; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += xi[begin_ + i] * coef_[i * points_ + p];
    out[p] = s * scale;
  }
  return out;
}

double replicate_B(const Sample& x, const SequentialWindow& window, std::span<const double> xi,
                   const SmoothingFamily& family, ReplicateScope scope, std::span<const double> u) {
  ReplicateDesign design(x, window, family, scope, {std::vector<double>(u.begin(), u.end())}, std::nullopt);
  return design.apply(xi)[0];
}

double replicate_C(const Sample& x, const SequentialWindow& window, std::span<const double> xi,
                   const SmoothingFamily& family, ReplicateScope scope, const PdSource& pd,
                   std::span<const double> u) {
  ReplicateDesign design(x, window, family, scope, {std::vector<double>(u.begin(), u.end())}, pd);
  return design.apply(xi)[0];
}

ReplicateSet ReplicateSet::centered_copy() const {
  ReplicateSet out = *this;
  if (B == 0) return out;
  for (std::size_t p = 0; p < P; ++p) {
    double mean = 0.0;
    for (std::size_t b = 0; b < B; ++b) mean += values[b * P + p];
    mean /= static_cast<double>(B);
    for (std::size_t b = 0; b < B; ++b) out.values[b * P + p] -= mean;
  }
  out.centered = true;
  return out;
}

std::vector<double> estimate_covariance(const ReplicateSet& reps, std::span<const std::size_t> points) {
  if (reps.B < 2) throw DomainError("covariance needs at least two replicates");
  std::vector<std::size_t> cols(points.begin(), points.end());
  if (cols.empty())
    for (std::size_t p = 0; p < reps.P; ++p) cols.push_back(p);
  auto c = reps.centered_copy();
  const std::size_t k = cols.size();
  std::vector<double> cov(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < reps.B; ++r) s += c(r, cols[a]) * c(r, cols[b]);
      cov[a * k + b] = cov[b * k + a] = s / static_cast<double>(reps.B - 1);
    }
  return cov;
}

Functional parse_functional(const std::string& name) {
  if (name == "ks") return Functional::KS;
  if (name == "cvm") return Functional::CvM;
  throw ConfigError("unknown functional '" + name + "' (expected ks or cvm)");
}

double apply_functional(Functional f, std::span<const double> trajectory) {
  double v = 0.0;
  if (f == Functional::KS) {
    for (double x : trajectory) v = std::max(v, std::abs(x));
    return v;
  }
  for (double x : trajectory) v += x * x;
  return trajectory.empty() ? 0.0 : v / static_cast<double>(trajectory.size());
}

double estimate_functional_quantile(const ReplicateSet& reps, Functional f, double q) {
  auto c = reps.centered ? reps : reps.centered_copy();
  std::vector<double> vals(c.B);
  for (std::size_t b = 0; b < c.B; ++b)
    vals[b] = apply_functional(f, std::span<const double>(c.values.data() + b * c.P, c.P));
  return quantile_type7(std::move(vals), q);
}

}  // namespace smoothcop

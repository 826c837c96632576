#include "smoothcop/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "smoothcop/errors.hpp"

namespace smoothcop {

Sample::Sample(std::size_t n, std::size_t d, std::vector<double> values) : n_(n), d_(d), values_(std::move(values)) {
  if (values_.size() != n * d) throw DataError("sample: value count does not match n*d");
  for (double v : values_)
    if (!std::isfinite(v)) throw DataError("sample: non-finite value");
  for (std::size_t j = 0; j < d_; ++j) rank_column(column(*this, j));
}

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Sample(0, 0, {});
  std::size_t d = rows.front().size();
  std::vector<double> v;
  v.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("sample: ragged rows");
    v.insert(v.end(), r.begin(), r.end());
  }
  return Sample(rows.size(), d, std::move(v));
}

std::vector<double> column(const Sample& x, std::size_t j) {
  std::vector<double> c(x.n());
  for (std::size_t i = 0; i < x.n(); ++i) c[i] = x(i, j);
  return c;
}

std::vector<int> rank_column(std::span<const double> column) {
  const std::size_t m = column.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::vector<int> r(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (k > 0 && column[order[k]] == column[order[k - 1]]) throw TieError("ties in a column");
    r[order[k]] = static_cast<int>(k + 1);
  }
  return r;
}

RankMatrix::RankMatrix(std::size_t m, std::size_t d, std::vector<int> ranks) : m_(m), d_(d), ranks_(std::move(ranks)) {
  if (ranks_.size() != m * d) throw DomainError("rank matrix: size mismatch");
}

std::vector<double> RankMatrix::pseudo_observations(double shift) const {
  std::vector<double> u(ranks_.size());
  const double denom = static_cast<double>(m_) + shift;
  for (std::size_t k = 0; k < ranks_.size(); ++k) u[k] = ranks_[k] / denom;
  return u;
}

RankMatrix compute_ranks(const Sample& x, Stretch s) {
  if (s.begin >= s.end || s.end > x.n()) throw WindowError("empty or out of range stretch");
  const std::size_t m = s.size(), d = x.d();
  std::vector<int> ranks(m * d);
  std::vector<double> col(m);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < m; ++i) col[i] = x(s.begin + i, j);
    auto r = rank_column(col);
    for (std::size_t i = 0; i < m; ++i) ranks[i * d + j] = r[i];
  }
  return RankMatrix(m, d, std::move(ranks));
}

RankMatrix compute_ranks(const Sample& x, std::size_t k, std::size_t l) {
  if (k < 1 || k > l) throw WindowError("window k:l requires 1 <= k <= l");
  return compute_ranks(x, Stretch{k - 1, l});
}

RankMatrix compute_ranks(const Sample& x) { return compute_ranks(x, Stretch{0, x.n()}); }

int rank_threshold(int m, double u) {
  if (u < 0.0) return 0;
  if (u >= 1.0) return m;
  int t = static_cast<int>(std::floor(u * m));
  t = std::clamp(t, 0, m);
  while (t < m && static_cast<double>(t + 1) / m <= u) ++t;
  while (t > 0 && static_cast<double>(t) / m > u) --t;
  return t;
}

double empirical_copula_eval(const RankMatrix& ranks, std::span<const double> u) {
  const std::size_t m = ranks.m(), d = ranks.d();
  if (u.size() != d) throw DomainError("empirical copula: dimension mismatch");
  std::vector<int> thr(d);
  for (std::size_t j = 0; j < d; ++j) thr[j] = rank_threshold(static_cast<int>(m), u[j]);
  std::size_t count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    bool in = true;
    for (std::size_t j = 0; j < d && in; ++j) in = ranks(i, j) <= thr[j];
    count += in;
  }
  return static_cast<double>(count) / m;
}

namespace {

// Counts inversions in v by merge sort.
std::int64_t count_inversions(std::vector<int>& v, std::vector<int>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = (lo + hi) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t a = lo, b = mid, k = lo;
  while (a < mid && b < hi) {
    if (v[a] <= v[b]) {
      buf[k++] = v[a++];
    } else {
      inv += static_cast<std::int64_t>(mid - a);
      buf[k++] = v[b++];
    }
  }
  while (a < mid) buf[k++] = v[a++];
  while (b < hi) buf[k++] = v[b++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return inv;
}

}  // namespace

double kendall_tau(std::span<const int> x, std::span<const int> y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw DomainError("kendall_tau: length mismatch");
  if (n < 2) throw DomainError("kendall_tau: need at least two observations");
  // x and y are tie-free ranks; order y by x and count discordant pairs
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<int> v(n), buf(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = y[order[k]];
  std::int64_t disc = count_inversions(v, buf, 0, n);
  double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return (pairs - 2.0 * static_cast<double>(disc)) / pairs;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  auto rx = rank_column(x);
  auto ry = rank_column(y);
  return kendall_tau(std::span<const int>(rx), std::span<const int>(ry));
}

double kendall_tau(const RankMatrix& r) {
  const std::size_t d = r.d(), m = r.m();
  if (d < 2) throw DomainError("kendall_tau: need d >= 2");
  std::vector<std::vector<int>> cols(d, std::vector<int>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) cols[j][i] = r(i, j);
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      sum += kendall_tau(std::span<const int>(cols[a]), std::span<const int>(cols[b]));
      ++pairs;
    }
  return sum / pairs;
}

double kendall_tau(const Sample& x) { return kendall_tau(compute_ranks(x)); }

}  // namespace smoothcop

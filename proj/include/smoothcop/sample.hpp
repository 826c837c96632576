#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace smoothcop {

// n observations of a d-dimensional vector, row-major. Values are finite
// and no column contains ties.
class Sample {
 public:
  Sample() = default;
  Sample(std::size_t n, std::size_t d, std::vector<double> values);
  static Sample from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
};

// Observations begin..end-1 (zero-based, half open).
struct Stretch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Maximal ranks of one column; throws TieError on duplicates.
std::vector<int> rank_column(std::span<const double> column);

// Ranks R_ij in 1..m within a stretch, row-major m x d.
class RankMatrix {
 public:
  RankMatrix() = default;
  RankMatrix(std::size_t m, std::size_t d, std::vector<int> ranks);

  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }
  int operator()(std::size_t i, std::size_t j) const { return ranks_[i * d_ + j]; }
  std::span<const int> row(std::size_t i) const { return {ranks_.data() + i * d_, d_}; }
  const std::vector<int>& data() const { return ranks_; }

  // Pseudo-observations R_ij / (m + shift). shift = 0 gives the usual R/m.
  std::vector<double> pseudo_observations(double shift = 0.0) const;

 private:
  std::size_t m_ = 0;
  std::size_t d_ = 0;
  std::vector<int> ranks_;
};

RankMatrix compute_ranks(const Sample& x, Stretch s);
RankMatrix compute_ranks(const Sample& x);
// Observations k..l, one-based and inclusive as in the usual k:l notation.
RankMatrix compute_ranks(const Sample& x, std::size_t k, std::size_t l);

// Largest r with r/m <= u, computed with the same comparison as the
// indicator 1(r/m <= u).
int rank_threshold(int m, double u);

double empirical_copula_eval(const RankMatrix& ranks, std::span<const double> u);

// Kendall's tau-a between two columns, O(n log n).
double kendall_tau(std::span<const double> x, std::span<const double> y);
double kendall_tau(std::span<const int> x, std::span<const int> y);
// Average of the pairwise coefficients for d > 2.
double kendall_tau(const Sample& x);
double kendall_tau(const RankMatrix& r);

std::vector<double> column(const Sample& x, std::size_t j);

}  // namespace smoothcop

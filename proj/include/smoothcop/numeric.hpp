#pragma once

#include <span>
#include <vector>

namespace smoothcop {

// pmf of Binomial(m, x) into out[0..m].
void binomial_pmf(int m, double x, std::span<double> out);
// out[r] = P(S >= r) for S ~ Binomial(m, x), r = 0..m.
void binomial_tail(int m, double x, std::span<double> out);
// P(S > w) for S ~ Binomial(m, x).
double binomial_survival(int m, double x, int w);
// P(S <= w), summed from the bottom so it keeps full relative precision
// where the survival has rounded to 1.
double binomial_cdf(int m, double x, int w);

// pmf of the beta-binomial law with parameters (m, a, b), a, b > 0.
void beta_binomial_pmf(int m, double a, double b, std::span<double> out);
void beta_binomial_tail(int m, double a, double b, std::span<double> out);
double beta_binomial_survival(int m, double a, double b, int w);
double beta_binomial_cdf(int m, double a, double b, int w);

// Binomial(m, x) pmf evaluated at k alone.
double binomial_pmf_at(int m, double x, int k);

double normal_quantile(double p);

// Sample quantile, R type 7. Takes a copy because it sorts.
double quantile_type7(std::vector<double> values, double q);

// D_1(x) = (1/x) int_0^x t / (e^t - 1) dt.
double debye1(double x);

}  // namespace smoothcop

#pragma once

#include <span>
#include <string>

#include "smoothcop/rng.hpp"
#include "smoothcop/sample.hpp"

namespace smoothcop {

enum class CopulaFamily { Independence, Clayton, GumbelHougaard, Frank };

CopulaFamily parse_copula_family(const std::string& name);
std::string to_string(CopulaFamily f);

class CopulaModel {
 public:
  CopulaModel(CopulaFamily family, double theta, std::size_t d);
  // tau == 0 gives the independence copula for Clayton and Frank.
  static CopulaModel from_tau(CopulaFamily family, double tau, std::size_t d);

  CopulaFamily family() const { return family_; }
  double theta() const { return theta_; }
  std::size_t d() const { return d_; }

 private:
  CopulaFamily family_;
  double theta_;
  std::size_t d_;
};

double tau_to_theta(CopulaFamily family, double tau);
double frank_tau(double theta);

// Fills out (size d) with one draw.
void draw(const CopulaModel& model, Rng& rng, std::span<double> out);
Sample sample(const CopulaModel& model, std::size_t m, Rng& rng);

double cdf(const CopulaModel& model, std::span<const double> u);
double true_partial_derivative(const CopulaModel& model, std::size_t j, std::span<const double> u);

double frank_log_density(double theta, double u, double v);

}  // namespace smoothcop

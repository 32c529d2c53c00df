#pragma once

#include <vector>

#include "sflow/suspension.hpp"

namespace sflow {

struct RateOptions {
  double t_max = 5.0;     // xi search range [-t_max, t_max]
  double t_step = 0.05;   // default scan grid spacing
  double gk_tol = 1e-14;  // autocovariance truncation
  int gk_max_terms = 200000;
};

// Equilibrium data of f + t g - beta(t) tau.
struct Tilt {
  double t = 0;
  double beta = 0;
  double beta_prime = 0;
  double mean_roof = 0;
  RpfData gibbs;
};

Tilt tilt(const SuspensionModel& model, double t);

double beta(const SuspensionModel& model, double t);
double beta_prime(const SuspensionModel& model, double t);

// sigma^2(g - beta'(t) tau) / mean roof under the tilted shift measure.
double green_kubo(const SuspensionModel& model, double t, const RateOptions& opts = {});

struct SecondDerivative {
  double value = 0;           // Richardson-extrapolated difference of beta'
  double error_estimate = 0;  // from the extrapolation table
  double green_kubo = 0;
  double relative_gap = 0;    // |value - green_kubo| / green_kubo
};

// Throws DegenerateVariance below 1e-8.
SecondDerivative beta_second(const SuspensionModel& model, double t, const RateOptions& opts = {});

double xi_of_a(const SuspensionModel& model, double a, const RateOptions& opts = {});
double gamma_of_a(const SuspensionModel& model, double a, const RateOptions& opts = {});

struct GammaDomain {
  double lo = 0;
  double hi = 0;
  bool range_limited = true;
};
GammaDomain gamma_domain(const SuspensionModel& model, double t_max);

struct RateRow {
  double t, beta, beta_prime, beta_second;
};
struct LevelRow {
  double a, xi, gamma, beta_second_at_xi;
};
struct RateProfile {
  std::vector<RateRow> t_rows;
  std::vector<LevelRow> a_rows;
  GammaDomain domain;
};

RateProfile rate_scan(const SuspensionModel& model, const std::vector<double>& t_grid, const std::vector<double>& a_list,
                      const RateOptions& opts = {});

}  // namespace sflow

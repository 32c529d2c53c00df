#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sflow/error.hpp"

namespace sflow {

// Family g_n(t) with A_n e^t / sqrt(pi t) leading behaviour. Values are
// supplied scaled by e^{-t} so that large t never overflows.
struct LaplaceFamily {
  enum class Contract { Monotone, DerivativeBound };

  std::string name;
  std::function<double(int)> A;
  std::function<double(int, double)> scaled;        // g_n(t) e^{-t}
  std::function<double(int, double)> scaled_deriv;  // g_n'(t) e^{-t}; DerivativeBound only
  Contract contract = Contract::Monotone;
  double b1 = 0;  // derivative bound constant
  double mu = 0, c0 = 0, c1 = 0;

  // Checks C0 e^{-mu n} <= A_n <= C1 for n = 1..n_check.
  static LaplaceFamily make(std::string name, std::function<double(int)> A, std::function<double(int, double)> scaled,
                            Contract contract, double mu, double c0, double c1, int n_check = 60,
                            std::function<double(int, double)> scaled_deriv = {}, double b1 = 0);

  // H_n(y) = sqrt(y) g_n(y) e^{-y}; tends to A_n / sqrt(pi) on the equality family.
  double H(int n, double y) const;
};

LaplaceFamily equality_family(double decay = 0.1);
LaplaceFamily perturbed_family(double decay = 0.1);
LaplaceFamily oscillating_family(double decay = 0.1);

struct LaplaceValue {
  double value = 0;
  double tail_bound = 0;
};

// integral_0^{t_max} e^{-s t} g(t) dt for real s > 1, with a tail estimate.
// Throws TailDominates when the tail exceeds 10% of the value.
LaplaceValue laplace_numeric(const std::function<double(double)>& g, double t_max, double s);

// integral_{-inf}^{lambda y} (sin^2 w / w^2) sqrt(y) / sqrt(y - w / lambda) dw
double kernel_integral(double lambda, double y);
// kernel_integral - pi, computed without cancellation.
double kernel_defect(double lambda, double y);

// Fejer-smoothed average of H around y at scale lambda.
double fejer_smoothed_average(const std::function<double(double)>& H, double lambda, double y);
double fejer_smoothed_average(const LaplaceFamily& family, int n, double y, double mu0);

struct TauberRow {
  int n = 0;
  double t = 0;
  double ratio = 0;  // g_n(t) / (A_n e^t / sqrt(pi t))
  bool in_band = false;
};
struct TauberReport {
  std::vector<TauberRow> rows;
  int onset = -1;  // smallest n after which every row is in band; -1 if none
  bool all_in_band = false;
};

struct TimeRule {
  double step = 0.25;
  double span = 20.0;
};

// Throws FamilyContractViolated when the declared contract fails on the samples.
TauberReport verify_tauberian(const LaplaceFamily& family, int q, double eta, const std::vector<int>& n_grid,
                              const TimeRule& rule = {});

}  // namespace sflow

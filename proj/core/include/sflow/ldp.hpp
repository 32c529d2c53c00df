#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sflow/laplace.hpp"

namespace sflow {

struct LdpPrediction {
  double a = 0, epsilon = 0;
  int n = 0, q = 0;
  double T = 0;
  double eps_n = 0;
  double c_a = 0, gamma = 0, beta_second = 0;
  double value = 0;
  double eta = 0.25;
  double lower = 0, upper = 0;  // value * (1 -+ eta)
};

// sqrt(2) eps_n C e^{gamma T} / sqrt(pi T beta''), eps_n = e^{-epsilon n}.
LdpPrediction predicted_density(const Level& lv, double c_a, double epsilon, int n, int q, double T, double eta = 0.25);

// Band for zeta(T; a) with half-width e^{-epsilon T}.
struct ZetaBand {
  double T = 0, lower = 0, upper = 0, center = 0;
};
ZetaBand zeta_band(const Level& lv, double c_a, double epsilon, double T, double eta = 0.25);

enum class Method { Exact, DirectMC, TiltedMC };
const char* to_string(Method m);

struct LdpEstimate {
  Method method = Method::Exact;
  double estimate = 0;
  double half_width = 0;  // 95%
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::uint64_t seed = 0;
  double smooth_lower = 0;  // chi_- version on the same samples
  double smooth_upper = 0;  // chi_+ version
};

// chi_- <= 1_[-1,1] <= chi_+, smooth transitions of width delta.
struct MollifierSpec {
  double delta = 0.1;
  double lower(double x) const;
  double upper(double x) const;
};

LdpEstimate exact_estimate(const SuspensionModel& model, double a, double epsilon, int n, double T);

struct McOptions {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  int workers = 1;
  int shards = 64;  // fixed, so results do not depend on the worker count
  bool tilt = false;
  double tilt_param = 0;  // used when tilt is set; normally xi(a)
  MollifierSpec mollifier{};
};

// Estimate of m_F{|G^T - aT| < half_width}. Throws ZeroHits when nothing lands.
LdpEstimate mc_estimate_width(const SuspensionModel& model, double a, double half_width, double T, const McOptions& opts);
LdpEstimate mc_estimate(const SuspensionModel& model, double a, double epsilon, int n, double T, const McOptions& opts);

struct ZetaRow {
  double T = 0, zeta = 0, lower = 0, upper = 0, ratio = 0;
  bool in_band = false;
};
struct ZetaReport {
  std::vector<ZetaRow> rows;
  double slope = 0;  // fitted d log zeta / dT
};
ZetaReport zeta_experiment(const SuspensionModel& model, const Level& lv, double c_a, double epsilon,
                           const std::vector<double>& T_grid, double eta = 0.25);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Wilson 95% interval for k hits out of n.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n);

}  // namespace sflow

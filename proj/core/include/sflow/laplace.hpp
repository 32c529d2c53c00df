#pragma once

#include <string>
#include <vector>

#include "sflow/rate.hpp"

namespace sflow {

// Everything the complex layer needs about one target level a.
struct Level {
  double a = 0;
  double xi = 0;
  double gamma = 0;
  double beta_second = 0;  // Green-Kubo value at xi
};

Level level_data(const SuspensionModel& model, double a, const RateOptions& opts = {});

struct ComplexQuery {
  cplx s;
  double omega = 0;
  cplx z(const Level& lv) const { return {lv.xi, omega}; }
};

// f - s tau + z (g - a tau)
ComplexPotential query_potential(const SuspensionModel& model, const Level& lv, const ComplexQuery& q);

struct BoundaryFactors {
  cplx b1, b2;
};
BoundaryFactors boundary_factors(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, int state);

struct ZSeries {
  cplx value;
  int terms = 0;
  double tail_bound = 0;
  double spectral_radius = 0;
};

// Throws NearPole when the spectral radius is within 1e-6 of one.
ZSeries eval_Z_series(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, double tol = 1e-15);

// Same sum via (I - L)^{-1}; the meromorphic continuation of the series.
cplx eval_Z_resolvent(const SuspensionModel& model, const Level& lv, const ComplexQuery& q);

// Root of lambda(s, omega) = 1 near `guess`.
cplx pole_at(const SuspensionModel& model, const Level& lv, double omega, cplx guess);

struct PoleData {
  std::vector<double> omega;
  std::vector<cplx> s;
  cplx s0;               // s(0, a)
  double curvature = 0;  // -d^2 Re s / d omega^2 at 0
};
PoleData pole_curve(const SuspensionModel& model, const Level& lv, const std::vector<double>& omega_grid);

enum class ResidueNorm { Residue, OneFactor, TwoFactors, ThreeFactors };
const char* to_string(ResidueNorm n);

struct ResidueData {
  std::vector<cplx> b1, b2;
  CVec h_p, nu_p;          // nu_p^T h_p = 1
  double b3 = 0;           // (1/mean) <nu B1, h_p> <nu_p, h B2>
  double pairing = 0;      // <nu B1, h_p> <nu_p, h B2>
  double mean_roof = 0;    // under mu_f
  double tilted_roof = 0;  // nu_p^T tau h_p
  double candidates[4] = {0, 0, 0, 0};
  ResidueNorm chosen = ResidueNorm::Residue;
  bool calibrated = false;
  double c_a = 0;
};

ResidueData residue_C(const SuspensionModel& model, const Level& lv, ResidueNorm norm = ResidueNorm::Residue);

struct Calibration {
  ResidueNorm chosen = ResidueNorm::Residue;
  double oracle_ratio[4] = {0, 0, 0, 0};  // exact / predicted per candidate
  bool ambiguous = false;
};
// Compares each candidate at a = a* against exact enumeration at T = t_cap.
// Throws CalibrationAmbiguous when nothing lands within 20%.
Calibration calibrate_residue(const SuspensionModel& model, double t_cap, double eps, const RateOptions& opts = {});

// Laplace transform of exact Gamma_z over path classes with roof sum < t_cap.
struct LaplaceOracle {
  cplx value;
  double tail_bound = 0;
  int shells = 0;
};
LaplaceOracle laplace_oracle(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, double t_cap);

struct GrowthSample {
  cplx s;
  double omega = 0;
  double modulus = 0;
  double spectral_radius = 0;
  bool flagged = false;
};
struct GrowthReport {
  std::vector<GrowthSample> samples;
  double nu = 1.0 / 3.0;
  double b_nu = 0;
};
GrowthReport growth_bound_probe(const SuspensionModel& model, const Level& lv, const std::vector<cplx>& s_samples,
                                const std::vector<double>& omega_samples, double nu = 1.0 / 3.0);

}  // namespace sflow

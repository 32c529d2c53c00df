#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sflow/transfer.hpp"

namespace sflow {

using Rng = std::mt19937_64;
// Independent stream for shard `stream` of a run seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// Root s of Pr(base - s tau) = 0 by bracketed Newton.
double flow_pressure(const RealPotential& base, const RealPotential& tau, double tol = 1e-13);

struct SuspensionModel {
  SystemPtr sys;
  RealPotential f;     // normalised: Pr(f) = 0
  RealPotential tau;   // roof
  RealPotential ghat;  // in-cell value of G
  RealPotential g;     // ghat * tau
  RpfData gibbs;       // RPF data of f
  double shift = 0;    // s* removed from the raw potential
  double mean_roof = 0;
  double a_star = 0;
};

SuspensionModel normalize_model(const RealPotential& f_raw, const RealPotential& tau, const RealPotential& ghat);

double flow_mean(const SuspensionModel& model);

// Cycle-space checks standing in for non-lattice / independence hypotheses.
struct IndependenceReport {
  int cycle_dimension = 0;    // rank of window-count vectors of periodic orbits
  bool tau_nonlattice = false;
  double tau_common_period = 0;  // > 0 when the roof sums look lattice
  bool pair_can_be_independent = false;  // needs cycle_dimension >= 3
};
IndependenceReport independence_report(const SuspensionModel& model, int max_period = 8);

struct FlowPoint {
  int state = 0;
  double height = 0;
};

// Draws from m_F and runs the flow forward with the induced Markov kernel.
class FlowSampler {
 public:
  explicit FlowSampler(const SuspensionModel& model);
  FlowPoint sample_point(Rng& rng) const;
  int next_state(int x, Rng& rng) const;
  const SuspensionModel& model() const { return *model_; }

 private:
  const SuspensionModel* model_;
  std::vector<double> start_cdf_;
  std::vector<std::vector<double>> step_cdf_;
};

FlowPoint sample_flow_point(const FlowSampler& sampler, Rng& rng);

struct FlowSegment {
  double integral = 0;      // G^T
  std::vector<int> states;  // visited windows, first is the start cell
};

FlowSegment flow_segment(const FlowSampler& sampler, const FlowPoint& start, double T, Rng& rng);
double birkhoff_flow_integral(const FlowSampler& sampler, const FlowPoint& start, double T, Rng& rng);

// Symbol paths x_0..x_n grouped by (x_0, x_n, multiset of middle cells).
// weight is the summed Gibbs cylinder measure; s_tau / s_g sum tau and g over
// the middle cells x_1..x_{n-1}. Only classes with s_tau < t_max are visited.
struct PathClass {
  int first = 0;
  int last = 0;
  int length = 0;
  double s_tau = 0;
  double s_g = 0;
  double weight = 0;
};
using PathVisitor = std::function<void(const PathClass&)>;

struct EnumerationStats {
  std::uint64_t classes = 0;
  std::uint64_t peak_level = 0;
};

EnumerationStats enumerate_path_classes(const SuspensionModel& model, double t_max, const PathVisitor& visit,
                                        std::uint64_t cap = SymbolicSystem::kDefaultCap);
// No grouping; each admissible path visited separately. Small T only.
EnumerationStats enumerate_paths_bruteforce(const SuspensionModel& model, double t_max, const PathVisitor& visit,
                                            std::uint64_t cap = SymbolicSystem::kDefaultCap);

// Exact Gamma_z(T) = integral of exp(z (G^T - aT)) dm_F.
cplx exact_gamma_transform(const SuspensionModel& model, cplx z, double a, double T);
std::vector<cplx> exact_gamma_transform(const SuspensionModel& model, cplx z, double a, const std::vector<double>& T);

// Exact m_F{ |G^T - aT| < eps } for each T in the grid.
std::vector<double> exact_interval_measure(const SuspensionModel& model, double a, double eps,
                                           const std::vector<double>& T, bool bruteforce = false);
// One half-width per T.
std::vector<double> exact_interval_measure(const SuspensionModel& model, double a, const std::vector<double>& eps,
                                           const std::vector<double>& T, bool bruteforce = false);

// Closed-form pieces shared with the Laplace layer.
cplx expm1c(cplx x);
// integral_0^tau exp(c u) du
cplx exp_integral(cplx c, double tau);
// integral_lo^hi exp(c u) du
cplx exp_integral(cplx c, double lo, double hi);
// integral_0^tau (tau - w) exp(c w) dw
cplx ramp_integral(cplx c, double tau);

}  // namespace sflow

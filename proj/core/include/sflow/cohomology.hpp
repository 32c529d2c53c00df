#pragma once

#include <functional>
#include <vector>

#include "sflow/suspension.hpp"

namespace sflow {

// Function of x_{-m_past} .. x_{m_fut}. Sequences below are finite blocks of
// a two-sided point; `origin` is the index of x_0 inside the block.
class TwoSidedPotential {
 public:
  TwoSidedPotential() = default;
  static TwoSidedPotential from_function(SystemPtr sys, int m_past, int m_fut,
                                         const std::function<double(const Symbols&)>& fn);

  const SystemPtr& system() const { return sys_; }
  int m_past() const { return m_past_; }
  int m_fut() const { return m_fut_; }
  int window_length() const { return m_past_ + m_fut_ + 1; }

  double window_value(const Symbols& window) const;
  // Value at the point whose x_0 sits at seq[center].
  double at(const Symbols& seq, int center) const;

 private:
  SystemPtr sys_;
  int m_past_ = 0;
  int m_fut_ = 0;
  std::vector<double> table_;  // by base-k code, NaN off the admissible set
};

// r_{-length} .. r_{-1}: greedy smallest admissible predecessors of x0.
Symbols reference_past(const SymbolicSystem& sys, int x0, int length);

// pi_U x: reference past glued onto x_0 x_1 ...; returns the block and its origin.
Symbols project_past(const SymbolicSystem& sys, const Symbols& seq, int origin, int past_length, int& new_origin);

double sinai_p(const TwoSidedPotential& g, const Symbols& seq, int origin);

struct CoboundaryData {
  TwoSidedPotential g;
  SystemPtr reduced;    // memory m_past + m_fut
  RealPotential g_tilde;
  double past_variation = 0;
  double p_sup = 0;
};

CoboundaryData sinai_reduce(const TwoSidedPotential& g);

// |g(x) - g~(x) - p(x) + p(P x)|
double coboundary_residual(const CoboundaryData& cd, const Symbols& seq, int origin);

// g read as a one-sided function of y = sigma^{-m_past} x on the reduced system.
RealPotential reindex_one_sided(const TwoSidedPotential& g);

// Sum of g around the periodic point with period word w.
double cyclic_sum(const TwoSidedPotential& g, const Symbols& w);

// Uniform admissible random block of the given length.
Symbols sample_block(const SymbolicSystem& sys, int length, Rng& rng);

struct FlowCoboundaryReport {
  int samples = 0;
  double identity_residual = 0;   // flow identity with in-cell rescaled times
  double integral_literal = 0;    // max |p - int_0^tau P dt|
  double integral_rescaled = 0;   // same with the time-change Jacobian kept
};

// tau is future-only on its own system; ghat is the two-sided in-cell value of G.
FlowCoboundaryReport verify_flow_coboundary(const RealPotential& tau, const TwoSidedPotential& ghat, int samples, Rng& rng);

}  // namespace sflow

#include "sflow/cohomology.hpp"

#include <cmath>
#include <limits>

namespace sflow {

TwoSidedPotential TwoSidedPotential::from_function(SystemPtr sys, int m_past, int m_fut,
                                                   const std::function<double(const Symbols&)>& fn) {
  if (m_past < 0 || m_fut < 0) throw Error(ErrorKind::InvalidArgument, "window sizes must be non-negative");
  TwoSidedPotential g;
  g.sys_ = sys;
  g.m_past_ = m_past;
  g.m_fut_ = m_fut;
  const int L = g.window_length();
  std::uint64_t size = 1;
  for (int i = 0; i < L; ++i) size *= sys->alphabet_size();
  if (size > sys->enumeration_cap()) throw Error(ErrorKind::LengthOverflow, "two-sided window too long");
  g.table_.assign(size, std::numeric_limits<double>::quiet_NaN());
  for (const Word& w : enumerate_words(*sys, L)) g.table_[w.code] = fn(sys->decode(w));
  return g;
}

double TwoSidedPotential::window_value(const Symbols& window) const {
  if (static_cast<int>(window.size()) != window_length()) throw Error(ErrorKind::WindowOverrun, "wrong window length");
  std::uint64_t code = 0;
  for (int x : window) code = code * sys_->alphabet_size() + x;
  const double v = table_[code];
  if (std::isnan(v)) throw Error(ErrorKind::MissingEntry, "no value for window " + sys_->to_string(window));
  return v;
}

double TwoSidedPotential::at(const Symbols& seq, int center) const {
  const int lo = center - m_past_, hi = center + m_fut_;
  if (lo < 0 || hi >= static_cast<int>(seq.size())) throw Error(ErrorKind::WindowOverrun, "block too short around center");
  std::uint64_t code = 0;
  for (int j = lo; j <= hi; ++j) code = code * sys_->alphabet_size() + seq[j];
  const double v = table_[code];
  if (std::isnan(v)) throw Error(ErrorKind::InadmissibleWord, "inadmissible window in block");
  return v;
}

Symbols reference_past(const SymbolicSystem& sys, int x0, int length) {
  Symbols past(length);
  int cur = x0;
  for (int j = length - 1; j >= 0; --j) {
    int b = 0;
    while (!sys.allowed(b, cur)) ++b;  // primitive: every symbol has a predecessor
    past[j] = b;
    cur = b;
  }
  return past;
}

Symbols project_past(const SymbolicSystem& sys, const Symbols& seq, int origin, int past_length, int& new_origin) {
  Symbols out = reference_past(sys, seq[origin], past_length);
  out.insert(out.end(), seq.begin() + origin, seq.end());
  new_origin = past_length;
  return out;
}

double sinai_p(const TwoSidedPotential& g, const Symbols& seq, int origin) {
  const int M = g.m_past();
  if (M == 0) return 0.0;
  int po = 0;
  const Symbols pi = project_past(*g.system(), seq, origin, M, po);
  double acc = 0;
  for (int n = 0; n < M; ++n) acc += g.at(seq, origin + n) - g.at(pi, po + n);
  return acc;
}

namespace {
// g - p + p o P at the point seq/origin; needs x_{-M} .. x_{M + m_fut}.
double reduced_value(const TwoSidedPotential& g, const Symbols& seq, int origin) {
  return g.at(seq, origin) - sinai_p(g, seq, origin) + sinai_p(g, seq, origin + 1);
}
}  // namespace

CoboundaryData sinai_reduce(const TwoSidedPotential& g) {
  const auto& sys = *g.system();
  const int M = g.m_past();
  CoboundaryData cd;
  cd.g = g;
  cd.reduced = sys.with_memory(M + g.m_fut());
  const auto& red = *cd.reduced;
  std::vector<double> vals(red.num_states());
  double pmax = 0;
  for (int s = 0; s < red.num_states(); ++s) {
    const Symbols& fut = red.state_symbols(s);
    Symbols seq = reference_past(sys, fut[0], M);
    seq.insert(seq.end(), fut.begin(), fut.end());
    vals[s] = reduced_value(g, seq, M);
    pmax = std::max(pmax, std::abs(sinai_p(g, seq, M)));
    // Every admissible past must give the same value.
    if (M > 0) {
      for (const Word& w : enumerate_words(sys, M)) {
        Symbols past = sys.decode(w);
        if (!sys.allowed(past.back(), fut[0])) continue;
        Symbols alt = past;
        alt.insert(alt.end(), fut.begin(), fut.end());
        cd.past_variation = std::max(cd.past_variation, std::abs(reduced_value(g, alt, M) - vals[s]));
        pmax = std::max(pmax, std::abs(sinai_p(g, alt, M)));
      }
    }
  }
  if (cd.past_variation > 1e-12) throw Error(ErrorKind::NotReducible, "reduced potential still depends on the past");
  cd.g_tilde = RealPotential(cd.reduced, std::move(vals));
  cd.p_sup = pmax;
  return cd;
}

double coboundary_residual(const CoboundaryData& cd, const Symbols& seq, int origin) {
  const auto& red = *cd.reduced;
  const int s = red.state_at(seq, origin);
  if (s < 0) throw Error(ErrorKind::WindowOverrun, "block too short for the reduced window");
  return std::abs(cd.g.at(seq, origin) - cd.g_tilde[s] - sinai_p(cd.g, seq, origin) + sinai_p(cd.g, seq, origin + 1));
}

RealPotential reindex_one_sided(const TwoSidedPotential& g) {
  auto red = g.system()->with_memory(g.m_past() + g.m_fut());
  return RealPotential::from_function(red, [&](const Symbols& w) { return g.window_value(w); });
}

double cyclic_sum(const TwoSidedPotential& g, const Symbols& w) {
  const int n = static_cast<int>(w.size());
  const int M = g.m_past(), F = g.m_fut();
  Symbols ext;
  for (int j = -M; j < n + F; ++j) ext.push_back(w[((j % n) + n) % n]);
  double acc = 0;
  for (int j = 0; j < n; ++j) acc += g.at(ext, M + j);
  return acc;
}

Symbols sample_block(const SymbolicSystem& sys, int length, Rng& rng) {
  std::uniform_int_distribution<int> first(0, sys.alphabet_size() - 1);
  Symbols out{first(rng)};
  while (static_cast<int>(out.size()) < length) {
    std::vector<int> opts;
    for (int b = 0; b < sys.alphabet_size(); ++b)
      if (sys.allowed(out.back(), b)) opts.push_back(b);
    std::uniform_int_distribution<size_t> pick(0, opts.size() - 1);
    out.push_back(opts[pick(rng)]);
  }
  return out;
}

FlowCoboundaryReport verify_flow_coboundary(const RealPotential& tau, const TwoSidedPotential& ghat, int samples,
                                            Rng& rng) {
  const auto& sys = *ghat.system();
  const auto& tsys = *tau.system();
  const int M = ghat.m_past(), F = ghat.m_fut(), mt = tsys.memory();
  const CoboundaryData cd = sinai_reduce(ghat);
  // Two-sided g = ghat * tau, for p of the base transformation.
  const int F2 = std::max(F, mt);
  const TwoSidedPotential g2 = TwoSidedPotential::from_function(ghat.system(), M, F2, [&](const Symbols& w) {
    Symbols gw(w.begin(), w.begin() + M + F + 1);
    Symbols tw(w.begin() + M, w.begin() + M + mt + 1);
    return ghat.window_value(gw) * tau.window_value(tw);
  });

  auto tau_at = [&](const Symbols& seq, int pos) { return tau[tsys.state_at(seq, pos)]; };
  // In-cell-constant G evaluated at a rescaled time; the time only has to stay in its cell.
  auto G = [&](const Symbols& seq, int center, double t) {
    if (t < 0 || t >= tau_at(seq, center)) throw Error(ErrorKind::InvalidArgument, "time outside the cell");
    return ghat.at(seq, center);
  };
  // P(x, t) and its Jacobian-weighted variant, both from the finite series.
  auto P = [&](const Symbols& seq, int origin, double t, double* weighted) {
    int po = 0;
    const Symbols pi = project_past(sys, seq, origin, M, po);
    const double tx = tau_at(seq, origin);
    double acc = 0, wacc = 0;
    for (int n = 0; n < M; ++n) {
      const double tn = tau_at(seq, origin + n);
      const double r = t * tn / tx;
      const double term = G(seq, origin + n, r) - G(pi, po + n, r);
      acc += term;
      wacc += term * tn / tx;
    }
    if (weighted) *weighted = wacc;
    return acc;
  };

  FlowCoboundaryReport rep;
  rep.samples = samples;
  const int len = 2 * M + F2 + mt + 4;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto& red = *cd.reduced;
  for (int i = 0; i < samples; ++i) {
    const Symbols seq = sample_block(sys, len, rng);
    const int o = M + 1;
    const double tx = tau_at(seq, o);
    const double t = unif(rng) * tx;
    const double gt = cd.g_tilde[red.state_at(seq, o)];
    const double lhs = G(seq, o, t) - gt - P(seq, o, t, nullptr) + P(seq, o + 1, t * tau_at(seq, o + 1) / tx, nullptr);
    rep.identity_residual = std::max(rep.identity_residual, std::abs(lhs));

    double weighted = 0;
    const double pval = P(seq, o, 0.0, &weighted);
    const double p = sinai_p(g2, seq, o);
    rep.integral_literal = std::max(rep.integral_literal, std::abs(p - tx * pval));
    rep.integral_rescaled = std::max(rep.integral_rescaled, std::abs(p - tx * weighted));
  }
  return rep;
}

}  // namespace sflow

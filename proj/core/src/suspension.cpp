#include "sflow/suspension.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>

namespace sflow {

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5f10u};
  return Rng(seq);
}

double flow_pressure(const RealPotential& base, const RealPotential& tau, double tol) {
  const auto [tmin_it, tmax_it] = std::minmax_element(tau.values().begin(), tau.values().end());
  const double tmin = *tmin_it, tmax = *tmax_it;
  if (!(tmin > 0)) throw Error(ErrorKind::RootBracketFailure, "roof function must be strictly positive");

  auto pressure_at = [&](double s, double* dpds) {
    RealPotential phi = base - s * tau;
    RpfData d = rpf(phi);
    if (dpds) *dpds = -d.integral(tau);
    return d.pressure;
  };

  const double p0 = pressure_at(0.0, nullptr);
  if (p0 == 0.0) return 0.0;
  // p0 - s tmax <= P(s) <= p0 - s tmin brackets the root.
  double lo = p0 > 0 ? p0 / tmax : p0 / tmin;
  double hi = p0 > 0 ? p0 / tmin : p0 / tmax;
  double plo = pressure_at(lo, nullptr), phi_ = pressure_at(hi, nullptr);
  if (plo < 0 || phi_ > 0) {
    // Rounding at a degenerate bracket; widen slightly.
    const double w = 1e-9 * (1 + std::abs(lo) + std::abs(hi));
    lo -= w;
    hi += w;
    plo = pressure_at(lo, nullptr);
    phi_ = pressure_at(hi, nullptr);
    if (plo < 0 || phi_ > 0) throw Error(ErrorKind::RootBracketFailure, "pressure root not bracketed");
  }
  if (plo == 0) return lo;
  if (phi_ == 0) return hi;

  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double dp = 0;
    const double p = pressure_at(s, &dp);
    if (std::abs(p) <= tol) return s;
    if (p > 0) lo = s; else hi = s;
    double next = s - p / dp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-16 * (1 + std::abs(s))) return next;
    s = next;
  }
  throw Error(ErrorKind::RootBracketFailure, "pressure root iteration did not converge");
}

SuspensionModel normalize_model(const RealPotential& f_raw, const RealPotential& tau, const RealPotential& ghat) {
  SuspensionModel m;
  m.sys = f_raw.system();
  if (tau.system() != m.sys || ghat.system() != m.sys)
    throw Error(ErrorKind::InvalidArgument, "potentials must share one symbolic system");
  m.tau = tau;
  m.ghat = ghat;
  std::vector<double> g(tau.size());
  for (int s = 0; s < tau.size(); ++s) g[s] = ghat[s] * tau[s];
  m.g = RealPotential(m.sys, std::move(g));
  m.shift = flow_pressure(f_raw, tau);
  m.f = f_raw - m.shift * tau;
  m.gibbs = rpf(m.f);
  m.mean_roof = m.gibbs.integral(tau);
  m.a_star = m.gibbs.integral(m.g) / m.mean_roof;
  return m;
}

double flow_mean(const SuspensionModel& model) {
  return model.gibbs.integral(model.g) / model.gibbs.integral(model.tau);
}

IndependenceReport independence_report(const SuspensionModel& model, int max_period) {
  const auto& sys = *model.sys;
  const int ns = sys.num_states();
  IndependenceReport r;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> tau_sums;
  for (int n = 1; n <= max_period; ++n) {
    for (const Word& w : periodic_orbits(sys, n)) {
      Symbols s = sys.decode(w);
      Symbols ext(s);
      for (int j = 0; j < sys.memory(); ++j) ext.push_back(s[j % n]);
      Eigen::VectorXd c = Eigen::VectorXd::Zero(ns);
      for (int j = 0; j < n; ++j) c[sys.state_at(ext, j)] += 1;
      rows.push_back(c);
      tau_sums.push_back(cyclic_birkhoff_sum(model.tau, s));
    }
  }
  Eigen::MatrixXd a(rows.size(), ns);
  for (size_t i = 0; i < rows.size(); ++i) a.row(i) = rows[i].transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-9);
  r.cycle_dimension = static_cast<int>(lu.rank());
  r.pair_can_be_independent = r.cycle_dimension >= 3;

  const double smin = *std::min_element(tau_sums.begin(), tau_sums.end());
  r.tau_nonlattice = true;
  for (int q = 1; q <= 60 && r.tau_nonlattice; ++q) {
    const double d = smin / q;
    bool all = true;
    for (double s : tau_sums) {
      double k = s / d;
      if (std::abs(k - std::round(k)) > 1e-8 * std::max(1.0, k)) {
        all = false;
        break;
      }
    }
    if (all) {
      r.tau_nonlattice = false;
      r.tau_common_period = d;
    }
  }
  return r;
}

FlowSampler::FlowSampler(const SuspensionModel& model) : model_(&model) {
  const auto& sys = *model.sys;
  const int n = sys.num_states();
  double acc = 0;
  for (int s = 0; s < n; ++s) {
    acc += model.tau[s] * model.gibbs.mu[s];
    start_cdf_.push_back(acc);
  }
  for (auto& c : start_cdf_) c /= acc;
  step_cdf_.resize(n);
  for (int x = 0; x < n; ++x) {
    double a = 0;
    for (int y : sys.successors(x)) {
      a += model.gibbs.kernel(x, y);
      step_cdf_[x].push_back(a);
    }
    for (auto& c : step_cdf_[x]) c /= a;
  }
}

namespace {
int draw(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<int>(it - cdf.begin());
}
}  // namespace

FlowPoint FlowSampler::sample_point(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  FlowPoint p;
  p.state = draw(start_cdf_, unif(rng));
  p.height = unif(rng) * model_->tau[p.state];
  return p;
}

int FlowSampler::next_state(int x, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return model_->sys->successors(x)[draw(step_cdf_[x], unif(rng))];
}

FlowPoint sample_flow_point(const FlowSampler& sampler, Rng& rng) { return sampler.sample_point(rng); }

FlowSegment flow_segment(const FlowSampler& sampler, const FlowPoint& start, double T, Rng& rng) {
  const auto& m = sampler.model();
  FlowSegment out;
  out.states.push_back(start.state);
  const double u = m.tau[start.state] - start.height;
  if (T <= u) {
    out.integral = m.ghat[start.state] * T;
    return out;
  }
  out.integral = m.ghat[start.state] * u;
  double rem = T - u;
  int x = start.state;
  for (;;) {
    x = sampler.next_state(x, rng);
    out.states.push_back(x);
    if (rem < m.tau[x]) {
      out.integral += m.ghat[x] * rem;
      return out;
    }
    out.integral += m.g[x];
    rem -= m.tau[x];
  }
}

double birkhoff_flow_integral(const FlowSampler& sampler, const FlowPoint& start, double T, Rng& rng) {
  return flow_segment(sampler, start, T, rng).integral;
}

namespace {

struct CellClasses {
  std::vector<int> of_state;
  std::vector<double> tau, g;
};

CellClasses cell_classes(const SuspensionModel& m) {
  CellClasses c;
  for (int s = 0; s < m.sys->num_states(); ++s) {
    int found = -1;
    for (size_t j = 0; j < c.tau.size(); ++j)
      if (c.tau[j] == m.tau[s] && c.g[j] == m.g[s]) found = static_cast<int>(j);
    if (found < 0) {
      found = static_cast<int>(c.tau.size());
      c.tau.push_back(m.tau[s]);
      c.g.push_back(m.g[s]);
    }
    c.of_state.push_back(found);
  }
  return c;
}

// Key layout: first, last, then one count per cell class, all uint16.
using Key = std::string;

inline std::uint16_t get16(const Key& k, size_t i) {
  std::uint16_t v;
  std::memcpy(&v, k.data() + 2 * i, 2);
  return v;
}
inline void set16(Key& k, size_t i, std::uint16_t v) { std::memcpy(k.data() + 2 * i, &v, 2); }

}  // namespace

EnumerationStats enumerate_path_classes(const SuspensionModel& model, double t_max, const PathVisitor& visit,
                                        std::uint64_t cap) {
  const auto& sys = *model.sys;
  const CellClasses cc = cell_classes(model);
  const size_t nc = cc.tau.size();
  const size_t width = 2 + nc;
  EnumerationStats st;

  std::vector<std::pair<Key, double>> level;
  for (int x = 0; x < sys.num_states(); ++x) {
    if (model.gibbs.mu[x] <= 0) continue;
    Key k(2 * width, '\0');
    set16(k, 0, static_cast<std::uint16_t>(x));
    set16(k, 1, static_cast<std::uint16_t>(x));
    level.emplace_back(std::move(k), model.gibbs.mu[x]);
  }

  auto sums = [&](const Key& k, double& s_tau, double& s_g) {
    s_tau = 0;
    s_g = 0;
    for (size_t c = 0; c < nc; ++c) {
      const double n = get16(k, 2 + c);
      s_tau += n * cc.tau[c];
      s_g += n * cc.g[c];
    }
  };

  for (int n = 0; !level.empty(); ++n) {
    st.peak_level = std::max<std::uint64_t>(st.peak_level, level.size());
    st.classes += level.size();
    if (st.classes > cap) throw Error(ErrorKind::EnumerationCap, "path-class count exceeds the cap");
    for (const auto& [k, w] : level) {
      PathClass pc;
      pc.first = get16(k, 0);
      pc.last = get16(k, 1);
      pc.length = n;
      pc.weight = w;
      sums(k, pc.s_tau, pc.s_g);
      visit(pc);
    }
    std::unordered_map<Key, double> next;
    std::vector<Key> order;  // first-insertion order keeps the sums deterministic
    for (const auto& [k, w] : level) {
      const int last = get16(k, 1);
      Key base = k;
      if (n >= 1) {
        const size_t c = 2 + cc.of_state[last];
        if (get16(base, c) == 0xFFFF) throw Error(ErrorKind::EnumerationCap, "cell count overflow");
        set16(base, c, static_cast<std::uint16_t>(get16(base, c) + 1));
      }
      double s_tau, s_g;
      sums(base, s_tau, s_g);
      if (s_tau >= t_max) continue;
      for (int y : sys.successors(last)) {
        const double p = model.gibbs.kernel(last, y);
        Key nk = base;
        set16(nk, 1, static_cast<std::uint16_t>(y));
        auto [it, inserted] = next.try_emplace(nk, 0.0);
        if (inserted) order.push_back(nk);
        it->second += w * p;
      }
    }
    std::vector<std::pair<Key, double>> lv;
    lv.reserve(order.size());
    for (auto& k : order) lv.emplace_back(k, next[k]);
    level.swap(lv);
  }
  return st;
}

EnumerationStats enumerate_paths_bruteforce(const SuspensionModel& model, double t_max, const PathVisitor& visit,
                                            std::uint64_t cap) {
  const auto& sys = *model.sys;
  EnumerationStats st;
  std::function<void(int, int, int, double, double, double)> rec = [&](int first, int last, int n, double s_tau,
                                                                       double s_g, double w) {
    if (++st.classes > cap) throw Error(ErrorKind::EnumerationCap, "path count exceeds the cap");
    visit(PathClass{first, last, n, s_tau, s_g, w});
    double nt = s_tau, ng = s_g;
    if (n >= 1) {
      nt += model.tau[last];
      ng += model.g[last];
    }
    if (nt >= t_max) return;
    for (int y : sys.successors(last)) rec(first, y, n + 1, nt, ng, w * model.gibbs.kernel(last, y));
  };
  for (int x = 0; x < sys.num_states(); ++x) rec(x, x, 0, 0.0, 0.0, model.gibbs.mu[x]);
  return st;
}

cplx expm1c(cplx x) {
  const double re = x.real(), im = x.imag();
  const double s = std::sin(0.5 * im);
  return {std::expm1(re) * std::cos(im) - 2.0 * s * s, std::exp(re) * std::sin(im)};
}

cplx exp_integral(cplx c, double tau) { return exp_integral(c, 0.0, tau); }

cplx exp_integral(cplx c, double lo, double hi) {
  const double d = hi - lo;
  const cplx x = c * d;
  cplx core;
  if (std::abs(x) < 1e-8) core = d * (1.0 + 0.5 * x);
  else core = expm1c(x) / c;
  return std::exp(c * lo) * core;
}

cplx ramp_integral(cplx c, double tau) {
  const cplx x = c * tau;
  if (std::abs(x) < 1e-3) {
    return tau * tau * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x * (1.0 / 120 + x * (1.0 / 720)))));
  }
  return (expm1c(x) - x) / (c * c);
}

std::vector<cplx> exact_gamma_transform(const SuspensionModel& m, cplx z, double a, const std::vector<double>& T) {
  const double t_max = *std::max_element(T.begin(), T.end());
  std::vector<cplx> out(T.size(), 0.0);
  const double norm = 1.0 / m.mean_roof;
  enumerate_path_classes(m, t_max, [&](const PathClass& pc) {
    const double t0 = m.tau[pc.first], g0 = m.ghat[pc.first];
    const double tn = m.tau[pc.last], gn = m.ghat[pc.last];
    for (size_t i = 0; i < T.size(); ++i) {
      const double t = T[i];
      if (pc.length == 0) {
        if (t < t0) out[i] += pc.weight * norm * (t0 - t) * std::exp(z * ((g0 - a) * t));
        continue;
      }
      const double base = t - pc.s_tau;
      const double lo = std::max(0.0, base - tn), hi = std::min(t0, base);
      if (!(hi > lo)) continue;
      const double c = pc.s_g + gn * base - a * t;
      out[i] += pc.weight * norm * std::exp(z * c) * exp_integral(z * (g0 - gn), lo, hi);
    }
  });
  return out;
}

cplx exact_gamma_transform(const SuspensionModel& model, cplx z, double a, double T) {
  if (T < 0) throw Error(ErrorKind::InvalidArgument, "T must be non-negative");
  if (T == 0) return 1.0;
  return exact_gamma_transform(model, z, a, std::vector<double>{T})[0];
}

std::vector<double> exact_interval_measure(const SuspensionModel& m, double a, double eps, const std::vector<double>& T,
                                           bool bruteforce) {
  return exact_interval_measure(m, a, std::vector<double>(T.size(), eps), T, bruteforce);
}

std::vector<double> exact_interval_measure(const SuspensionModel& m, double a, const std::vector<double>& widths,
                                           const std::vector<double>& T, bool bruteforce) {
  if (widths.size() != T.size()) throw Error(ErrorKind::InvalidArgument, "one half-width per T is required");
  if (T.empty()) return {};
  const double t_max = *std::max_element(T.begin(), T.end());
  std::vector<double> out(T.size(), 0.0);
  const double norm = 1.0 / m.mean_roof;
  auto visit = [&](const PathClass& pc) {
    const double t0 = m.tau[pc.first], g0 = m.ghat[pc.first];
    const double tn = m.tau[pc.last], gn = m.ghat[pc.last];
    for (size_t i = 0; i < T.size(); ++i) {
      const double t = T[i];
      const double eps = widths[i];
      if (pc.length == 0) {
        if (t < t0 && std::abs((g0 - a) * t) < eps) out[i] += pc.weight * norm * (t0 - t);
        continue;
      }
      const double base = t - pc.s_tau;
      double lo = std::max(0.0, base - tn), hi = std::min(t0, base);
      if (!(hi > lo)) continue;
      // G^T - aT = alpha u + c on the admissible u-range.
      const double alpha = g0 - gn;
      const double c = pc.s_g + gn * base - a * t;
      if (alpha == 0.0) {
        if (std::abs(c) < eps) out[i] += pc.weight * norm * (hi - lo);
        continue;
      }
      double u1 = (-eps - c) / alpha, u2 = (eps - c) / alpha;
      if (u1 > u2) std::swap(u1, u2);
      lo = std::max(lo, u1);
      hi = std::min(hi, u2);
      if (hi > lo) out[i] += pc.weight * norm * (hi - lo);
    }
  };
  if (bruteforce) enumerate_paths_bruteforce(m, t_max, visit);
  else enumerate_path_classes(m, t_max, visit);
  return out;
}

}  // namespace sflow

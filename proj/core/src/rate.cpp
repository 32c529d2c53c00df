#include "sflow/rate.hpp"

#include <cmath>

namespace sflow {

Tilt tilt(const SuspensionModel& model, double t) {
  Tilt out;
  out.t = t;
  const RealPotential base = model.f + t * model.g;
  out.beta = (t == 0.0) ? 0.0 : flow_pressure(base, model.tau);
  out.gibbs = rpf(base - out.beta * model.tau);
  out.mean_roof = out.gibbs.integral(model.tau);
  out.beta_prime = out.gibbs.integral(model.g) / out.mean_roof;
  return out;
}

double beta(const SuspensionModel& model, double t) { return tilt(model, t).beta; }

double beta_prime(const SuspensionModel& model, double t) { return tilt(model, t).beta_prime; }

double green_kubo(const SuspensionModel& model, double t, const RateOptions& opts) {
  const Tilt tl = tilt(model, t);
  const auto& sys = *model.sys;
  const int n = sys.num_states();
  const RpfData& d = tl.gibbs;
  Vec psi(n);
  for (int s = 0; s < n; ++s) psi[s] = model.g[s] - tl.beta_prime * model.tau[s];
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y : sys.successors(x)) p(x, y) = d.kernel(x, y);

  const Vec mpsi = d.mu.cwiseProduct(psi);
  const double var0 = mpsi.dot(psi);
  double sigma2 = var0;
  Vec v = psi;
  int quiet = 0;
  for (int k = 1; k <= opts.gk_max_terms; ++k) {
    v = p * v;
    const double term = mpsi.dot(v);
    sigma2 += 2.0 * term;
    if (std::abs(term) < opts.gk_tol * std::max(1.0, var0)) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  return sigma2 / tl.mean_roof;
}

SecondDerivative beta_second(const SuspensionModel& model, double t, const RateOptions& opts) {
  auto diff = [&](double h) { return (beta_prime(model, t + h) - beta_prime(model, t - h)) / (2 * h); };
  const double h = 0.04;
  const double d0 = diff(h), d1 = diff(h / 2), d2 = diff(h / 4);
  const double r0 = (4 * d1 - d0) / 3, r1 = (4 * d2 - d1) / 3;
  SecondDerivative out;
  out.value = (16 * r1 - r0) / 15;
  out.error_estimate = std::abs(out.value - r1);
  out.green_kubo = green_kubo(model, t, opts);
  if (out.value < 1e-8 || out.green_kubo < 1e-8)
    throw Error(ErrorKind::DegenerateVariance, "beta'' vanishes; G is cohomologous to a constant");
  out.relative_gap = std::abs(out.value - out.green_kubo) / out.green_kubo;
  return out;
}

double xi_of_a(const SuspensionModel& model, double a, const RateOptions& opts) {
  double lo = -opts.t_max, hi = opts.t_max;
  const double blo = beta_prime(model, lo), bhi = beta_prime(model, hi);
  if (!(a > blo && a < bhi)) throw Error(ErrorKind::OutsideGammaG, "level a is not inside the range of beta'");
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double r = beta_prime(model, t) - a;
    if (std::abs(r) <= 1e-12) return t;
    if (r > 0) hi = t; else lo = t;
    double next = t - r / green_kubo(model, t, opts);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15) return next;
    t = next;
  }
  throw Error(ErrorKind::NoConvergence, "xi(a) iteration did not converge");
}

double gamma_of_a(const SuspensionModel& model, double a, const RateOptions& opts) {
  const double xi = xi_of_a(model, a, opts);
  return beta(model, xi) - xi * a;
}

GammaDomain gamma_domain(const SuspensionModel& model, double t_max) {
  GammaDomain d;
  d.lo = beta_prime(model, -t_max);
  d.hi = beta_prime(model, t_max);
  d.range_limited = true;  // beta' only approaches the true endpoints as t grows
  return d;
}

RateProfile rate_scan(const SuspensionModel& model, const std::vector<double>& t_grid, const std::vector<double>& a_list,
                      const RateOptions& opts) {
  RateProfile p;
  for (double t : t_grid) {
    const Tilt tl = tilt(model, t);
    p.t_rows.push_back({t, tl.beta, tl.beta_prime, green_kubo(model, t, opts)});
  }
  for (double a : a_list) {
    const double xi = xi_of_a(model, a, opts);
    p.a_rows.push_back({a, xi, beta(model, xi) - xi * a, beta_second(model, xi, opts).value});
  }
  p.domain = gamma_domain(model, opts.t_max);
  return p;
}

}  // namespace sflow

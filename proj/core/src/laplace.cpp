#include "sflow/laplace.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace sflow {

Level level_data(const SuspensionModel& model, double a, const RateOptions& opts) {
  Level lv;
  lv.a = a;
  lv.xi = xi_of_a(model, a, opts);
  lv.gamma = beta(model, lv.xi) - lv.xi * a;
  lv.beta_second = green_kubo(model, lv.xi, opts);
  return lv;
}

ComplexPotential query_potential(const SuspensionModel& model, const Level& lv, const ComplexQuery& q) {
  const cplx z = q.z(lv);
  std::vector<cplx> v(model.f.size());
  for (int i = 0; i < model.f.size(); ++i)
    v[i] = model.f[i] - q.s * model.tau[i] + z * (model.g[i] - lv.a * model.tau[i]);
  return ComplexPotential(model.sys, std::move(v));
}

namespace {
// Exponent rate inside a cell: -(s + a z) + z ghat(x).
cplx cell_rate(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, int x) {
  const cplx z = q.z(lv);
  return -(q.s + lv.a * z) + z * model.ghat[x];
}

struct SeriesParts {
  Matrix<cplx> m;
  CVec left;   // nu * B1
  CVec right;  // h * B2
  cplx head;   // n = 0 term, already summed
};

SeriesParts series_parts(const SuspensionModel& model, const Level& lv, const ComplexQuery& q) {
  SeriesParts sp;
  sp.m = build_matrix(query_potential(model, lv, q));
  const int n = model.sys->num_states();
  sp.left.resize(n);
  sp.right.resize(n);
  sp.head = 0;
  for (int x = 0; x < n; ++x) {
    const BoundaryFactors bf = boundary_factors(model, lv, q, x);
    sp.left[x] = model.gibbs.nu[x] * bf.b1;
    sp.right[x] = model.gibbs.h[x] * bf.b2;
    // Start and finish in the same cell: heights with finish above start.
    sp.head += model.gibbs.mu[x] * ramp_integral(cell_rate(model, lv, q, x), model.tau[x]);
  }
  return sp;
}
}  // namespace

BoundaryFactors boundary_factors(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, int state) {
  const cplx c = cell_rate(model, lv, q, state);
  return {exp_integral(c, model.tau[state]), exp_integral(-c, model.tau[state])};
}

ZSeries eval_Z_series(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, double tol) {
  const ComplexPotential p = query_potential(model, lv, q);
  ZSeries out;
  out.spectral_radius = complex_spectrum(p).spectral_radius;
  if (out.spectral_radius >= 1.0 - 1e-6) throw Error(ErrorKind::NearPole, "series does not converge at this point");
  const SeriesParts sp = series_parts(model, lv, q);
  cplx sum = sp.head;
  CVec v = sp.right;
  int quiet = 0;
  double last = 0;
  for (int n = 1; n <= 1000000; ++n) {
    v = sp.m * v;
    const cplx term = sp.left.cwiseProduct(v).sum();
    sum += term;
    last = std::abs(term);
    out.terms = n;
    if (last < tol * std::max(1.0, std::abs(sum))) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  const double r = out.spectral_radius;
  out.tail_bound = last * r / (1.0 - r) / model.mean_roof;
  out.value = sum / model.mean_roof;
  return out;
}

cplx eval_Z_resolvent(const SuspensionModel& model, const Level& lv, const ComplexQuery& q) {
  const SeriesParts sp = series_parts(model, lv, q);
  const int n = model.sys->num_states();
  const Matrix<cplx> a = Matrix<cplx>::Identity(n, n) - sp.m;
  const CVec y = a.fullPivLu().solve(sp.m * sp.right);
  return (sp.head + sp.left.cwiseProduct(y).sum()) / model.mean_roof;
}

cplx pole_at(const SuspensionModel& model, const Level& lv, double omega, cplx guess) {
  cplx s = guess;
  const cplx one(1.0, 0.0);
  for (int it = 0; it < 100; ++it) {
    const ComplexQuery q{s, omega};
    const Matrix<cplx> m = build_matrix(query_potential(model, lv, q));
    const EigenTriple e = leading_eigen(m, &one);
    const cplx f = e.lambda - 1.0;
    if (std::abs(f) <= 1e-14) return s;
    cplx tau_pair = 0;
    for (int x = 0; x < model.tau.size(); ++x) tau_pair += e.nu[x] * model.tau[x] * e.h[x];
    const cplx dlds = -e.lambda * tau_pair;
    const cplx step = f / dlds;
    s -= step;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw Error(ErrorKind::NewtonDivergence, "pole iteration left the finite plane");
    if (std::abs(step) < 1e-15 * (1 + std::abs(s))) return s;
  }
  throw Error(ErrorKind::NewtonDivergence, "pole iteration did not converge");
}

PoleData pole_curve(const SuspensionModel& model, const Level& lv, const std::vector<double>& omega_grid) {
  PoleData pd;
  pd.s0 = pole_at(model, lv, 0.0, cplx(lv.gamma, 0.0));
  // Continue outward from omega = 0 in small steps, halving on failure.
  auto track = [&](double target) {
    double w = 0;
    cplx s = pd.s0;
    double step = std::copysign(std::min(0.05, std::abs(target)), target);
    while (std::abs(target - w) > 1e-15) {
      double next = w + step;
      if ((step > 0 && next > target) || (step < 0 && next < target)) next = target;
      try {
        s = pole_at(model, lv, next, s);
        w = next;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NewtonDivergence || std::abs(step) < 1e-6) throw;
        step *= 0.5;
      }
    }
    return s;
  };
  for (double w : omega_grid) {
    pd.omega.push_back(w);
    pd.s.push_back(w == 0.0 ? pd.s0 : track(w));
  }
  const double h = 0.02;
  const double f0 = pd.s0.real();
  const double f1 = pole_at(model, lv, h, pd.s0).real(), fm1 = pole_at(model, lv, -h, pd.s0).real();
  const double f2 = pole_at(model, lv, 2 * h, pd.s0).real(), fm2 = pole_at(model, lv, -2 * h, pd.s0).real();
  pd.curvature = -(-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
  return pd;
}

const char* to_string(ResidueNorm n) {
  switch (n) {
    case ResidueNorm::Residue: return "residue";
    case ResidueNorm::OneFactor: return "one_factor";
    case ResidueNorm::TwoFactors: return "two_factors";
    case ResidueNorm::ThreeFactors: return "three_factors";
  }
  return "unknown";
}

ResidueData residue_C(const SuspensionModel& model, const Level& lv, ResidueNorm norm) {
  ResidueData rd;
  const ComplexQuery q{cplx(lv.gamma, 0.0), 0.0};
  const Matrix<cplx> m = build_matrix(query_potential(model, lv, q));
  const cplx one(1.0, 0.0);
  const EigenTriple e = leading_eigen(m, &one);
  const int n = model.sys->num_states();
  rd.h_p = e.h;
  rd.nu_p = e.nu;
  cplx left = 0, right = 0, tp = 0;
  for (int x = 0; x < n; ++x) {
    const BoundaryFactors bf = boundary_factors(model, lv, q, x);
    rd.b1.push_back(bf.b1);
    rd.b2.push_back(bf.b2);
    left += model.gibbs.nu[x] * bf.b1 * e.h[x];
    right += e.nu[x] * model.gibbs.h[x] * bf.b2;
    tp += e.nu[x] * model.tau[x] * e.h[x];
  }
  rd.mean_roof = model.mean_roof;
  rd.pairing = (left * right).real();
  rd.b3 = rd.pairing / rd.mean_roof;
  rd.tilted_roof = tp.real();
  rd.candidates[0] = rd.b3 / rd.tilted_roof;
  rd.candidates[1] = rd.b3;
  rd.candidates[2] = rd.b3 / rd.mean_roof;
  rd.candidates[3] = rd.b3 / (rd.mean_roof * rd.mean_roof);
  rd.chosen = norm;
  rd.c_a = rd.candidates[static_cast<int>(norm)];
  if (!(rd.c_a > 0)) throw Error(ErrorKind::CalibrationAmbiguous, "C(a) is not positive");
  return rd;
}

Calibration calibrate_residue(const SuspensionModel& model, double t_cap, double eps, const RateOptions& opts) {
  Calibration cal;
  const Level lv = level_data(model, model.a_star, opts);
  const ResidueData rd = residue_C(model, lv);
  const double exact = exact_interval_measure(model, model.a_star, eps, {t_cap})[0];
  const double shape = std::sqrt(2.0) * eps / std::sqrt(std::numbers::pi * t_cap * lv.beta_second);
  int best = -1;
  double best_err = 0;
  for (int i = 0; i < 4; ++i) {
    cal.oracle_ratio[i] = exact / (shape * rd.candidates[i]);
    const double err = std::abs(std::log(cal.oracle_ratio[i]));
    if (err > std::log(1.2)) continue;
    // Equal candidates tie; the earlier one wins.
    if (best < 0 || err < best_err - 1e-9) {
      best = i;
      best_err = err;
    }
  }
  if (best < 0) {
    cal.ambiguous = true;
    throw Error(ErrorKind::CalibrationAmbiguous, "no normalisation of C(a) matches the exact oracle within 20%");
  }
  cal.chosen = static_cast<ResidueNorm>(best);
  return cal;
}

LaplaceOracle laplace_oracle(const SuspensionModel& model, const Level& lv, const ComplexQuery& q, double t_cap) {
  const cplx z = q.z(lv);
  const double sig = q.s.real();
  const double norm = 1.0 / model.mean_roof;
  const int nshell = static_cast<int>(std::ceil(t_cap));
  std::vector<double> shell(nshell + 1, 0.0);
  cplx acc = 0;
  auto rate = [&](int x) { return -(q.s + lv.a * z) + z * model.ghat[x]; };
  auto rate_re = [&](int x) { return -(sig + lv.a * lv.xi) + lv.xi * model.ghat[x]; };
  enumerate_path_classes(model, t_cap, [&](const PathClass& pc) {
    const int x0 = pc.first, xn = pc.last;
    cplx v;
    double major;
    if (pc.length == 0) {
      v = ramp_integral(rate(x0), model.tau[x0]);
      major = ramp_integral(rate_re(x0), model.tau[x0]).real();
    } else {
      const cplx mid = z * (pc.s_g - lv.a * pc.s_tau) - q.s * pc.s_tau;
      v = std::exp(mid) * exp_integral(rate(x0), model.tau[x0]) * exp_integral(rate(xn), model.tau[xn]);
      const double mid_re = lv.xi * (pc.s_g - lv.a * pc.s_tau) - sig * pc.s_tau;
      major = std::exp(mid_re) * exp_integral(rate_re(x0), model.tau[x0]).real() *
              exp_integral(rate_re(xn), model.tau[xn]).real();
    }
    acc += pc.weight * norm * v;
    shell[std::min(nshell, static_cast<int>(pc.s_tau))] += pc.weight * norm * major;
  });
  LaplaceOracle out;
  out.value = acc;
  out.shells = nshell;
  // Geometric extrapolation of the majorant over the last complete shells.
  const int k1 = nshell - 1, k0 = std::max(0, nshell - 6);
  if (k1 > k0 && shell[k0] > 0 && shell[k1] > 0) {
    const double r = std::pow(shell[k1] / shell[k0], 1.0 / (k1 - k0));
    out.tail_bound = r < 1 ? shell[k1] * r / (1 - r) : std::numeric_limits<double>::infinity();
  } else {
    out.tail_bound = std::numeric_limits<double>::infinity();
  }
  return out;
}

GrowthReport growth_bound_probe(const SuspensionModel& model, const Level& lv, const std::vector<cplx>& s_samples,
                                const std::vector<double>& omega_samples, double nu) {
  GrowthReport rep;
  rep.nu = nu;
  for (const cplx& s : s_samples) {
    for (double w : omega_samples) {
      GrowthSample gs;
      gs.s = s;
      gs.omega = w;
      try {
        const ZSeries z = eval_Z_series(model, lv, ComplexQuery{s, w});
        gs.modulus = std::abs(z.value);
        gs.spectral_radius = z.spectral_radius;
        const double scale = std::pow(std::abs(s.imag()), nu) + std::pow(std::abs(w), nu);
        if (scale > 0) rep.b_nu = std::max(rep.b_nu, gs.modulus / scale);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NearPole) throw;
        gs.flagged = true;
        gs.spectral_radius = complex_spectrum(query_potential(model, lv, ComplexQuery{s, w})).spectral_radius;
      }
      rep.samples.push_back(gs);
    }
  }
  return rep;
}

}  // namespace sflow

#include "sflow/tauberian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

namespace sflow {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc2(double w) {
  if (std::abs(w) < 1e-4) return 1 - w * w / 3;
  const double s = std::sin(w) / w;
  return s * s;
}

// 1 / sqrt(1 - x) - 1 without cancellation near x = 0.
double f_minus_one(double x) {
  const double r = std::sqrt(1 - x);
  return x / (r * (1 + r));
}

// Antiderivative of (1/sqrt(1-x) - 1) / x^2; tends to 0 at -inf, equals 1 at x = 1.
double antideriv(double x) {
  const double r = std::sqrt(std::max(0.0, 1 - x));
  return 1 / (1 + r) + 0.5 * std::log(std::abs(x) / ((1 + r) * (1 + r)));
}

// Adaptive Gauss-Kronrod with a mixed absolute/relative stopping rule; Boost's
// own recursion keeps splitting when the integrand vanishes identically.
template <class F>
double gk_rec(F& f, double a, double b, double abs_tol, int depth) {
  double err = 0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= abs_tol + 1e-12 * std::abs(v)) return v;
  if (depth == 0) {
    if (err > 1e-6 * std::max(1.0, std::abs(v)) + 1e-14 || !std::isfinite(v))
      throw Error(ErrorKind::QuadratureFailure, "panel [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return v;
  }
  const double m = 0.5 * (a + b);
  return gk_rec(f, a, m, abs_tol / 2, depth - 1) + gk_rec(f, m, b, abs_tol / 2, depth - 1);
}

template <class F>
double gk(F&& f, double a, double b, double abs_tol = 1e-15) {
  return gk_rec(f, a, b, abs_tol, 14);
}

// Sum of gk over [a, b] in panels of width pi.
template <class F>
double panels(F&& f, double a, double b) {
  double s = 0;
  for (double lo = a; lo < b; lo += kPi) s += gk(f, lo, std::min(b, lo + kPi));
  return s;
}

// integral_0^inf cos(2 (base + t)) psi(t) dt for slowly decaying psi.
template <class F>
double shifted_cos(F&& psi, double base) {
  thread_local boost::math::quadrature::ooura_fourier_cos<double> oc(1e-10, 10);
  thread_local boost::math::quadrature::ooura_fourier_sin<double> os(1e-10, 10);
  const double c = oc.integrate(psi, 2.0).first;
  const double s = os.integrate(psi, 2.0).first;
  return std::cos(2 * base) * c - std::sin(2 * base) * s;
}

// Endpoint segment [X - c, X] under w = X - v^2, integrand already multiplied by F.
template <class F>
double endpoint(F&& g, double X, double c) {
  return gk([&](double v) { return g(X - v * v, v) * 2 * std::sqrt(X); }, 0.0, std::sqrt(c));
}

}  // namespace

LaplaceFamily LaplaceFamily::make(std::string name, std::function<double(int)> A,
                                  std::function<double(int, double)> scaled, Contract contract, double mu, double c0,
                                  double c1, int n_check, std::function<double(int, double)> scaled_deriv, double b1) {
  if (!(mu > 0) || !(c0 > 0) || !(c1 >= c0)) throw Error(ErrorKind::InvalidArgument, "need mu > 0 and 0 < C0 <= C1");
  for (int n = 1; n <= n_check; ++n) {
    const double a = A(n);
    if (!(a >= c0 * std::exp(-mu * n) && a <= c1))
      throw Error(ErrorKind::FamilyContractViolated,
                  name + ": A_" + std::to_string(n) + " = " + std::to_string(a) + " outside [C0 e^{-mu n}, C1]");
  }
  if (contract == Contract::DerivativeBound && (!scaled_deriv || !(b1 > 0)))
    throw Error(ErrorKind::InvalidArgument, "derivative-bound family needs g' and B1");
  LaplaceFamily f;
  f.name = std::move(name);
  f.A = std::move(A);
  f.scaled = std::move(scaled);
  f.scaled_deriv = std::move(scaled_deriv);
  f.contract = contract;
  f.b1 = b1;
  f.mu = mu;
  f.c0 = c0;
  f.c1 = c1;
  return f;
}

double LaplaceFamily::H(int n, double y) const { return std::sqrt(y) * scaled(n, y); }

LaplaceFamily equality_family(double decay) {
  auto A = [decay](int n) { return std::exp(-decay * n); };
  auto g = [A](int n, double t) { return A(n) / std::sqrt(kPi * t); };
  return LaplaceFamily::make("equality", A, g, LaplaceFamily::Contract::Monotone, decay, 1.0, 1.0);
}

LaplaceFamily perturbed_family(double decay) {
  auto A = [decay](int n) { return std::exp(-decay * n); };
  auto g = [A](int n, double t) { return A(n) / std::sqrt(kPi * t) * (1 + 0.5 * std::exp(-t / 2)); };
  return LaplaceFamily::make("perturbed", A, g, LaplaceFamily::Contract::Monotone, decay, 1.0, 1.0);
}

LaplaceFamily oscillating_family(double decay) {
  auto A = [decay](int n) { return std::exp(-decay * n); };
  auto g = [A](int n, double t) {
    return A(n) / std::sqrt(kPi * t) * (1 + 0.5 * std::exp(-t / 4) * std::sin(3 * t));
  };
  // d/dt of e^t t^{-1/2} (1 + p(t)), scaled by e^{-t}
  auto dg = [A](int n, double t) {
    const double e = std::exp(-t / 4);
    const double p = 0.5 * e * std::sin(3 * t);
    const double dp = 0.5 * e * (3 * std::cos(3 * t) - 0.25 * std::sin(3 * t));
    return A(n) / std::sqrt(kPi) * ((1 / std::sqrt(t) - 0.5 * std::pow(t, -1.5)) * (1 + p) + dp / std::sqrt(t));
  };
  return LaplaceFamily::make("derivative-bound", A, g, LaplaceFamily::Contract::DerivativeBound, decay, 1.0, 1.0, 60,
                             dg, 2.0 * A(1));
}

LaplaceValue laplace_numeric(const std::function<double(double)>& g, double t_max, double s) {
  if (!(s > 1)) throw Error(ErrorKind::InvalidArgument, "need s > 1");
  if (!(t_max > 0)) throw Error(ErrorKind::InvalidArgument, "need t_max > 0");
  // t = u^2 removes a t^{-1/2} singularity at the origin
  auto f = [&](double u) { return 2 * u * std::exp(-s * u * u) * g(u * u); };
  double err = 0;
  LaplaceValue out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, std::sqrt(t_max), 15, 1e-13, &err);
  if (!std::isfinite(out.value)) throw Error(ErrorKind::QuadratureFailure, "non-finite Laplace integral");
  out.tail_bound = std::abs(std::exp(-s * t_max) * g(t_max)) / (s - 1) + err;
  if (out.tail_bound > 0.1 * std::abs(out.value) && out.tail_bound > 1e-300)
    throw Error(ErrorKind::TailDominates, "tail " + std::to_string(out.tail_bound) + " vs value " +
                                              std::to_string(out.value));
  return out;
}

double kernel_defect(double lambda, double y) {
  if (!(lambda > 1) || !(y >= 1)) throw Error(ErrorKind::InvalidArgument, "need lambda > 1 and y >= 1");
  const double X = lambda * y;
  const double W = std::min(X / 2, 200 * kPi);
  auto phi = [X](double w) { return f_minus_one(w / X) / (w * w); };
  auto integrand = [X](double w) { return sinc2(w) * f_minus_one(w / X); };

  // sinc^2 = (1 - cos 2w) / (2 w^2): the smooth half is closed form, the cosine half oscillatory.
  const double left_smooth = antideriv(-W / X) / (2 * X);
  const double left_osc = -0.5 * shifted_cos([&](double t) { return phi(-W - t); }, W);
  const double central = panels(integrand, -W, W);

  double right = 0;
  if (X <= 2e5) {
    const double c = std::min(4 * kPi, X - W);
    right = panels(integrand, W, X - c) +
            endpoint([](double w, double v) { (void)v; return sinc2(w); }, X, c) -
            gk([&](double v) { return sinc2(X - v * v) * 2 * v; }, 0.0, std::sqrt(c));
  } else {
    const double smooth = (1 - antideriv(W / X)) / (2 * X);
    const double h = 1e-3 * W;
    const double dphi = (phi(W + h) - phi(W - h)) / (2 * h);
    const double lower = -std::sin(2 * W) * phi(W) / 2 - std::cos(2 * W) * dphi / 4;
    const double upper = std::pow(X, -1.5) * std::sqrt(kPi / 2) * std::cos(2 * X - kPi / 4);
    right = smooth - 0.5 * (lower + upper);
  }
  // integral_X^inf sinc^2
  const double beyond = 1 / (2 * X) - 0.5 * shifted_cos([X](double t) { return 1 / ((X + t) * (X + t)); }, X);
  return left_smooth + left_osc + central + right - beyond;
}

double kernel_integral(double lambda, double y) { return kPi + kernel_defect(lambda, y); }

double fejer_smoothed_average(const std::function<double(double)>& H, double lambda, double y) {
  if (!(lambda > 1) || !(y >= 1)) throw Error(ErrorKind::InvalidArgument, "need lambda > 1 and y >= 1");
  const double X = lambda * y;
  const double h0 = H(y);
  const double L = 1e4 * kPi;
  const double c = std::min(4 * kPi, X);
  auto delta = [&](double w) { return sinc2(w) * (H(y - w / lambda) - h0) / std::sqrt(1 - w / X); };
  double e = panels(delta, -L, X - c);
  e += endpoint([&](double w, double) { return sinc2(w) * (H(y - w / lambda) - h0); }, X, c);
  return h0 * kernel_integral(lambda, y) + e;
}

double fejer_smoothed_average(const LaplaceFamily& family, int n, double y, double mu0) {
  const double lambda = std::exp(0.5 * mu0 * n);
  return fejer_smoothed_average([&](double t) { return family.H(n, t); }, lambda, y);
}

TauberReport verify_tauberian(const LaplaceFamily& family, int q, double eta, const std::vector<int>& n_grid,
                              const TimeRule& rule) {
  if (n_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty n grid");
  if (!(rule.step > 0) || !(rule.span > 0)) throw Error(ErrorKind::InvalidArgument, "bad time rule");
  std::vector<int> ns = n_grid;
  std::sort(ns.begin(), ns.end());
  TauberReport rep;
  std::vector<bool> n_ok;
  for (int n : ns) {
    const double t0 = std::max<double>(n - q, rule.step);
    const int steps = static_cast<int>(std::floor(rule.span / rule.step + 1e-9));
    bool ok = true;
    double prev = 0;
    for (int i = 0; i <= steps; ++i) {
      const double t = t0 + i * rule.step;
      const double v = family.scaled(n, t);
      if (family.contract == LaplaceFamily::Contract::Monotone) {
        // g(t) >= g(t - step)  <=>  v e^{step} >= prev
        if (i > 0 && v * std::exp(rule.step) < prev * (1 - 1e-12))
          throw Error(ErrorKind::FamilyContractViolated,
                      family.name + ": not nondecreasing at n=" + std::to_string(n) + " t=" + std::to_string(t));
      } else {
        const double d = std::abs(family.scaled_deriv(n, t)) * std::sqrt(t);
        if (d > family.b1)
          throw Error(ErrorKind::FamilyContractViolated,
                      family.name + ": |g'| bound fails at n=" + std::to_string(n) + " t=" + std::to_string(t));
      }
      prev = v;
      TauberRow r;
      r.n = n;
      r.t = t;
      r.ratio = v * std::sqrt(kPi * t) / family.A(n);
      r.in_band = std::abs(r.ratio - 1) <= eta;
      ok = ok && r.in_band;
      rep.rows.push_back(r);
    }
    n_ok.push_back(ok);
  }
  rep.all_in_band = std::all_of(n_ok.begin(), n_ok.end(), [](bool b) { return b; });
  for (int i = static_cast<int>(ns.size()) - 1; i >= 0 && n_ok[i]; --i) rep.onset = ns[i];
  return rep;
}

}  // namespace sflow

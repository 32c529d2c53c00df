#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "sflow/suspension.hpp"
#include "test_models.hpp"

using namespace sflow;

namespace {

double dense_log_radius(const RealPotential& phi) {
  const auto& sys = *phi.system();
  const int n = sys.num_states();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y : sys.successors(x)) a(x, y) = std::exp(phi[x]);
  return std::log(a.eigenvalues().cwiseAbs().maxCoeff());
}

// Simpson's rule, used only as an oracle for the closed forms.
cplx simpson(auto&& f, double lo, double hi, int n = 2000) {
  const double h = (hi - lo) / n;
  cplx s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("flow pressure solves Pr(f - s tau) = 0") {
  const auto spec = testing_models::three_symbol();
  auto sys = build_system(spec);
  const RealPotential f = build_potential(sys, spec.f), tau = build_potential(sys, spec.tau);
  const double s = flow_pressure(f, tau);
  CHECK(std::abs(dense_log_radius(f - s * tau)) < 1e-12);
  // bisection oracle
  double lo = -5, hi = 5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dense_log_radius(f - mid * tau) > 0 ? lo : hi) = mid;
  }
  CHECK(s == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-11));
}

TEST_CASE("normalised model") {
  for (const auto& spec : {testing_models::golden(), testing_models::three_symbol(), testing_models::chain_memory1()}) {
    const SuspensionModel m = build_model(spec);
    CHECK(std::abs(m.gibbs.pressure) < 1e-12);
    CHECK(std::abs(dense_log_radius(m.f)) < 1e-12);
    double gt = 0, tt = 0;
    for (int x = 0; x < m.sys->num_states(); ++x) {
      CHECK(m.g[x] == doctest::Approx(m.ghat[x] * m.tau[x]));
      gt += m.gibbs.mu[x] * m.g[x];
      tt += m.gibbs.mu[x] * m.tau[x];
    }
    CHECK(m.mean_roof == doctest::Approx(tt).epsilon(1e-13));
    CHECK(m.a_star == doctest::Approx(gt / tt).epsilon(1e-13));
  }
}

TEST_CASE("closed-form cell integrals") {
  for (cplx c : {cplx(0.3, 0.0), cplx(-1.2, 2.5), cplx(1e-5, -1e-5), cplx(0, 0)}) {
    const double tau = 1.7;
    CHECK(std::abs(exp_integral(c, tau) - simpson([&](double u) { return std::exp(c * u); }, 0, tau)) < 1e-10);
    CHECK(std::abs(exp_integral(c, 0.4, 1.1) - simpson([&](double u) { return std::exp(c * u); }, 0.4, 1.1)) < 1e-10);
    CHECK(std::abs(ramp_integral(c, tau) -
                   simpson([&](double w) { return (tau - w) * std::exp(c * w); }, 0, tau)) < 1e-10);
  }
    const cplx z(1e-9, 1e-9);
  CHECK(std::abs(expm1c(z) - (z + z * z / 2.0)) < 1e-15 * std::abs(z));
}

TEST_CASE("path-class enumeration equals brute force") {
  for (const auto& spec : {testing_models::golden(), testing_models::chain_memory1()}) {
    const SuspensionModel m = build_model(spec);
    const std::vector<double> Ts = {2.0, 4.5, 7.0};
    const auto dp = exact_interval_measure(m, m.a_star, 0.2, Ts, false);
    const auto bf = exact_interval_measure(m, m.a_star, 0.2, Ts, true);
    for (size_t i = 0; i < Ts.size(); ++i) CHECK(dp[i] == doctest::Approx(bf[i]).epsilon(1e-12));
    double w_dp = 0, w_bf = 0;
    enumerate_path_classes(m, 5.0, [&](const PathClass& c) { w_dp += c.weight * c.length; });
    enumerate_paths_bruteforce(m, 5.0, [&](const PathClass& c) { w_bf += c.weight * c.length; });
    CHECK(w_dp == doctest::Approx(w_bf).epsilon(1e-12));
  }
}

TEST_CASE("Gamma transform: total mass and derivative at zero") {
  const SuspensionModel m = build_model(testing_models::three_symbol());
  for (double T : {0.5, 3.0, 9.0}) {
    CHECK(std::abs(exact_gamma_transform(m, cplx(0, 0), m.a_star, T) - cplx(1, 0)) < 1e-12);
    // d/dz at 0 is E[G^T - a* T] = 0 by flow invariance
    const double h = 1e-5;
    const cplx d = (exact_gamma_transform(m, cplx(h, 0), m.a_star, T) - exact_gamma_transform(m, cplx(-h, 0), m.a_star, T)) /
                   (2 * h);
    CHECK(std::abs(d) < 1e-7);
  }
  // the whole interval measure is one when the window is huge
  CHECK(exact_interval_measure(m, m.a_star, 1e3, {6.0})[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flow sampler: ergodic average and reproducibility") {
  const SuspensionModel m = build_model(testing_models::chain_memory1());
  const FlowSampler sampler(m);
  Rng rng = make_stream(42, 0);
  const int N = 20000;
  const double T = 30;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    const double v = birkhoff_flow_integral(sampler, sampler.sample_point(rng), T, rng) / T;
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / N);
  CHECK(std::abs(mean - m.a_star) < 4 * se);

  Rng a = make_stream(7, 3), b = make_stream(7, 3), c = make_stream(7, 4);
  const FlowPoint pa = sampler.sample_point(a), pb = sampler.sample_point(b);
  CHECK(pa.state == pb.state);
  CHECK(pa.height == pb.height);
  CHECK(make_stream(7, 3)() != c());
}

TEST_CASE("sampled measure agrees with enumeration") {
  const SuspensionModel m = build_model(testing_models::three_symbol());
  const FlowSampler sampler(m);
  Rng rng = make_stream(5, 0);
  const double T = 8, eps = 0.3;
  const int N = 100000;
  int hits = 0;
  for (int i = 0; i < N; ++i) {
    const FlowSegment seg = flow_segment(sampler, sampler.sample_point(rng), T, rng);
    if (std::abs(seg.integral - m.a_star * T) < eps) ++hits;
  }
  const double p = static_cast<double>(hits) / N;
  const double exact = exact_interval_measure(m, m.a_star, eps, {T})[0];
  CHECK(std::abs(p - exact) < 4 * std::sqrt(exact * (1 - exact) / N));
}

TEST_CASE("cycle-space checks") {
  const auto a = independence_report(build_model(testing_models::three_symbol()));
  CHECK(a.cycle_dimension == 3);
  CHECK(a.tau_nonlattice);
  CHECK(a.pair_can_be_independent);
  const auto b = independence_report(build_model(testing_models::chain_memory1()));
  CHECK(b.cycle_dimension == 3);
  CHECK(b.pair_can_be_independent);

  auto lattice = testing_models::golden();
  lattice.tau = testing_models::table({{"0", 1.0}, {"1", 2.0}});
  const auto c = independence_report(build_model(lattice));
  CHECK_FALSE(c.tau_nonlattice);
  CHECK(c.tau_common_period == doctest::Approx(1.0));
  CHECK(c.cycle_dimension == 2);
  CHECK_FALSE(c.pair_can_be_independent);
}

#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "sflow/rate.hpp"
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

// beta(t) by bisection on the dense spectral radius.
double beta_oracle(const SuspensionModel& m, double t) {
  const RealPotential base = m.f + t * m.g;
  double lo = -20, hi = 20;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dense_log_radius(base - mid * m.tau) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// inf_t beta(t) - t a by golden-section search.
double gamma_oracle(const SuspensionModel& m, double a) {
  double lo = -4, hi = 4;
  const double r = (std::sqrt(5.0) - 1) / 2;
  auto f = [&](double t) { return beta_oracle(m, t) - t * a; };
  for (int i = 0; i < 120; ++i) {
    const double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    (f(x1) < f(x2) ? hi : lo) = (f(x1) < f(x2) ? x2 : x1);
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("beta against the dense oracle") {
  const SuspensionModel m = build_model(testing_models::chain_memory1());
  for (double t : {-1.5, -0.3, 0.0, 0.7, 2.0}) CHECK(beta(m, t) == doctest::Approx(beta_oracle(m, t)).epsilon(1e-11));
  CHECK(std::abs(beta(m, 0.0)) < 1e-14);
  CHECK(beta_prime(m, 0.0) == doctest::Approx(m.a_star).epsilon(1e-12));
  const double h = 1e-4;
  CHECK(beta_prime(m, 0.4) == doctest::Approx((beta_oracle(m, 0.4 + h) - beta_oracle(m, 0.4 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("rate function at and away from the mean") {
  const SuspensionModel m = build_model(testing_models::three_symbol());
  CHECK(std::abs(xi_of_a(m, m.a_star)) < 1e-10);
  CHECK(std::abs(gamma_of_a(m, m.a_star)) < 1e-12);
  for (double da : {-0.05, 0.03, 0.08}) {
    const double a = m.a_star + da;
    const double g = gamma_of_a(m, a);
    CHECK(g < 0);
    CHECK(g == doctest::Approx(gamma_oracle(m, a)).epsilon(1e-7));
    CHECK(beta_prime(m, xi_of_a(m, a)) == doctest::Approx(a).epsilon(1e-11));
  }
}

TEST_CASE("second derivative: differencing and Green-Kubo") {
  for (const auto& spec : {testing_models::golden(), testing_models::three_symbol(), testing_models::chain_memory1()}) {
    const SuspensionModel m = build_model(spec);
    for (double t : {0.0, 0.5, -0.8}) {
      const SecondDerivative d = beta_second(m, t);
      CHECK(d.relative_gap < 1e-6);
      CHECK(d.value > 0);
    }
  }
}

TEST_CASE("degenerate G is rejected") {
  auto spec = testing_models::golden();
  spec.ghat = testing_models::constant(0.4);  // G^T = 0.4 T exactly
  const SuspensionModel m = build_model(spec);
  CHECK_THROWS_AS(beta_second(m, 0.0), Error);
  try {
    beta_second(m, 0.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateVariance);
  }
}

TEST_CASE("levels outside the range of beta' are rejected") {
  const SuspensionModel m = build_model(testing_models::three_symbol());
  try {
    xi_of_a(m, 5.0);
    FAIL("expected OutsideGammaG");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideGammaG);
  }
}

TEST_CASE("scan: convex beta, concave nonpositive gamma") {
  const SuspensionModel m = build_model(testing_models::three_symbol());
  std::vector<double> ts;
  for (double t = -2; t <= 2.0001; t += 0.1) ts.push_back(t);
  const GammaDomain dom = gamma_domain(m, 2.0);
  std::vector<double> as;
  for (int i = 0; i < 50; ++i) as.push_back(dom.lo + (dom.hi - dom.lo) * (i + 0.5) / 50);
  const RateProfile p = rate_scan(m, ts, as);
  for (size_t i = 1; i + 1 < p.t_rows.size(); ++i)
    CHECK(p.t_rows[i - 1].beta + p.t_rows[i + 1].beta - 2 * p.t_rows[i].beta > 0);
  for (size_t i = 0; i < p.a_rows.size(); ++i) {
    CHECK(p.a_rows[i].gamma <= 1e-12);
    if (i > 0 && i + 1 < p.a_rows.size())
      CHECK(p.a_rows[i - 1].gamma + p.a_rows[i + 1].gamma - 2 * p.a_rows[i].gamma < 1e-12);
  }
}

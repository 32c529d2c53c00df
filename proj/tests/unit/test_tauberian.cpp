#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sflow/tauberian.hpp"

using namespace sflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Laplace transform of e^t / sqrt(pi t)") {
  const auto g = [](double t) { return std::exp(t) / std::sqrt(kPi * t); };
  const LaplaceValue v = laplace_numeric(g, 60.0, 1.5);
  CHECK(std::abs(v.value - 1 / std::sqrt(0.5)) <= 1e-4 * std::sqrt(2.0));
  // shift rule: e^{-t} g(t) contributes 1/sqrt(s)
  const auto g2 = [&](double t) { return g(t) * (1 + std::exp(-t)); };
  const LaplaceValue v2 = laplace_numeric(g2, 60.0, 1.5);
  CHECK(v2.value == doctest::Approx(1 / std::sqrt(0.5) + 1 / std::sqrt(1.5)).epsilon(1e-6));
  CHECK(laplace_numeric([](double) { return 0.0; }, 10.0, 2.0).value == 0.0);
}

TEST_CASE("truncation that is too short is reported") {
  const auto g = [](double t) { return std::exp(t) / std::sqrt(kPi * t); };
  try {
    laplace_numeric(g, 2.0, 1.05);
    FAIL("expected TailDominates");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TailDominates);
  }
}

TEST_CASE("kernel integral tends to pi") {
  CHECK(std::abs(kernel_integral(1e3, 50) - kPi) <= 1e-2);
  CHECK(std::abs(kernel_integral(1e6, 1) - kPi) <= 1e-3);
  for (double y : {1.0, 5.0}) {
    double prev = 1e300;
    for (double lambda : {2.0, 10.0, 1e2, 1e3, 1e4, 1e5}) {
      const double d = std::abs(kernel_defect(lambda, y));
      CHECK(d < prev);
      prev = d;
    }
  }
}

TEST_CASE("kernel defect matches a direct quadrature at small scale") {
  // reference from an arbitrary-precision panel quadrature of the defining integral
  CHECK(kernel_defect(10.0, 1.0) == doctest::Approx(-0.0187576911776791).epsilon(1e-6));
}

TEST_CASE("smoothed averages") {
  const LaplaceFamily eq = equality_family();
  const double mu0 = 4 * eq.mu;
  for (int n : {10, 15})
    for (double y : {30.0, 40.0}) {
      const double v = fejer_smoothed_average(eq, n, y, mu0);
      CHECK(std::abs(v / (eq.A(n) * std::sqrt(kPi)) - 1) < 0.02);
    }
  const double lambda = 50, y = 3;
  CHECK(fejer_smoothed_average([](double) { return 2.5; }, lambda, y) ==
        doctest::Approx(2.5 * kernel_integral(lambda, y)).epsilon(1e-12));
  CHECK(fejer_smoothed_average([](double) { return 0.0; }, lambda, y) == 0.0);
  // linearity
  const auto h1 = [](double t) { return std::exp(-t / 3); };
  const auto h2 = [](double t) { return 1 / (1 + t); };
  const double lhs = fejer_smoothed_average([&](double t) { return 2 * h1(t) - 0.5 * h2(t); }, lambda, y);
  const double rhs = 2 * fejer_smoothed_average(h1, lambda, y) - 0.5 * fejer_smoothed_average(h2, lambda, y);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("families") {
  std::vector<int> grid;
  for (int n = 1; n <= 30; ++n) grid.push_back(n);
  const TauberReport eq = verify_tauberian(equality_family(), 0, 0.05, grid);
  CHECK(eq.all_in_band);
  CHECK(eq.onset == 1);
  for (const auto& r : eq.rows) CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-14));

  // 0.5 e^{-t/2} < 0.05 once t > 2 ln 10
  const TauberReport pert = verify_tauberian(perturbed_family(), 0, 0.05, grid);
  CHECK(pert.onset == static_cast<int>(std::ceil(2 * std::log(10.0))));
  for (const auto& r : pert.rows)
    if (r.t >= 20) CHECK(r.in_band);

  std::vector<int> late(grid.begin() + 9, grid.end());
  const TauberReport osc = verify_tauberian(oscillating_family(), 0, 0.05, late);
  CHECK(osc.all_in_band);
}

TEST_CASE("contracts") {
  CHECK_THROWS_AS(LaplaceFamily::make(
                      "fast decay", [](int n) { return std::exp(-double(n) * n); },
                      [](int, double) { return 1.0; }, LaplaceFamily::Contract::Monotone, 0.1, 1.0, 1.0),
                  Error);
  // decreasing g breaks the monotone contract
  const LaplaceFamily bad = LaplaceFamily::make(
      "decreasing", [](int) { return 1.0; }, [](int, double t) { return std::exp(-2 * t); },
      LaplaceFamily::Contract::Monotone, 0.1, 0.5, 1.0);
  try {
    verify_tauberian(bad, 0, 0.05, {5});
    FAIL("expected FamilyContractViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FamilyContractViolated);
  }
}

#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "sflow/transfer.hpp"
#include "test_models.hpp"

using namespace sflow;

namespace {

// Stationary Markov measure built from a dense eigen-decomposition of
// A(x, y) = e^{phi(x)} [x -> y], independent of the power iteration.
struct DenseOracle {
  Eigen::MatrixXd A;
  Eigen::VectorXd l, r;
  double lambda = 0;

  explicit DenseOracle(const RealPotential& phi) {
    const auto& sys = *phi.system();
    const int n = sys.num_states();
    A = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x)
      for (int y : sys.successors(x)) A(x, y) = std::exp(phi[x]);
    Eigen::EigenSolver<Eigen::MatrixXd> right(A), left(A.transpose());
    auto top = [](const Eigen::EigenSolver<Eigen::MatrixXd>& es) {
      int best = 0;
      for (int i = 1; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
      return best;
    };
    const int ir = top(right), il = top(left);
    lambda = right.eigenvalues()[ir].real();
    r = right.eigenvectors().col(ir).real();
    l = left.eigenvectors().col(il).real();
    if (r.sum() < 0) r = -r;
    if (l.sum() < 0) l = -l;
    l /= l.dot(r);
  }

  double cylinder(const SymbolicSystem& sys, const Symbols& w) const {
    const int L = static_cast<int>(w.size()) - sys.memory();
    double v = l[sys.state_at(w, 0)];
    for (int i = 0; i + 1 < L; ++i) v *= A(sys.state_at(w, i), sys.state_at(w, i + 1)) / lambda;
    return v * r[sys.state_at(w, L - 1)];
  }
};

}  // namespace

TEST_CASE("pressure of the zero potential") {
  auto full = SymbolicSystem::validate(2, {{1, 1}, {1, 1}}, 0);
  CHECK(std::abs(rpf(RealPotential::constant(full, 0.0)).pressure - std::log(2.0)) < 1e-12);
  auto golden = SymbolicSystem::validate(2, {{1, 1}, {1, 0}}, 0);
  CHECK(std::abs(rpf(RealPotential::constant(golden, 0.0)).pressure - std::log((1 + std::sqrt(5.0)) / 2)) < 1e-12);
  // constant shift moves the pressure by the constant
  CHECK(rpf(RealPotential::constant(golden, 0.7)).pressure ==
        doctest::Approx(std::log((1 + std::sqrt(5.0)) / 2) + 0.7).epsilon(1e-12));
}

TEST_CASE("RPF data against a dense eigen-decomposition") {
  for (const auto& spec : {testing_models::golden(), testing_models::three_symbol(), testing_models::chain_memory1()}) {
    auto sys = build_system(spec);
    const RealPotential phi = build_potential(sys, spec.f);
    const RpfData d = rpf(phi);
    const DenseOracle o(phi);
    CHECK(d.lambda == doctest::Approx(o.lambda).epsilon(1e-12));
    for (int len = sys->window_length(); len <= sys->window_length() + 6; ++len) {
      double total = 0;
      for (const Word& w : enumerate_words(*sys, len)) {
        const Symbols s = sys->decode(w);
        const double expect = o.cylinder(*sys, s);
        CHECK(std::abs(gibbs_cylinder(d, s) - expect) < 1e-12);
        CHECK(std::abs(gibbs_cylinder_direct(d, s) - expect) < 1e-12);
        total += expect;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("kernel is stochastic and preserves mu") {
  const auto spec = testing_models::chain_memory1();
  auto sys = build_system(spec);
  const RpfData d = rpf(build_potential(sys, spec.f));
  const int n = sys->num_states();
  std::vector<double> pushed(n, 0.0);
  for (int x = 0; x < n; ++x) {
    double row = 0;
    for (int y : sys->successors(x)) {
      row += d.kernel(x, y);
      pushed[y] += d.mu[x] * d.kernel(x, y);
    }
    CHECK(std::abs(row - 1.0) < 1e-12);
  }
  for (int y = 0; y < n; ++y) CHECK(pushed[y] == doctest::Approx(d.mu[y]).epsilon(1e-12));
}

TEST_CASE("periodic sums approach the pressure") {
  const auto spec = testing_models::three_symbol();
  auto sys = build_system(spec);
  const RealPotential phi = build_potential(sys, spec.f);
  const double p = rpf(phi).pressure;
  CHECK(std::abs(periodic_pressure(phi, 10) - p) < 1e-3);
  CHECK(std::abs(periodic_pressure(phi, 12) - p) < 1e-10);
}

TEST_CASE("complex spectrum and decay") {
  const auto spec = testing_models::golden();
  auto sys = build_system(spec);
  RealPotential f = build_potential(sys, spec.f);
  const double p = rpf(f).pressure;
  for (int i = 0; i < f.size(); ++i) f[i] -= p;
  const RealPotential tau = build_potential(sys, spec.tau);
  const ComplexPotential base = f.cast<cplx>();
  CHECK(complex_spectrum(base).spectral_radius == doctest::Approx(1.0).epsilon(1e-12));
  const ComplexPotential twisted = base + cplx(0, 5.0) * tau.cast<cplx>();
  const double radius = complex_spectrum(twisted).spectral_radius;
  CHECK(radius < 1.0);
  const double rho = fitted_decay_ratio(iterate_decay(twisted, CVec::Ones(sys->num_states()), 200));
  CHECK(rho == doctest::Approx(radius).epsilon(1e-4));
}

TEST_CASE("leading eigen triple normalisation") {
  const auto spec = testing_models::three_symbol();
  auto sys = build_system(spec);
  const ComplexPotential phi = build_potential(sys, spec.f).cast<cplx>() + cplx(0, 0.3) * build_potential(sys, spec.tau).cast<cplx>();
  const Matrix<cplx> m = build_matrix(phi);
  const EigenTriple e = leading_eigen(m);
  CHECK(std::abs(e.nu.cwiseProduct(e.h).sum() - cplx(1, 0)) < 1e-12);
  CHECK((m * e.h - e.lambda * e.h).norm() < 1e-10);
}

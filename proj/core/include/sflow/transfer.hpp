#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sflow/shift.hpp"

namespace sflow {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

// M(y, x) = exp(phi(x)) whenever window x shifts onto window y, so that
// (M v)(y) = sum over preimages x of exp(phi(x)) v(x).
template <class T>
Matrix<T> build_matrix(const CylinderPotential<T>& phi) {
  const auto& sys = *phi.system();
  const int n = sys.num_states();
  Matrix<T> m = Matrix<T>::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    const T w = std::exp(phi[x]);
    for (int y : sys.successors(x)) m(y, x) = w;
  }
  return m;
}

struct RpfOptions {
  double tolerance = 1e-12;
  int max_iterations = 100000;
};

struct RpfData {
  RealPotential phi;
  double lambda = 0;
  double pressure = 0;
  Vec h;   // M h = lambda h, sum h nu = 1
  Vec nu;  // M^T nu = lambda nu, sum nu = 1
  Vec mu;  // h * nu
  int iterations = 0;
  double residual = 0;

  // Stationary forward chain on windows; each row sums to one.
  double kernel(int x, int y) const { return std::exp(phi[x]) * nu[y] / (lambda * nu[x]); }
  double integral(const RealPotential& psi) const;
};

RpfData rpf(const RealPotential& phi, const RpfOptions& opts = {});

// mu of the cylinder fixed by word (any admissible length >= 1).
double gibbs_cylinder(const RpfData& data, const Symbols& word);

// Brute-force cylinder weight h(x0) exp(S_n phi - n Pr) nu(x_n) for a word
// of exactly n + m + 1 symbols.
double gibbs_cylinder_direct(const RpfData& data, const Symbols& word);

struct Spectrum {
  double spectral_radius = 0;
  std::vector<cplx> eigenvalues;  // sorted by decreasing modulus
};

Spectrum complex_spectrum(const ComplexPotential& phi, int dimension_cap = 4096);

// sup |L^j h0| for j = 1..steps.
std::vector<double> iterate_decay(const ComplexPotential& phi, const CVec& h0, int steps);

// Least-squares geometric rate over the tail half of a decay sequence.
double fitted_decay_ratio(const std::vector<double>& seq);

// Leading (largest modulus or nearest to target) eigen-triple of a complex
// transfer matrix, normalised so that nu^T h = 1.
struct EigenTriple {
  cplx lambda;
  CVec h;
  CVec nu;
};
EigenTriple leading_eigen(const Matrix<cplx>& m, const cplx* target = nullptr);

// Pressure via periodic sums: (1/n) log sum over period-n words of exp(S_n phi).
double periodic_pressure(const RealPotential& phi, int n);

}  // namespace sflow

#include "sflow/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sflow {
namespace {

// Normalised power iteration; returns (lambda, vector with sup norm 1).
std::pair<double, Vec> power_iterate(const Eigen::MatrixXd& m, const RpfOptions& opts, int& iters, double& resid) {
  Vec v = Vec::Ones(m.rows());
  double lambda = 0;
  for (iters = 1; iters <= opts.max_iterations; ++iters) {
    Vec w = m * v;
    lambda = w.lpNorm<Eigen::Infinity>();
    if (!(lambda > 0) || !std::isfinite(lambda)) break;
    w /= lambda;
    Vec r = m * w - lambda * w;
    resid = r.lpNorm<Eigen::Infinity>();
    v = w;
    if (resid <= opts.tolerance * lambda * 0.5 && iters > 2) return {lambda, v};
  }
  throw Error(ErrorKind::NoConvergence, "power iteration did not reach the residual tolerance");
}

}  // namespace

double RpfData::integral(const RealPotential& psi) const {
  double acc = 0;
  for (int s = 0; s < psi.size(); ++s) acc += mu[s] * psi[s];
  return acc;
}

RpfData rpf(const RealPotential& phi, const RpfOptions& opts) {
  const Eigen::MatrixXd m = build_matrix(phi);
  RpfData d;
  d.phi = phi;
  int it1 = 0, it2 = 0;
  double r1 = 0, r2 = 0;
  auto [lam, h] = power_iterate(m, opts, it1, r1);
  auto [lam2, nu] = power_iterate(m.transpose(), opts, it2, r2);
  (void)lam2;
  if ((h.array() <= 0).any() || (nu.array() <= 0).any())
    throw Error(ErrorKind::NoConvergence, "leading eigenvector is not strictly positive");
  nu /= nu.sum();
  h /= h.dot(nu);
  d.lambda = lam;
  d.pressure = std::log(lam);
  d.h = h;
  d.nu = nu;
  d.mu = h.cwiseProduct(nu);
  d.iterations = std::max(it1, it2);
  d.residual = (m * h - lam * h).lpNorm<Eigen::Infinity>() / h.lpNorm<Eigen::Infinity>();
  return d;
}

double gibbs_cylinder(const RpfData& d, const Symbols& word) {
  const auto& sys = *d.phi.system();
  if (word.empty() || !sys.admissible(word)) throw Error(ErrorKind::InadmissibleWord, sys.to_string(word));
  const int L = static_cast<int>(word.size());
  const int wl = sys.window_length();
  if (L < wl) {
    double acc = 0;
    for (int s = 0; s < sys.num_states(); ++s) {
      const Symbols& st = sys.state_symbols(s);
      if (std::equal(word.begin(), word.end(), st.begin())) acc += d.mu[s];
    }
    return acc;
  }
  int x = sys.state_at(word, 0);
  double p = d.mu[x];
  for (int j = 1; j + wl <= L; ++j) {
    int y = sys.state_at(word, j);
    p *= d.kernel(x, y);
    x = y;
  }
  return p;
}

double gibbs_cylinder_direct(const RpfData& d, const Symbols& word) {
  const auto& sys = *d.phi.system();
  const int n = static_cast<int>(word.size()) - sys.window_length();
  if (n < 0) throw Error(ErrorKind::WindowOverrun, "word shorter than one window");
  if (!sys.admissible(word)) throw Error(ErrorKind::InadmissibleWord, sys.to_string(word));
  const double s = birkhoff_sum(d.phi, word, n);
  return d.h[sys.state_at(word, 0)] * std::exp(s - n * d.pressure) * d.nu[sys.state_at(word, n)];
}

Spectrum complex_spectrum(const ComplexPotential& phi, int dimension_cap) {
  if (phi.size() > dimension_cap) throw Error(ErrorKind::DimensionCap, "transfer matrix too large for dense eigensolve");
  Eigen::ComplexEigenSolver<Matrix<cplx>> es(build_matrix(phi), false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "complex eigensolver failed");
  Spectrum out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.eigenvalues.push_back(es.eigenvalues()[i]);
  std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end(),
                   [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  out.spectral_radius = out.eigenvalues.empty() ? 0.0 : std::abs(out.eigenvalues.front());
  return out;
}

std::vector<double> iterate_decay(const ComplexPotential& phi, const CVec& h0, int steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "need at least one step");
  const Matrix<cplx> m = build_matrix(phi);
  std::vector<double> out;
  CVec v = h0;
  for (int j = 1; j <= steps; ++j) {
    v = m * v;
    out.push_back(v.cwiseAbs().maxCoeff());
  }
  return out;
}

double fitted_decay_ratio(const std::vector<double>& seq) {
  // Slope of log |L^j h| against j over the second half.
  const int n = static_cast<int>(seq.size());
  const int start = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int j = start; j < n; ++j) {
    if (!(seq[j] > 0)) return 0.0;
    double x = j, y = std::log(seq[j]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return seq.size() >= 2 ? seq.back() / seq[seq.size() - 2] : 1.0;
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return std::exp(slope);
}

EigenTriple leading_eigen(const Matrix<cplx>& m, const cplx* target) {
  auto pick = [&](const CVec& ev, cplx ref, bool by_ref) {
    int best = 0;
    for (int i = 1; i < ev.size(); ++i) {
      bool better = by_ref ? std::abs(ev[i] - ref) < std::abs(ev[best] - ref) : std::abs(ev[i]) > std::abs(ev[best]);
      if (better) best = i;
    }
    return best;
  };
  Eigen::ComplexEigenSolver<Matrix<cplx>> right(m);
  Eigen::ComplexEigenSolver<Matrix<cplx>> left(m.transpose());
  if (right.info() != Eigen::Success || left.info() != Eigen::Success)
    throw Error(ErrorKind::NoConvergence, "complex eigensolver failed");
  int i = pick(right.eigenvalues(), target ? *target : cplx{}, target != nullptr);
  EigenTriple t;
  t.lambda = right.eigenvalues()[i];
  int j = pick(left.eigenvalues(), t.lambda, true);
  t.h = right.eigenvectors().col(i);
  t.nu = left.eigenvectors().col(j);
  cplx pair = t.nu.transpose() * t.h;
  if (std::abs(pair) < 1e-300) throw Error(ErrorKind::NoConvergence, "left and right eigenvectors are orthogonal");
  t.nu /= pair;
  return t;
}

double periodic_pressure(const RealPotential& phi, int n) {
  const auto& sys = *phi.system();
  double maxv = -1e300;
  std::vector<double> sums;
  for (const Word& w : periodic_orbits(sys, n)) {
    sums.push_back(cyclic_birkhoff_sum(phi, sys.decode(w)));
    maxv = std::max(maxv, sums.back());
  }
  double acc = 0;
  for (double s : sums) acc += std::exp(s - maxv);
  return (maxv + std::log(acc)) / n;
}

}  // namespace sflow

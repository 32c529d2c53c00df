#include "sflow/ldp.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace sflow {

LdpPrediction predicted_density(const Level& lv, double c_a, double epsilon, int n, int q, double T, double eta) {
  if (T < n - q) throw Error(ErrorKind::InvalidArgument, "need T >= n - q");
  LdpPrediction p;
  p.a = lv.a;
  p.epsilon = epsilon;
  p.n = n;
  p.q = q;
  p.T = T;
  p.eps_n = std::exp(-epsilon * n);
  p.c_a = c_a;
  p.gamma = lv.gamma;
  p.beta_second = lv.beta_second;
  p.value = std::sqrt(2.0) * p.eps_n * c_a * std::exp(lv.gamma * T) / std::sqrt(std::numbers::pi * T * lv.beta_second);
  p.eta = eta;
  p.lower = p.value * (1 - eta);
  p.upper = p.value * (1 + eta);
  return p;
}

ZetaBand zeta_band(const Level& lv, double c_a, double epsilon, double T, double eta) {
  ZetaBand b;
  b.T = T;
  b.center = std::sqrt(2.0) * std::exp(-epsilon * T) * c_a * std::exp(lv.gamma * T) /
             std::sqrt(std::numbers::pi * T * lv.beta_second);
  b.lower = std::exp(-epsilon) * b.center * (1 - eta);
  b.upper = std::exp(epsilon) * b.center * (1 + eta);
  return b;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::DirectMC: return "direct-mc";
    case Method::TiltedMC: return "tilted-mc";
  }
  return "unknown";
}

namespace {
// 0 at t <= 0, 1 at t >= 1, C-infinity in between.
double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}
}  // namespace

double MollifierSpec::upper(double x) const {
  const double r = std::abs(x);
  if (r <= 1) return 1;
  return 1 - smooth_step((r - 1) / delta);
}

double MollifierSpec::lower(double x) const {
  const double r = std::abs(x);
  if (r >= 1) return 0;
  return 1 - smooth_step((r - (1 - delta)) / delta);
}

LdpEstimate exact_estimate(const SuspensionModel& model, double a, double epsilon, int n, double T) {
  LdpEstimate e;
  e.method = Method::Exact;
  e.estimate = exact_interval_measure(model, a, std::exp(-epsilon * n), {T})[0];
  e.smooth_lower = e.smooth_upper = e.estimate;
  return e;
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n) {
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n), p = k / nn;
  const double denom = 1 + z * z / nn;
  const double center = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {center - half, center + half};
}

namespace {

struct Accum {
  double sum = 0, sum2 = 0, lo = 0, hi = 0;
  std::uint64_t hits = 0;
};

// log-likelihood ratio dm_F / dm_tilted along a sampled segment.
struct Reweighter {
  const SuspensionModel* base;
  const SuspensionModel* tilted;
  double operator()(const FlowSegment& seg) const {
    const int x0 = seg.states.front();
    double lr = std::log(base->gibbs.mu[x0] / base->mean_roof) - std::log(tilted->gibbs.mu[x0] / tilted->mean_roof);
    for (size_t j = 1; j < seg.states.size(); ++j) {
      const int x = seg.states[j - 1], y = seg.states[j];
      lr += std::log(base->gibbs.kernel(x, y)) - std::log(tilted->gibbs.kernel(x, y));
    }
    return lr;
  }
};

}  // namespace

LdpEstimate mc_estimate_width(const SuspensionModel& model, double a, double half_width, double T, const McOptions& opts) {
  if (opts.samples == 0 || opts.shards < 1) throw Error(ErrorKind::InvalidArgument, "need a positive sample count");
  SuspensionModel tilted;
  const SuspensionModel* sampling = &model;
  if (opts.tilt) {
    tilted = normalize_model(model.f + opts.tilt_param * model.g, model.tau, model.ghat);
    sampling = &tilted;
  }
  const FlowSampler sampler(*sampling);
  const Reweighter rw{&model, sampling};

  std::vector<Accum> acc(opts.shards);
  auto run_shard = [&](int shard) {
    std::uint64_t count = opts.samples / opts.shards + (static_cast<std::uint64_t>(shard) < opts.samples % opts.shards ? 1 : 0);
    Rng rng = make_stream(opts.seed, static_cast<std::uint64_t>(shard));
    Accum& A = acc[shard];
    for (std::uint64_t i = 0; i < count; ++i) {
      const FlowPoint p = sampler.sample_point(rng);
      const FlowSegment seg = flow_segment(sampler, p, T, rng);
      const double x = (seg.integral - a * T) / half_width;
      const double chi_hi = opts.mollifier.upper(x);
      if (chi_hi == 0) continue;
      const double w = opts.tilt ? std::exp(rw(seg)) : 1.0;
      const double ind = std::abs(x) < 1 ? 1.0 : 0.0;
      A.hits += static_cast<std::uint64_t>(ind);
      A.sum += w * ind;
      A.sum2 += w * w * ind;
      A.lo += w * opts.mollifier.lower(x);
      A.hi += w * chi_hi;
    }
  };
  const int workers = std::max(1, std::min(opts.workers, opts.shards));
  if (workers == 1) {
    for (int s = 0; s < opts.shards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int s = w; s < opts.shards; s += workers) run_shard(s);
      });
    for (auto& t : pool) t.join();
  }
  Accum tot;
  for (const auto& A : acc) {  // fixed merge order
    tot.sum += A.sum;
    tot.sum2 += A.sum2;
    tot.lo += A.lo;
    tot.hi += A.hi;
    tot.hits += A.hits;
  }
  const double n = static_cast<double>(opts.samples);
  LdpEstimate e;
  e.method = opts.tilt ? Method::TiltedMC : Method::DirectMC;
  e.samples = opts.samples;
  e.seed = opts.seed;
  e.hits = tot.hits;
  e.estimate = tot.sum / n;
  e.smooth_lower = tot.lo / n;
  e.smooth_upper = tot.hi / n;
  if (opts.tilt) {
    const double var = std::max(0.0, tot.sum2 / n - e.estimate * e.estimate);
    e.half_width = 1.959963984540054 * std::sqrt(var / n);
  } else {
    auto [lo, hi] = wilson_interval(tot.hits, opts.samples);
    e.half_width = 0.5 * (hi - lo);
  }
  if (tot.hits == 0)
    throw Error(ErrorKind::ZeroHits, "no sample landed in the interval; Wilson upper bound " +
                                         std::to_string(wilson_interval(0, opts.samples).second));
  return e;
}

LdpEstimate mc_estimate(const SuspensionModel& model, double a, double epsilon, int n, double T, const McOptions& opts) {
  return mc_estimate_width(model, a, std::exp(-epsilon * n), T, opts);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ZetaReport zeta_experiment(const SuspensionModel& model, const Level& lv, double c_a, double epsilon,
                           const std::vector<double>& T_grid, double eta) {
  std::vector<double> widths;
  for (double T : T_grid) widths.push_back(std::exp(-epsilon * T));
  const std::vector<double> z = exact_interval_measure(model, lv.a, widths, T_grid);
  ZetaReport rep;
  std::vector<double> logs;
  for (size_t i = 0; i < T_grid.size(); ++i) {
    const ZetaBand b = zeta_band(lv, c_a, epsilon, T_grid[i], eta);
    ZetaRow r;
    r.T = T_grid[i];
    r.zeta = z[i];
    r.lower = b.lower;
    r.upper = b.upper;
    r.ratio = z[i] / b.center;
    r.in_band = z[i] >= b.lower && z[i] <= b.upper;
    rep.rows.push_back(r);
    logs.push_back(std::log(std::max(z[i], 1e-300)));
  }
  if (T_grid.size() >= 2) rep.slope = fit_slope(T_grid, logs);
  return rep;
}

}  // namespace sflow

#include "sflow/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <numbers>
#include <thread>

#include "json.hpp"
#include "sflow/laplace.hpp"
#include "sflow/ldp.hpp"
#include "sflow/rate.hpp"
#include "sflow/tauberian.hpp"

#ifndef SFLOW_VERSION
#define SFLOW_VERSION "0.0.0"
#endif

namespace sflow {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version_string() { return std::string("sflow ") + SFLOW_VERSION; }

bool ExperimentResult::passed() const {
  if (!error.empty()) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

bool RunReport::passed() const {
  for (const auto& e : experiments)
    if (!e.passed()) return false;
  return true;
}

int workers_from_env(int fallback) {
  if (const char* s = std::getenv("SFLOW_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
  }
  return fallback;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

void add_check(ExperimentResult& r, std::string name, bool ok, std::string detail = {}) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

double resolve_a(const SuspensionModel& model, double a) { return std::isnan(a) ? model.a_star : a; }

void pressure_table(const SuspensionModel& m, ExperimentResult& r) {
  r.columns = {"window", "f", "tau", "Ghat", "h", "nu", "mu"};
  const auto& sys = *m.sys;
  double total = 0;
  for (int s = 0; s < sys.num_states(); ++s) {
    r.rows.push_back({sys.to_string(sys.state_symbols(s)), num(m.f[s]), num(m.tau[s]), num(m.ghat[s]),
                      num(m.gibbs.h[s]), num(m.gibbs.nu[s]), num(m.gibbs.mu[s])});
    total += m.gibbs.mu[s];
  }
  r.scalars = {{"flow_pressure_shift", m.shift}, {"mean_roof", m.mean_roof}, {"a_star", m.a_star},
               {"normalised_pressure", m.gibbs.pressure}};
  add_check(r, "mu_sums_to_one", std::abs(total - 1) < 1e-12, num(total));
  add_check(r, "normalised_pressure_zero", std::abs(m.gibbs.pressure) < 1e-10, num(m.gibbs.pressure));
}

void rate_scan_exp(const SuspensionModel& m, const ExperimentSpec& e, ExperimentResult& r) {
  std::vector<double> as;
  for (double a : e.a_list) as.push_back(resolve_a(m, a));
  const RateProfile p = rate_scan(m, e.t_grid, as);
  r.columns = {"section", "x", "beta", "beta_prime", "beta_second", "xi", "gamma"};
  bool convex = true, gamma_ok = true;
  for (const auto& t : p.t_rows) {
    r.rows.push_back({"t", num(t.t), num(t.beta), num(t.beta_prime), num(t.beta_second), "", ""});
    convex = convex && t.beta_second > 0;
  }
  for (const auto& a : p.a_rows) {
    r.rows.push_back({"a", num(a.a), "", "", num(a.beta_second_at_xi), num(a.xi), num(a.gamma)});
    gamma_ok = gamma_ok && a.gamma <= 1e-10;
  }
  r.scalars = {{"gamma_domain_lo", p.domain.lo}, {"gamma_domain_hi", p.domain.hi}};
  add_check(r, "beta_convex", convex);
  add_check(r, "gamma_nonpositive", gamma_ok);
}

void pole_curve_exp(const SuspensionModel& m, const ExperimentSpec& e, ExperimentResult& r) {
  r.columns = {"a", "omega", "re_s", "im_s"};
  for (double a0 : e.a_list) {
    const double a = resolve_a(m, a0);
    const Level lv = level_data(m, a);
    const PoleData pd = pole_curve(m, lv, e.omega_grid);
    for (size_t i = 0; i < pd.omega.size(); ++i)
      r.rows.push_back({num(a), num(pd.omega[i]), num(pd.s[i].real()), num(pd.s[i].imag())});
    const double gap = std::abs(pd.s0.real() - lv.gamma);
    add_check(r, "s0_equals_gamma a=" + num(a), gap <= 1e-8, num(gap));
    const double rel = std::abs(pd.curvature - lv.beta_second) / lv.beta_second;
    add_check(r, "curvature_equals_beta_second a=" + num(a), rel <= 1e-3, num(rel));
  }
}

void ldp_sweep(const SuspensionModel& m, const ExperimentSpec& e, std::uint64_t seed, const std::string& hash,
               int workers, ExperimentResult& r) {
  r.columns = {"model_hash", "a", "epsilon", "n", "q", "T", "method", "estimate", "ci_half_width",
               "prediction", "ratio", "seed", "wall_time"};
  for (double a0 : e.a_list) {
    const double a = resolve_a(m, a0);
    const Level lv = level_data(m, a);
    const double c_a = residue_C(m, lv).c_a;
    for (double T : e.T_grid) {
      const auto t0 = std::chrono::steady_clock::now();
      const int n = std::max(1, static_cast<int>(std::floor(T))) + e.q;
      const LdpPrediction pred = predicted_density(lv, c_a, e.epsilon, n, e.q, T, e.eta);
      LdpEstimate est;
      if (e.method == "exact") {
        est = exact_estimate(m, a, e.epsilon, n, T);
      } else {
        McOptions o;
        o.samples = e.samples;
        o.seed = seed;
        o.workers = workers;
        o.tilt = e.method == "tilted";
        o.tilt_param = lv.xi;
        est = mc_estimate(m, a, e.epsilon, n, T, o);
      }
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double ratio = est.estimate / pred.value;
      r.rows.push_back({hash, num(a), num(e.epsilon), num(n), num(e.q), num(T), to_string(est.method),
                        num(est.estimate), num(est.half_width), num(pred.value), num(ratio), num(seed), num(wall)});
      add_check(r, "ratio_in_band a=" + num(a) + " T=" + num(T), std::abs(ratio - 1) <= e.eta, num(ratio));
    }
  }
}

void zeta_exp(const SuspensionModel& m, const ExperimentSpec& e, ExperimentResult& r) {
  r.columns = {"a", "T", "zeta", "lower", "upper", "ratio", "in_band"};
  for (double a0 : e.a_list) {
    const double a = resolve_a(m, a0);
    const Level lv = level_data(m, a);
    const double c_a = residue_C(m, lv).c_a;
    const ZetaReport z = zeta_experiment(m, lv, c_a, e.epsilon, e.T_grid, e.eta);
    bool all = true;
    for (const auto& row : z.rows) {
      r.rows.push_back({num(a), num(row.T), num(row.zeta), num(row.lower), num(row.upper), num(row.ratio),
                        row.in_band ? "1" : "0"});
      all = all && row.in_band;
    }
    r.scalars.push_back({"log_slope a=" + num(a), z.slope});
    add_check(r, "zeta_in_band a=" + num(a), all);
  }
}

void tauberian_exp(const ExperimentSpec& e, ExperimentResult& r) {
  const LaplaceFamily fam = e.family == "equality"    ? equality_family()
                            : e.family == "perturbed" ? perturbed_family()
                                                      : oscillating_family();
  const TauberReport rep = verify_tauberian(fam, e.q, e.eta, e.n_grid);
  r.columns = {"n", "t", "g_n", "predicted", "ratio", "in_band"};
  for (const auto& row : rep.rows) {
    const double pred = fam.A(row.n) * std::exp(row.t) / std::sqrt(std::numbers::pi * row.t);
    r.rows.push_back({num(row.n), num(row.t), num(pred * row.ratio), num(pred), num(row.ratio), row.in_band ? "1" : "0"});
  }
  r.scalars = {{"onset", static_cast<double>(rep.onset)}};
  if (e.family == "equality")
    add_check(r, "equality_all_in_band", rep.all_in_band);
  else
    add_check(r, "onset_found", rep.onset >= 0, num(rep.onset));
}

void decay_exp(const SuspensionModel& m, const ExperimentSpec& e, ExperimentResult& r) {
  r.columns = {"b", "rho"};
  const ComplexPotential f = m.f.cast<cplx>();
  const ComplexPotential tau = m.tau.cast<cplx>();
  const CVec ones = CVec::Ones(m.sys->num_states());
  for (double b : e.b_list) {
    const double rho = fitted_decay_ratio(iterate_decay(f + cplx(0, b) * tau, ones, e.steps));
    r.rows.push_back({num(b), num(rho)});
    if (b == 0)
      add_check(r, "b=0 ratio near 1", std::abs(rho - 1) < 1e-6, num(rho));
    else
      add_check(r, "b=" + num(b) + " decays", rho < 0.999, num(rho));
  }
}

}  // namespace

ExperimentResult run_experiment(const SuspensionModel& model, const ExperimentSpec& spec, std::uint64_t seed,
                                const std::string& config_hash, int workers) {
  ExperimentResult r;
  r.name = spec.name;
  r.kind = spec.kind;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (spec.kind == "pressure_table") pressure_table(model, r);
    else if (spec.kind == "rate_scan") rate_scan_exp(model, spec, r);
    else if (spec.kind == "pole_curve") pole_curve_exp(model, spec, r);
    else if (spec.kind == "ldp_sweep") ldp_sweep(model, spec, seed, config_hash, workers, r);
    else if (spec.kind == "zeta_experiment") zeta_exp(model, spec, r);
    else if (spec.kind == "tauberian") tauberian_exp(spec, r);
    else if (spec.kind == "decay") decay_exp(model, spec, r);
    else throw Error(ErrorKind::InvalidArgument, "unknown experiment kind " + spec.kind);
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunReport run_experiments(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunReport rep;
  rep.config_hash = cfg.hash;
  rep.version = version_string();
  rep.random_seed = cfg.random_seed && !opts.seed;
  rep.seed = opts.seed ? *opts.seed : cfg.random_seed ? std::random_device{}() : cfg.seed;

  std::vector<const ExperimentSpec*> todo;
  for (const auto& e : cfg.experiments)
    if (opts.only.empty() || e.name == opts.only) todo.push_back(&e);
  if (todo.empty()) throw Error(ErrorKind::InvalidArgument, "no experiment named '" + opts.only + "'");

  const SuspensionModel model = build_model(cfg.model);
  rep.experiments.resize(todo.size());
  const int workers = std::max(1, opts.workers);
  const int outer = std::min<int>(workers, static_cast<int>(todo.size()));
  // Each experiment gets its own seed stream so results do not depend on scheduling.
  auto run_one = [&](size_t i) {
    const std::uint64_t s = make_stream(rep.seed, i)();
    rep.experiments[i] = run_experiment(model, *todo[i], s, rep.config_hash, std::max(1, workers / outer));
  };
  if (outer <= 1) {
    for (size_t i = 0; i < todo.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < outer; ++w)
      pool.emplace_back([&] {
        for (size_t i; (i = next.fetch_add(1)) < todo.size();) run_one(i);
      });
    for (auto& t : pool) t.join();
  }
  return rep;
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

void write_report(const RunReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  json j;
  j["config_hash"] = report.config_hash;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["random_seed"] = report.random_seed;
  j["passed"] = report.passed();
  j["experiments"] = json::array();
  for (const auto& e : report.experiments) {
    std::ostringstream csv;
    for (size_t c = 0; c < e.columns.size(); ++c) csv << (c ? "," : "") << csv_field(e.columns[c]);
    csv << "\n";
    for (const auto& row : e.rows) {
      for (size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << csv_field(row[c]);
      csv << "\n";
    }
    write_atomic(fs::path(out_dir) / (e.name + ".csv"), csv.str());

    json je;
    je["name"] = e.name;
    je["kind"] = e.kind;
    je["csv"] = e.name + ".csv";
    je["rows"] = e.rows.size();
    je["wall_seconds"] = e.wall_seconds;
    je["passed"] = e.passed();
    if (!e.error.empty()) je["error"] = e.error;
    je["scalars"] = json::object();
    for (const auto& [k, v] : e.scalars) je["scalars"][k] = v;
    je["checks"] = json::array();
    for (const auto& c : e.checks) je["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["experiments"].push_back(je);
  }
  write_atomic(fs::path(out_dir) / "report.json", j.dump(2) + "\n");
}

std::string summarize_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  std::ostringstream os;
  os << j.value("version", "?") << "  config " << j.value("config_hash", "?") << "  seed " << j.value("seed", 0ull)
     << "\n";
  for (const auto& e : j.value("experiments", json::array())) {
    os << (e.value("passed", false) ? "PASS " : "FAIL ") << e.value("name", "?") << " (" << e.value("kind", "?")
       << ", " << e.value("rows", 0) << " rows, " << e.value("wall_seconds", 0.0) << " s)\n";
    if (e.contains("error")) os << "     error: " << e["error"].get<std::string>() << "\n";
    for (const auto& c : e.value("checks", json::array()))
      if (!c.value("passed", false)) os << "     failed: " << c.value("name", "?") << " " << c.value("detail", "") << "\n";
  }
  os << (j.value("passed", false) ? "all checks passed\n" : "some checks failed\n");
  return os.str();
}

}  // namespace sflow

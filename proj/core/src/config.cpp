#include "sflow/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sflow {

using nlohmann::json;

namespace {

const std::set<std::string> kKinds = {"pressure_table", "rate_scan", "pole_curve", "ldp_sweep",
                                      "zeta_experiment", "tauberian", "decay"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

class Checker {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& where, const std::string& msg) { errors.push_back(where + ": " + msg); }

  const json* field(const json& obj, const std::string& key, const std::string& where, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(where, "missing field '" + key + "'");
      return nullptr;
    }
    return &*it;
  }

  bool number(const json* v, const std::string& where, double& out) {
    if (!v) return false;
    if (!v->is_number()) {
      fail(where, "expected a number");
      return false;
    }
    out = v->get<double>();
    if (!std::isfinite(out)) {
      fail(where, "not finite");
      return false;
    }
    return true;
  }

  bool integer(const json* v, const std::string& where, long long& out) {
    if (!v) return false;
    if (!v->is_number_integer()) {
      fail(where, "expected an integer");
      return false;
    }
    out = v->get<long long>();
    return true;
  }

  // List of numbers, or {"from", "to", "step"}.
  std::vector<double> grid(const json* v, const std::string& where) {
    std::vector<double> out;
    if (!v) return out;
    if (v->is_array()) {
      for (size_t i = 0; i < v->size(); ++i) {
        double x;
        if (number(&(*v)[i], where + "[" + std::to_string(i) + "]", x)) out.push_back(x);
      }
    } else if (v->is_object()) {
      double from = 0, to = 0, step = 0;
      const bool ok = number(field(*v, "from", where, true), where + ".from", from) &
                      number(field(*v, "to", where, true), where + ".to", to) &
                      number(field(*v, "step", where, true), where + ".step", step);
      if (!ok) return out;
      if (!(step > 0) || to < from) {
        fail(where, "need step > 0 and to >= from");
        return out;
      }
      const long long n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
      if (n > 1000000) {
        fail(where, "grid too large");
        return out;
      }
      for (long long i = 0; i <= n; ++i) out.push_back(from + i * step);
    } else {
      fail(where, "expected a list or {from, to, step}");
    }
    if (out.empty()) fail(where, "grid is empty");
    return out;
  }
};

PotentialSpec parse_potential(Checker& ck, const json* v, const std::string& where) {
  PotentialSpec p;
  if (!v) return p;
  auto table = [&](const json& obj, const std::string& w) {
    std::map<std::string, double> t;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      double x;
      if (ck.number(&it.value(), w + "." + it.key(), x)) t[it.key()] = x;
    }
    return t;
  };
  if (v->is_number()) {
    ck.number(v, where, p.constant);
  } else if (v->is_object() && v->size() == 1 && v->contains("log")) {
    const json& inner = (*v)["log"];
    if (!inner.is_object()) {
      ck.fail(where + ".log", "expected an object of word -> positive value");
      return p;
    }
    p.form = PotentialSpec::Form::LogTable;
    p.table = table(inner, where + ".log");
    for (const auto& [k, x] : p.table)
      if (!(x > 0)) ck.fail(where + ".log." + k, "log form needs a positive value");
  } else if (v->is_object()) {
    p.form = PotentialSpec::Form::Table;
    p.table = table(*v, where);
  } else {
    ck.fail(where, "expected a number, a word table, or {\"log\": table}");
  }
  return p;
}

ExperimentSpec parse_experiment(Checker& ck, const json& e, const std::string& where) {
  ExperimentSpec x;
  if (!e.is_object()) {
    ck.fail(where, "expected an object");
    return x;
  }
  if (const json* v = ck.field(e, "name", where, true)) {
    if (v->is_string()) x.name = v->get<std::string>();
    else ck.fail(where + ".name", "expected a string");
  }
  if (const json* v = ck.field(e, "kind", where, true)) {
    if (v->is_string() && kKinds.count(v->get<std::string>())) x.kind = v->get<std::string>();
    else ck.fail(where + ".kind", "unknown experiment kind");
  }
  const std::string& k = x.kind;
  const bool needs_a = k == "rate_scan" || k == "pole_curve" || k == "ldp_sweep" || k == "zeta_experiment";
  if (const json* v = ck.field(e, "a", where, needs_a)) {
    auto one = [&](const json& item, const std::string& w) {
      if (item.is_string() && item.get<std::string>() == "mean") {
        x.a_list.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        double a;
        if (ck.number(&item, w, a)) x.a_list.push_back(a);
      }
    };
    if (v->is_array()) {
      for (size_t i = 0; i < v->size(); ++i) one((*v)[i], where + ".a[" + std::to_string(i) + "]");
      if (v->empty()) ck.fail(where + ".a", "grid is empty");
    } else {
      one(*v, where + ".a");
    }
  }
  x.t_grid = ck.grid(ck.field(e, "t_grid", where, k == "rate_scan"), where + ".t_grid");
  x.omega_grid = ck.grid(ck.field(e, "omega_grid", where, k == "pole_curve"), where + ".omega_grid");
  x.T_grid = ck.grid(ck.field(e, "T_grid", where, k == "ldp_sweep" || k == "zeta_experiment"), where + ".T_grid");
  x.b_list = ck.grid(ck.field(e, "b_list", where, k == "decay"), where + ".b_list");
  for (double n : ck.grid(ck.field(e, "n_grid", where, k == "tauberian"), where + ".n_grid")) {
    if (n != std::floor(n) || n < 1) ck.fail(where + ".n_grid", "entries must be positive integers");
    else x.n_grid.push_back(static_cast<int>(n));
  }
  double d;
  long long i;
  if (ck.number(ck.field(e, "epsilon", where, false), where + ".epsilon", d)) {
    if (d > 0) x.epsilon = d;
    else ck.fail(where + ".epsilon", "must be positive");
  }
  if (ck.number(ck.field(e, "eta", where, false), where + ".eta", d)) {
    if (d > 0 && d < 1) x.eta = d;
    else ck.fail(where + ".eta", "must lie in (0, 1)");
  }
  if (ck.integer(ck.field(e, "q", where, false), where + ".q", i)) x.q = static_cast<int>(i);
  if (ck.integer(ck.field(e, "samples", where, false), where + ".samples", i)) {
    if (i > 0) x.samples = static_cast<std::uint64_t>(i);
    else ck.fail(where + ".samples", "must be positive");
  }
  if (ck.integer(ck.field(e, "steps", where, false), where + ".steps", i)) {
    if (i >= 4) x.steps = static_cast<int>(i);
    else ck.fail(where + ".steps", "need at least 4");
  }
  if (const json* v = ck.field(e, "method", where, false)) {
    if (v->is_string() && (*v == "exact" || *v == "mc" || *v == "tilted")) x.method = v->get<std::string>();
    else ck.fail(where + ".method", "expected exact, mc or tilted");
  }
  if (const json* v = ck.field(e, "family", where, false)) {
    if (v->is_string() && (*v == "equality" || *v == "perturbed" || *v == "derivative-bound"))
      x.family = v->get<std::string>();
    else ck.fail(where + ".family", "expected equality, perturbed or derivative-bound");
  }
  return x;
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    const size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (size_t j = 0; j < stop; ++j) {
      if (text[j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

ExperimentConfig check(const json& root, Checker& ck) {
  ExperimentConfig cfg;
  if (!root.is_object()) {
    ck.fail("config", "top level must be an object");
    return cfg;
  }
  const json* model = ck.field(root, "model", "config", true);
  if (model && !model->is_object()) {
    ck.fail("model", "expected an object");
    model = nullptr;
  }
  if (model) {
    ModelSpec& m = cfg.model;
    long long v = 0;
    if (ck.integer(ck.field(*model, "alphabet_size", "model", true), "model.alphabet_size", v)) {
      if (v < 2 || v > 36) ck.fail("model.alphabet_size", "must lie in 2..36");
      m.alphabet_size = static_cast<int>(v);
    }
    if (ck.integer(ck.field(*model, "memory", "model", false), "model.memory", v)) {
      if (v < 0 || v > 8) ck.fail("model.memory", "must lie in 0..8");
      m.memory = static_cast<int>(v);
    }
    if (const json* t = ck.field(*model, "transition", "model", false)) {
      bool shape = t->is_array() && static_cast<int>(t->size()) == m.alphabet_size;
      for (size_t r = 0; shape && r < t->size(); ++r) {
        const json& row = (*t)[r];
        if (!row.is_array() || static_cast<int>(row.size()) != m.alphabet_size) {
          shape = false;
          break;
        }
        std::vector<int> out;
        for (const auto& c : row) {
          if (!(c == 0 || c == 1)) {
            ck.fail("model.transition[" + std::to_string(r) + "]", "entries must be 0 or 1");
            break;
          }
          out.push_back(c.get<int>());
        }
        m.transition.push_back(out);
      }
      if (!shape) ck.fail("model.transition", "expected a k x k matrix");
    } else {
      m.transition.assign(m.alphabet_size, std::vector<int>(m.alphabet_size, 1));  // full shift
    }
    m.f = parse_potential(ck, ck.field(*model, "f", "model", false), "model.f");
    m.tau = parse_potential(ck, ck.field(*model, "tau", "model", true), "model.tau");
    m.ghat = parse_potential(ck, ck.field(*model, "Ghat", "model", true), "model.Ghat");
  }
  if (const json* s = ck.field(root, "seed", "config", false)) {
    if (s->is_string() && *s == "random") cfg.random_seed = true;
    else if (s->is_number_unsigned()) cfg.seed = s->get<std::uint64_t>();
    else ck.fail("seed", "expected a non-negative integer or \"random\"");
  }
  if (const json* ex = ck.field(root, "experiments", "config", true)) {
    if (!ex->is_array() || ex->empty()) {
      ck.fail("experiments", "expected a non-empty list");
    } else {
      std::set<std::string> names;
      for (size_t i = 0; i < ex->size(); ++i) {
        const std::string where = "experiments[" + std::to_string(i) + "]";
        ExperimentSpec e = parse_experiment(ck, (*ex)[i], where);
        if (!e.name.empty() && !names.insert(e.name).second) ck.fail(where + ".name", "duplicate name '" + e.name + "'");
        cfg.experiments.push_back(std::move(e));
      }
    }
  }
  // Model-level checks that need a built system.
  if (model && ck.errors.empty()) {
    try {
      SystemPtr sys = build_system(cfg.model);
      for (auto [spec, label] : {std::pair{&cfg.model.f, "model.f"}, {&cfg.model.tau, "model.tau"},
                                 {&cfg.model.ghat, "model.Ghat"}}) {
        try {
          RealPotential p = build_potential(sys, *spec);
          if (std::string(label) == "model.tau")
            for (double t : p.values())
              if (!(t > 0)) {
                ck.fail(label, "roof must be positive on every window");
                break;
              }
        } catch (const Error& e) {
          ck.fail(label, e.what());
        }
      }
    } catch (const Error& e) {
      ck.fail("model", e.what());
    }
  }
  cfg.hash = hex(fnv1a(root.dump()));
  return cfg;
}

}  // namespace

std::vector<std::string> validation_errors(const std::string& text) {
  Checker ck;
  try {
    check(parse_json(text, "<string>"), ck);
  } catch (const Error& e) {
    ck.errors.push_back(e.what());
  }
  return ck.errors;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const json root = parse_json(text, origin);
  Checker ck;
  ExperimentConfig cfg = check(root, ck);
  if (!ck.errors.empty()) {
    std::string msg = std::to_string(ck.errors.size()) + " problem(s) in " + origin;
    for (const auto& e : ck.errors) msg += "\n  " + e;
    throw Error(ErrorKind::ValidationError, msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

SystemPtr build_system(const ModelSpec& spec) {
  return SymbolicSystem::validate(spec.alphabet_size, spec.transition, spec.memory);
}

RealPotential build_potential(const SystemPtr& sys, const PotentialSpec& spec) {
  switch (spec.form) {
    case PotentialSpec::Form::Constant: return RealPotential::constant(sys, spec.constant);
    case PotentialSpec::Form::Table: return potential_from_table(sys, spec.table);
    case PotentialSpec::Form::LogTable: {
      std::map<std::string, double> logs;
      for (const auto& [k, v] : spec.table) logs[k] = std::log(v);
      return potential_from_table(sys, logs);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown potential form");
}

SuspensionModel build_model(const ModelSpec& spec) {
  SystemPtr sys = build_system(spec);
  return normalize_model(build_potential(sys, spec.f), build_potential(sys, spec.tau), build_potential(sys, spec.ghat));
}

}  // namespace sflow

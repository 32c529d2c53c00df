#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sflow/suspension.hpp"

namespace sflow {

struct PotentialSpec {
  enum class Form { Constant, Table, LogTable };
  Form form = Form::Constant;
  double constant = 0;
  std::map<std::string, double> table;  // word prefix -> value
};

struct ModelSpec {
  int alphabet_size = 2;
  std::vector<std::vector<int>> transition;
  int memory = 0;
  PotentialSpec f, tau, ghat;
};

// Entries of an a-list that read "mean" are stored as NaN and resolved to a*.
struct ExperimentSpec {
  std::string name;
  std::string kind;  // pressure_table rate_scan pole_curve ldp_sweep zeta_experiment tauberian decay
  std::vector<double> a_list;
  std::vector<double> t_grid;
  std::vector<double> omega_grid;
  std::vector<double> T_grid;
  std::vector<double> b_list;
  std::vector<int> n_grid;
  double epsilon = 0.05;
  double eta = 0.25;
  int q = 0;
  std::string method = "exact";  // exact, mc, tilted
  std::uint64_t samples = 100000;
  std::string family = "equality";
  int steps = 200;
};

struct ExperimentConfig {
  ModelSpec model;
  std::vector<ExperimentSpec> experiments;
  std::uint64_t seed = 1;
  bool random_seed = false;  // opt-in; the drawn seed goes into the report
  std::string hash;          // FNV-1a of the canonical JSON form
};

// Parse JSON text. ParseError carries line and column; ValidationError lists
// every problem found, one per line.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

// Same checks as parse_config, returned rather than thrown. Empty means valid.
std::vector<std::string> validation_errors(const std::string& text);

SystemPtr build_system(const ModelSpec& spec);
RealPotential build_potential(const SystemPtr& sys, const PotentialSpec& spec);
SuspensionModel build_model(const ModelSpec& spec);

}  // namespace sflow

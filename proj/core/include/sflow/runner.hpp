#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sflow/config.hpp"

namespace sflow {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<CheckResult> checks;
  std::string error;  // set when the experiment threw
  double wall_seconds = 0;
  bool passed() const;
};

struct RunReport {
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  bool random_seed = false;
  std::vector<ExperimentResult> experiments;
  bool passed() const;
};

struct RunOptions {
  int workers = 1;
  std::optional<std::uint64_t> seed;  // overrides the config
  std::string only;                   // run a single named experiment
};

// Worker count from SFLOW_WORKERS when set and positive, else `fallback`.
int workers_from_env(int fallback);

ExperimentResult run_experiment(const SuspensionModel& model, const ExperimentSpec& spec, std::uint64_t seed,
                                const std::string& config_hash, int workers = 1);
RunReport run_experiments(const ExperimentConfig& cfg, const RunOptions& opts = {});

// <out>/<experiment>.csv and <out>/report.json, each written to a temp file and renamed.
void write_report(const RunReport& report, const std::string& out_dir);

// Plain-text summary of a report.json written by write_report.
std::string summarize_report(const std::string& report_json_path);

std::string version_string();

}  // namespace sflow

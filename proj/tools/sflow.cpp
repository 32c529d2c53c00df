#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sflow/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Experiments on suspension flows over Markov shifts"};
  app.set_version_flag("--version", sflow::version_string());
  app.require_subcommand(1);

  std::string config, out = "out", experiment, report_path;
  int workers = 0;
  std::uint64_t seed = 0;

  auto* validate = app.add_subcommand("validate", "Check a config and list every problem");
  validate->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run experiments and write CSV and JSON reports");
  run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads (default: SFLOW_WORKERS or 1)")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--experiment", experiment, "Run only this experiment");

  auto* report = app.add_subcommand("report", "Summarise a report.json");
  report->add_option("--out", out, "Directory holding report.json")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      std::ifstream in(config);
      std::stringstream ss;
      ss << in.rdbuf();
      const auto errors = sflow::validation_errors(ss.str());
      for (const auto& e : errors) std::cerr << config << ": " << e << "\n";
      if (!errors.empty()) return 1;
      std::cout << config << ": ok (hash " << sflow::load_config(config).hash << ")\n";
      return 0;
    }
    if (*run) {
      const sflow::ExperimentConfig cfg = sflow::load_config(config);
      sflow::RunOptions opts;
      opts.workers = workers > 0 ? workers : sflow::workers_from_env(1);
      if (*seed_opt) opts.seed = seed;
      opts.only = experiment;
      const sflow::RunReport rep = sflow::run_experiments(cfg, opts);
      sflow::write_report(rep, out);
      std::cout << sflow::summarize_report(out + "/report.json");
      return rep.passed() ? 0 : 2;
    }
    if (*report) {
      std::cout << sflow::summarize_report(out + "/report.json");
      return 0;
    }
  } catch (const sflow::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

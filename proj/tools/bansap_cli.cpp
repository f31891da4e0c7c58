#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bansap/harness.hpp"

namespace {

void apply_output_dir_override(bansap::ExperimentConfig& config, const std::string& cli_override) {
  if (!cli_override.empty()) {
    config.output_dir = cli_override;
    return;
  }
  if (const char* env = std::getenv("BANSAP_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    config.output_dir = env;
  }
}

int report_errors(const bansap::ResultTable& table) {
  if (table.errors.empty()) return 0;
  for (const auto& err : table.errors) {
    std::cerr << "run failed: algorithm=" << err.algorithm << " seed=" << err.seed << ": "
              << err.message << '\n';
  }
  return 1;
}

void print_summary(const bansap::ResultTable& table) {
  for (const auto& row : table.summary) {
    std::cout << row.algorithm;
    if (!row.axis.empty()) std::cout << " [" << row.axis << "]";
    std::cout << "  " << row.metric << ": mean=" << row.mean << " std=" << row.stddev << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandit online saddle-point experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_flag;
  std::string axis_name;
  std::vector<std::string> axis_values;
  std::string snapshot_path;
  int runs_flag = 0;
  long horizon_flag = 0;

  CLI::App* cmd_run = app.add_subcommand("run", "run the experiment described by a config file");
  cmd_run->add_option("config", config_path, "experiment config file")->required();
  cmd_run->add_option("--output-dir", output_dir_flag, "override the output directory");
  cmd_run->add_option("--runs", runs_flag, "override the Monte-Carlo run count");
  cmd_run->add_option("--horizon", horizon_flag, "override the horizon");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run the config across an axis of values");
  cmd_sweep->add_option("config", config_path, "experiment config file")->required();
  cmd_sweep->add_option("--axis", axis_name, "sweep axis: M, scheme, or N")->required();
  cmd_sweep->add_option("--values", axis_values, "axis values")->required()->expected(-1);
  cmd_sweep->add_option("--output-dir", output_dir_flag, "override the output directory");
  cmd_sweep->add_option("--runs", runs_flag, "override the Monte-Carlo run count");
  cmd_sweep->add_option("--horizon", horizon_flag, "override the horizon");

  CLI::App* cmd_validate = app.add_subcommand("validate", "check a config file and exit");
  cmd_validate->add_option("config", config_path, "experiment config file")->required();

  CLI::App* cmd_replay = app.add_subcommand("replay", "re-run the experiment stored in an "
                                                      "instance snapshot");
  cmd_replay->add_option("snapshot", snapshot_path, "instance snapshot json")->required();
  cmd_replay->add_option("--output-dir", output_dir_flag, "override the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      bansap::ExperimentConfig config = bansap::load_config(config_path);
      apply_output_dir_override(config, output_dir_flag);
      if (runs_flag > 0) config.runs = runs_flag;
      if (horizon_flag > 0) config.horizon = horizon_flag;
      const bansap::ResultTable table = bansap::run_experiment(config);
      if (!table.empty()) bansap::emit_outputs(table, config.output_dir);
      print_summary(table);
      const int failed = report_errors(table);
      if (failed == 0) std::cout << "outputs written to " << config.output_dir << '\n';
      return failed;
    }
    if (cmd_sweep->parsed()) {
      bansap::ExperimentConfig config = bansap::load_config(config_path);
      apply_output_dir_override(config, output_dir_flag);
      if (runs_flag > 0) config.runs = runs_flag;
      if (horizon_flag > 0) config.horizon = horizon_flag;
      const bansap::SweepAxis axis = bansap::sweep_axis_from_string(axis_name);
      const bansap::ResultTable table = bansap::sweep(config, axis, axis_values);
      if (!table.empty()) bansap::emit_outputs(table, config.output_dir);
      print_summary(table);
      const int failed = report_errors(table);
      if (failed == 0) std::cout << "outputs written to " << config.output_dir << '\n';
      return failed;
    }
    if (cmd_validate->parsed()) {
      const bansap::ExperimentConfig config = bansap::load_config(config_path);
      bansap::validate_config(config);
      std::cout << "config ok: " << config.algorithms.size() << " algorithm(s), horizon "
                << config.horizon << ", " << config.runs << " run(s)\n";
      return 0;
    }
    if (cmd_replay->parsed()) {
      const bansap::InstanceSnapshot snapshot = bansap::load_instance_snapshot(snapshot_path);
      bansap::ExperimentConfig embedded = bansap::parse_config_text(snapshot.config_text);
      apply_output_dir_override(embedded, output_dir_flag);
      const bansap::ResultTable table = bansap::replay_snapshot(snapshot);
      if (!table.empty()) bansap::emit_outputs(table, embedded.output_dir + "/replay");
      print_summary(table);
      const int failed = report_errors(table);
      if (failed == 0) {
        std::cout << "replay outputs written to " << embedded.output_dir << "/replay\n";
      }
      return failed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

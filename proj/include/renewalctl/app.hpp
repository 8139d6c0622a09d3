#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "renewalctl/cli.hpp"

namespace renewalctl {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Exit codes: 0 success, 1 run failure, 2 configuration error.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"drift-plus-penalty control for variable-frame renewal systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_name;
  std::vector<double> v_list;
  std::uint64_t frames = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string emit;
  std::uint64_t window = 0;
  std::uint64_t jobs = 0;

  auto add_common = [&](CLI::App* cmd, bool with_outputs) {
    cmd->add_option("config", config_path, "JSON run configuration file");
    cmd->add_option("--scenario", scenario_name, "built-in scenario name");
    cmd->add_option("--V", v_list, "penalty weight(s) to run");
    cmd->add_option("--frames", frames, "horizon override in frames");
    cmd->add_option("--seed", seed, "RNG seed override");
    if (with_outputs) {
      cmd->add_option("--out", out_dir, "output directory");
      cmd->add_option("--emit", emit, "summary|trace|both");
      cmd->add_option("--window", window, "moving-average window in frames");
      cmd->add_option("--jobs", jobs, "parallel runs for V sweeps");
    }
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run scenarios and write summaries/traces");
  add_common(run_cmd, true);
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "print the offline optimum for the scenario's model");
  add_common(oracle_cmd, false);
  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const std::string& name : builtin_scenario_names()) log << name << '\n';
      return 0;
    }
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = parse_config(read_text_file(config_path));
      if (!scenario_name.empty()) {
        // flag overrides the file's scenario selection
        json j = json::parse(serialize_config(cfg));
        j["scenario"] = scenario_name;
        cfg = parse_config(j.dump());
      }
    } else if (!scenario_name.empty()) {
      json j;
      j["scenario"] = scenario_name;
      cfg = parse_config(j.dump());
    } else {
      throw ConfigError("config: give a config file or --scenario");
    }
    if (!v_list.empty()) cfg.v_list = v_list;
    for (double v : cfg.v_list)
      if (!(v >= 0.0)) throw ConfigError("config.V: must be non-negative");
    if (run_cmd->count("--frames") || oracle_cmd->count("--frames")) cfg.horizon = frames;
    if (run_cmd->count("--seed") || oracle_cmd->count("--seed")) cfg.seed = seed;
    if (run_cmd->count("--out")) cfg.out_dir = out_dir;
    if (run_cmd->count("--emit")) {
      if (emit == "summary") cfg.emit = RunConfig::Emit::summary;
      else if (emit == "trace") cfg.emit = RunConfig::Emit::trace;
      else if (emit == "both") cfg.emit = RunConfig::Emit::both;
      else throw ConfigError("config.emit: expected summary|trace|both, got '" + emit + "'");
    }
    if (run_cmd->count("--window")) cfg.window = window;
    if (run_cmd->count("--jobs")) {
      if (jobs == 0) throw ConfigError("config.jobs: must be at least 1");
      cfg.jobs = jobs;
    }

    if (oracle_cmd->parsed()) return print_oracle(cfg, log);
    return execute(cfg, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace renewalctl

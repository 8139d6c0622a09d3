#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "renewalctl/lfp.hpp"
#include "renewalctl/scenarios.hpp"
#include "renewalctl/sim.hpp"

namespace renewalctl {

using json = nlohmann::ordered_json;

// Schema violations carry the path of the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfgdetail {

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

inline void check_keys(const json& j, const std::vector<std::string>& allowed,
                       const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(path + "." + it.key() + ": unknown field");
  }
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline std::uint64_t unsigned_at(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ConfigError(path + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// matrix given as rows per class
inline std::vector<double> flatten_matrix(const json& j, const std::string& path,
                                          std::size_t& rows, std::size_t& cols) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a non-empty array of rows");
  rows = j.size();
  std::vector<double> flat;
  cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    std::vector<double> row = number_list(j[r], row_path);
    if (r == 0) cols = row.size();
    if (row.size() != cols) throw ConfigError(row_path + ": ragged row");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

inline NoiseSpec noise_spec_at(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, {"kind", "width"}, path);
  NoiseSpec spec;
  const std::string kind = string_at(j.at("kind"), path + ".kind");
  if (kind == "deterministic") spec.kind = NoiseKind::deterministic;
  else if (kind == "uniform") spec.kind = NoiseKind::uniform;
  else if (kind == "exponential_shifted") spec.kind = NoiseKind::exponential_shifted;
  else throw ConfigError(path + ".kind: unknown noise kind '" + kind + "'");
  if (j.contains("width")) spec.width = number_at(j.at("width"), path + ".width");
  return spec;
}

}  // namespace cfgdetail

// ---------------------------------------------------------------------------
// Scenario <-> JSON
// ---------------------------------------------------------------------------

inline TaskModel task_model_from_json(const json& j, const std::string& path) {
  using namespace cfgdetail;
  expect_object(j, path);
  check_keys(j,
             {"energy", "duration", "idle_max", "duration_min", "rates", "null_class",
              "null_duration", "null_energy", "noise"},
             path);
  TaskModelConfig cfg;
  std::size_t rows = 0, cols = 0, rows2 = 0, cols2 = 0;
  if (!j.contains("energy") || !j.contains("duration"))
    throw ConfigError(path + ": energy and duration tables are required");
  cfg.energy = flatten_matrix(j.at("energy"), path + ".energy", rows, cols);
  cfg.duration = flatten_matrix(j.at("duration"), path + ".duration", rows2, cols2);
  if (rows != rows2 || cols != cols2)
    throw ConfigError(path + ": energy and duration tables must have identical shape");
  cfg.num_classes = rows;
  cfg.num_modes = cols;
  if (j.contains("idle_max")) cfg.idle_max = number_at(j.at("idle_max"), path + ".idle_max");
  if (j.contains("duration_min"))
    cfg.duration_min = number_at(j.at("duration_min"), path + ".duration_min");
  if (j.contains("rates")) cfg.rates = number_list(j.at("rates"), path + ".rates");
  if (j.contains("null_class")) {
    if (!j.at("null_class").is_boolean()) throw ConfigError(path + ".null_class: expected a boolean");
    cfg.has_null_class = j.at("null_class").get<bool>();
  }
  if (j.contains("null_duration"))
    cfg.null_duration = number_at(j.at("null_duration"), path + ".null_duration");
  if (j.contains("null_energy"))
    cfg.null_energy = number_at(j.at("null_energy"), path + ".null_energy");
  if (j.contains("noise")) {
    const json& nj = j.at("noise");
    if (nj.is_array()) {
      for (std::size_t i = 0; i < nj.size(); ++i)
        cfg.noise.push_back(noise_spec_at(nj[i], path + ".noise[" + std::to_string(i) + "]"));
    } else {
      cfg.noise.push_back(noise_spec_at(nj, path + ".noise"));
    }
  }
  try {
    return build_task_model(cfg);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline json task_model_to_json(const TaskModel& m) {
  json j;
  json energy = json::array();
  json duration = json::array();
  for (std::size_t c = 1; c <= m.num_classes; ++c) {
    json erow = json::array();
    json drow = json::array();
    for (std::size_t mm = 1; mm <= m.num_modes; ++mm) {
      erow.push_back(m.mean_energy(c, mm));
      drow.push_back(m.mean_duration(c, mm));
    }
    energy.push_back(erow);
    duration.push_back(drow);
  }
  j["energy"] = energy;
  j["duration"] = duration;
  j["idle_max"] = m.idle_max;
  j["duration_min"] = m.duration_min;
  j["rates"] = m.rates;
  j["null_class"] = m.has_null_class;
  j["null_duration"] = m.null_duration;
  j["null_energy"] = m.null_energy;
  json noise = json::array();
  for (const NoiseSpec& ns : m.noise) {
    json nj;
    nj["kind"] = ns.kind == NoiseKind::deterministic        ? "deterministic"
                 : ns.kind == NoiseKind::uniform            ? "uniform"
                                                            : "exponential_shifted";
    nj["width"] = ns.width;
    noise.push_back(nj);
  }
  j["noise"] = noise;
  return j;
}

inline AttributeModel attribute_model_from_json(const json& j, const std::string& path) {
  using namespace cfgdetail;
  expect_object(j, path);
  check_keys(j, {"bounds", "events"}, path);
  AttributeModel m;
  if (!j.contains("bounds") || !j.contains("events"))
    throw ConfigError(path + ": bounds and events are required");
  m.bounds = number_list(j.at("bounds"), path + ".bounds");
  m.num_constraints = m.bounds.size();
  const json& events = j.at("events");
  if (!events.is_array() || events.empty())
    throw ConfigError(path + ".events: expected a non-empty array");
  for (std::size_t w = 0; w < events.size(); ++w) {
    const std::string epath = path + ".events[" + std::to_string(w) + "]";
    expect_object(events[w], epath);
    check_keys(events[w], {"prob", "actions"}, epath);
    m.add_event(number_at(events[w].at("prob"), epath + ".prob"));
    const json& actions = events[w].at("actions");
    if (!actions.is_array() || actions.empty())
      throw ConfigError(epath + ".actions: expected a non-empty array");
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const std::string apath = epath + ".actions[" + std::to_string(a) + "]";
      expect_object(actions[a], apath);
      check_keys(actions[a], {"T", "y"}, apath);
      const double t = number_at(actions[a].at("T"), apath + ".T");
      std::vector<double> y = number_list(actions[a].at("y"), apath + ".y");
      if (y.size() != m.num_constraints + 1)
        throw ConfigError(apath + ".y: expected " + std::to_string(m.num_constraints + 1) +
                          " attribute values");
      m.add_action(t, y);
    }
  }
  try {
    validate_attribute_model(m);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return m;
}

inline json attribute_model_to_json(const AttributeModel& m) {
  json j;
  j["bounds"] = m.bounds;
  json events = json::array();
  for (std::size_t w = 0; w < m.num_events(); ++w) {
    json ev;
    ev["prob"] = m.event_probs[w];
    json actions = json::array();
    for (std::size_t a = 0; a < m.num_actions(w); ++a) {
      json act;
      act["T"] = m.frame_mean(w, a);
      json y = json::array();
      for (std::size_t l = 0; l <= m.num_constraints; ++l) y.push_back(m.attr_mean(w, a, l));
      act["y"] = y;
      actions.push_back(act);
    }
    ev["actions"] = actions;
    events.push_back(ev);
  }
  j["events"] = events;
  return j;
}

inline ConstrainedLfpInstance lfp_from_json(const json& j, const std::string& path) {
  using namespace cfgdetail;
  expect_object(j, path);
  check_keys(j, {"objective_numerator", "objective_denominator", "constraints", "limits"}, path);
  ConstrainedLfpInstance inst;
  if (!j.contains("objective_numerator") || !j.contains("objective_denominator"))
    throw ConfigError(path + ": objective arrays are required");
  inst.obj_numerator = number_list(j.at("objective_numerator"), path + ".objective_numerator");
  inst.obj_denominator = number_list(j.at("objective_denominator"), path + ".objective_denominator");
  if (j.contains("constraints")) {
    const json& rows = j.at("constraints");
    if (!rows.is_array()) throw ConfigError(path + ".constraints: expected an array of rows");
    for (std::size_t l = 0; l < rows.size(); ++l)
      inst.constraint_coeffs.push_back(
          number_list(rows[l], path + ".constraints[" + std::to_string(l) + "]"));
  }
  if (j.contains("limits")) inst.constraint_limits = number_list(j.at("limits"), path + ".limits");
  try {
    validate_constrained_lfp(inst);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return inst;
}

inline json lfp_to_json(const ConstrainedLfpInstance& inst) {
  json j;
  j["objective_numerator"] = inst.obj_numerator;
  j["objective_denominator"] = inst.obj_denominator;
  j["constraints"] = inst.constraint_coeffs;
  j["limits"] = inst.constraint_limits;
  return j;
}

inline ControllerKind controller_kind_from_string(const std::string& name, const std::string& path) {
  for (ControllerKind kind :
       {ControllerKind::task_scheduler, ControllerKind::flow_control, ControllerKind::algorithm1,
        ControllerKind::algorithm2, ControllerKind::fixed_frame, ControllerKind::online_lfp})
    if (name == to_string(kind)) return kind;
  throw ConfigError(path + ": unknown controller '" + name + "'");
}

inline Scenario scenario_from_json(const json& j, const std::string& path) {
  using namespace cfgdetail;
  expect_object(j, path);
  check_keys(j,
             {"name", "controller", "task_model", "attribute_model", "lfp", "control",
              "rate_schedule", "moving_window", "theta_window", "bisection_tol", "horizon", "seed"},
             path);
  Scenario s;
  s.name = j.contains("name") ? string_at(j.at("name"), path + ".name") : "custom";
  if (!j.contains("controller")) throw ConfigError(path + ".controller: required");
  s.kind = controller_kind_from_string(string_at(j.at("controller"), path + ".controller"),
                                       path + ".controller");
  if (uses_task_model(s.kind)) {
    if (!j.contains("task_model")) throw ConfigError(path + ".task_model: required");
    s.task_model = task_model_from_json(j.at("task_model"), path + ".task_model");
  } else if (uses_attribute_model(s.kind)) {
    if (!j.contains("attribute_model")) throw ConfigError(path + ".attribute_model: required");
    s.attribute_model = attribute_model_from_json(j.at("attribute_model"), path + ".attribute_model");
  } else {
    if (!j.contains("lfp")) throw ConfigError(path + ".lfp: required");
    s.lfp_instance = lfp_from_json(j.at("lfp"), path + ".lfp");
  }
  if (j.contains("control")) {
    const json& cj = j.at("control");
    expect_object(cj, path + ".control");
    check_keys(cj, {"V", "additive_slack", "weights", "power_budget", "rate_target"},
               path + ".control");
    if (cj.contains("V")) s.control.V = number_at(cj.at("V"), path + ".control.V");
    if (cj.contains("additive_slack"))
      s.control.additive_slack = number_at(cj.at("additive_slack"), path + ".control.additive_slack");
    if (cj.contains("weights")) s.control.weights = number_list(cj.at("weights"), path + ".control.weights");
    if (cj.contains("power_budget"))
      s.control.power_budget = number_at(cj.at("power_budget"), path + ".control.power_budget");
    if (cj.contains("rate_target"))
      s.control.rate_target = number_at(cj.at("rate_target"), path + ".control.rate_target");
  }
  if (j.contains("rate_schedule")) {
    const json& rs = j.at("rate_schedule");
    if (!rs.is_array()) throw ConfigError(path + ".rate_schedule: expected an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string ppath = path + ".rate_schedule[" + std::to_string(i) + "]";
      expect_object(rs[i], ppath);
      check_keys(rs[i], {"frame", "multiplier"}, ppath);
      RatePhase phase;
      phase.start_frame = unsigned_at(rs[i].at("frame"), ppath + ".frame");
      phase.multiplier = number_at(rs[i].at("multiplier"), ppath + ".multiplier");
      s.rate_schedule.push_back(phase);
    }
  }
  if (j.contains("moving_window"))
    s.moving_window = unsigned_at(j.at("moving_window"), path + ".moving_window");
  if (j.contains("theta_window"))
    s.theta_window = unsigned_at(j.at("theta_window"), path + ".theta_window");
  if (j.contains("bisection_tol"))
    s.bisection_tol = number_at(j.at("bisection_tol"), path + ".bisection_tol");
  if (j.contains("horizon")) s.horizon = unsigned_at(j.at("horizon"), path + ".horizon");
  if (j.contains("seed")) s.seed = unsigned_at(j.at("seed"), path + ".seed");
  try {
    validate_scenario(s);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["controller"] = to_string(s.kind);
  if (uses_task_model(s.kind)) j["task_model"] = task_model_to_json(s.task_model);
  else if (uses_attribute_model(s.kind)) j["attribute_model"] = attribute_model_to_json(s.attribute_model);
  else j["lfp"] = lfp_to_json(s.lfp_instance);
  json control;
  control["V"] = s.control.V;
  control["additive_slack"] = s.control.additive_slack;
  control["weights"] = s.control.weights;
  control["power_budget"] = s.control.power_budget;
  control["rate_target"] = s.control.rate_target;
  j["control"] = control;
  json schedule = json::array();
  for (const RatePhase& p : s.rate_schedule) {
    json pj;
    pj["frame"] = p.start_frame;
    pj["multiplier"] = p.multiplier;
    schedule.push_back(pj);
  }
  j["rate_schedule"] = schedule;
  j["moving_window"] = s.moving_window;
  j["theta_window"] = s.theta_window;
  j["bisection_tol"] = s.bisection_tol;
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  return j;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string scenario_name;                // builtin name when no inline scenario
  std::optional<Scenario> inline_scenario;
  std::vector<double> v_list;               // empty = the scenario's configured V
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  enum class Emit { summary, trace, both } emit = Emit::summary;
  std::optional<std::size_t> window;
  std::size_t jobs = 1;
};

inline const char* to_string(RunConfig::Emit emit) {
  switch (emit) {
    case RunConfig::Emit::summary: return "summary";
    case RunConfig::Emit::trace: return "trace";
    case RunConfig::Emit::both: return "both";
  }
  return "summary";
}

inline RunConfig parse_config(const std::string& text) {
  using namespace cfgdetail;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  expect_object(j, "config");
  check_keys(j, {"scenario", "V", "frames", "seed", "out", "emit", "window", "jobs"}, "config");
  RunConfig cfg;
  if (!j.contains("scenario")) throw ConfigError("config.scenario: required");
  const json& sc = j.at("scenario");
  if (sc.is_string()) {
    cfg.scenario_name = sc.get<std::string>();
    const auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), cfg.scenario_name) == names.end())
      throw ConfigError("config.scenario: unknown scenario name '" + cfg.scenario_name + "'");
  } else {
    cfg.inline_scenario = scenario_from_json(sc, "config.scenario");
    cfg.scenario_name = cfg.inline_scenario->name;
  }
  if (j.contains("V")) {
    const json& vj = j.at("V");
    if (vj.is_number()) cfg.v_list = {number_at(vj, "config.V")};
    else cfg.v_list = number_list(vj, "config.V");
    if (cfg.v_list.empty()) throw ConfigError("config.V: list must be non-empty");
    for (std::size_t i = 0; i < cfg.v_list.size(); ++i)
      if (!(cfg.v_list[i] >= 0.0))
        throw ConfigError("config.V[" + std::to_string(i) + "]: must be non-negative");
  }
  if (j.contains("frames")) cfg.horizon = unsigned_at(j.at("frames"), "config.frames");
  if (j.contains("seed")) cfg.seed = unsigned_at(j.at("seed"), "config.seed");
  if (j.contains("out")) cfg.out_dir = string_at(j.at("out"), "config.out");
  if (j.contains("emit")) {
    const std::string e = string_at(j.at("emit"), "config.emit");
    if (e == "summary") cfg.emit = RunConfig::Emit::summary;
    else if (e == "trace") cfg.emit = RunConfig::Emit::trace;
    else if (e == "both") cfg.emit = RunConfig::Emit::both;
    else throw ConfigError("config.emit: expected summary|trace|both, got '" + e + "'");
  }
  if (j.contains("window")) cfg.window = unsigned_at(j.at("window"), "config.window");
  if (j.contains("jobs")) {
    cfg.jobs = unsigned_at(j.at("jobs"), "config.jobs");
    if (cfg.jobs == 0) throw ConfigError("config.jobs: must be at least 1");
  }
  return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
  json j;
  if (cfg.inline_scenario) j["scenario"] = scenario_to_json(*cfg.inline_scenario);
  else j["scenario"] = cfg.scenario_name;
  if (!cfg.v_list.empty()) j["V"] = cfg.v_list;
  if (cfg.horizon) j["frames"] = *cfg.horizon;
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["out"] = cfg.out_dir;
  j["emit"] = to_string(cfg.emit);
  if (cfg.window) j["window"] = *cfg.window;
  j["jobs"] = cfg.jobs;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Output writers
// ---------------------------------------------------------------------------

inline json summary_to_json(const RunSummary& s) {
  json j;
  j["scenario"] = s.scenario;
  j["controller"] = s.controller;
  j["V"] = s.v;
  j["seed"] = s.seed;
  j["frames"] = s.frames;
  j["power"] = s.power;
  j["objective"] = s.objective;
  j["avg_energy"] = s.avg_energy;
  j["avg_busy"] = s.avg_busy;
  j["avg_idle"] = s.avg_idle;
  j["avg_frame_time"] = s.avg_frame_time;
  j["mode_fractions"] = s.mode_fractions;
  j["served_fractions"] = s.served_fractions;
  j["rates"] = s.rates;
  j["avg_admitted"] = s.avg_admitted;
  j["admission_rates"] = s.admission_rates;
  j["total_admission_rate"] = s.total_admission_rate;
  j["theta"] = s.theta;
  j["x_avg"] = s.x_avg;
  j["queue_labels"] = s.queue_labels;
  j["final_queues"] = s.final_queues;
  j["max_queues"] = s.max_queues;
  j["gaps"] = s.gaps;
  j["queue_increment_sums"] = s.queue_increment_sums;
  return j;
}

inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Columns: k,c,m,I,D,e,T,<queue labels>,Z,theta,running_power,<rate labels>
// plus running_admission,moving_admission for flow runs. Event systems reuse
// c for the event index and m for the action index; the standalone Z column
// appears only when Z is not already among the queue labels.
inline void write_trace_csv(std::ostream& os, const Scenario& s, const RunResult& result) {
  const RunSummary& sum = result.summary;
  const bool flow = s.kind == ControllerKind::flow_control;
  const bool has_z = !sum.queue_labels.empty() && sum.queue_labels.back() == "Z";
  os << "k,c,m,I,D,e,T";
  for (const std::string& label : sum.queue_labels) os << ',' << label;
  if (!has_z) os << ",Z";
  os << ",theta,running_power";
  if (s.kind == ControllerKind::online_lfp) {
    for (std::size_t i = 1; i <= s.lfp_instance.size(); ++i) os << ",x_" << i;
  } else {
    const std::size_t rate_count = result.trace.empty() ? 0 : result.trace.front().running_rates.size();
    for (std::size_t n = 1; n <= rate_count; ++n) os << ",running_rate_" << n;
  }
  if (flow) os << ",running_admission,moving_admission";
  os << '\n';
  for (const FrameTrace& row : result.trace) {
    os << row.frame << ',' << row.task_class << ',' << row.mode << ',' << format_float(row.idle)
       << ',' << format_float(row.busy) << ',' << format_float(row.energy) << ','
       << format_float(row.frame_time);
    for (double q : row.queues) os << ',' << format_float(q);
    if (!has_z) os << ",0";
    os << ',' << format_float(row.theta) << ',' << format_float(row.running_power);
    for (double r : row.running_rates) os << ',' << format_float(r);
    if (flow) os << ',' << format_float(row.running_admission) << ','
                << format_float(row.moving_admission);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Run orchestration
// ---------------------------------------------------------------------------

inline Scenario resolve_scenario(const RunConfig& cfg) {
  Scenario s = cfg.inline_scenario ? *cfg.inline_scenario : make_builtin_scenario(cfg.scenario_name);
  if (cfg.horizon) s.horizon = *cfg.horizon;
  if (cfg.seed) s.seed = *cfg.seed;
  if (cfg.window) s.moving_window = *cfg.window;
  rescale_rate_schedule(s);
  return s;
}

inline std::string run_file_stem(const Scenario& s) {
  std::ostringstream name;
  name << s.name << "_V" << format_float(s.control.V);
  return name.str();
}

// Runs every (scenario, V) pair, writes one summary (and optional trace) per
// run, and prints a table. Returns 0 on success, 1 when any run failed.
inline int execute(const RunConfig& cfg, std::ostream& log = std::cout) {
  const Scenario base = resolve_scenario(cfg);
  const std::vector<double> v_list =
      cfg.v_list.empty() ? std::vector<double>{base.control.V} : cfg.v_list;
  std::filesystem::create_directories(cfg.out_dir);

  struct Row {
    double v = 0.0;
    bool ok = false;
    std::string error;
    RunSummary summary;
  };
  std::vector<Row> rows(v_list.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= v_list.size()) return;
      Row& row = rows[i];
      row.v = v_list[i];
      try {
        Scenario s = base;
        s.control.V = row.v;
        RunOptions opts;
        opts.collect_trace = cfg.emit != RunConfig::Emit::summary;
        RunResult result = run_scenario(s, opts);
        row.summary = result.summary;
        const std::string stem = (std::filesystem::path(cfg.out_dir) / run_file_stem(s)).string();
        std::lock_guard<std::mutex> lock(io_mutex);
        if (cfg.emit != RunConfig::Emit::trace) {
          std::ofstream out(stem + ".summary.json");
          json record = summary_to_json(result.summary);
          record["config"] = json::parse(serialize_config(cfg));
          out << record.dump(2) << '\n';
        }
        if (cfg.emit != RunConfig::Emit::summary) {
          std::ofstream out(stem + ".trace.csv");
          write_trace_csv(out, s, result);
        }
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const std::size_t n_workers = std::min<std::size_t>(std::max<std::size_t>(cfg.jobs, 1), v_list.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  log << std::left << std::setw(12) << "V" << std::setw(16) << "power" << std::setw(14)
      << "max_queue" << std::setw(8) << "status" << "gaps\n";
  bool all_ok = true;
  for (const Row& row : rows) {
    if (!row.ok) {
      all_ok = false;
      log << std::left << std::setw(12) << format_float(row.v) << "run failed: " << row.error << '\n';
      continue;
    }
    double max_q = 0.0;
    for (double q : row.summary.max_queues) max_q = std::max(max_q, q);
    log << std::left << std::setw(12) << format_float(row.v) << std::setw(16)
        << format_float(row.summary.power) << std::setw(14) << format_float(max_q)
        << std::setw(8) << "ok";
    char buf[24];
    for (double g : row.summary.gaps) {
      std::snprintf(buf, sizeof(buf), " %.3g", g);
      log << buf;
    }
    log << '\n';
  }
  return all_ok ? 0 : 1;
}

// Offline optimum for the configured scenario's model.
inline int print_oracle(const RunConfig& cfg, std::ostream& log = std::cout) {
  const Scenario s = resolve_scenario(cfg);
  if (uses_task_model(s.kind)) {
    const StationaryPolicy opt = stationary_policy_optimum(s.task_model);
    if (opt.status != LfpStatus::optimal) {
      log << "infeasible\n";
      return 1;
    }
    log << "power_opt " << format_float(opt.power) << "\nidle " << format_float(opt.idle) << '\n';
    for (std::size_t c = 1; c <= s.task_model.num_classes; ++c) {
      log << "p(" << c << ",:)";
      for (std::size_t m = 1; m <= s.task_model.num_modes; ++m)
        log << ' ' << format_float(opt.probabilities[s.task_model.table_index(c, m)]);
      log << '\n';
    }
    return 0;
  }
  if (uses_attribute_model(s.kind)) {
    const AttributePolicyOptimum opt = attribute_policy_optimum(s.attribute_model);
    if (opt.status != LfpStatus::optimal) {
      log << "infeasible\n";
      return 1;
    }
    log << "ratio_opt " << format_float(opt.ratio) << '\n';
    for (std::size_t w = 0; w < s.attribute_model.num_events(); ++w) {
      log << "z(" << w << ",:)";
      for (std::size_t a = 0; a < s.attribute_model.num_actions(w); ++a)
        log << ' ' << format_float(opt.distribution[s.attribute_model.row(w, a)]);
      log << '\n';
    }
    return 0;
  }
  const LfpSolution opt = charnes_cooper_solve(s.lfp_instance);
  if (opt.status != LfpStatus::optimal) {
    log << "infeasible\n";
    return 1;
  }
  log << "ratio_opt " << format_float(opt.value) << "\nx";
  for (double v : opt.x) log << ' ' << format_float(v);
  log << '\n';
  return 0;
}

}  // namespace renewalctl

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "renewalctl/app.hpp"
#include "renewalctl/cli.hpp"

using namespace renewalctl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("renewalctl_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig cfg = parse_config(R"({"scenario": "one_class", "V": [1]})");
  CHECK(cfg.scenario_name == "one_class");
  CHECK(cfg.v_list == std::vector<double>{1.0});
  CHECK_FALSE(cfg.horizon.has_value());
  CHECK_FALSE(cfg.seed.has_value());
  const Scenario s = resolve_scenario(cfg);
  CHECK(s.horizon == 1'000'000);  // scenario default
  CHECK(s.seed == 1);
}

TEST_CASE("a V list describes a sweep") {
  const RunConfig cfg = parse_config(R"({"scenario": "ten_class", "V": [0, 0.05, 0.3, 1, 3]})");
  CHECK(cfg.v_list.size() == 5);
}

TEST_CASE("omitting V runs at the scenario's configured weight") {
  TempDir dir;
  RunConfig cfg = parse_config(R"({"scenario": "flow_control_ten_class", "frames": 300})");
  CHECK(cfg.v_list.empty());
  cfg.out_dir = (dir.path / "defv").string();
  std::ostringstream log;
  CHECK(execute(cfg, log) == 0);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "flow_control_ten_class_V100.summary.json"));
}

TEST_CASE("schema violations name the offending field") {
  CHECK_THROWS_WITH(parse_config(R"({"scenario": "one_class", "V": ["x"]})"),
                    Catch::Matchers::ContainsSubstring("config.V[0]"));
  CHECK_THROWS_WITH(parse_config(R"({"scenario": "one_class", "frames": -1})"),
                    Catch::Matchers::ContainsSubstring("config.frames"));
  CHECK_THROWS_WITH(parse_config(R"({"scenario": "nope"})"),
                    Catch::Matchers::ContainsSubstring("unknown scenario"));
  CHECK_THROWS_WITH(parse_config(R"({"scenario": "one_class", "typo": 1})"),
                    Catch::Matchers::ContainsSubstring("config.typo"));
  CHECK_THROWS_WITH(parse_config(R"({"scenario": {"controller": "task_scheduler"}})"),
                    Catch::Matchers::ContainsSubstring("task_model"));
}

TEST_CASE("configs round-trip through serialization") {
  SECTION("builtin scenario reference") {
    const std::string text =
        R"({"scenario": "one_class", "V": [0.5, 2], "frames": 1000, "seed": 7,
            "out": "results", "emit": "both", "window": 50, "jobs": 2})";
    const RunConfig cfg = parse_config(text);
    const RunConfig again = parse_config(serialize_config(cfg));
    CHECK(serialize_config(cfg) == serialize_config(again));
  }
  SECTION("inline task scenario") {
    const std::string text = R"({
      "scenario": {
        "name": "tiny",
        "controller": "task_scheduler",
        "task_model": {"energy": [[1, 3]], "duration": [[7, 4]], "idle_max": 10, "rates": [0.2]},
        "control": {"V": 1.0}
      },
      "V": [1]})";
    const RunConfig cfg = parse_config(text);
    REQUIRE(cfg.inline_scenario.has_value());
    CHECK(cfg.inline_scenario->task_model.num_classes == 1);
    const RunConfig again = parse_config(serialize_config(cfg));
    CHECK(serialize_config(cfg) == serialize_config(again));
  }
  SECTION("inline attribute scenario") {
    const std::string text = R"({
      "scenario": {
        "name": "tiny_events",
        "controller": "fixed_frame",
        "attribute_model": {
          "bounds": [0],
          "events": [
            {"prob": 0.5, "actions": [{"T": 1, "y": [0, 0]}, {"T": 1, "y": [2, -1]}]},
            {"prob": 0.5, "actions": [{"T": 1, "y": [1, 1]}]}
          ]
        }
      },
      "V": [10]})";
    const RunConfig cfg = parse_config(text);
    const RunConfig again = parse_config(serialize_config(cfg));
    CHECK(serialize_config(cfg) == serialize_config(again));
  }
  SECTION("inline online lfp scenario") {
    const std::string text = R"({
      "scenario": {
        "name": "tiny_lfp",
        "controller": "online_lfp",
        "lfp": {"objective_numerator": [1, 2], "objective_denominator": [2, 1],
                "constraints": [[1]], "limits": [0.5]}
      },
      "V": [100]})";
    const RunConfig cfg = parse_config(text);
    const RunConfig again = parse_config(serialize_config(cfg));
    CHECK(serialize_config(cfg) == serialize_config(again));
  }
}

TEST_CASE("every builtin scenario survives a serialization round trip") {
  for (const std::string& name : builtin_scenario_names()) {
    const Scenario s = make_builtin_scenario(name);
    const json once = scenario_to_json(s);
    const Scenario parsed = scenario_from_json(once, "scenario");
    CHECK(scenario_to_json(parsed).dump() == once.dump());
    CHECK(parsed.kind == s.kind);
    CHECK(parsed.horizon == s.horizon);
  }
}

TEST_CASE("execute writes one summary per sweep point") {
  TempDir dir;
  RunConfig cfg = parse_config(R"({"scenario": "one_class", "V": [0, 1], "frames": 500})");
  cfg.out_dir = (dir.path / "sweep").string();
  cfg.jobs = 2;
  std::ostringstream log;
  CHECK(execute(cfg, log) == 0);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "one_class_V0.summary.json"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "one_class_V1.summary.json"));
  CHECK(log.str().find("power") != std::string::npos);

  const json record = json::parse(slurp(fs::path(cfg.out_dir) / "one_class_V1.summary.json"));
  CHECK(record.at("frames") == 500);
  CHECK(record.at("seed") == 1);
  CHECK(record.contains("config"));  // resolved configuration rides along
}

TEST_CASE("trace emission produces one row per frame plus a header") {
  TempDir dir;
  RunConfig cfg = parse_config(R"({"scenario": "one_class", "V": [1], "frames": 100, "emit": "trace"})");
  cfg.out_dir = (dir.path / "tr").string();
  std::ostringstream log;
  CHECK(execute(cfg, log) == 0);
  const std::string csv = slurp(fs::path(cfg.out_dir) / "one_class_V1.trace.csv");
  CHECK(count_lines(csv) == 101);
  CHECK(csv.rfind("k,c,m,I,D,e,T,Q_1,Z,theta,running_power,running_rate_1", 0) == 0);
}

TEST_CASE("golden trace for a five-frame one-class run") {
  Scenario s = make_builtin_scenario("one_class");
  s.horizon = 5;
  RunOptions opts;
  opts.collect_trace = true;
  const RunResult result = run_scenario(s, opts);
  std::ostringstream csv;
  write_trace_csv(csv, s, result);
  const std::string expected =
      "k,c,m,I,D,e,T,Q_1,Z,theta,running_power,running_rate_1\n"
      "0,1,1,10,7,1,17,2.4,0,0,0.0588235294,0.0588235294\n"
      "1,1,1,0,7,1,7,2.8,0,0,0.0833333333,0.0833333333\n"
      "2,1,1,0,7,1,7,3.2,0,0,0.0967741935,0.0967741935\n"
      "3,1,1,0,7,1,7,3.6,0,0,0.105263158,0.105263158\n"
      "4,1,1,0,7,1,7,4,0,0,0.111111111,0.111111111\n";
  CHECK(csv.str() == expected);
}

TEST_CASE("flow traces append admission columns") {
  Scenario s = make_builtin_scenario("flow_control_ten_class");
  s.horizon = 10;
  RunOptions opts;
  opts.collect_trace = true;
  const RunResult result = run_scenario(s, opts);
  std::ostringstream csv;
  write_trace_csv(csv, s, result);
  std::string header = csv.str().substr(0, csv.str().find('\n'));
  CHECK(header.find("Q_10,Z,theta") != std::string::npos);
  CHECK(header.rfind("running_admission,moving_admission") != std::string::npos);
}

TEST_CASE("cli maps config errors to exit code 2") {
  TempDir dir;
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << R"({"scenario": "nope"})";
  std::ostringstream log, err;
  const std::string bad_path = bad.string();
  const char* argv_bad[] = {"renewalctl", "run", bad_path.c_str()};
  CHECK(run_cli(3, argv_bad, log, err) == 2);
  CHECK(err.str().find("unknown scenario") != std::string::npos);

  const char* argv_missing[] = {"renewalctl", "run"};
  CHECK(run_cli(2, argv_missing, log, err) == 2);
}

TEST_CASE("cli runs builtin scenarios from flags alone") {
  TempDir dir;
  const std::string out = (dir.path / "flagrun").string();
  std::ostringstream log, err;
  const char* argv[] = {"renewalctl", "run",       "--scenario", "one_class", "--V",  "1",
                        "--frames",   "200",       "--seed",     "3",         "--out", out.c_str(),
                        "--emit",     "summary"};
  CHECK(run_cli(14, argv, log, err) == 0);
  CHECK(fs::exists(fs::path(out) / "one_class_V1.summary.json"));
  const json record = json::parse(slurp(fs::path(out) / "one_class_V1.summary.json"));
  CHECK(record.at("seed") == 3);
}

TEST_CASE("cli lists scenarios and prints oracles") {
  std::ostringstream log, err;
  const char* argv_list[] = {"renewalctl", "list-scenarios"};
  CHECK(run_cli(2, argv_list, log, err) == 0);
  CHECK(log.str().find("one_class") != std::string::npos);
  CHECK(log.str().find("online_lfp") != std::string::npos);

  std::ostringstream oracle_log;
  const char* argv_oracle[] = {"renewalctl", "oracle", "--scenario", "one_class"};
  CHECK(run_cli(4, argv_oracle, oracle_log, err) == 0);
  CHECK(oracle_log.str().find("power_opt 0.466666667") != std::string::npos);
}

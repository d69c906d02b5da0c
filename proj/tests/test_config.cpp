#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ouq/config.hpp"
#include "ouq/errors.hpp"

using namespace ouq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ouq_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kMarkovEnvelope = R"({
  "seed": 42,
  "model": {"builtin": "linear"},
  "inputs": [{"name": "x", "lower": 0.0, "upper": 1.0, "moments": [0.5]}],
  "task": {"type": "envelope", "thresholds": {"min": 0.25, "max": 0.95, "count": 3}},
  "solver": {"generations": 200, "restarts": 2}
})";

bool python_available() {
  static const bool ok = std::system("python3 -c pass >/dev/null 2>&1") == 0;
  return ok;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OUQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("parsing and defaults") {
  const ProblemConfig cfg = parse_config(kMarkovEnvelope);
  CHECK(cfg.seed == 42);
  CHECK(cfg.mode == ConstraintMode::Equality);
  CHECK(cfg.builtin_model == "linear");
  REQUIRE(std::holds_alternative<EnvelopeTask>(cfg.task));
  const auto& task = std::get<EnvelopeTask>(cfg.task);
  REQUIRE(task.thresholds.size() == 3);
  CHECK(task.thresholds[1] == doctest::Approx(0.6));
  CHECK(cfg.solver.max_generations == 200);
  CHECK(cfg.restarts == 2);

  // Interval constraints flip the default mode.
  const ProblemConfig ineq = parse_config(R"({
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 0, "upper": 1,
                "moments": [{"lo": 0.4, "hi": 0.6}]}],
    "task": {"type": "max_quantile", "p": 0.5, "search": {"min": 0, "max": 1}}
  })");
  CHECK(ineq.mode == ConstraintMode::Inequality);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"task": {"type": "envelope"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 1.0, "upper": 0.0, "moments": [0.5]}],
    "task": {"type": "envelope", "thresholds": [0.5]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 0.0, "upper": 1.0,
                "moments": [{"lo": 0.6, "hi": 0.4}]}],
    "task": {"type": "envelope", "thresholds": [0.5]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 0.0, "upper": 1.0, "moments": [0.5]}],
    "task": {"type": "juggle"}
  })"),
                  ConfigError);
}

TEST_CASE("validation reports feasibility without computing") {
  std::ostringstream diag;
  CHECK(validate_config(parse_config(kMarkovEnvelope), diag) == kExitOk);
  CHECK(diag.str().find("ok") != std::string::npos);

  // Second moment below the square of the mean is outside the moment space.
  std::ostringstream diag2;
  const int rc = validate_config(parse_config(R"({
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 0, "upper": 1, "moments": [0.5, 0.2]}],
    "task": {"type": "envelope", "thresholds": [0.5]}
  })"),
                                 diag2);
  CHECK(rc == kExitInfeasible);
}

TEST_CASE("envelope task writes deterministic outputs") {
  const ProblemConfig cfg = parse_config(kMarkovEnvelope);
  const fs::path dir_a = fresh_dir("env_a");
  const fs::path dir_b = fresh_dir("env_b");
  std::ostringstream diag;
  REQUIRE(run_task(cfg, dir_a.string(), diag) == kExitOk);
  REQUIRE(run_task(cfg, dir_b.string(), diag) == kExitOk);

  const std::string csv = slurp(dir_a / "envelope.csv");
  CHECK(csv.rfind("h,envelope_value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 points
  CHECK(csv == slurp(dir_b / "envelope.csv"));
  CHECK(slurp(dir_a / "measures.json") == slurp(dir_b / "measures.json"));
}

TEST_CASE("max quantile task against the analytic crossing") {
  const ProblemConfig cfg = parse_config(R"({
    "seed": 7,
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 0.0, "upper": 1.0, "moments": [0.5]}],
    "task": {"type": "max_quantile", "p": 0.4, "search": {"min": 0.0, "max": 1.0}},
    "solver": {"generations": 200, "restarts": 2}
  })");
  const fs::path dir = fresh_dir("quantile");
  std::ostringstream diag;
  REQUIRE(run_task(cfg, dir.string(), diag) == kExitOk);
  const std::string json = slurp(dir / "quantile.json");
  CHECK(json.find("\"max_quantile\"") != std::string::npos);
  // Crossing of 1 - 0.5/h with 0.4 sits at 5/6.
  const auto pos = json.find("\"max_quantile\": ");
  const double value = std::stod(json.substr(pos + 16));
  CHECK(value == doctest::Approx(5.0 / 6.0).epsilon(8e-3));
}

TEST_CASE("baseline task produces quantile and interval") {
  const ProblemConfig cfg = parse_config(R"({
    "seed": 99,
    "model": {"builtin": "linear"},
    "task": {"type": "baseline", "n": 20000, "p": 0.95,
             "distributions": [{"family": "uniform", "params": [0.0, 1.0]}],
             "bootstrap": {"resamples": 300, "level": 0.9}}
  })");
  const fs::path dir = fresh_dir("baseline");
  std::ostringstream diag;
  REQUIRE(run_task(cfg, dir.string(), diag) == kExitOk);
  const std::string json = slurp(dir / "baseline.json");
  const auto pos = json.find("\"quantile\": ");
  const double q = std::stod(json.substr(pos + 12));
  CHECK(q == doctest::Approx(0.95).epsilon(0.02));
  CHECK(slurp(dir / "baseline_cdf.csv").rfind("value,cdf\n", 0) == 0);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = fresh_dir("cli");

  const auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    out << text;
    return (dir / name).string();
  };

  const std::string good = write("good.json", kMarkovEnvelope);
  CHECK(run_cli("validate -c " + good) == kExitOk);
  CHECK(run_cli("run -c " + good + " -o " + (dir / "out").string()) == kExitOk);

  CHECK(run_cli("validate -c " + std::string((dir / "missing.json").string())) ==
        kExitConfig);
  const std::string broken = write("broken.json", "{");
  CHECK(run_cli("validate -c " + broken) == kExitConfig);

  const std::string infeasible = write("infeasible.json", R"({
    "model": {"builtin": "linear"},
    "inputs": [{"name": "x", "lower": 0, "upper": 1, "moments": [0.5, 0.2]}],
    "task": {"type": "envelope", "thresholds": [0.5]}
  })");
  CHECK(run_cli("validate -c " + infeasible) == kExitInfeasible);
  CHECK(run_cli("run -c " + infeasible + " -o " + (dir / "out2").string()) ==
        kExitInfeasible);

  if (python_available()) {
    // A constant model far above any reachable threshold: the bisection
    // exhausts its expansions.
    const std::string unreachable = write("unreachable.json", R"({
      "model": {"command": "python3 -c 'import json,sys\nfor line in sys.stdin:\n print(json.dumps({\"values\":[1e300]*len(json.loads(line)[\"points\"])}),flush=True)'"},
      "inputs": [{"name": "x", "lower": 0, "upper": 1, "moments": [0.5]}],
      "task": {"type": "max_quantile", "p": 0.9, "search": {"min": 0.0, "max": 1.0},
               "resolution": 0.01},
      "solver": {"generations": 5, "population": 8, "restarts": 1}
    })");
    CHECK(run_cli("run -c " + unreachable + " -o " + (dir / "out3").string()) ==
          kExitBracketing);

    // A wrapper that exits at once: model/protocol failure.
    const std::string dead = write("dead.json", R"({
      "model": {"command": "python3 -c pass"},
      "inputs": [{"name": "x", "lower": 0, "upper": 1, "moments": [0.5]}],
      "task": {"type": "envelope", "thresholds": [0.5]},
      "solver": {"generations": 5, "population": 8, "restarts": 1}
    })");
    CHECK(run_cli("run -c " + dead + " -o " + (dir / "out4").string()) == kExitModel);

    // Echo wrapper answers the validation handshake.
    const std::string echo = write("echo.json", R"({
      "model": {"command": "python3 )" OUQ_SOURCE_DIR R"(/tools/wrappers/echo_model.py"},
      "inputs": [{"name": "x", "lower": 0, "upper": 1, "moments": [0.5]}],
      "task": {"type": "envelope", "thresholds": [0.5]}
    })");
    CHECK(run_cli("validate -c " + echo) == kExitOk);
  }
}

TEST_SUITE_END();

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "ouq/errors.hpp"
#include "ouq/models.hpp"
#include "oracles.hpp"

using namespace ouq;

namespace {

bool python_available() {
  static const bool ok = std::system("python3 -c pass >/dev/null 2>&1") == 0;
  return ok;
}

ExternalModelConfig wrapper(const std::string& script, int dimension) {
  ExternalModelConfig cfg;
  cfg.command = "python3 " OUQ_SOURCE_DIR "/tools/wrappers/" + script;
  cfg.dimension = dimension;
  cfg.timeout_seconds = 20.0;
  return cfg;
}

ExternalModelConfig inline_wrapper(const std::string& code, int dimension) {
  ExternalModelConfig cfg;
  cfg.command = "python3 -c '" + code + "'";
  cfg.dimension = dimension;
  cfg.timeout_seconds = 20.0;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("hydraulic closed form") {
  CHECK(hydraulic_height(1320.42, 30.0, 50.0, 54.5) ==
        doctest::Approx(2.591844832451265).epsilon(1e-13));
  // Vanishing flow, vanishing height.
  CHECK(hydraulic_height(1e-9, 30.0, 50.0, 54.5) < 1e-5);
  CHECK_THROWS_AS(hydraulic_height(1320.42, 30.0, 50.0, 50.0), DomainError);
  CHECK_THROWS_AS(hydraulic_height(0.0, 30.0, 50.0, 54.5), DomainError);
  CHECK_THROWS_AS(hydraulic_height(1320.42, -1.0, 50.0, 54.5), DomainError);
}

TEST_CASE("hydraulic monotonicity") {
  std::mt19937_64 rng(3);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 50; ++i) {
    const double q = 160.0 + 3420.0 * uniform();
    const double ks = 12.55 + 34.9 * uniform();
    const double zv = 49.0 + 2.0 * uniform();
    const double zm = 54.0 + uniform();
    const double h = hydraulic_height(q, ks, zv, zm);
    CHECK(hydraulic_height(q * 1.01, ks, zv, zm) > h);       // more flow
    CHECK(hydraulic_height(q, ks * 1.01, zv, zm) < h);       // smoother bed
    CHECK(hydraulic_height(q, ks, zv, zm + 0.01) < h);       // steeper slope
    CHECK(hydraulic_height(q, ks, zv + 0.005, zm) > h);      // flatter slope
  }
}

TEST_CASE("builtin registry") {
  const auto linear = make_builtin_model("linear", 2);
  CHECK(linear->dimension() == 2);
  CHECK(linear->reentrant());
  CHECK(linear->evaluate(std::vector<double>{0.3, 0.9}) == doctest::Approx(0.3));
  CHECK(linear->evaluate(std::vector<double>{0.0, 0.5}) == doctest::Approx(0.0));

  const auto hydraulic = make_builtin_model("hydraulic", 4);
  CHECK(hydraulic->dimension() == 4);
  CHECK(hydraulic->output_units() == "m");

  CHECK_THROWS_AS(make_builtin_model("cubic", 1), ConfigError);
  CHECK_THROWS_AS(make_builtin_model("hydraulic", 3), ConfigError);
  CHECK_THROWS_AS(make_builtin_model("linear", 0), ConfigError);
}

TEST_CASE("external echo model") {
  if (!python_available()) {
    MESSAGE("python3 not available; skipping external protocol tests");
    return;
  }
  const auto model = make_external_model(wrapper("echo_model.py", 1));
  std::vector<double> out(2);
  model->evaluate_batch(std::vector<double>{0.3, 0.7}, out);
  CHECK(out[0] == doctest::Approx(0.3));
  CHECK(out[1] == doctest::Approx(0.7));
  CHECK_FALSE(model->reentrant());
}

TEST_CASE("external batching and caching") {
  if (!python_available()) return;
  // The wrapper answers first coordinate plus a running call counter, so a
  // repeated point betrays itself unless the cache serves it.
  const std::string code =
      "import json,sys\n"
      "n=0\n"
      "for line in sys.stdin:\n"
      " req=json.loads(line)\n"
      " n+=1\n"
      " print(json.dumps({\"values\":[p[0]+n for p in req[\"points\"]]}),flush=True)\n";
  ExternalModelConfig cfg = inline_wrapper(code, 1);
  cfg.batch_limit = 2;
  const auto model = make_external_model(cfg);

  std::vector<double> out(3);
  model->evaluate_batch(std::vector<double>{0.1, 0.2, 0.3}, out);  // two batches
  CHECK(out[0] == doctest::Approx(1.1));
  CHECK(out[1] == doctest::Approx(1.2));
  CHECK(out[2] == doctest::Approx(2.3));

  double repeat = 0.0;
  model->evaluate_batch(std::vector<double>{0.2}, {&repeat, 1});
  CHECK(repeat == doctest::Approx(1.2));  // cached, not re-asked
}

TEST_CASE("external protocol violations") {
  if (!python_available()) return;

  // One value short.
  const auto short_model = make_external_model(inline_wrapper(
      "import json,sys\n"
      "for line in sys.stdin:\n"
      " req=json.loads(line)\n"
      " print(json.dumps({\"values\":[0.0]*(len(req[\"points\"])-1)}),flush=True)\n",
      1));
  std::vector<double> out(2);
  CHECK_THROWS_AS(short_model->evaluate_batch(std::vector<double>{0.1, 0.2}, out),
                  ProtocolError);

  // Not JSON at all.
  const auto garbled = make_external_model(inline_wrapper(
      "import sys\n"
      "for line in sys.stdin:\n"
      " print(\"nonsense\",flush=True)\n",
      1));
  double one = 0.0;
  CHECK_THROWS_AS(garbled->evaluate_batch(std::vector<double>{0.1}, {&one, 1}),
                  ProtocolError);

  // Exits immediately.
  const auto dead = make_external_model(inline_wrapper("pass", 1));
  CHECK_THROWS_AS(dead->evaluate_batch(std::vector<double>{0.1}, {&one, 1}),
                  ProcessExit);

  // Never answers within the timeout.
  ExternalModelConfig sleepy = inline_wrapper(
      "import sys,time\n"
      "for line in sys.stdin:\n"
      " time.sleep(10)\n",
      1);
  sleepy.timeout_seconds = 0.3;
  const auto slow = make_external_model(sleepy);
  CHECK_THROWS_AS(slow->evaluate_batch(std::vector<double>{0.1}, {&one, 1}),
                  TimeoutError);
}

TEST_CASE("externally wrapped hydraulic matches the builtin") {
  if (!python_available()) return;
  const auto external = make_external_model(wrapper("hydraulic_model.py", 4));
  const auto builtin = make_builtin_model("hydraulic", 4);

  std::mt19937_64 rng(7);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  std::vector<double> points;
  for (int i = 0; i < 100; ++i) {
    points.push_back(160.0 + 3420.0 * uniform());
    points.push_back(12.55 + 34.9 * uniform());
    points.push_back(49.0 + 2.0 * uniform());
    points.push_back(54.0 + uniform());
  }
  std::vector<double> a(100), b(100);
  external->evaluate_batch(points, a);
  builtin->evaluate_batch(points, b);
  for (int i = 0; i < 100; ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_SUITE_END();

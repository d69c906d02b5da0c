// Compares the serial reference kernels against their OpenMP versions on a
// representative workload: flood-model p.o.f minimization, exhaustive grid
// search and the bootstrap. Build and run:
//   cmake --build build --target ouq_bench && ./build/bench/ouq_bench [workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "ouq/baseline.hpp"
#include "ouq/objective.hpp"
#include "ouq/parallel.hpp"
#include "ouq/solver.hpp"

using namespace ouq;

namespace {

double time_of(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ObjectiveSpec flood_spec(double threshold) {
  auto input = [](const char* name, double lo, double hi, std::vector<double> m) {
    InputSpec in;
    in.name = name;
    in.lower = lo;
    in.upper = hi;
    for (std::size_t j = 0; j < m.size(); ++j)
      in.constraints.push_back(MomentConstraint::equality(static_cast<int>(j) + 1, m[j]));
    return in;
  };
  ObjectiveSpec spec;
  spec.inputs = {input("q", 160.0, 3580.0, {1319.4197007952529, 2163196.9833095563}),
                 input("ks", 12.55, 47.45, {30.0, 949.13683137727311}),
                 input("zv", 49.0, 51.0, {50.0, 7501.0 / 3.0}),
                 input("zm", 54.0, 55.0, {54.5, 8911.0 / 3.0})};
  spec.model = make_builtin_model("hydraulic", 4);
  spec.threshold = threshold;
  return spec;
}

void row(const char* name, double serial, double parallel, int workers) {
  std::printf("%-28s %10.3f s %10.3f s %8.2fx (%d workers)\n", name, serial, parallel,
              serial / parallel, workers);
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = argc > 1 ? std::atoi(argv[1]) : resolve_workers(0);
  std::printf("%-28s %12s %12s %10s\n", "kernel", "serial", "parallel", "speedup");

  {
    SolverConfig cfg;
    cfg.seed = 1;
    cfg.max_generations = 150;
    SolverConfig serial_cfg = cfg;
    serial_cfg.workers = 1;
    SolverConfig parallel_cfg = cfg;
    parallel_cfg.workers = workers;
    double v_serial = 0.0, v_parallel = 0.0;
    const double t_serial =
        time_of([&] { v_serial = minimize_pof(flood_spec(2.5), serial_cfg).value; });
    const double t_parallel =
        time_of([&] { v_parallel = minimize_pof(flood_spec(2.5), parallel_cfg).value; });
    row("p.o.f minimization (DE)", t_serial, t_parallel, workers);
    if (v_serial != v_parallel) std::printf("  MISMATCH: %g vs %g\n", v_serial, v_parallel);
  }

  {
    PofEvaluator evaluator(flood_spec(2.5));
    // Exhaustive search over the first three parameters, rest at 1/2.
    auto objective = [&evaluator](std::span<const double> v) {
      std::vector<double> full(evaluator.dimension(), 0.5);
      std::copy(v.begin(), v.end(), full.begin());
      return evaluator(std::span<const double>{full});
    };
    GridResult g_serial, g_parallel;
    const double t_serial =
        time_of([&] { g_serial = brute_force_grid(objective, 3, 40, 1); });
    const double t_parallel =
        time_of([&] { g_parallel = brute_force_grid(objective, 3, 40, workers); });
    row("grid search 40^3", t_serial, t_parallel, workers);
    if (g_serial.value != g_parallel.value)
      std::printf("  MISMATCH: %g vs %g\n", g_serial.value, g_parallel.value);
  }

  {
    DistributionSpec u;
    u.family = DistributionFamily::Uniform;
    u.a = 0.0;
    u.b = 1.0;
    const auto draws = sample(u, 200000, 7);
    std::pair<double, double> ci_serial, ci_parallel;
    const double t_serial =
        time_of([&] { ci_serial = bootstrap_ci(draws, 0.95, 0.9, 400, 3, 1); });
    const double t_parallel =
        time_of([&] { ci_parallel = bootstrap_ci(draws, 0.95, 0.9, 400, 3, workers); });
    row("bootstrap 400 x 200k", t_serial, t_parallel, workers);
    if (ci_serial != ci_parallel) std::printf("  MISMATCH\n");
  }

  return 0;
}

#ifndef OUQ_SOLVER_HPP
#define OUQ_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "ouq/parallel.hpp"

namespace ouq {

struct SolverConfig {
  int population_size = 0;      // 0: max(40, 10 * dim)
  double mutation_factor = 0.8; // F in (0, 2]
  double crossover_rate = 0.9;  // CR in [0, 1]
  int max_generations = 300;
  double tolerance = 1e-8;      // relative spread of population values
  std::uint64_t seed = 0;
  int workers = 0;              // 0: all available; trial evaluation only

  void validate(int dim) const;
  int population(int dim) const;
};

struct SolverReport {
  int generations = 0;
  std::vector<double> best_value_trace;  // nonincreasing, entry 0 = initial best
  bool converged = false;
  long objective_calls = 0;
};

struct SolveResult {
  std::vector<double> best;
  double value = 0.0;
  SolverReport report;
};

// DE/rand/1/bin over the clamped unit cube [eps, 1-eps]^dim. Candidates are
// clipped into the box. The mutation/crossover random stream is owned by a
// single coordinator, so a seed fixes the trajectory bit-for-bit no matter
// how many workers evaluate the trials. Non-convergence is reported, never
// thrown; `warm_start` rows (if any) seed the initial population.
SolveResult differential_evolution(const VectorObjective& objective, int dim,
                                   const SolverConfig& config,
                                   const std::vector<std::vector<double>>& warm_start = {});

struct GridResult {
  std::vector<double> best;
  double value = 0.0;
};

// Exhaustive evaluation on the uniform resolution^dim lattice spanning the
// same clamped cube the solver searches (endpoints included). dim <= 3.
GridResult brute_force_grid(const VectorObjective& objective, int dim,
                            int resolution, int workers = 0);

}  // namespace ouq

#endif

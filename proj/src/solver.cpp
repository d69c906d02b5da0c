#include "ouq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ouq/moments.hpp"

namespace ouq {

namespace {

constexpr double kBoxLo = kInteriorClamp;
constexpr double kBoxHi = 1.0 - kInteriorClamp;

// Uniform doubles straight from the generator words; keeps trajectories
// identical across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

double clip(double x) { return std::clamp(x, kBoxLo, kBoxHi); }

}  // namespace

void SolverConfig::validate(int dim) const {
  if (dim < 1) throw std::invalid_argument("solver: dimension must be >= 1");
  if (population(dim) < 4) throw std::invalid_argument("solver: population must be >= 4");
  if (!(mutation_factor > 0.0 && mutation_factor <= 2.0))
    throw std::invalid_argument("solver: mutation factor must lie in (0, 2]");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw std::invalid_argument("solver: crossover rate must lie in [0, 1]");
  if (max_generations < 1) throw std::invalid_argument("solver: need at least one generation");
}

int SolverConfig::population(int dim) const {
  return population_size > 0 ? population_size : std::max(40, 10 * dim);
}

SolveResult differential_evolution(const VectorObjective& objective, int dim,
                                   const SolverConfig& config,
                                   const std::vector<std::vector<double>>& warm_start) {
  config.validate(dim);
  const int np = config.population(dim);

  std::mt19937_64 rng(config.seed);
  std::vector<double> population(static_cast<std::size_t>(np) * dim);
  std::vector<double> values(np);

  const std::size_t seeded = std::min<std::size_t>(warm_start.size(), np);
  for (std::size_t i = 0; i < seeded; ++i) {
    if (static_cast<int>(warm_start[i].size()) != dim)
      throw std::invalid_argument("solver: warm start vector has wrong dimension");
    for (int j = 0; j < dim; ++j) population[i * dim + j] = clip(warm_start[i][j]);
  }
  for (std::size_t i = seeded; i < static_cast<std::size_t>(np); ++i)
    for (int j = 0; j < dim; ++j)
      population[i * dim + j] = kBoxLo + (kBoxHi - kBoxLo) * uniform01(rng);

  SolveResult result;
  result.report.objective_calls = np;
  map_objective(objective, population, dim, values, config.workers);

  auto best_index = [&values, np] {
    int b = 0;
    for (int i = 1; i < np; ++i)
      if (values[i] < values[b]) b = i;
    return b;
  };
  int best = best_index();
  result.report.best_value_trace.push_back(values[best]);

  std::vector<double> trials(population.size());
  std::vector<double> trial_values(np);

  for (int gen = 0; gen < config.max_generations; ++gen) {
    // Mutation + crossover drawn serially by the coordinator.
    for (int i = 0; i < np; ++i) {
      int r1, r2, r3;
      do r1 = uniform_int(rng, np); while (r1 == i);
      do r2 = uniform_int(rng, np); while (r2 == i || r2 == r1);
      do r3 = uniform_int(rng, np); while (r3 == i || r3 == r1 || r3 == r2);
      const int jrand = uniform_int(rng, dim);
      for (int j = 0; j < dim; ++j) {
        const bool cross = uniform01(rng) < config.crossover_rate || j == jrand;
        trials[i * static_cast<std::size_t>(dim) + j] =
            cross ? clip(population[r1 * static_cast<std::size_t>(dim) + j] +
                         config.mutation_factor *
                             (population[r2 * static_cast<std::size_t>(dim) + j] -
                              population[r3 * static_cast<std::size_t>(dim) + j]))
                  : population[i * static_cast<std::size_t>(dim) + j];
      }
    }

    map_objective(objective, trials, dim, trial_values, config.workers);
    result.report.objective_calls += np;

    // Accept ties so the population can drift across plateaus.
    for (int i = 0; i < np; ++i) {
      if (trial_values[i] <= values[i]) {
        values[i] = trial_values[i];
        std::copy_n(trials.begin() + i * static_cast<std::size_t>(dim), dim,
                    population.begin() + i * static_cast<std::size_t>(dim));
      }
    }

    best = best_index();
    result.report.best_value_trace.push_back(values[best]);
    result.report.generations = gen + 1;

    const double worst = *std::max_element(values.begin(), values.end());
    if (worst - values[best] <= config.tolerance * std::max(1.0, std::abs(values[best]))) {
      result.report.converged = true;
      break;
    }
  }

  result.value = values[best];
  result.best.assign(population.begin() + best * static_cast<std::size_t>(dim),
                     population.begin() + (best + 1) * static_cast<std::size_t>(dim));
  return result;
}

GridResult brute_force_grid(const VectorObjective& objective, int dim,
                            int resolution, int workers) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("brute_force_grid: dimension must be 1..3");
  if (resolution < 2) throw std::invalid_argument("brute_force_grid: resolution must be >= 2");

  std::vector<double> axis(resolution);
  for (int k = 0; k < resolution; ++k)
    axis[k] = kBoxLo + (kBoxHi - kBoxLo) * k / (resolution - 1);

  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(resolution);

  auto point_at = [&](std::size_t flat, std::span<double> x) {
    for (int j = dim - 1; j >= 0; --j) {
      x[j] = axis[flat % resolution];
      flat /= resolution;
    }
  };

  GridResult result;
  result.value = std::numeric_limits<double>::infinity();
  std::size_t result_index = 0;

  constexpr std::size_t kChunk = 1 << 16;
  std::vector<double> chunk_values(std::min(kChunk, total));
  for (std::size_t start = 0; start < total; start += kChunk) {
    const std::size_t n = std::min(kChunk, total - start);
    auto eval = [&](std::size_t i) {
      std::vector<double> p(dim);
      point_at(start + i, p);
      return objective(p);
    };
    map_indexed(eval, {chunk_values.data(), n}, workers);
    for (std::size_t i = 0; i < n; ++i) {
      if (chunk_values[i] < result.value) {
        result.value = chunk_values[i];
        result_index = start + i;
      }
    }
  }

  result.best.resize(dim);
  point_at(result_index, result.best);
  return result;
}

}  // namespace ouq

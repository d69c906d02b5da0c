#include "ouq/parallel.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ouq {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void map_objective_serial(const VectorObjective& objective,
                          std::span<const double> points, int dim,
                          std::span<double> out) {
  assert(dim > 0 && points.size() == out.size() * static_cast<std::size_t>(dim));
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i)
    out[i] = objective(points.subspan(i * dim, dim));
}

void map_objective_parallel(const VectorObjective& objective,
                            std::span<const double> points, int dim,
                            std::span<double> out, int workers) {
#ifdef _OPENMP
  const std::size_t n = out.size();
  const int w = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(w)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    out[i] = objective(points.subspan(i * dim, dim));
#else
  (void)workers;
  map_objective_serial(objective, points, dim, out);
#endif
}

void map_objective(const VectorObjective& objective,
                   std::span<const double> points, int dim,
                   std::span<double> out, int workers) {
  if (resolve_workers(workers) <= 1 || out.size() < 2)
    map_objective_serial(objective, points, dim, out);
  else
    map_objective_parallel(objective, points, dim, out, workers);
}

void map_indexed_serial(const std::function<double(std::size_t)>& fn,
                        std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(i);
}

void map_indexed_parallel(const std::function<double(std::size_t)>& fn,
                          std::span<double> out, int workers) {
#ifdef _OPENMP
  const int w = resolve_workers(workers);
#pragma omp parallel for schedule(static) num_threads(w)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out.size()); ++i)
    out[i] = fn(static_cast<std::size_t>(i));
#else
  (void)workers;
  map_indexed_serial(fn, out);
#endif
}

void map_indexed(const std::function<double(std::size_t)>& fn,
                 std::span<double> out, int workers) {
  if (resolve_workers(workers) <= 1 || out.size() < 2)
    map_indexed_serial(fn, out);
  else
    map_indexed_parallel(fn, out, workers);
}

}  // namespace ouq

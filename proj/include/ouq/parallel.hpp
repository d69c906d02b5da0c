#ifndef OUQ_PARALLEL_HPP
#define OUQ_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ouq {

// Number of threads actually used when `requested` is 0 (auto).
int resolve_workers(int requested);

using VectorObjective = std::function<double(std::span<const double>)>;

// Evaluates `objective` on each row of `points` (row-major, `dim` columns).
// The serial kernel is the reference; the parallel kernel must produce
// bit-identical output for a pure objective, since every result lands in its
// own slot and no reduction order is involved.
void map_objective_serial(const VectorObjective& objective,
                          std::span<const double> points, int dim,
                          std::span<double> out);
void map_objective_parallel(const VectorObjective& objective,
                            std::span<const double> points, int dim,
                            std::span<double> out, int workers);
void map_objective(const VectorObjective& objective,
                   std::span<const double> points, int dim,
                   std::span<double> out, int workers);

// Same contract for scalar kernels indexed 0..n-1.
void map_indexed_serial(const std::function<double(std::size_t)>& fn,
                        std::span<double> out);
void map_indexed_parallel(const std::function<double(std::size_t)>& fn,
                          std::span<double> out, int workers);
void map_indexed(const std::function<double(std::size_t)>& fn,
                 std::span<double> out, int workers);

}  // namespace ouq

#endif

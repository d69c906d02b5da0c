#ifndef OUQ_OBJECTIVE_HPP
#define OUQ_OBJECTIVE_HPP

#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "ouq/models.hpp"
#include "ouq/moments.hpp"
#include "ouq/reconstruction.hpp"
#include "ouq/solver.hpp"

namespace ouq {

enum class ConstraintMode { Equality, Inequality };

// Product of per-input discrete measures.
struct ProductMeasure {
  std::vector<DiscreteMeasure> inputs;

  std::size_t dimension() const { return inputs.size(); }
  std::size_t grid_size() const;
};

struct ObjectiveSpec {
  std::vector<InputSpec> inputs;
  std::shared_ptr<const Model> model;
  double threshold = 0.0;  // in model output units
  ConstraintMode mode = ConstraintMode::Equality;

  void validate() const;
};

// Parameter vector layout, all components in the clamped unit cube:
//   equality mode:   per input the N_i+1 free canonical parameters
//                    (dimension sum(N_i + 1));
//   inequality mode: per input N_i moment coordinates followed by the
//                    N_i+1 free canonical parameters (dimension
//                    sum(2 N_i + 1)). A moment coordinate t selects the
//                    moment inside the intersection of its [alpha, beta]
//                    box with the feasible band left by lower orders, so
//                    every vector decodes to an admissible measure.
int parameter_dimension(const ObjectiveSpec& spec);

// Prepared probability-of-failure evaluator:
//   pof(v) = sum over the atom grid of the product weights where
//            G(x) <= threshold (non-strict).
// Values are memoized per distinct parameter vector; the model sees the
// full cartesian grid as a single batch.
class PofEvaluator {
 public:
  explicit PofEvaluator(ObjectiveSpec spec);

  double operator()(std::span<const double> params) const;
  double evaluate(std::span<const double> params, ProductMeasure* out_measure) const;
  ProductMeasure decode(std::span<const double> params) const;

  const ObjectiveSpec& spec() const { return spec_; }
  int dimension() const { return dim_; }

 private:
  struct PreparedInput {
    double lower = 0.0;
    double upper = 1.0;
    int order = 0;
    // Equality mode: fixed canonical prefix and unit moments.
    CanonicalSequence prefix;
    std::vector<double> unit_values;
    // Inequality mode: per-order boxes mapped to the unit interval as an
    // offset plus a scaled raw box (the offset part depends on decoded
    // lower moments and is applied during decode).
    std::vector<double> box_lo;  // raw-scale
    std::vector<double> box_hi;
  };

  DiscreteMeasure decode_input(const PreparedInput& in,
                               std::span<const double> params) const;

  ObjectiveSpec spec_;
  std::vector<PreparedInput> inputs_;
  int dim_ = 0;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, double> cache_;
};

// One-shot convenience wrapper around PofEvaluator.
double pof(const ObjectiveSpec& spec, std::span<const double> params);

struct MinimizePofResult {
  double value = 0.0;
  ProductMeasure argmin;
  std::vector<double> best_params;
  SolverReport report;
};

// Global minimization of the p.o.f over the parameter cube by differential
// evolution; deterministic given the solver seed.
MinimizePofResult minimize_pof(const ObjectiveSpec& spec, const SolverConfig& solver,
                               const std::vector<std::vector<double>>& warm_start = {});

}  // namespace ouq

#endif

#ifndef OUQ_ENVELOPE_HPP
#define OUQ_ENVELOPE_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ouq/objective.hpp"

namespace ouq {

struct EnvelopeSettings {
  SolverConfig solver;
  // Independent solves per grid point or bisection probe; the lowest value
  // wins. Under-estimating the infimum only makes the quantile conservative,
  // over-estimation is what the restarts fight.
  int restarts = 3;
};

struct EnvelopePoint {
  double threshold = 0.0;
  double value = 0.0;      // after isotonic repair
  double raw_value = 0.0;  // best of the restarts
  ProductMeasure argmin;
  SolverReport report;
  bool ok = false;
  std::string error;
};

// Minimized CDF over a sorted threshold grid. The true envelope is a
// nondecreasing function of the threshold, so solver noise is repaired by
// taking the running maximum.
struct EnvelopeCurve {
  std::vector<EnvelopePoint> points;
};

EnvelopeCurve lower_envelope(const std::vector<InputSpec>& inputs,
                             std::shared_ptr<const Model> model,
                             ConstraintMode mode, std::span<const double> h_grid,
                             const EnvelopeSettings& settings);

struct QuantileResult {
  double level = 0.0;
  double value = 0.0;  // midpoint of the final bracket
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  ProductMeasure witness;  // argmin measure at bracket_lo
  int probes = 0;
};

// Maximal p-quantile over the class: bisection on the monotone predicate
// envelope(h) >= p. The initial interval is expanded geometrically when it
// does not bracket the crossing; running out of expansions raises
// BracketingFailure. A non-positive resolution selects (hi - lo) / 2^10.
QuantileResult max_quantile(const std::vector<InputSpec>& inputs,
                            std::shared_ptr<const Model> model, ConstraintMode mode,
                            double p, double search_lo, double search_hi,
                            double resolution, const EnvelopeSettings& settings);

}  // namespace ouq

#endif

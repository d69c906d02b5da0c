#include "ouq/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "ouq/errors.hpp"

namespace ouq {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string param_key(std::span<const double> params) {
  std::string k(params.size() * sizeof(double), '\0');
  std::memcpy(k.data(), params.data(), k.size());
  return k;
}

}  // namespace

std::size_t ProductMeasure::grid_size() const {
  std::size_t n = 1;
  for (const DiscreteMeasure& m : inputs) n *= m.size();
  return n;
}

void ObjectiveSpec::validate() const {
  if (inputs.empty()) throw ConfigError("objective: at least one input required");
  if (!model) throw ConfigError("objective: no model attached");
  if (model->dimension() != static_cast<int>(inputs.size()))
    throw ConfigError("objective: model dimension " + std::to_string(model->dimension()) +
                      " does not match " + std::to_string(inputs.size()) + " inputs");
  for (const InputSpec& in : inputs) in.validate();
  if (mode == ConstraintMode::Equality)
    for (const InputSpec& in : inputs)
      if (in.has_intervals())
        throw ConfigError("input '" + in.name +
                          "': interval constraints require inequality mode");
}

int parameter_dimension(const ObjectiveSpec& spec) {
  int dim = 0;
  for (const InputSpec& in : spec.inputs)
    dim += (spec.mode == ConstraintMode::Equality) ? in.order() + 1 : 2 * in.order() + 1;
  return dim;
}

PofEvaluator::PofEvaluator(ObjectiveSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  dim_ = parameter_dimension(spec_);
  inputs_.reserve(spec_.inputs.size());
  for (const InputSpec& in : spec_.inputs) {
    PreparedInput prep;
    prep.lower = in.lower;
    prep.upper = in.upper;
    prep.order = in.order();
    if (spec_.mode == ConstraintMode::Equality) {
      MomentSequence raw;
      raw.lower = in.lower;
      raw.upper = in.upper;
      raw.values = in.equality_values();
      const MomentSequence unit = to_unit_interval(raw);
      prep.prefix = moments_to_canonical(raw);
      if (prep.prefix.boundary_terminated)
        throw BoundaryMoments("input '" + in.name +
                              "': constraints pin the measure; nothing to optimize");
      prep.unit_values = unit.values;
    } else {
      for (const MomentConstraint& c : in.constraints) {
        const double lo = (c.kind == ConstraintKind::Equality) ? c.value : c.lo;
        const double hi = (c.kind == ConstraintKind::Equality) ? c.value : c.hi;
        prep.box_lo.push_back(lo);
        prep.box_hi.push_back(hi);
      }
    }
    inputs_.push_back(std::move(prep));
  }
}

DiscreteMeasure PofEvaluator::decode_input(const PreparedInput& in,
                                           std::span<const double> params) const {
  if (spec_.mode == ConstraintMode::Equality)
    return reconstruct_from_unit(in.lower, in.upper, in.prefix, in.unit_values,
                                 params.subspan(0, in.order + 1));

  // Sequential moment decode: each coordinate picks the raw moment inside
  // the box intersected with the band still feasible given lower orders.
  const double w = in.upper - in.lower;
  CanonicalSequence prefix;
  std::vector<double> raw(in.order + 1, 0.0);
  raw[0] = 1.0;
  std::vector<double> unit_values(in.order);
  for (int j = 1; j <= in.order; ++j) {
    const auto [band_lo, band_hi] = feasible_moment_range(prefix.values);

    // Unit image of the raw box given the decoded lower raw moments.
    double offset = 0.0;
    for (int i = 0; i < j; ++i)
      offset += binomial(j, i) * std::pow(-in.lower, j - i) * raw[i];
    offset /= std::pow(w, j);
    const double scale = std::pow(w, j);
    double lo_u = offset + in.box_lo[j - 1] / scale;
    double hi_u = offset + in.box_hi[j - 1] / scale;
    lo_u = std::clamp(lo_u, band_lo, band_hi);
    hi_u = std::clamp(hi_u, band_lo, band_hi);

    const double band_width = band_hi - band_lo;
    double p_lo = band_width > 0.0 ? (lo_u - band_lo) / band_width : 0.5;
    double p_hi = band_width > 0.0 ? (hi_u - band_lo) / band_width : 0.5;
    p_lo = std::clamp(p_lo, kInteriorClamp, 1.0 - kInteriorClamp);
    p_hi = std::clamp(p_hi, kInteriorClamp, 1.0 - kInteriorClamp);

    const double t = params[j - 1];
    const double p = p_lo + t * (p_hi - p_lo);
    prefix.values.push_back(p);

    const double c_unit = band_lo + p * band_width;
    unit_values[j - 1] = c_unit;
    // Raw moment back from the unit one for the next offsets.
    raw[j] = (c_unit - offset) * scale;
  }
  prefix.zetas = zetas_from_canonical(prefix.values);
  return reconstruct_from_unit(in.lower, in.upper, prefix, unit_values,
                               params.subspan(in.order, in.order + 1));
}

ProductMeasure PofEvaluator::decode(std::span<const double> params) const {
  if (static_cast<int>(params.size()) != dim_)
    throw std::invalid_argument("pof: parameter vector has dimension " +
                                std::to_string(params.size()) + ", expected " +
                                std::to_string(dim_));
  ProductMeasure measure;
  measure.inputs.reserve(inputs_.size());
  std::size_t at = 0;
  for (const PreparedInput& in : inputs_) {
    const std::size_t span = (spec_.mode == ConstraintMode::Equality)
                                 ? in.order + 1
                                 : 2 * in.order + 1;
    measure.inputs.push_back(decode_input(in, params.subspan(at, span)));
    at += span;
  }
  return measure;
}

double PofEvaluator::evaluate(std::span<const double> params,
                              ProductMeasure* out_measure) const {
  if (out_measure == nullptr) {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    const auto it = cache_.find(param_key(params));
    if (it != cache_.end()) return it->second;
  }

  const ProductMeasure measure = decode(params);
  const std::size_t n = measure.grid_size();
  const std::size_t d = measure.dimension();

  // One batch over the full cartesian atom grid, rightmost input fastest.
  std::vector<double> points(n * d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t c = 0; c < d; ++c)
      points[row * d + c] = measure.inputs[c].atoms[idx[c]];
    for (std::size_t c = d; c-- > 0;) {
      if (++idx[c] < measure.inputs[c].size()) break;
      idx[c] = 0;
    }
  }
  std::vector<double> values(n);
  spec_.model->evaluate_batch(points, values);

  double total = 0.0;
  std::fill(idx.begin(), idx.end(), 0);
  for (std::size_t row = 0; row < n; ++row) {
    if (values[row] <= spec_.threshold) {
      double wprod = 1.0;
      for (std::size_t c = 0; c < d; ++c) wprod *= measure.inputs[c].weights[idx[c]];
      total += wprod;
    }
    for (std::size_t c = d; c-- > 0;) {
      if (++idx[c] < measure.inputs[c].size()) break;
      idx[c] = 0;
    }
  }
  total = std::clamp(total, 0.0, 1.0);

  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() > (1u << 20)) cache_.clear();
    cache_.emplace(param_key(params), total);
  }
  if (out_measure != nullptr) *out_measure = measure;
  return total;
}

double PofEvaluator::operator()(std::span<const double> params) const {
  return evaluate(params, nullptr);
}

double pof(const ObjectiveSpec& spec, std::span<const double> params) {
  return PofEvaluator(spec)(params);
}

MinimizePofResult minimize_pof(const ObjectiveSpec& spec, const SolverConfig& solver,
                               const std::vector<std::vector<double>>& warm_start) {
  PofEvaluator evaluator(spec);
  SolverConfig cfg = solver;
  if (!spec.model->reentrant()) cfg.workers = 1;

  const auto objective = [&evaluator](std::span<const double> v) { return evaluator(v); };
  SolveResult solved =
      differential_evolution(objective, evaluator.dimension(), cfg, warm_start);

  MinimizePofResult result;
  result.value = evaluator.evaluate(solved.best, &result.argmin);
  result.best_params = std::move(solved.best);
  result.report = std::move(solved.report);
  return result;
}

}  // namespace ouq

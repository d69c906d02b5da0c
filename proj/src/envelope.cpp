#include "ouq/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ouq/errors.hpp"

namespace ouq {

namespace {

constexpr std::uint64_t kPointStride = 0x9e3779b97f4a7c15ull;

struct ProbeResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  MinimizePofResult best;
};

// Best of `restarts` independent minimizations at one threshold.
ProbeResult solve_threshold(const std::vector<InputSpec>& inputs,
                            const std::shared_ptr<const Model>& model,
                            ConstraintMode mode, double threshold,
                            const EnvelopeSettings& settings,
                            std::uint64_t probe_index,
                            const std::vector<std::vector<double>>& warm_start) {
  ObjectiveSpec spec;
  spec.inputs = inputs;
  spec.model = model;
  spec.threshold = threshold;
  spec.mode = mode;

  ProbeResult out;
  for (int r = 0; r < std::max(settings.restarts, 1); ++r) {
    SolverConfig cfg = settings.solver;
    cfg.seed = settings.solver.seed + kPointStride * probe_index +
               static_cast<std::uint64_t>(r) + 1;
    MinimizePofResult run =
        minimize_pof(spec, cfg, r == 0 ? warm_start : std::vector<std::vector<double>>{});
    if (!(out.value <= run.value)) {  // NaN-safe "run is better"
      out.value = run.value;
      out.best = std::move(run);
    }
  }
  return out;
}

}  // namespace

EnvelopeCurve lower_envelope(const std::vector<InputSpec>& inputs,
                             std::shared_ptr<const Model> model,
                             ConstraintMode mode, std::span<const double> h_grid,
                             const EnvelopeSettings& settings) {
  if (h_grid.empty()) throw ConfigError("envelope: empty threshold grid");
  if (!std::is_sorted(h_grid.begin(), h_grid.end()))
    throw ConfigError("envelope: threshold grid must be sorted");

  EnvelopeCurve curve;
  curve.points.resize(h_grid.size());
  std::vector<std::vector<double>> warm;

  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    EnvelopePoint& point = curve.points[i];
    point.threshold = h_grid[i];
    try {
      ProbeResult probe =
          solve_threshold(inputs, model, mode, h_grid[i], settings, i, warm);
      point.raw_value = probe.value;
      point.value = probe.value;
      point.argmin = std::move(probe.best.argmin);
      point.report = std::move(probe.best.report);
      point.ok = true;
      warm.assign(1, probe.best.best_params);
    } catch (const Error& e) {
      point.ok = false;
      point.error = e.what();
      point.raw_value = std::numeric_limits<double>::quiet_NaN();
      point.value = point.raw_value;
    }
  }

  // Isotonic repair: the pointwise infimum of CDFs is nondecreasing in h.
  double running = -std::numeric_limits<double>::infinity();
  for (EnvelopePoint& point : curve.points) {
    if (!point.ok) continue;
    running = std::max(running, point.value);
    point.value = running;
  }
  return curve;
}

QuantileResult max_quantile(const std::vector<InputSpec>& inputs,
                            std::shared_ptr<const Model> model, ConstraintMode mode,
                            double p, double search_lo, double search_hi,
                            double resolution, const EnvelopeSettings& settings) {
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("max_quantile: level must lie in (0, 1)");
  if (!(search_lo < search_hi))
    throw ConfigError("max_quantile: search interval is empty");
  if (resolution <= 0.0) resolution = (search_hi - search_lo) / 1024.0;

  QuantileResult result;
  result.level = p;

  int probes = 0;
  auto envelope_at = [&](double h) {
    return solve_threshold(inputs, model, mode, h, settings,
                           static_cast<std::uint64_t>(1000 + probes++), {});
  };

  double lo = search_lo, hi = search_hi;
  ProbeResult at_lo = envelope_at(lo);
  ProbeResult at_hi = envelope_at(hi);

  // Expand geometrically until the crossing is bracketed.
  constexpr int kMaxExpansions = 60;
  int expansions = 0;
  while (at_lo.value >= p) {
    if (++expansions > kMaxExpansions)
      throw BracketingFailure("max_quantile: envelope stays above the level");
    lo -= (hi - lo);
    at_lo = envelope_at(lo);
  }
  while (at_hi.value < p) {
    if (++expansions > kMaxExpansions)
      throw BracketingFailure("max_quantile: envelope never reaches the level");
    hi += (hi - lo);
    at_hi = envelope_at(hi);
  }

  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    ProbeResult at_mid = envelope_at(mid);
    if (at_mid.value >= p) {
      hi = mid;
    } else {
      lo = mid;
      at_lo = std::move(at_mid);
    }
  }

  result.value = 0.5 * (lo + hi);
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.witness = std::move(at_lo.best.argmin);
  result.probes = probes;
  return result;
}

}  // namespace ouq

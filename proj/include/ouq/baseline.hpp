#ifndef OUQ_BASELINE_HPP
#define OUQ_BASELINE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ouq/moments.hpp"

namespace ouq {

enum class DistributionFamily { Gumbel, Normal, Uniform, LogNormal };

// Named initial distribution, optionally truncated to [lo, hi]. Parameters:
// Gumbel(mode, scale), Normal(mean, sd), Uniform(a, b), LogNormal(logmean,
// logsd of the underlying normal).
struct DistributionSpec {
  DistributionFamily family = DistributionFamily::Uniform;
  double a = 0.0;
  double b = 1.0;
  std::optional<std::pair<double, double>> truncation;

  void validate() const;
  double cdf(double x) const;
  double quantile(double u) const;
  double density(double x) const;
  // Truncation bounds when set, otherwise a range carrying all but ~1e-15
  // of the mass.
  std::pair<double, double> support_range() const;
};

// i.i.d. draws by inverse-CDF restriction: u uniform on [F(lo), F(hi)],
// x = F^{-1}(u). Deterministic per seed.
std::vector<double> sample(const DistributionSpec& spec, int n, std::uint64_t seed);

struct EmpiricalCdf {
  std::vector<double> sorted_values;

  explicit EmpiricalCdf(std::vector<double> values);
  std::size_t size() const { return sorted_values.size(); }
  // Right-continuous step function #(values <= x) / n.
  double operator()(double x) const;
};

// Order-statistic quantile with ceiling rank: x_(ceil(n p)).
double empirical_quantile(const EmpiricalCdf& cdf, double p);

// Percentile bootstrap interval for the empirical p-quantile. Resamples are
// seeded independently, so the result does not depend on the worker count.
std::pair<double, double> bootstrap_ci(std::span<const double> sample, double p,
                                       double level, int resamples,
                                       std::uint64_t seed, int workers = 0);

// Raw moments of the (truncated) distribution up to max_order by adaptive
// quadrature at relative tolerance 1e-10. The returned sequence carries the
// support range as its interval.
MomentSequence distribution_moments(const DistributionSpec& spec, int max_order);

}  // namespace ouq

#endif

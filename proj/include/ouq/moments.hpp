#ifndef OUQ_MOMENTS_HPP
#define OUQ_MOMENTS_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ouq {

// Canonical parameters are kept this far inside (0,1); free parameters at the
// exact boundary would collide atoms or pin the measure.
inline constexpr double kInteriorClamp = 1e-9;

// A canonical value within this distance of {0,1} is treated as a boundary
// value (the measure is then uniquely determined).
inline constexpr double kBoundaryTol = 1e-10;

enum class ConstraintKind { Equality, Interval };

// One constraint on the j-th raw moment of an input: either a fixed value or
// an interval [lo, hi].
struct MomentConstraint {
  int order = 0;
  ConstraintKind kind = ConstraintKind::Equality;
  double value = 0.0;  // equality value
  double lo = 0.0;     // interval bounds
  double hi = 0.0;

  static MomentConstraint equality(int order, double value);
  static MomentConstraint interval(int order, double lo, double hi);
};

// One scalar input: its range plus moment constraints of consecutive orders
// starting at 1.
struct InputSpec {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<MomentConstraint> constraints;

  int order() const { return static_cast<int>(constraints.size()); }
  bool has_intervals() const;
  // Throws ConfigError when an invariant is violated (bounds, consecutive
  // orders, interval endpoints).
  void validate() const;
  // Equality constraint values as a raw-moment sequence; throws ConfigError
  // in the presence of interval constraints.
  std::vector<double> equality_values() const;
};

// Raw moments c_1..c_k of a probability measure on [lower, upper].
struct MomentSequence {
  std::vector<double> values;
  double lower = 0.0;
  double upper = 1.0;

  int order() const { return static_cast<int>(values.size()); }
};

// Canonical moments p_1..p_k of a measure on [0,1], with the derived zeta
// products. p_n is the relative position of c_n between the smallest and
// largest n-th moment compatible with c_1..c_{n-1}. The sequence is
// boundary-terminated when its last value sits in {0,1}: such a sequence
// pins the measure and carries no later values.
struct CanonicalSequence {
  std::vector<double> values;  // p_1..p_k, each in [0,1]
  std::vector<double> zetas;   // zeta_1 = p_1, zeta_n = (1-p_{n-1}) p_n
  bool boundary_terminated = false;

  int order() const { return static_cast<int>(values.size()); }
  bool interior() const;
};

// zeta_1 = p_1, zeta_n = (1-p_{n-1}) p_n for n >= 2.
std::vector<double> zetas_from_canonical(std::span<const double> p);

// Three-term recurrence data of the monic orthogonal-like polynomials
// attached to a zeta sequence on [0,1]:
//   P_{m+1}(x) = (x - alpha_{m+1}) P_m(x) - beta_m P_{m-1}(x)
// with alpha_j = zeta_{2j-2} + zeta_{2j-1} (zeta_0 = 0) and
// beta_j = zeta_{2j-1} zeta_{2j}. Zetas beyond the sequence are zero.
struct UnitRecurrence {
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] pairs with alpha[j+1]
};
UnitRecurrence recurrence_from_zetas(std::span<const double> zetas,
                                     int polynomial_degree);

// Rescales raw moments from [l,u] to [0,1] through y = l + (u-l) x.
MomentSequence to_unit_interval(const MomentSequence& moments);
// Inverse rescaling of unit-interval moments onto [l,u].
MomentSequence from_unit_interval(const MomentSequence& unit_moments,
                                  double lower, double upper);

// Converts raw moments into canonical moments by the quotient-difference
// scheme on the moment series. Canonical moments are affine-invariant, so
// sequences on any interval are accepted and rescaled internally (in one
// extended-precision pass; composing to_unit_interval first is equivalent
// but rounds the heavily cancelling rescale through doubles). Agrees with
// the Hankel-determinant definition; for k <= 2 on [0,1] this reduces to
// p_1 = c_1, p_2 = (c_2 - c_1^2) / (c_1 (1 - c_1)).
// Throws InfeasibleMoments when the sequence leaves the moment space and
// BoundaryMoments when a boundary value is followed by further constraints.
CanonicalSequence moments_to_canonical(const MomentSequence& moments);

// Exact inverse of moments_to_canonical (unit interval). Accepts boundary
// values anywhere in [0,1]^k.
MomentSequence canonical_to_moments(const CanonicalSequence& canon);

// Raw moments c_1..c_k on [0,1] reached by the canonical values p_1..p_k.
std::vector<double> unit_moments_from_canonical(std::span<const double> p);

// Feasible range [c^-, c^+] of the next raw moment on [0,1] given the
// canonical prefix p_1..p_{j-1}; the endpoints are the moments reached with
// p_j = 0 and p_j = 1.
std::pair<double, double> feasible_moment_range(std::span<const double> prefix);

// Appends the free parameters gamma_1..gamma_{N+1} to an interior fixed
// sequence of length N, recomputing zetas across the junction. Rejects gamma
// components outside [kInteriorClamp, 1 - kInteriorClamp].
CanonicalSequence embed_free_parameters(const CanonicalSequence& fixed,
                                        std::span<const double> gamma);

}  // namespace ouq

#endif

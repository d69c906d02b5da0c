#ifndef OUQ_RECONSTRUCTION_HPP
#define OUQ_RECONSTRUCTION_HPP

#include <span>
#include <vector>

#include "ouq/moments.hpp"

namespace ouq {

// Roots closer than this fraction of the interval width are merged into one
// atom; their separating weight is vanishing.
inline constexpr double kAtomMergeTol = 1e-9;

// Weights in [-kWeightClampTol, 0) are clamped to zero and the rest
// renormalized; anything more negative signals an infeasible reconstruction.
inline constexpr double kWeightClampTol = 1e-8;

// Monic polynomial whose roots are the support of a discrete measure on
// [lower, upper]. When produced by support_polynomial it carries the
// three-term recurrence that generated it (in the same coordinates), which
// gives a stable evaluation and root path.
struct SupportPolynomial {
  std::vector<double> coefficients;  // ascending powers, monic
  double lower = 0.0;
  double upper = 1.0;
  UnitRecurrence recurrence;  // empty alpha when built from raw coefficients

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  bool has_recurrence() const { return !recurrence.alpha.empty(); }
  double evaluate(double x) const;
  double derivative(double x) const;
};

// Atoms and weights of one scalar discrete measure on [lower, upper].
struct DiscreteMeasure {
  std::vector<double> atoms;    // strictly increasing
  std::vector<double> weights;  // nonnegative, sum 1

  std::size_t size() const { return atoms.size(); }
  double moment(int order) const;
};

// Builds P^(N+1) from a full canonical sequence p_1..p_{2N+1} through the
// three-term recursion
//   P^(k+1)(x) = (x - l - (u-l)(zeta_{2k} + zeta_{2k+1})) P^(k)(x)
//                - (u-l)^2 zeta_{2k-1} zeta_{2k} P^(k-1)(x)
// with P^(-1) = 0, P^(0) = 1.
SupportPolynomial support_polynomial(const CanonicalSequence& canon,
                                     double lower, double upper);

// All deg(P) real roots, sorted ascending, refined to relative tolerance
// 1e-12. Roots must lie within [lower - 1e-8 w, upper + 1e-8 w]; residuals
// above tolerance raise RootFindingFailure.
std::vector<double> polynomial_roots(const SupportPolynomial& poly);

// Solves the (N+1)x(N+1) system { sum w = 1, sum w x^j = c_j } for the
// weights of atoms reproducing the given raw moments (same coordinates as
// the atoms). Throws SingularSystem for coincident atoms and NegativeWeight
// when a weight falls below the clamp tolerance.
std::vector<double> weights_from_moments(std::span<const double> atoms,
                                         const MomentSequence& constraints);

// Composition: canonical prefix from the spec's equality constraints, free
// parameters appended, support polynomial on [0,1], roots, merge, weights,
// atoms mapped back to [lower, upper].
DiscreteMeasure reconstruct_measure(const InputSpec& spec,
                                    std::span<const double> gamma);

// Same reconstruction with the canonical prefix and unit moments already
// computed (hot path of the objective; skips spec validation).
DiscreteMeasure reconstruct_from_unit(double lower, double upper,
                                      const CanonicalSequence& prefix,
                                      std::span<const double> unit_moment_values,
                                      std::span<const double> gamma);

}  // namespace ouq

#endif

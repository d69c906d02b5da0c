#include "ouq/reconstruction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ouq/errors.hpp"

namespace ouq {

namespace {

// P and P' by the three-term recursion; stable where Horner on expanded
// coefficients cancels.
std::pair<double, double> eval_recurrence(const UnitRecurrence& rec, double x) {
  double pm1 = 0.0, p = 1.0, dm1 = 0.0, d = 0.0;
  for (std::size_t m = 0; m < rec.alpha.size(); ++m) {
    const double b = (m > 0) ? rec.beta[m - 1] : 0.0;
    const double pn = (x - rec.alpha[m]) * p - b * pm1;
    const double dn = p + (x - rec.alpha[m]) * d - b * dm1;
    pm1 = p;
    p = pn;
    dm1 = d;
    d = dn;
  }
  return {p, d};
}

std::pair<double, double> eval_horner(std::span<const double> coeff, double x) {
  double p = 0.0, d = 0.0;
  for (std::size_t i = coeff.size(); i-- > 0;) {
    d = d * x + p;
    p = p * x + coeff[i];
  }
  return {p, d};
}

// Scale-aware residual bound: eps-level noise of Horner evaluation.
double residual_scale(std::span<const double> coeff, double x) {
  double s = 0.0, ax = std::abs(x), pw = 1.0;
  for (double c : coeff) {
    s += std::abs(c) * pw;
    pw *= ax;
  }
  return std::max(s, 1.0);
}

std::vector<double> newton_refine(const SupportPolynomial& poly,
                                  std::vector<double> roots) {
  for (double& x : roots) {
    for (int it = 0; it < 8; ++it) {
      const auto [p, d] = poly.has_recurrence()
                              ? eval_recurrence(poly.recurrence, x)
                              : eval_horner(poly.coefficients, x);
      if (d == 0.0) break;
      const double step = p / d;
      x -= step;
      if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(x))) break;
    }
  }
  return roots;
}

}  // namespace

double SupportPolynomial::evaluate(double x) const {
  return has_recurrence() ? eval_recurrence(recurrence, x).first
                          : eval_horner(coefficients, x).first;
}

double SupportPolynomial::derivative(double x) const {
  return has_recurrence() ? eval_recurrence(recurrence, x).second
                          : eval_horner(coefficients, x).second;
}

double DiscreteMeasure::moment(int order) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    s += weights[i] * std::pow(atoms[i], order);
  return s;
}

SupportPolynomial support_polynomial(const CanonicalSequence& canon,
                                     double lower, double upper) {
  const int len = canon.order();
  if (len < 1 || len % 2 == 0)
    throw std::invalid_argument("support_polynomial: canonical length must be odd (2N+1)");
  if (!canon.interior())
    throw std::invalid_argument("support_polynomial: canonical sequence must be interior");
  if (!(lower < upper))
    throw std::invalid_argument("support_polynomial: lower must be < upper");

  const int deg = (len + 1) / 2;  // N+1 atoms
  const std::vector<double> z =
      canon.zetas.empty() ? zetas_from_canonical(canon.values) : canon.zetas;
  UnitRecurrence rec = recurrence_from_zetas(z, deg);
  // Same recursion in [lower, upper] coordinates.
  const double w = upper - lower;
  for (double& a : rec.alpha) a = lower + w * a;
  for (double& b : rec.beta) b *= w * w;

  // Multiply out the recursion to expose the monic coefficients.
  std::vector<double> pm1{}, p{1.0};
  for (int m = 0; m < deg; ++m) {
    std::vector<double> pn(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      pn[i + 1] += p[i];
      pn[i] -= rec.alpha[m] * p[i];
    }
    if (m > 0)
      for (std::size_t i = 0; i < pm1.size(); ++i) pn[i] -= rec.beta[m - 1] * pm1[i];
    pm1 = std::move(p);
    p = std::move(pn);
  }

  SupportPolynomial out;
  out.coefficients = std::move(p);
  out.lower = lower;
  out.upper = upper;
  out.recurrence = std::move(rec);
  return out;
}

std::vector<double> polynomial_roots(const SupportPolynomial& poly) {
  const int deg = poly.degree();
  if (deg < 1 || poly.coefficients.back() != 1.0)
    throw std::invalid_argument("polynomial_roots: need a monic polynomial of degree >= 1");

  std::vector<double> roots;
  roots.reserve(deg);
  if (poly.has_recurrence()) {
    // The recursion has positive beta coefficients for interior sequences, so
    // the polynomial is the characteristic polynomial of a symmetric
    // tridiagonal matrix with off-diagonals sqrt(beta).
    Eigen::VectorXd diag(deg), sub(std::max(deg - 1, 0));
    for (int i = 0; i < deg; ++i) diag(i) = poly.recurrence.alpha[i];
    for (int i = 0; i + 1 < deg; ++i) {
      const double b = poly.recurrence.beta[i];
      if (b < 0.0)
        throw RootFindingFailure("support polynomial has a negative recurrence weight");
      sub(i) = std::sqrt(b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i + 1 < deg; ++i) companion(i + 1, i) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -poly.coefficients[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i).real());
  }

  roots = newton_refine(poly, std::move(roots));
  std::sort(roots.begin(), roots.end());

  const double w = poly.upper - poly.lower;
  const double slack = 1e-8 * w;
  for (double& x : roots) {
    const double res = std::abs(poly.evaluate(x));
    const double tol = 1e-8 * residual_scale(poly.coefficients, x);
    if (!(res <= tol))
      throw RootFindingFailure("root residual " + std::to_string(res) +
                               " exceeds tolerance at x = " + std::to_string(x));
    if (x < poly.lower - slack || x > poly.upper + slack)
      throw RootFindingFailure("root " + std::to_string(x) +
                               " escapes the support interval");
    x = std::clamp(x, poly.lower, poly.upper);
  }
  return roots;
}

std::vector<double> weights_from_moments(std::span<const double> atoms,
                                         const MomentSequence& constraints) {
  const int m = static_cast<int>(atoms.size());
  if (m < 1) throw std::invalid_argument("weights_from_moments: no atoms");
  if (static_cast<int>(constraints.values.size()) != m - 1)
    throw std::invalid_argument("weights_from_moments: need exactly one more atom than moments");

  const double span_w = std::max(constraints.upper - constraints.lower, 1.0);
  for (int i = 0; i + 1 < m; ++i)
    if (!(atoms[i + 1] - atoms[i] > kAtomMergeTol * span_w))
      throw SingularSystem("coincident atoms in the weight system");

  Eigen::MatrixXd v(m, m);
  Eigen::VectorXd rhs(m);
  for (int col = 0; col < m; ++col) v(0, col) = 1.0;
  rhs(0) = 1.0;
  for (int row = 1; row < m; ++row) {
    for (int col = 0; col < m; ++col) v(row, col) = std::pow(atoms[col], row);
    rhs(row) = constraints.values[row - 1];
  }
  const Eigen::VectorXd sol = v.partialPivLu().solve(rhs);

  std::vector<double> weights(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double wi = sol(i);
    if (wi < -kWeightClampTol)
      throw NegativeWeight("weight " + std::to_string(wi) + " at atom " +
                           std::to_string(atoms[i]));
    wi = std::max(wi, 0.0);
    weights[i] = wi;
    total += wi;
  }
  if (total <= 0.0) throw NegativeWeight("weights sum to zero after clamping");
  for (double& wi : weights) wi /= total;
  return weights;
}

DiscreteMeasure reconstruct_from_unit(double lower, double upper,
                                      const CanonicalSequence& prefix,
                                      std::span<const double> unit_moment_values,
                                      std::span<const double> gamma) {
  const CanonicalSequence full = embed_free_parameters(prefix, gamma);
  const SupportPolynomial poly = support_polynomial(full, 0.0, 1.0);
  std::vector<double> roots = polynomial_roots(poly);

  // Merge near-coincident roots; their separating weight vanishes.
  std::vector<double> atoms;
  atoms.reserve(roots.size());
  std::size_t i = 0;
  while (i < roots.size()) {
    std::size_t j = i + 1;
    double sum = roots[i];
    while (j < roots.size() && roots[j] - roots[j - 1] < kAtomMergeTol) {
      sum += roots[j];
      ++j;
    }
    atoms.push_back(sum / static_cast<double>(j - i));
    i = j;
  }

  MomentSequence used;
  used.lower = 0.0;
  used.upper = 1.0;
  const std::size_t n_used = std::min(unit_moment_values.size(), atoms.size() - 1);
  used.values.assign(unit_moment_values.begin(), unit_moment_values.begin() + n_used);

  DiscreteMeasure measure;
  measure.weights = weights_from_moments(atoms, used);
  measure.atoms.reserve(atoms.size());
  for (double a : atoms) measure.atoms.push_back(lower + (upper - lower) * a);
  return measure;
}

DiscreteMeasure reconstruct_measure(const InputSpec& spec,
                                    std::span<const double> gamma) {
  spec.validate();
  MomentSequence raw;
  raw.lower = spec.lower;
  raw.upper = spec.upper;
  raw.values = spec.equality_values();
  const MomentSequence unit = to_unit_interval(raw);
  const CanonicalSequence prefix = moments_to_canonical(raw);
  if (prefix.boundary_terminated)
    throw BoundaryMoments("input '" + spec.name +
                          "': constraints pin the measure; no free parameters remain");
  return reconstruct_from_unit(spec.lower, spec.upper, prefix, unit.values, gamma);
}

}  // namespace ouq

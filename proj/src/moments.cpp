#include "ouq/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "ouq/errors.hpp"

namespace ouq {

namespace {

std::string ord(int j) { return "order " + std::to_string(j); }

// Pascal-triangle binomial, exact for the small orders used here.
long double binomial(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// The conversion between raw moments and canonical moments is intrinsically
// ill-conditioned in the depth of the sequence (the feasible band of the
// next moment shrinks geometrically). All internal arithmetic runs in
// extended precision so the loss stays well below the documented
// tolerances; interfaces stay in double.
long double pow_ld(long double x, int e) {
  long double r = 1.0L;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

MomentConstraint MomentConstraint::equality(int order, double value) {
  MomentConstraint c;
  c.order = order;
  c.kind = ConstraintKind::Equality;
  c.value = value;
  return c;
}

MomentConstraint MomentConstraint::interval(int order, double lo, double hi) {
  MomentConstraint c;
  c.order = order;
  c.kind = ConstraintKind::Interval;
  c.lo = lo;
  c.hi = hi;
  return c;
}

bool InputSpec::has_intervals() const {
  return std::any_of(constraints.begin(), constraints.end(), [](const auto& c) {
    return c.kind == ConstraintKind::Interval;
  });
}

void InputSpec::validate() const {
  if (!(lower < upper))
    throw ConfigError("input '" + name + "': lower bound must be < upper bound");
  if (constraints.empty())
    throw ConfigError("input '" + name + "': at least one moment constraint required");
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const MomentConstraint& c = constraints[j];
    if (c.order != static_cast<int>(j) + 1)
      throw ConfigError("input '" + name + "': constraint orders must be consecutive from 1");
    if (c.kind == ConstraintKind::Interval && !(c.lo < c.hi))
      throw ConfigError("input '" + name + "': interval constraint at " + ord(c.order) +
                        " needs lo < hi");
  }
}

std::vector<double> InputSpec::equality_values() const {
  std::vector<double> out;
  out.reserve(constraints.size());
  for (const MomentConstraint& c : constraints) {
    if (c.kind != ConstraintKind::Equality)
      throw ConfigError("input '" + name + "': interval constraint where an equality is required");
    out.push_back(c.value);
  }
  return out;
}

bool CanonicalSequence::interior() const {
  for (double p : values)
    if (!(p > 0.0 && p < 1.0)) return false;
  return true;
}

std::vector<double> zetas_from_canonical(std::span<const double> p) {
  std::vector<double> z(p.size());
  for (std::size_t n = 0; n < p.size(); ++n)
    z[n] = (n == 0) ? p[0] : (1.0 - p[n - 1]) * p[n];
  return z;
}

UnitRecurrence recurrence_from_zetas(std::span<const double> zetas, int degree) {
  auto zeta = [&](int n) -> double {
    return (n >= 1 && n <= static_cast<int>(zetas.size())) ? zetas[n - 1] : 0.0;
  };
  UnitRecurrence rec;
  rec.alpha.resize(degree);
  rec.beta.resize(degree > 0 ? degree - 1 : 0);
  for (int j = 1; j <= degree; ++j) rec.alpha[j - 1] = zeta(2 * j - 2) + zeta(2 * j - 1);
  for (int j = 1; j < degree; ++j) rec.beta[j - 1] = zeta(2 * j - 1) * zeta(2 * j);
  return rec;
}

namespace {

// Unit-interval moments (with leading 1) in extended precision. The affine
// recombination cancels heavily when the interval is narrow relative to its
// offset, so it is never routed through intermediate doubles.
std::vector<long double> unit_moments_ld(const MomentSequence& moments) {
  const double l = moments.lower, u = moments.upper;
  if (!(l < u)) throw ConfigError("moment sequence: lower bound must be < upper bound");
  if (moments.values.empty()) throw ConfigError("moment sequence: empty");
  const int k = moments.order();
  std::vector<long double> c(k + 1);
  c[0] = 1.0L;
  for (int j = 1; j <= k; ++j) c[j] = moments.values[j - 1];
  if (l == 0.0 && u == 1.0) return c;

  std::vector<long double> out(k + 1);
  out[0] = 1.0L;
  const long double w = static_cast<long double>(u) - l;
  for (int j = 1; j <= k; ++j) {
    long double s = 0.0L;
    for (int i = 0; i <= j; ++i) s += binomial(j, i) * pow_ld(-l, j - i) * c[i];
    out[j] = s / pow_ld(w, j);
  }
  return out;
}

}  // namespace

MomentSequence to_unit_interval(const MomentSequence& moments) {
  const std::vector<long double> c = unit_moments_ld(moments);
  MomentSequence out;
  out.lower = 0.0;
  out.upper = 1.0;
  out.values.resize(moments.order());
  for (int j = 1; j <= moments.order(); ++j)
    out.values[j - 1] = static_cast<double>(c[j]);
  return out;
}

MomentSequence from_unit_interval(const MomentSequence& unit_moments,
                                  double lower, double upper) {
  if (!(lower < upper)) throw ConfigError("moment sequence: lower bound must be < upper bound");
  const int k = unit_moments.order();
  std::vector<long double> c(k + 1);
  c[0] = 1.0L;
  for (int j = 1; j <= k; ++j) c[j] = unit_moments.values[j - 1];

  MomentSequence out;
  out.lower = lower;
  out.upper = upper;
  out.values.resize(k);
  const long double w = static_cast<long double>(upper) - lower;
  for (int j = 1; j <= k; ++j) {
    long double s = 0.0L;
    for (int i = 0; i <= j; ++i)
      s += binomial(j, i) * pow_ld(lower, j - i) * pow_ld(w, i) * c[i];
    out.values[j - 1] = static_cast<double>(s);
  }
  return out;
}

// Quotient-difference scheme on the moment series c_0=1, c_1, c_2, ...
// The q/e columns deliver the continued-fraction coefficients of the
// Stieltjes transform, which are exactly the zetas:
//   zeta_{2j-1} = q_j^{(0)},  zeta_{2j} = e_j^{(0)}.
// Canonical values follow from p_1 = zeta_1, p_n = zeta_n / (1 - p_{n-1}).
// Columns are consumed progressively so a boundary value (which would poison
// later divisions) stops the scheme first.
CanonicalSequence moments_to_canonical(const MomentSequence& moments) {
  const int k = moments.order();
  if (k < 1) throw ConfigError("moments_to_canonical: empty sequence");

  // Canonical moments are invariant under affine maps of the support, so a
  // sequence on any interval is rescaled internally (without a double
  // round-trip in between).
  const std::vector<long double> c = unit_moments_ld(moments);

  CanonicalSequence out;
  out.values.reserve(k);

  enum class Status { Interior, Boundary, Infeasible };
  auto classify = [&](long double p) {
    if (p < -kBoundaryTol || p > 1.0L + kBoundaryTol) return Status::Infeasible;
    if (p <= kBoundaryTol || p >= 1.0L - kBoundaryTol) return Status::Boundary;
    return Status::Interior;
  };

  long double prev_p = 0.0L;
  bool done = false;
  // Emits p_n from zeta_n; returns false once the sequence must stop.
  auto emit = [&](int n, long double zeta) {
    long double p = (n == 1) ? zeta : zeta / (1.0L - prev_p);
    switch (classify(p)) {
      case Status::Infeasible:
        throw InfeasibleMoments("moment sequence leaves the moment space at " + ord(n) +
                                " (canonical value " + std::to_string(static_cast<double>(p)) +
                                ")");
      case Status::Boundary:
        p = (p < 0.5L) ? 0.0L : 1.0L;
        if (n < k)
          throw BoundaryMoments("moment sequence touches the moment space boundary at " +
                                ord(n) + " but further constraints follow");
        out.values.push_back(static_cast<double>(p));
        out.boundary_terminated = true;
        done = true;
        return false;
      case Status::Interior:
        out.values.push_back(static_cast<double>(p));
        prev_p = p;
        return n < k;
    }
    return false;
  };

  // q_1^{(n)} = c_{n+1} / c_n. A vanishing c_n can only precede a boundary,
  // which is detected before the poisoned entry is used.
  std::vector<long double> q(k), e(k, 0.0L);
  for (int n = 0; n < k; ++n) q[n] = (c[n] != 0.0L) ? c[n + 1] / c[n] : 0.0L;

  if (emit(1, q[0])) {
    for (int j = 1; !done; ++j) {
      // e_j^{(n)} = q_j^{(n+1)} - q_j^{(n)} + e_{j-1}^{(n+1)}
      const int me = k - 2 * j + 1;
      if (me < 1) break;
      std::vector<long double> enew(me);
      for (int n = 0; n < me; ++n) enew[n] = q[n + 1] - q[n] + e[n + 1];
      if (!emit(2 * j, enew[0])) break;

      // q_{j+1}^{(n)} = q_j^{(n+1)} e_j^{(n+1)} / e_j^{(n)}
      const int mq = k - 2 * j;
      if (mq < 1) break;
      std::vector<long double> qnew(mq);
      for (int n = 0; n < mq; ++n)
        qnew[n] = (enew[n] != 0.0L) ? q[n + 1] * enew[n + 1] / enew[n] : 0.0L;
      if (!emit(2 * j + 1, qnew[0])) break;

      q = std::move(qnew);
      e = std::move(enew);
    }
  }

  out.zetas = zetas_from_canonical(out.values);
  return out;
}

std::vector<double> unit_moments_from_canonical(std::span<const double> p) {
  const int k = static_cast<int>(p.size());
  // Moments are the (1,1) entries of powers of the monic Jacobi matrix
  //   J = tridiag(beta, alpha, 1);
  // a matrix of size ceil((k+1)/2) reproduces c_1..c_k exactly.
  const int m = (k + 2) / 2;
  auto zeta = [&](int n) -> long double {
    if (n < 1 || n > k) return 0.0L;
    return (n == 1) ? static_cast<long double>(p[0])
                    : (1.0L - p[n - 2]) * static_cast<long double>(p[n - 1]);
  };
  std::vector<long double> alpha(m), beta(m > 0 ? m - 1 : 0);
  for (int j = 1; j <= m; ++j) alpha[j - 1] = zeta(2 * j - 2) + zeta(2 * j - 1);
  for (int j = 1; j < m; ++j) beta[j - 1] = zeta(2 * j - 1) * zeta(2 * j);

  std::vector<long double> u(m, 0.0L), v(m);
  u[0] = 1.0L;
  std::vector<double> out(k);
  for (int n = 1; n <= k; ++n) {
    for (int i = 0; i < m; ++i) {
      long double s = alpha[i] * u[i];
      if (i > 0) s += beta[i - 1] * u[i - 1];
      if (i + 1 < m) s += u[i + 1];
      v[i] = s;
    }
    std::swap(u, v);
    out[n - 1] = static_cast<double>(u[0]);
  }
  return out;
}

MomentSequence canonical_to_moments(const CanonicalSequence& canon) {
  MomentSequence out;
  out.lower = 0.0;
  out.upper = 1.0;
  out.values = unit_moments_from_canonical(canon.values);
  return out;
}

std::pair<double, double> feasible_moment_range(std::span<const double> prefix) {
  const int j = static_cast<int>(prefix.size()) + 1;
  std::vector<double> p(prefix.begin(), prefix.end());
  p.push_back(0.0);
  const double lo = unit_moments_from_canonical(p)[j - 1];
  p.back() = 1.0;
  const double hi = unit_moments_from_canonical(p)[j - 1];
  return {lo, hi};
}

CanonicalSequence embed_free_parameters(const CanonicalSequence& fixed,
                                        std::span<const double> gamma) {
  if (fixed.boundary_terminated || !fixed.interior())
    throw BoundaryMoments("cannot append free parameters to a boundary sequence");
  if (gamma.size() != fixed.values.size() + 1)
    throw std::invalid_argument("embed_free_parameters: need exactly N+1 free parameters");
  for (double g : gamma)
    if (!(g >= kInteriorClamp && g <= 1.0 - kInteriorClamp))
      throw std::invalid_argument("embed_free_parameters: free parameter outside the open cube");

  CanonicalSequence out;
  out.values.reserve(fixed.values.size() + gamma.size());
  out.values.insert(out.values.end(), fixed.values.begin(), fixed.values.end());
  out.values.insert(out.values.end(), gamma.begin(), gamma.end());
  out.zetas = zetas_from_canonical(out.values);
  return out;
}

}  // namespace ouq

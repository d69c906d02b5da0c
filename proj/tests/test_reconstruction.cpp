#include <doctest.h>

#include <cmath>
#include <random>

#include "ouq/errors.hpp"
#include "ouq/reconstruction.hpp"
#include "oracles.hpp"

using namespace ouq;

namespace {

CanonicalSequence canon(std::vector<double> p) {
  CanonicalSequence c;
  c.values = std::move(p);
  c.zetas = zetas_from_canonical(c.values);
  return c;
}

InputSpec unit_mean_spec(double mean) {
  InputSpec in;
  in.name = "x";
  in.lower = 0.0;
  in.upper = 1.0;
  in.constraints = {MomentConstraint::equality(1, mean)};
  return in;
}

}  // namespace

TEST_SUITE_BEGIN("reconstruction");

TEST_CASE("support polynomial by hand") {
  const SupportPolynomial p1 = support_polynomial(canon({0.5}), 0.0, 1.0);
  REQUIRE(p1.degree() == 1);
  CHECK(p1.coefficients[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(p1.coefficients[1] == 1.0);

  // p = (1/2, 1/2, 1/2) has zetas (1/2, 1/4, 1/4): x^2 - x + 1/8.
  const SupportPolynomial p2 = support_polynomial(canon({0.5, 0.5, 0.5}), 0.0, 1.0);
  REQUIRE(p2.degree() == 2);
  CHECK(p2.coefficients[0] == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(p2.coefficients[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(p2.coefficients[2] == 1.0);

  CHECK_THROWS_AS(support_polynomial(canon({0.5, 0.5}), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(support_polynomial(canon({0.5}), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("roots of the support polynomial") {
  const auto r1 = polynomial_roots(support_polynomial(canon({0.5}), 0.0, 1.0));
  REQUIRE(r1.size() == 1);
  CHECK(r1[0] == doctest::Approx(0.5).epsilon(1e-13));

  const auto r2 = polynomial_roots(support_polynomial(canon({0.5, 0.5, 0.5}), 0.0, 1.0));
  REQUIRE(r2.size() == 2);
  CHECK(r2[0] == doctest::Approx(0.5 - std::sqrt(2.0) / 4.0).epsilon(1e-12));
  CHECK(r2[1] == doctest::Approx(0.5 + std::sqrt(2.0) / 4.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 100; ++i) {
    std::vector<double> p;
    for (int j = 0; j < 5; ++j) p.push_back(0.05 + 0.9 * uniform());
    const auto roots = polynomial_roots(support_polynomial(canon(p), 0.0, 1.0));
    REQUIRE(roots.size() == 3);
    CHECK(std::is_sorted(roots.begin(), roots.end()));
    for (double r : roots) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
}

TEST_CASE("roots are affine equivariant") {
  std::mt19937_64 rng(5);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 50; ++i) {
    std::vector<double> p;
    for (int j = 0; j < 5; ++j) p.push_back(0.05 + 0.9 * uniform());
    const double lo = -2.0 + 3.0 * uniform();
    const double hi = lo + 0.5 + 4.0 * uniform();
    const auto unit = polynomial_roots(support_polynomial(canon(p), 0.0, 1.0));
    const auto scaled = polynomial_roots(support_polynomial(canon(p), lo, hi));
    REQUIRE(unit.size() == scaled.size());
    for (std::size_t k = 0; k < unit.size(); ++k)
      CHECK(scaled[k] ==
            doctest::Approx(lo + (hi - lo) * unit[k]).epsilon(1e-9).scale(std::abs(hi) + 1));
  }
}

TEST_CASE("companion fallback rejects complex pairs") {
  SupportPolynomial p;
  p.coefficients = {1.0, 0.0, 1.0};  // x^2 + 1
  p.lower = 0.0;
  p.upper = 1.0;
  CHECK_THROWS_AS(polynomial_roots(p), RootFindingFailure);
}

TEST_CASE("weights from the moment system") {
  MomentSequence c1;
  c1.values = {0.62};
  const auto w = weights_from_moments(std::vector<double>{0.2, 0.8}, c1);
  CHECK(w[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.7).epsilon(1e-12));

  MomentSequence none;
  const auto w1 = weights_from_moments(std::vector<double>{0.5}, none);
  CHECK(w1[0] == doctest::Approx(1.0));

  MomentSequence half;
  half.values = {0.5};
  const double lo = 0.5 - std::sqrt(2.0) / 4.0, hi = 0.5 + std::sqrt(2.0) / 4.0;
  const auto w2 = weights_from_moments(std::vector<double>{lo, hi}, half);
  CHECK(w2[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w2[1] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(weights_from_moments(std::vector<double>{0.3, 0.3 + 1e-12}, c1),
                  SingularSystem);
  // Mass far above both atoms: the linear system answers with a negative weight.
  CHECK_THROWS_AS(weights_from_moments(std::vector<double>{0.1, 0.2}, c1), NegativeWeight);
}

TEST_CASE("reconstruction composes the pipeline") {
  const auto m = reconstruct_measure(unit_mean_spec(0.5), std::vector<double>{0.5, 0.5});
  REQUIRE(m.size() == 2);
  CHECK(m.atoms[0] == doctest::Approx(0.5 - std::sqrt(2.0) / 4.0).epsilon(1e-12));
  CHECK(m.atoms[1] == doctest::Approx(0.5 + std::sqrt(2.0) / 4.0).epsilon(1e-12));
  CHECK(m.weights[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(m.weights[1] == doctest::Approx(0.5).epsilon(1e-10));

  InputSpec scaled;
  scaled.name = "zv";
  scaled.lower = 49.0;
  scaled.upper = 51.0;
  scaled.constraints = {MomentConstraint::equality(1, 50.0)};
  const auto ms = reconstruct_measure(scaled, std::vector<double>{0.5, 0.5});
  CHECK(ms.atoms[0] == doctest::Approx(49.0 + 2.0 * (0.5 - std::sqrt(2.0) / 4.0)).epsilon(1e-12));
  CHECK(ms.atoms[1] == doctest::Approx(49.0 + 2.0 * (0.5 + std::sqrt(2.0) / 4.0)).epsilon(1e-12));
  CHECK(ms.weights[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("moment reproduction for random specs and parameters") {
  std::mt19937_64 rng(17);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 100; ++i) {
    const auto source = oracle::random_measure(rng, 3, 2.0, 5.0);
    InputSpec in;
    in.name = "r";
    in.lower = 2.0;
    in.upper = 5.0;
    const auto raw = oracle::raw_moments(source, 2);
    in.constraints = {MomentConstraint::equality(1, raw[0]),
                      MomentConstraint::equality(2, raw[1])};
    const std::vector<double> gamma{0.05 + 0.9 * uniform(), 0.05 + 0.9 * uniform(),
                                    0.05 + 0.9 * uniform()};
    const auto m = reconstruct_measure(in, gamma);
    REQUIRE(m.size() <= 3);
    double total = 0.0;
    for (double w : m.weights) {
      CHECK(w >= 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::is_sorted(m.atoms.begin(), m.atoms.end()));
    for (double a : m.atoms) {
      CHECK(a >= 2.0);
      CHECK(a <= 5.0);
    }
    for (int j = 1; j <= 2; ++j)
      CHECK(m.moment(j) ==
            doctest::Approx(raw[j - 1]).epsilon(1e-8).scale(std::abs(raw[j - 1])));
  }
}

TEST_CASE("round trip: measure -> moments -> canonical -> measure") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    const int n_constraints = 1 + static_cast<int>(rng() % 3);
    const double lo = -1.0 + 0.1 * static_cast<double>(rng() % 30);
    const double hi = lo + 0.5 + 0.1 * static_cast<double>(rng() % 50);
    const auto source = oracle::random_measure(rng, n_constraints + 1, lo, hi);

    MomentSequence raw;
    raw.lower = lo;
    raw.upper = hi;
    raw.values = oracle::raw_moments(source, 2 * n_constraints + 1);
    const MomentSequence unit = to_unit_interval(raw);
    const CanonicalSequence full = moments_to_canonical(unit);
    REQUIRE(full.order() == 2 * n_constraints + 1);
    REQUIRE_FALSE(full.boundary_terminated);

    CanonicalSequence prefix;
    prefix.values.assign(full.values.begin(), full.values.begin() + n_constraints);
    prefix.zetas = zetas_from_canonical(prefix.values);
    const std::span<const double> gamma{full.values.data() + n_constraints,
                                        static_cast<std::size_t>(n_constraints) + 1};
    const std::span<const double> unit_vals{unit.values.data(),
                                            static_cast<std::size_t>(n_constraints)};
    const DiscreteMeasure rebuilt =
        reconstruct_from_unit(lo, hi, prefix, unit_vals, gamma);

    REQUIRE(rebuilt.size() == source.atoms.size());
    for (std::size_t k = 0; k < source.atoms.size(); ++k) {
      CHECK(rebuilt.atoms[k] ==
            doctest::Approx(source.atoms[k]).epsilon(1e-7).scale(std::abs(hi) + 1.0));
      CHECK(rebuilt.weights[k] == doctest::Approx(source.weights[k]).epsilon(1e-7));
    }
  }
}

TEST_CASE("distinct free parameters give distinct measures") {
  std::mt19937_64 rng(37);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  const InputSpec in = unit_mean_spec(0.4);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> g1{0.05 + 0.9 * uniform(), 0.05 + 0.9 * uniform()};
    std::vector<double> g2{0.05 + 0.9 * uniform(), 0.05 + 0.9 * uniform()};
    if (std::abs(g1[0] - g2[0]) <= 1e-3 && std::abs(g1[1] - g2[1]) <= 1e-3) continue;
    const auto m1 = reconstruct_measure(in, g1);
    const auto m2 = reconstruct_measure(in, g2);
    double distance = 0.0;
    if (m1.size() == m2.size()) {
      for (std::size_t k = 0; k < m1.size(); ++k) {
        distance = std::max(distance, std::abs(m1.atoms[k] - m2.atoms[k]));
        distance = std::max(distance, std::abs(m1.weights[k] - m2.weights[k]));
      }
    } else {
      distance = 1.0;
    }
    CHECK(distance > 1e-6);
  }
}

TEST_CASE("pinned constraints leave nothing to reconstruct") {
  InputSpec in = unit_mean_spec(0.5);
  in.constraints.push_back(MomentConstraint::equality(2, 0.25));
  CHECK_THROWS_AS(reconstruct_measure(in, std::vector<double>{0.5, 0.5, 0.5}),
                  BoundaryMoments);
}

TEST_SUITE_END();

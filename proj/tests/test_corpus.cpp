#include <cmath>

#include "doctest.h"
#include "holderlab/corpus.hpp"
#include "holderlab/rng.hpp"
#include "oracles.hpp"

using namespace holderlab;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("make_quadratic") {
  Eigen::MatrixXd b(2, 2);
  b << 2, 0, 0, -2;
  const SmoothFunction f = make_quadratic(SymmetricOperator(b));
  CHECK(f.value(vec2(1, 1)) == doctest::Approx(0.0));
  CHECK((f.gradient(vec2(1, 1)).coeffs - vec2(2, -2)).norm() == doctest::Approx(0.0));

  const SmoothFunction zero = make_quadratic(SymmetricOperator(Eigen::MatrixXd::Zero(2, 2)));
  CHECK(zero.value(vec2(3, -1)) == doctest::Approx(0.0));
  CHECK(zero.gradient(vec2(3, -1)).coeffs.norm() == doctest::Approx(0.0));

  const SmoothFunction half =
      make_quadratic(SymmetricOperator(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(half.value(vec2(3, 4)) == doctest::Approx(12.5));

  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(make_quadratic(SymmetricOperator(bad)), std::invalid_argument);
}

TEST_CASE("quadratic Taylor error is exactly the half form") {
  SeededRng rng(211);
  Eigen::MatrixXd g(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) g(i, j) = rng.gaussian();
  const Eigen::MatrixXd B = 0.5 * (g + g.transpose());
  const SmoothFunction f = make_quadratic(SymmetricOperator(B));
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(3), y(3);
    for (Eigen::Index k = 0; k < 3; ++k) x[k] = rng.uniform(-2, 2);
    for (Eigen::Index k = 0; k < 3; ++k) y[k] = rng.uniform(-2, 2);
    const double err = f.value(y) - f.value(x) - pairing(f.gradient(x), y - x);
    const double half_form = 0.5 * (y - x).dot(B * (y - x));
    CHECK(err == doctest::Approx(half_form).epsilon(1e-12));
  }
}

TEST_CASE("make_power") {
  SUBCASE("nu = 1 is the scalar quadratic") {
    const SmoothFunction f = make_power(1.0);
    CHECK(f.value(vec1(3)) == doctest::Approx(4.5));
    CHECK(f.gradient(vec1(3)).coeffs[0] == doctest::Approx(3.0));
    const auto c = f.known_constants(NormSpec::l2(1), 1.0);
    REQUIRE(c.has_value());
    CHECK(c->holder_constant == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c->approx_parameter == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c->provenance == "DERIVED");
  }
  SUBCASE("fractional exponent gradient and antipodal constant") {
    const SmoothFunction f = make_power(0.5);
    CHECK(f.gradient(vec1(4)).coeffs[0] == doctest::Approx(2.0));
    const auto c = f.known_constants(NormSpec::linf(1), 0.5);
    REQUIRE(c.has_value());
    CHECK(c->holder_constant == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    // independent grid oracle agrees on both constants
    const auto ref = oracles::grid_power_constants(0.5);
    CHECK(c->holder_constant == doctest::Approx(ref.M).epsilon(1e-6));
    CHECK(c->approx_parameter == doctest::Approx(ref.L).epsilon(1e-6));
  }
  SUBCASE("stored constants do not apply to scaled one-dimensional norms") {
    const SmoothFunction f = make_power(0.5);
    Eigen::MatrixXd H(1, 1);
    H << 4.0;
    CHECK_FALSE(f.known_constants(NormSpec::weighted_euclidean(H), 0.5).has_value());
  }
  SUBCASE("domain validation") {
    CHECK_THROWS_AS(make_power(0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_power(1.5), std::invalid_argument);
  }
}

TEST_CASE("affine_shift") {
  const SmoothFunction zero = *corpus_lookup("zero");
  const SmoothFunction lin =
      affine_shift(zero, Eigen::VectorXd::Zero(2), DualVector(vec2(1, 2)), 0.0);
  CHECK((lin.gradient(vec2(0.3, -0.7)).coeffs - vec2(1, 2)).norm() == doctest::Approx(0.0));

  const SmoothFunction f = *corpus_lookup("example51");
  const SmoothFunction plus5 =
      affine_shift(f, Eigen::VectorXd::Zero(2), DualVector(vec2(0, 0)), 5.0);
  CHECK(plus5.value(vec2(1.2, -0.4)) == doctest::Approx(f.value(vec2(1.2, -0.4)) + 5.0));

  // chain rule: g'(x) = f'(x + a)
  const SmoothFunction g = affine_shift(f, vec2(1, 1), DualVector(vec2(0, 0)), 0.0);
  CHECK((g.gradient(vec2(0, 0)).coeffs - vec2(2, -2)).norm() == doctest::Approx(0.0));
  CHECK((g.gradient(vec2(1, 1)).coeffs - vec2(4, -4)).norm() == doctest::Approx(0.0));

  // constants carry over unchanged
  const auto c = g.known_constants(NormSpec::linf(2), 1.0);
  REQUIRE(c.has_value());
  CHECK(c->holder_constant == doctest::Approx(4.0));
  CHECK(c->approx_parameter == doctest::Approx(2.0));
}

TEST_CASE("known constants for quadratics come from the exact norms") {
  const SmoothFunction f = *corpus_lookup("example51");
  const auto linf = f.known_constants(NormSpec::linf(2), 1.0);
  REQUIRE(linf.has_value());
  CHECK(linf->holder_constant == doctest::Approx(4.0));
  CHECK(linf->approx_parameter == doctest::Approx(2.0));
  CHECK(linf->provenance == "PAPER");

  const auto l2 = f.known_constants(NormSpec::l2(2), 1.0);
  REQUIRE(l2.has_value());
  CHECK(l2->holder_constant == doctest::Approx(2.0));
  CHECK(l2->approx_parameter == doctest::Approx(2.0));
  CHECK(l2->provenance == "DERIVED");

  CHECK_FALSE(f.known_constants(NormSpec::linf(2), 0.5).has_value());

  const SmoothFunction q1 = *corpus_lookup("quad1d");
  const auto c1 = q1.known_constants(NormSpec::l2(1), 1.0);
  REQUIRE(c1.has_value());
  CHECK(c1->holder_constant == doctest::Approx(1.0));
  CHECK(c1->approx_parameter == doctest::Approx(1.0));
}

TEST_CASE("finite differences confirm every corpus gradient") {
  SeededRng rng(223);
  for (const std::string& id : corpus_ids()) {
    const SmoothFunction f = *corpus_lookup(id);
    for (int i = 0; i < 25; ++i) {
      Eigen::VectorXd x(f.dim());
      for (Eigen::Index k = 0; k < f.dim(); ++k) x[k] = rng.uniform(-2, 2);
      // central differences are invalid across the power family's
      // second-derivative singularity at the origin
      if (f.dim() == 1 && std::abs(x[0]) < 1e-3) x[0] += x[0] >= 0 ? 1e-3 : -1e-3;
      CHECK(oracles::fd_gradient_error(f, x) <= 1e-5);
    }
  }
  // fractional powers: away from the second-derivative singularity at 0
  for (double nu : {0.25, 0.5, 0.75}) {
    const SmoothFunction f = make_power(nu);
    for (int i = 0; i < 25; ++i) {
      double x = rng.uniform(-2, 2);
      if (std::abs(x) < 1e-3) x += x >= 0 ? 1e-3 : -1e-3;
      CHECK(oracles::fd_gradient_error(f, vec1(x)) <= 1e-5);
    }
  }
}

TEST_CASE("corpus registry") {
  for (const std::string& id : corpus_ids()) CHECK(corpus_lookup(id).has_value());
  CHECK(corpus_lookup("power:0.5").has_value());
  CHECK(corpus_lookup("power:0.5")->dim() == 1);
  CHECK_FALSE(corpus_lookup("power:0").has_value());
  CHECK_FALSE(corpus_lookup("power:abc").has_value());
  CHECK_FALSE(corpus_lookup("no-such-function").has_value());
}

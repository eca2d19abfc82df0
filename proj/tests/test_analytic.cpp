#include <cmath>
#include <random>

#include "doctest.h"
#include "nucheck/analytic.hpp"
#include "nucheck/error.hpp"

using namespace nucheck;

namespace {

cplx central_difference(const AnalyticFunction& f, cplx z) {
  const double h = 1e-5;
  return (f.evaluate(z + h) - f.evaluate(z - h)) / (2.0 * h);
}

std::vector<cplx> interior_points(int n, unsigned seed, double radius = 0.85) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> pts;
  for (int i = 0; i < n; ++i) pts.push_back(std::polar(radius * std::sqrt(u(rng)), 2.0 * M_PI * u(rng)));
  return pts;
}

}  // namespace

TEST_CASE("evaluation of primitives") {
  CHECK(std::abs(AnalyticFunction::monomial(2)(0.3) - 0.09) < 1e-16);
  CHECK(AnalyticFunction::kernel_power(0.0, 3.0)(0.7) == cplx(1.0));
  CHECK(std::abs(AnalyticFunction::kernel_power(0.5, 2.0)(0.5) - 1.0 / (0.75 * 0.75)) < 1e-14);
  CHECK_THROWS_AS(AnalyticFunction::identity()(1.0), DomainError);
  CHECK_THROWS_AS(AnalyticFunction::identity()(cplx(0.8, 0.7)), DomainError);
  CHECK_THROWS_AS(AnalyticFunction::kernel_power(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(AnalyticFunction::kernel_power(0.5, 0.0), PreconditionError);
}

TEST_CASE("non-integer kernel powers use the principal branch") {
  const cplx c(0.3, -0.6);
  const auto k = AnalyticFunction::kernel_power(c, 2.5);
  const cplx z(-0.7, 0.5);
  const cplx base = 1.0 - std::conj(c) * z;
  const cplx expected = std::exp(-2.5 * std::log(base));
  CHECK(std::abs(k(z) - expected) < 1e-14 * std::abs(expected));
}

TEST_CASE("symbolic derivatives") {
  CHECK(*AnalyticFunction::monomial(3).derivative().as_polynomial() == Polynomial::monomial(2, 3.0));
  CHECK(AnalyticFunction::constant(4.0).derivative().is_zero());
  const auto dk = AnalyticFunction::kernel_power(0.5, 1.0).derivative();
  CHECK(std::abs(dk(0.0) - 0.5) < 1e-15);
}

TEST_CASE("derivatives agree with central differences for every construction") {
  const auto z = AnalyticFunction::identity();
  const auto p = AnalyticFunction(Polynomial({cplx(0.2, 0.1), cplx(-1.0, 0.5), 0.0, cplx(0.3, -0.2)}));
  const auto k1 = AnalyticFunction::kernel_power(cplx(0.4, 0.3), 1.5);
  const auto k2 = AnalyticFunction::kernel_power(cplx(-0.2, 0.5), 3.0);
  const auto phi = 0.5 * z + AnalyticFunction::monomial(2, 0.3);
  const std::vector<std::pair<const char*, AnalyticFunction>> cases = {
      {"poly", p},
      {"kernel", k1},
      {"sum", p + k1},
      {"difference", k1 - k2},
      {"product", k1 * k2},
      {"scale", cplx(2.0, -1.0) * k2},
      {"compose", k1.compose(phi)},
      {"compose poly", p.compose(k2 * AnalyticFunction::constant(0.2))},
      {"antiderivative", k1.antiderivative()},
      {"nested", (k1 * p).antiderivative().compose(phi) + k2},
  };
  for (const auto& [name, f] : cases) {
    CAPTURE(name);
    const auto df = f.derivative();
    for (cplx x : interior_points(100, 7)) {
      const cplx exact = df.evaluate(x);
      const cplx fd = central_difference(f, x);
      CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("antiderivative vanishes at zero and differentiates back") {
  const auto p = AnalyticFunction(Polynomial({1.0, 2.0, cplx(0.0, 3.0)}));
  const auto P = p.antiderivative();
  REQUIRE(P.is_polynomial());
  CHECK(*P.derivative().as_polynomial() == *p.as_polynomial());
  const auto k = AnalyticFunction::kernel_power(cplx(0.5, 0.2), 2.0);
  const auto K = k.antiderivative();
  CHECK(K.evaluate(0.0) == cplx(0.0));
  // For p = 2: antiderivative is ((1 - conj(c) z)^-1 - 1) / conj(c).
  const cplx c(0.5, 0.2), x(0.3, -0.6);
  const cplx expected = (1.0 / (1.0 - std::conj(c) * x) - 1.0) / std::conj(c);
  CHECK(std::abs(K(x) - expected) < 1e-14);
  for (cplx w : interior_points(20, 3)) CHECK(std::abs(K.derivative()(w) - k(w)) < 1e-15);
}

TEST_CASE("polynomial operations fold into polynomials") {
  const auto z = AnalyticFunction::identity();
  const auto f = (z * z + 2.0 * z).compose(z * z) - AnalyticFunction::constant(1.0);
  REQUIRE(f.is_polynomial());
  CHECK(*f.as_polynomial() == Polynomial({-1.0, 0.0, 2.0, 0.0, 1.0}));
  CHECK(AnalyticFunction::monomial(4, 2.0).is_monomial());
  CHECK(!(z + AnalyticFunction::constant(1.0)).is_monomial());
}

TEST_CASE("text form round-trips") {
  const std::vector<std::string> inputs = {
      "poly:[0,0;1,0]",
      "z",
      "kernel:0.5,-0.25,2.5",
      "(add poly:[1,0] kernel:0.1,0.2,1)",
      "(mul z kernel:0.3,0,2)",
      "(scale 2,-1 kernel:0.3,0,2)",
      "(compose kernel:0.5,0,1 poly:[0,0;0.5,0])",
      "(integ kernel:0.5,0,2)",
      "(deriv kernel:0.5,0,2)",
      "poly:[ 1, 0 ; 0.5, 0.5 ]",
  };
  const cplx x(0.31, -0.42);
  for (const auto& s : inputs) {
    CAPTURE(s);
    const auto f = AnalyticFunction::parse(s);
    const auto g = AnalyticFunction::parse(f.to_string());
    CHECK(g.to_string() == f.to_string());
    CHECK(std::abs(f(x) - g(x)) < 1e-15);
  }
  CHECK(std::abs(AnalyticFunction::parse("(integ poly:[0,0;1,0])")(0.5) - 0.125) < 1e-16);
  CHECK(std::abs(AnalyticFunction::parse("(compose z poly:[0,0;0,0;1,0])")(0.5) - 0.25) < 1e-16);
}

TEST_CASE("malformed expressions are parse errors") {
  for (const char* s : {"", "poly:[1,0", "poly:[1]", "kernel:1.5,0,1", "kernel:0.5,0,-1",
                        "kernel:0.5,0", "(add z)", "(frob z z)", "(add z z", "w", "z z"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(AnalyticFunction::parse(s), ParseError);
  }
}

TEST_CASE("self-map certificate") {
  const auto z = AnalyticFunction::identity();
  CHECK_NOTHROW(SelfMap(0.5 * z));
  CHECK_NOTHROW(SelfMap(z * z));
  CHECK(SelfMap::identity().is_identity());
  CHECK(SelfMap(AnalyticFunction::constant(0.0)).constant_value() == cplx(0.0));
  CHECK_THROWS_AS(SelfMap(1.01 * z), DomainError);
  CHECK_THROWS_AS(SelfMap(z + AnalyticFunction::constant(0.1)), DomainError);
  const SelfMap half(0.5 * z * z + 0.3 * z);
  CHECK(half.sampled_max() == doctest::Approx(0.5 * 0.999 * 0.999 + 0.3 * 0.999).epsilon(1e-14));
}

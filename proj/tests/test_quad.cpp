#include <cmath>

#include "doctest.h"
#include "nucheck/error.hpp"
#include "nucheck/quad.hpp"

using namespace nucheck;

namespace {

// Exact integral of x^k (1-x)^a on [0,1] for integer k: k! / ((a+1)(a+2)...(a+k+1)).
double beta_integer(int k, double a) {
  double v = 1.0 / (a + 1.0);
  for (int j = 1; j <= k; ++j) v *= j / (a + 1.0 + j);
  return v;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64, 128}) {
    const Rule1D& rule = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1 && k <= 60; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      CHECK(sum == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Jacobi rules carry the (1-s)^a factor") {
  for (double a : {-0.5, 0.0, 0.5, 2.0, 3.7}) {
    const Rule1D rule = gauss_jacobi(24, a);
    for (int k = 0; k <= 40; ++k) {
      double sum = 0.0;
      for (int i = 0; i < 24; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      CAPTURE(a);
      CAPTURE(k);
      CHECK(sum == doctest::Approx(beta_integer(k, a)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(gauss_jacobi(8, -1.0), PreconditionError);
}

TEST_CASE("disk rule weights sum to rho^2 and stay positive") {
  const auto q = build_quadrature(64, 128, 0.99);
  CHECK(std::abs(q.total_weight() - 0.9801) < 1e-13);
  for (double w : q.s_weights) CHECK(w > 0.0);
  const double rho = 1.0 - std::ldexp(1.0, -10);
  const auto q2 = build_quadrature(64, 128, rho);
  CHECK(std::abs(integrate_disk([](cplx) { return 1.0; }, q2) - rho * rho) < 1e-13);
  const auto de = build_quadrature(64, 128, 0.9, RadialClustering::DoubleExponential);
  CHECK(std::abs(de.total_weight() - 0.81) < 1e-13);
  for (double w : de.s_weights) CHECK(w > 0.0);
}

TEST_CASE("invalid rule sizes are rejected") {
  CHECK_THROWS_AS(build_quadrature(4, 8, 0.5), PreconditionError);
  CHECK_THROWS_AS(build_quadrature(8, 8, 0.5), PreconditionError);
  CHECK_THROWS_AS(build_quadrature(8, 16, 1.0), PreconditionError);
  CHECK_THROWS_AS(build_quadrature(8, 16, 0.0), PreconditionError);
}

TEST_CASE("radial polynomials in s are integrated exactly") {
  const int n_r = 16;
  const double rho = 0.9;
  const auto q = build_quadrature(n_r, 16, rho);
  for (int k = 0; k <= 2 * n_r - 1; ++k) {
    const double exact = std::pow(rho * rho, k + 1) / (k + 1);
    const double got = integrate_disk([k](cplx z) { return std::pow(std::norm(z), k); }, q);
    CHECK(got == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("closed-form disk integrals near the boundary") {
  const double rho = 1.0 - std::ldexp(1.0, -12);
  const auto q = build_quadrature(64, 64, rho);
  const double s = rho * rho;
  CHECK(std::abs(integrate_disk([](cplx z) { return std::norm(z); }, q) - 0.5 * s * s) < 1e-14);
  CHECK(std::abs(integrate_disk([](cplx z) { return 1.0 - std::norm(z); }, q) - (s - 0.5 * s * s)) < 1e-14);
  CHECK(std::abs(integrate_disk([](cplx z) { return 1.0 - std::norm(z); }, q) - 0.5) < 1e-6);
}

TEST_CASE("weighted tail closes the annulus exactly for polynomial data") {
  const double a = 0.5, rho = 0.8;
  const auto body = build_quadrature(64, 32, rho);
  const auto tail = build_weighted_tail(16, 32, rho, a);
  for (int k = 0; k <= 6; ++k) {
    const double b = integrate_disk([&](cplx z) {
      return std::pow(std::norm(z), k) * std::pow(1.0 - std::norm(z), a);
    }, body);
    const double t = integrate_disk([&](cplx z) { return std::pow(std::norm(z), k); }, tail);
    CHECK(b + t == doctest::Approx(beta_integer(k, a)).epsilon(1e-12));
  }
}

TEST_CASE("angular orthogonality and rotation invariance") {
  const auto q = build_quadrature(32, 64, 0.95);
  const cplx cross = integrate_disk_complex([](cplx z) { return z * std::conj(z * z); }, q);
  CHECK(std::abs(cross) < 1e-15);
  for (int m = 0; m <= 6; ++m) {
    auto f = [m](cplx z) { return std::pow(std::norm(z), m); };
    const double base = integrate_disk(f, q);
    const double turned = integrate_disk(f, rotated(q, 0.123));
    CHECK(std::abs(turned - base) <= 1e-12 * base);
  }
}

TEST_CASE("refinement does not reduce agreement with a closed form") {
  // Integral over |z| <= rho of (1-|z|^2)^0.5 |1 + z|^2 = Int (1-s)^0.5 (1+s) ds over [0, rho^2].
  const double rho = 0.999;
  const double S = rho * rho;
  const double exact = (2.0 / 3.0) * (1.0 - std::pow(1.0 - S, 1.5)) * 2.0 -
                       (2.0 / 5.0) * (1.0 - std::pow(1.0 - S, 2.5));
  auto f = [](cplx z) { return std::sqrt(1.0 - std::norm(z)) * std::norm(1.0 + z); };
  double previous = INFINITY;
  for (int level = 0; level < 4; ++level) {
    const auto q = build_quadrature(16 << level, 32 << level, rho);
    const double err = std::abs(integrate_disk(f, q) - exact);
    CHECK(err <= previous * (1.0 + 1e-12) + 1e-15);
    previous = err;
  }
  CHECK(previous < 1e-10);
}

TEST_CASE("non-finite integrands name the node") {
  const auto q = build_quadrature(8, 16, 0.5);
  try {
    integrate_disk([](cplx z) { return z.real() > 0.3 ? NAN : 1.0; }, q);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("radial") != std::string::npos);
  }
}

TEST_CASE("summation order is fixed") {
  const auto q = build_quadrature(64, 128, 0.99);
  auto f = [](cplx z) { return std::exp(z.real()) * std::cos(3.0 * z.imag()); };
  const double a = integrate_disk(f, q);
  const double b = integrate_disk(f, q);
  CHECK(a == b);
}

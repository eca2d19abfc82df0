#include <cmath>
#include <random>

#include "doctest.h"
#include "nucheck/error.hpp"
#include "nucheck/spaces.hpp"

using namespace nucheck;

namespace {

double beta_fn(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

AnalyticFunction random_polynomial(std::mt19937_64& rng, int degree) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<cplx> c;
  for (int k = 0; k <= degree; ++k) c.emplace_back(n(rng), n(rng));
  return Polynomial(c);
}

}  // namespace

TEST_CASE("Bergman kernel values") {
  CHECK(bergman_kernel(0.0, 1.0)(0.7) == cplx(2.0));
  CHECK(bergman_kernel(0.0, 0.0)(0.7) == cplx(1.0));
  CHECK(std::abs(bergman_kernel(0.3, 1.0)(0.3) - 2.0 / (0.91 * 0.91 * 0.91)) < 1e-14);
}

TEST_CASE("monomial pairings are Beta values") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (int m = 0; m <= 8; ++m) {
      for (int n = 0; n <= 8; ++n) {
        const cplx got = pairing(AnalyticFunction::monomial(m), AnalyticFunction::monomial(n), alpha);
        const double expected = m == n ? beta_fn(m + 1, alpha + 1) : 0.0;
        CHECK(std::abs(got - expected) < 1e-12);
      }
    }
  }
  CHECK(std::abs(pairing(AnalyticFunction::identity(), AnalyticFunction::identity(), 1.0) - 1.0 / 6.0) < 1e-14);
}

TEST_CASE("kernel reproduces point values") {
  std::mt19937_64 rng(5);
  const auto f = random_polynomial(rng, 8);
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (cplx zeta : {cplx(0.3), cplx(0.0, 0.8), cplx(-0.56, 0.56)}) {
      const cplx got = pairing(f, bergman_kernel(zeta, alpha), alpha);
      const cplx expected = f(zeta);
      CHECK(std::abs(got - expected) <= 1e-10 * (1.0 + std::abs(expected)));
    }
  }
  CHECK(std::abs(pairing(AnalyticFunction::monomial(2), bergman_kernel(0.3, 1.0), 1.0) - 0.09) < 1e-13);
}

TEST_CASE("reflected form of the pairing agrees") {
  // Int f(conj z) conj(g(conj z)) (1-|z|^2)^a dA equals the direct form by the symmetry z -> conj z.
  std::mt19937_64 rng(9);
  const auto f = random_polynomial(rng, 5);
  const auto g = random_polynomial(rng, 5);
  const auto q = default_pairing_quadrature();
  const cplx direct = pairing(f, g, 1.5, q);
  const cplx body = integrate_disk_complex([&](cplx z) {
    return f(std::conj(z)) * std::conj(g(std::conj(z))) * std::pow(1.0 - std::norm(z), 1.5);
  }, q);
  const cplx tail = integrate_disk_complex([&](cplx z) {
    return f.evaluate(std::conj(z)) * std::conj(g.evaluate(std::conj(z)));
  }, build_weighted_tail(64, q.n_theta, q.rho_outer, 1.5));
  CHECK(std::abs(direct - (body + tail)) < 1e-12 * (1.0 + std::abs(direct)));
}

TEST_CASE("derivative reproducing formula at alpha = 1") {
  // 2 Int (1-|w|^2) f'(w) / (1 - z conj(w))^3 dA(w) = f'(z): a pairing of f' with the
  // alpha = 1 kernel at z.
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = random_polynomial(rng, 6);
    const auto df = f.derivative();
    for (cplx z : {cplx(0.7), cplx(0.0, -0.5), cplx(0.4, 0.4)}) {
      const cplx got = pairing(df, bergman_kernel(z, 1.0), 1.0);
      CHECK(std::abs(got - df(z)) <= 1e-6 * std::max(1.0, std::abs(df(z))));
    }
  }
}

TEST_CASE("A^1 norms") {
  // |z| = sqrt(s) is not smooth at s = 0, hence the larger radial count.
  const auto q = build_quadrature(256, 64, 0.5);
  CHECK(a1_norm(AnalyticFunction::constant(1.0), RadialWeight::standard(1.0), q) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(a1_norm(AnalyticFunction(), RadialWeight::standard(1.0), q) == 0.0);
  CHECK(a1_norm(AnalyticFunction::identity(), RadialWeight::constant(), q) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-7));
  // omega = (1-r^2)^-0.5: Int (1-s)^-0.5 ds = 2.
  const auto pair = make_normal_pair(RadialWeight::standard(1.0), 0.5);
  CHECK(a1_norm(AnalyticFunction::constant(1.0), pair.omega, q) == doctest::Approx(2.0).epsilon(1e-6));
  // omega = (1-r^2)^-1 is not integrable.
  const auto bad = RadialWeight::pair_dual(RadialWeight::standard(1.0), 0.0);
  CHECK_THROWS_AS(a1_norm(AnalyticFunction::constant(1.0), bad, q), DivergenceError);
}

TEST_CASE("test functions") {
  const auto nu = RadialWeight::standard(1.0);
  const auto f = test_function(0.5, SelfMap::identity(), nu, 1.0);
  CHECK(std::abs(f(0.5) - 4.0 / 3.0) < 1e-14);
  CHECK(std::abs(f(0.2) - 0.75 * 0.75 / (0.75 * std::pow(0.9, 2.0))) < 1e-14);
  const auto at_zero = test_function(0.0, SelfMap::identity(), nu, 1.0);
  CHECK(std::abs(at_zero(0.6) - 1.0) < 1e-15);
  const auto flat = test_function(0.7, SelfMap(AnalyticFunction::constant(0.0)), RadialWeight::standard(2.0), 2.0);
  CHECK(std::abs(flat(0.4) - 1.0) < 1e-15);
}

TEST_CASE("weighted sup norms against calculus") {
  const auto nu = RadialWeight::standard(1.0);
  const auto one = weighted_sup_norm(AnalyticFunction::constant(1.0), nu);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.argmax == cplx(0.0));
  const auto z = weighted_sup_norm(AnalyticFunction::identity(), nu);
  CHECK(z.value == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(std::abs(std::abs(z.argmax) - 1.0 / std::sqrt(3.0)) < 1e-6);
  const auto k = weighted_sup_norm(AnalyticFunction::kernel_power(0.5, 1.0), nu);
  CHECK(k.value == doctest::Approx(4.0 * (2.0 - std::sqrt(3.0))).epsilon(1e-10));
  CHECK(std::abs(k.argmax - (2.0 - std::sqrt(3.0))) < 1e-5);
}

TEST_CASE("sup norm is absolutely homogeneous") {
  const auto nu = RadialWeight::standard(2.0);
  const auto f = AnalyticFunction::kernel_power(cplx(0.3, 0.4), 2.0) + AnalyticFunction::monomial(3, 0.5);
  const cplx c(-1.7, 2.3);
  const double a = weighted_sup_norm(f, nu).value;
  const double b = weighted_sup_norm(c * f, nu).value;
  CHECK(std::abs(b - std::abs(c) * a) <= 1e-12 * b);
}

TEST_CASE("Bloch norms") {
  const auto nu = RadialWeight::standard(1.0);
  CHECK(bloch_norm(AnalyticFunction::identity(), nu).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bloch_norm(AnalyticFunction::constant(cplx(3.0, 4.0)), nu).value == doctest::Approx(5.0));
  CHECK(bloch_norm(AnalyticFunction::monomial(2), nu).value ==
        doctest::Approx(4.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("little-space membership") {
  const auto nu = RadialWeight::standard(1.0);
  CHECK(little_membership(AnalyticFunction::constant(1.0), nu, LittleSpace::H0).verdict == Membership::Member);
  CHECK(little_membership(AnalyticFunction::kernel_power(0.999, 1.0), nu, LittleSpace::H0).verdict ==
        Membership::Member);
  const auto one_plus_z = AnalyticFunction(Polynomial({1.0, 1.0}));
  const auto r = little_membership(one_plus_z, RadialWeight::constant(), LittleSpace::H0);
  CHECK(r.verdict == Membership::NonMember);
  CHECK(r.limit == doctest::Approx(2.0).epsilon(1e-12));
  // Bloch0: (1-|z|^2)|f'| for f = z tends to 0.
  CHECK(little_membership(AnalyticFunction::identity(), nu, LittleSpace::Bloch0).verdict == Membership::Member);
  CHECK_THROWS_AS(little_membership(AnalyticFunction::identity(), nu, LittleSpace::H0, {0.5, 0.4, 0.9}),
                  PreconditionError);
}

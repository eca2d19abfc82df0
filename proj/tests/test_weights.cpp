#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "nucheck/error.hpp"
#include "nucheck/weights.hpp"

using namespace nucheck;

TEST_CASE("standard weights evaluate in closed form") {
  CHECK(RadialWeight::standard(1.0)(0.0) == 1.0);
  CHECK(RadialWeight::standard(1.0)(0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(RadialWeight::standard(2.0)(0.5) == doctest::Approx(0.75 * 0.75).epsilon(1e-15));
  CHECK(RadialWeight::exponential(1.0)(0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(RadialWeight::constant()(0.9) == 1.0);
}

TEST_CASE("evaluation outside [0,1) is a domain error") {
  const auto w = RadialWeight::standard(1.0);
  CHECK_THROWS_AS(w(1.0), DomainError);
  CHECK_THROWS_AS(w(-0.1), DomainError);
}

TEST_CASE("log values survive where the weight underflows") {
  const auto w = RadialWeight::exponential(1.0);
  const double r = 1.0 - std::ldexp(1.0, -20);
  CHECK(w.log_value(r) == doctest::Approx(-std::ldexp(1.0, 20)).epsilon(1e-12));
}

TEST_CASE("standard weights are normal with dyadic ratios tending to 2^-a") {
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const auto report = check_normality(RadialWeight::standard(a));
    CHECK(report.verdict == NormalityVerdict::Normal);
    REQUIRE(report.condition_i_ratios.size() == 20);
    CHECK(std::abs(report.condition_i_ratios.back() - std::pow(2.0, -a)) < 1e-4);
    REQUIRE(report.beta_estimate);
    REQUIRE(report.gamma_estimate);
    CHECK(*report.beta_estimate <= *report.gamma_estimate + 1e-6);
    CHECK(*report.beta_estimate == doctest::Approx(a).epsilon(1e-9));
    CHECK(report.certified);
  }
}

TEST_CASE("first dyadic ratio of (1-r^2)") {
  const auto report = check_normality(RadialWeight::standard(1.0));
  // nu(3/4) / nu(1/2) = (7/16) / (3/4)
  CHECK(std::abs(report.condition_i_ratios[0] - (7.0 / 16.0) / (3.0 / 4.0)) < 1e-12);
  CHECK(report.condition_i_inf == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("exponential weight fails condition I, constant weight fails condition II") {
  const auto e = check_normality(RadialWeight::exponential(1.0));
  CHECK(e.verdict == NormalityVerdict::FailsI);
  CHECK(e.condition_i_ratios[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(!e.beta_estimate);
  const auto c = check_normality(RadialWeight::constant());
  CHECK(c.verdict == NormalityVerdict::FailsII);
  for (double r : c.condition_i_ratios) CHECK(r == 1.0);
  CHECK(!c.condition_ii_k);
}

TEST_CASE("normality arguments are checked") {
  NormalityOptions o;
  o.n_max = 3;
  CHECK_THROWS_AS(check_normality(RadialWeight::standard(1.0), o), PreconditionError);
  o.n_max = 20;
  o.k_max = 0;
  CHECK_THROWS_AS(check_normality(RadialWeight::standard(1.0), o), PreconditionError);
}

TEST_CASE("normal pairs reproduce (1-r^2)^alpha") {
  const auto pair = make_normal_pair(RadialWeight::standard(1.0), 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = 0.999 * i / 999.0;
    const double expected = std::pow(1.0 - r * r, 2.0);
    CHECK(std::abs(pair.nu(r) * pair.omega(r) - expected) <= 1e-12 * expected);
  }
  const auto half = make_normal_pair(RadialWeight::standard(1.0), 0.5);
  CHECK(half.omega(0.5) == doctest::Approx(std::pow(0.75, -0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(make_normal_pair(RadialWeight::standard(1.0), -0.5), PreconditionError);
  CHECK_THROWS_AS(make_normal_pair(RadialWeight::standard(1.0), 0.0), PreconditionError);
  CHECK_THROWS_AS(make_normal_pair(RadialWeight::exponential(1.0), 2.0), InvalidWeightError);
  CHECK_THROWS_AS(make_normal_pair(RadialWeight::constant(), 2.0), InvalidWeightError);
}

TEST_CASE("weight grammar") {
  CHECK(RadialWeight::parse("standard:1.5").kind() == RadialWeight::Kind::Standard);
  CHECK(RadialWeight::parse(" exp:2 ").parameter() == 2.0);
  CHECK(RadialWeight::parse("const").kind() == RadialWeight::Kind::Constant);
  CHECK_THROWS_AS(RadialWeight::parse("standard:-1"), ParseError);
  CHECK_THROWS_AS(RadialWeight::parse("standard:abc"), ParseError);
  CHECK_THROWS_AS(RadialWeight::parse("gauss:1"), ParseError);
  CHECK_THROWS_AS(RadialWeight::parse("table:/nonexistent/weights.txt"), ParseError);
  for (const char* s : {"standard:0.5", "exp:3", "const"}) {
    CHECK(RadialWeight::parse(RadialWeight::parse(s).spec()).spec() == s);
  }
}

TEST_CASE("tabulated weights interpolate monotonically and stop at the last sample") {
  const std::string path = "test_weights_table.txt";
  {
    std::ofstream out(path);
    out << "# r nu\n";
    for (int k = 0; k <= 24; ++k) {
      const double r = k == 0 ? 0.0 : 1.0 - std::ldexp(1.0, -k);
      out.precision(17);
      out << r << " " << (1.0 - r * r) << "\n";
    }
  }
  const auto w = RadialWeight::parse("table:" + path);
  CHECK(w.kind() == RadialWeight::Kind::Tabulated);
  CHECK(w(0.5) == doctest::Approx(0.75).epsilon(1e-12));
  // Cubic interpolation of log nu between samples; compare to the exact weight loosely.
  CHECK(w(0.6) == doctest::Approx(0.64).epsilon(1e-2));
  CHECK_NOTHROW(w.validate());
  CHECK_THROWS_AS(w(1.0 - std::ldexp(1.0, -30)), ResolutionError);
  const auto report = check_normality(w);
  CHECK(!report.certified);
  CHECK(report.verdict == NormalityVerdict::Normal);
  NormalityOptions deep;
  deep.n_max = 30;
  CHECK_THROWS_AS(check_normality(w, deep), ResolutionError);
  std::remove(path.c_str());
}

TEST_CASE("tables with increasing values are rejected") {
  CHECK_THROWS_AS(RadialWeight::tabulated({0.0, 0.5, 0.9}, {1.0, 2.0, 0.5}), InvalidWeightError);
  CHECK_THROWS_AS(RadialWeight::tabulated({0.0, 0.5, 0.4}, {1.0, 0.9, 0.5}), InvalidWeightError);
}

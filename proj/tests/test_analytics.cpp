#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mcbias/analytics.hpp"
#include "mcbias/error.hpp"
#include "oracles.hpp"

using namespace mcbias;

namespace {

ScalarScenario phase_extremal(std::size_t j, std::size_t q = 1) {
  ScalarScenario s;
  s.kernel = ScalarKernel::phase();
  s.y_dist = DistSpec::two_point1(-std::numbers::pi / 2, std::numbers::pi / 2, 0.5);
  s.s_dist = DistSpec::uniform1(-std::numbers::pi, std::numbers::pi);
  s.j = j;
  s.q = q;
  return s;
}

ScalarScenario multiplicative_standard(std::size_t j, std::size_t q) {
  ScalarScenario s;
  s.kernel = ScalarKernel::multiplicative();
  s.j = j;
  s.q = q;
  return s;
}

ScalarScenario exponential_scenario(double a, double b, double alpha, std::size_t j = 2) {
  ScalarScenario s;
  s.kernel = ScalarKernel::exponential();
  s.y_dist = DistSpec::uniform1(a, b);
  s.s_dist = DistSpec::uniform1(1.0 - alpha, 1.0 + alpha);
  s.j = j;
  return s;
}

}  // namespace

TEST_CASE("additive kernel has no bias in either construction") {
  for (const DistSpec& y : {DistSpec::normal1(1, 2), DistSpec::uniform1(0, 3), DistSpec::two_point1(0, 1, 0.3)}) {
    ScalarScenario s;
    s.y_dist = y;
    s.s_dist = DistSpec::uniform1(-1, 2);
    s.j = 3;
    s.q = 7;
    CHECK(psi(s) == 0.0);
    CHECK(phi(s) == 0.0);
    CHECK(relbias_current(s) == 0.0);
    CHECK(relbias_alternative(s) == 0.0);
    CHECK(target_variance(s) == doctest::Approx(moments(y).variance / 3 + 0.75));
  }
}

TEST_CASE("multiplicative standard normal values") {
  const BiasReport r = bias_report(multiplicative_standard(4, 10));
  CHECK(r.psi == 0.0);
  CHECK(r.phi == 1.0);
  CHECK(r.target_var == 0.25);
  CHECK(r.relbias_current == 0.0);
  CHECK(r.relbias_alternative == doctest::Approx(0.1));
  CHECK(r.mean_var_gap == doctest::Approx(-1.0 / 400.0));
}

TEST_CASE("multiplicative relbias matches the moment formula") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), v(0.1, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double mu = u(gen), sigma2 = v(gen), nu = u(gen), tau2 = v(gen);
    ScalarScenario s;
    s.kernel = ScalarKernel::multiplicative();
    s.y_dist = DistSpec::normal1(mu, sigma2);
    s.s_dist = DistSpec::normal1(nu, tau2);
    s.j = 2 + i % 5;
    s.q = 1 + i % 9;
    CHECK(relbias_alternative(s) ==
          doctest::Approx(oracle::multiplicative_relbias_alternative(mu, sigma2, nu, tau2, s.j, s.q)).epsilon(1e-12));
    CHECK(psi(s) == 0.0);
  }
}

TEST_CASE("phase extremal case has 200 percent relative bias") {
  for (std::size_t j : {2u, 4u, 8u}) {
    const BiasReport r = bias_report(phase_extremal(j, 5));
    CHECK(r.psi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.phi == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.target_var == doctest::Approx(0.5 / j).epsilon(1e-12));
    CHECK(r.relbias_current == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.relbias_alternative == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("phase psi for smaller error widths") {
  for (double delta : {0.3, 1.0, 2.5}) {
    ScalarScenario s = phase_extremal(3);
    s.s_dist = DistSpec::uniform1(-delta, delta);
    CHECK(psi(s) == doctest::Approx(oracle::phase_extremal_psi(delta)).epsilon(1e-12));
  }
}

TEST_CASE("alternative relbias lies in [0, 1/Q]") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.2, 2.0);
  for (int i = 0; i < 200; ++i) {
    ScalarScenario s;
    switch (i % 3) {
      case 0:
        s.kernel = ScalarKernel::multiplicative();
        s.y_dist = DistSpec::normal1(u(gen), w(gen));
        s.s_dist = DistSpec::uniform1(u(gen) - 1.5, u(gen) + 1.5);
        break;
      case 1:
        s.kernel = ScalarKernel::phase();
        s.y_dist = DistSpec::uniform1(u(gen) - 1.0, u(gen) + 1.5);
        {
          const double d = w(gen);
          s.s_dist = DistSpec::uniform1(-d, d);
        }
        break;
      default: {
        const double a = 0.5 * (u(gen) + 1.0);
        s.kernel = ScalarKernel::exponential();
        s.y_dist = DistSpec::uniform1(a, a + w(gen) * 3);
        const double alpha = 0.5 * (u(gen) + 1.0);
        s.s_dist = DistSpec::uniform1(1.0 - alpha, 1.0 + alpha);
      }
    }
    s.j = 2 + i % 6;
    s.q = 1 + i % 20;
    const double r = relbias_alternative(s);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0 / s.q);
  }
}

TEST_CASE("mean-variance gap combines psi and phi") {
  const ScalarScenario s = phase_extremal(4, 50);
  CHECK(mean_variance_gap(s) == doctest::Approx(1.0 / 200.0 - 0.5 / (4.0 * 2500.0)));
}

TEST_CASE("variance of the sample variance of normals") {
  CHECK(var_of_sample_variance_normal(1.0, 0.0, 2) == 2.0);
  CHECK(var_of_sample_variance_normal(1.0, 2.0, 2) == 10.0);
  CHECK(var_of_sample_variance_normal(2.0, 1.0, 11) == doctest::Approx(0.8 + 0.8));
  CHECK_THROWS_AS(var_of_sample_variance_normal(1.0, 0.0, 1), DomainError);
}

TEST_CASE("sample-variance variance gap at standard normal moments") {
  for (std::size_t q : {1u, 2u, 5u, 10u, 100u, 500u}) {
    const ScalarScenario s = multiplicative_standard(4, q);
    CHECK(sample_variance_variance_gap(s) == doctest::Approx(4.0 / (double(q) * q)).epsilon(1e-14));
    CHECK(vardiff_sample_variances(s) == doctest::Approx(0.25 / (double(q) * q)).epsilon(1e-14));
  }
  ScalarScenario add;
  add.q = 10;
  CHECK(sample_variance_variance_gap(add) == 0.0);
  CHECK_THROWS_AS(sample_variance_variance_gap(phase_extremal(4, 3)), DomainError);
}

TEST_CASE("exponential psi matches an independent integral") {
  for (auto [a, b, alpha] : {std::tuple{0.0, 8.0, 0.95}, std::tuple{0.0, 1.0, 0.95}, std::tuple{0.5, 3.0, 0.5},
                             std::tuple{2.0, 2.5, 0.2}, std::tuple{0.0, 0.2, 0.95}}) {
    const ScalarScenario s = exponential_scenario(a, b, alpha);
    CHECK(psi(s) == doctest::Approx(oracle::exponential_psi(a, b, alpha)).epsilon(1e-8));
  }
}

TEST_CASE("exponential psi takes both signs at alpha 0.95") {
  CHECK(psi(exponential_scenario(0.0, 8.0, 0.95)) < 0.0);
  CHECK(psi(exponential_scenario(0.0, 1.0, 0.95)) > 0.0);
}

TEST_CASE("unsupported pairings") {
  ScalarScenario s = phase_extremal(2);
  s.s_dist = DistSpec::normal1(0, 1);
  CHECK_FALSE(has_closed_form(s));
  CHECK_THROWS_AS(psi(s), DomainError);
  ScalarScenario e = exponential_scenario(-1.0, 2.0, 0.5);
  CHECK_FALSE(has_closed_form(e));
  ScalarScenario c;
  c.kernel = ScalarKernel::custom("cube", [](double y, double s) { return y * y * y + s; });
  CHECK_FALSE(has_closed_form(c));
  CHECK_THROWS_AS(variance_components(c), DomainError);
  ScalarScenario deg = multiplicative_standard(2, 1);
  deg.s_dist = DistSpec::normal1(0.0, 0.0);
  CHECK_THROWS_AS(relbias_current(deg), DomainError);
}

TEST_CASE("library Monte Carlo bias terms agree with the closed forms") {
  for (const ScalarScenario& s : {phase_extremal(4, 3), exponential_scenario(0.0, 4.0, 0.7, 3)}) {
    RngStream g(21);
    const McBiasTerms t = estimate_bias_terms_mc(s, 400000, g);
    const BiasReport r = bias_report(s);
    CHECK(std::abs(t.psi.value - r.psi) <= 4.0 * t.psi.std_error);
    CHECK(std::abs(t.phi.value - r.phi) <= 4.0 * t.phi.std_error);
    CHECK(std::abs(t.target.value - r.target_var) <= 4.0 * t.target.std_error);
  }
}

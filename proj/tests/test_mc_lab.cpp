#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mcbias/error.hpp"
#include "mcbias/mc_lab.hpp"
#include "mcbias/serialize.hpp"

using namespace mcbias;

namespace {

ExperimentConfig config(ScalarScenario s, std::size_t trials, std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.scenario = std::move(s);
  c.trials = trials;
  c.master_seed = seed;
  return c;
}

ScalarScenario scenario(ScalarKernel k, DistSpec y, DistSpec s, std::size_t j, std::size_t q) {
  ScalarScenario sc;
  sc.kernel = k;
  sc.y_dist = std::move(y);
  sc.s_dist = std::move(s);
  sc.j = j;
  sc.q = q;
  return sc;
}

ScalarScenario phase_extremal(std::size_t j, std::size_t q) {
  return scenario(ScalarKernel::phase(), DistSpec::two_point1(-std::numbers::pi / 2, std::numbers::pi / 2, 0.5),
                  DistSpec::uniform1(-std::numbers::pi, std::numbers::pi), j, q);
}

bool within(const EstimateResult& r, double k = 3.0) {
  return r.z_score.has_value() && std::abs(*r.z_score) <= k;
}

}  // namespace

TEST_CASE("results are bit-identical for any worker count") {
  ExperimentConfig c = config(phase_extremal(4, 6), 3000, 77);
  const std::string one = to_json(estimate_combine_bias(c, Construction::current)).dump();
  c.workers = 4;
  CHECK(to_json(estimate_combine_bias(c, Construction::current)).dump() == one);
  c.workers = 0;
  CHECK(to_json(estimate_combine_bias(c, Construction::current)).dump() == one);

  ExperimentConfig v = config(scenario(ScalarKernel::multiplicative(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 5), 2000, 3);
  const std::string a = to_json(estimate_vardiff(v)).dump();
  v.workers = 3;
  CHECK(to_json(estimate_vardiff(v)).dump() == a);

  ExperimentConfig l = config(ScalarScenario{}, 4000, 5);
  const std::string la = to_json(verify_lemma(4, l).front()).dump();
  l.workers = 5;
  CHECK(to_json(verify_lemma(4, l).front()).dump() == la);
}

TEST_CASE("different seeds and stream ids give different estimates") {
  ExperimentConfig c = config(phase_extremal(2, 4), 500, 1);
  const double a = estimate_combine_bias(c, Construction::current).point;
  c.stream_id = 1;
  CHECK(estimate_combine_bias(c, Construction::current).point != a);
  c.stream_id = 0;
  c.master_seed = 2;
  CHECK(estimate_combine_bias(c, Construction::current).point != a);
}

TEST_CASE("combine bias examples") {
  const auto mult = scenario(ScalarKernel::multiplicative(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 100);
  const EstimateResult alt = estimate_combine_bias(config(mult, 10000), Construction::alternative);
  CHECK(alt.analytic_reference == doctest::Approx(0.01));
  CHECK(within(alt));

  const auto add = scenario(ScalarKernel::additive(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 5);
  for (Construction con : {Construction::current, Construction::alternative}) {
    const EstimateResult r = estimate_combine_bias(config(add, 10000), con);
    CHECK(r.analytic_reference == 0.0);
    CHECK(within(r));
  }

  const EstimateResult ph = estimate_combine_bias(config(phase_extremal(4, 3), 20000), Construction::current);
  CHECK(ph.analytic_reference == doctest::Approx(2.0));
  CHECK(within(ph));
  CHECK(ph.std_error > 0.0);
}

TEST_CASE("combine bias without a closed form uses the target oracle") {
  const auto s = scenario(ScalarKernel::custom("sq", [](double y, double e) { return (y + e) * (y + e); }),
                          DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 3, 4);
  const EstimateResult r = estimate_combine_bias(config(s, 4000), Construction::alternative);
  CHECK_FALSE(r.analytic_reference.has_value());
  CHECK(r.extra("target_variance_se").has_value());
  CHECK(r.std_error > 0.0);
}

TEST_CASE("target variance oracle examples") {
  const auto mult = scenario(ScalarKernel::multiplicative(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 1);
  CHECK(within(estimate_target_variance_oracle(config(mult, 20000))));
  CHECK(estimate_target_variance_oracle(config(mult, 20000)).analytic_reference == 0.25);
  const EstimateResult ph = estimate_target_variance_oracle(config(phase_extremal(4, 1), 20000));
  CHECK(ph.analytic_reference == doctest::Approx(0.125));
  CHECK(within(ph));
  const auto add = scenario(ScalarKernel::additive(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 1);
  const EstimateResult ad = estimate_target_variance_oracle(config(add, 20000));
  CHECK(ad.analytic_reference == 1.25);
  CHECK(within(ad));
}

TEST_CASE("mean variance examples") {
  const auto add = scenario(ScalarKernel::additive(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 10);
  CHECK(within(estimate_mean_variance(config(add, 10000))));
  const auto mult = scenario(ScalarKernel::multiplicative(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 10);
  const EstimateResult m = estimate_mean_variance(config(mult, 20000));
  CHECK(m.analytic_reference == doctest::Approx(-1.0 / 400.0));
  CHECK(within(m));
  CHECK(within(estimate_mean_variance(config(phase_extremal(4, 50), 10000))));
}

TEST_CASE("vardiff additive is centred on zero") {
  const auto add = scenario(ScalarKernel::additive(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), 4, 20);
  ExperimentConfig c = config(add, 20000);
  const EstimateResult r = estimate_vardiff(c);
  CHECK(r.analytic_reference == 0.0);
  CHECK(within(r));
  CHECK(r.extra("var_s2_current").has_value());
}

TEST_CASE("lemma checks") {
  const ExperimentConfig c = config(ScalarScenario{}, 20000, 9);
  for (int id = 1; id <= 5; ++id) {
    const auto results = verify_lemma(id, c);
    CHECK_FALSE(results.empty());
    for (const auto& r : results) {
      INFO(r.label);
      CHECK(within(r, 4.0));
    }
  }
  const auto l4 = verify_lemma(4, c);
  CHECK(l4.front().analytic_reference == 0.0);
  const auto l5 = verify_lemma(5, c);
  CHECK(l5[1].analytic_reference == 2.0);
  CHECK_THROWS_AS(verify_lemma(6, c), ConfigError);
  CHECK_THROWS_AS(verify_lemma(0, c), ConfigError);
}

TEST_CASE("maps") {
  MapConfig m;
  m.points = 3;
  m.hi = 2.0;
  const auto cells = run_map(m);
  CHECK(cells.size() == 3);
  ScalarScenario s = scenario(ScalarKernel::exponential(), DistSpec::uniform1(1.0, 2.0),
                              DistSpec::uniform1(0.05, 1.95), 2, 1);
  CHECK(cells.back().a == 1.0);
  CHECK(cells.back().value == psi(s));
  m.quantity = MapQuantity::relbias_current;
  m.j = 3;
  s.j = 3;
  CHECK(run_map(m).back().value == relbias_current(s));
  m.points = 1;
  CHECK_THROWS_AS(run_map(m), ConfigError);
  m.points = 5;
  m.alphas = {1.5};
  CHECK_THROWS_AS(run_map(m), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig c = config(phase_extremal(4, 1), 1);
  CHECK_THROWS_AS(estimate_combine_bias(c, Construction::current), ConfigError);
  c.trials = 100;
  CHECK_THROWS_AS(estimate_combine_bias(c, Construction::alternative), ConfigError);
  c.scenario.j = 1;
  c.scenario.q = 3;
  CHECK_THROWS_AS(estimate_mean_variance(c), DomainError);
}

TEST_CASE("regression sweep: at least 99 of 100 analytic comparisons within 3 SE") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.3, 2.0);
  int ok = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    ScalarScenario s;
    switch (i % 4) {
      case 0:
        s = scenario(ScalarKernel::multiplicative(), DistSpec::normal1(u(gen), w(gen)),
                     DistSpec::normal1(u(gen), w(gen)), 2 + i % 4, 2 + i % 7);
        break;
      case 1:
        s = scenario(ScalarKernel::additive(), DistSpec::uniform1(0.0, 1.0 + w(gen)),
                     DistSpec::two_point1(-1.0, w(gen), 0.5 + 0.4 * u(gen)), 2 + i % 4, 2 + i % 7);
        break;
      case 2: {
        const double d = 0.5 + std::abs(u(gen)) * 2.5;
        s = scenario(ScalarKernel::phase(), DistSpec::uniform1(-1.0, 1.0 + w(gen)), DistSpec::uniform1(-d, d),
                     2 + i % 4, 2 + i % 7);
        break;
      }
      default: {
        const double alpha = 0.2 + 0.35 * (u(gen) + 1.0);
        s = scenario(ScalarKernel::exponential(), DistSpec::uniform1(0.0, 1.0 + 3.0 * w(gen)),
                     DistSpec::uniform1(1.0 - alpha, 1.0 + alpha), 2 + i % 4, 2 + i % 7);
      }
    }
    ExperimentConfig c = config(s, 4000, 1000 + i);
    EstimateResult r;
    switch (i % 5) {
      case 0: r = estimate_combine_bias(c, Construction::current); break;
      case 1: r = estimate_combine_bias(c, Construction::alternative); break;
      case 2: r = estimate_target_variance_oracle(c); break;
      case 3: r = estimate_mean_variance(c); break;
      default:
        c.scenario.kernel = ScalarKernel::additive();
        c.scenario.y_dist = DistSpec::normal1(0, 1);
        c.scenario.s_dist = DistSpec::normal1(0, 1);
        r = estimate_vardiff(c);
    }
    REQUIRE(r.analytic_reference.has_value());
    ++total;
    ok += within(r);
  }
  CHECK(total == 100);
  CHECK(ok >= 99);
}

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcbias/analytics.hpp"
#include "mcbias/linalg.hpp"
#include "mcbias/mc_lab.hpp"
#include "mcbias/quadrature.hpp"
#include "oracles.hpp"

#ifndef MCBIAS_CLI_PATH
#error "MCBIAS_CLI_PATH must name the mcbias executable"
#endif

using namespace mcbias;

namespace {

struct Report {
  int failures = 0;

  void line(const char* id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s %s  %s | %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !pass;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarScenario make(ScalarKernel k, DistSpec y, DistSpec s, std::size_t j, std::size_t q) {
  ScalarScenario sc;
  sc.kernel = k;
  sc.y_dist = std::move(y);
  sc.s_dist = std::move(s);
  sc.j = j;
  sc.q = q;
  return sc;
}

ScalarScenario standard_multiplicative(std::size_t j, std::size_t q) {
  return make(ScalarKernel::multiplicative(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), j, q);
}

ScalarScenario standard_additive(std::size_t j, std::size_t q) {
  return make(ScalarKernel::additive(), DistSpec::normal1(0, 1), DistSpec::normal1(0, 1), j, q);
}

ScalarScenario phase_extremal(std::size_t j, std::size_t q) {
  return make(ScalarKernel::phase(), DistSpec::two_point1(-std::numbers::pi / 2, std::numbers::pi / 2, 0.5),
              DistSpec::uniform1(-std::numbers::pi, std::numbers::pi), j, q);
}

ScalarScenario exponential(double a, double b, double alpha, std::size_t j, std::size_t q = 1) {
  return make(ScalarKernel::exponential(), DistSpec::uniform1(a, b), DistSpec::uniform1(1.0 - alpha, 1.0 + alpha), j,
              q);
}

ExperimentConfig experiment(ScalarScenario s, std::size_t trials, std::uint64_t seed, std::uint64_t stream = 0) {
  ExperimentConfig c;
  c.scenario = std::move(s);
  c.trials = trials;
  c.master_seed = seed;
  c.stream_id = stream;
  c.workers = 0;
  return c;
}

double z_of(const EstimateResult& r) { return r.z_score.value_or(INFINITY); }

void ac1(Report& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const std::size_t qs[] = {3, 10, 30, 100, 300};
  for (std::size_t i = 0; i < 5; ++i) {
    ExperimentConfig c = experiment(standard_multiplicative(4, qs[i]), 10000, 42, i);
    c.workers = 1;
    const EstimateResult r = estimate_combine_bias(c, Construction::alternative);
    const double target = 1.0 / static_cast<double>(qs[i]);
    const double z = (r.point - target) / r.std_error;
    ok &= std::abs(z) <= 3.0 && std::abs(*r.analytic_reference - target) < 1e-15;
    detail += fmt("Q=%zu %.4f+/-%.4f z=%.2f; ", qs[i], r.point, r.std_error, z);
  }
  ExperimentConfig c = experiment(standard_multiplicative(4, 1), 10000, 42, 99);
  c.workers = 1;
  const EstimateResult tv = estimate_target_variance_oracle(c);
  const double zt = (tv.point - 0.25) / tv.std_error;
  ok &= std::abs(zt) <= 3.0;
  const double secs = seconds_since(t0);
  ok &= secs <= 120.0;
  detail += fmt("target %.4f+/-%.4f z=%.2f; %.1fs on one core", tv.point, tv.std_error, zt, secs);
  rep.line("AC1", ok, "alternative relbias tracks 1/Q (multiplicative, J=4, 10^4 trials)", detail);
}

void ac2(Report& rep) {
  bool ok = true;
  std::string detail;
  for (std::size_t j : {2u, 4u, 8u}) {
    const EstimateResult r = estimate_combine_bias(experiment(phase_extremal(j, 10), 100000, 2, j), Construction::current);
    const double z = (r.point - 2.0) / r.std_error;
    ok &= std::abs(z) <= 3.0;
    detail += fmt("J=%zu %.4f+/-%.4f z=%.2f; ", j, r.point, r.std_error, z);
  }
  rep.line("AC2", ok, "phase extremal current relbias is 2 for every J (10^5 trials)", detail);
}

void ac3(Report& rep) {
  bool ok = true;
  std::string detail;
  std::uint64_t stream = 0;
  for (std::size_t j : {2u, 4u})
    for (std::size_t q : {5u, 50u}) {
      const ScalarScenario s = standard_additive(j, q);
      ok &= psi(s) == 0.0 && phi(s) == 0.0;
      for (Construction con : {Construction::current, Construction::alternative}) {
        const EstimateResult r = estimate_combine_bias(experiment(s, 10000, 3, stream++), con);
        ok &= std::abs(r.point) <= 3.0 * r.std_error;
        detail += fmt("J=%zu Q=%zu %c z=%.2f; ", j, q, con == Construction::current ? 'C' : 'A', r.point / r.std_error);
      }
    }
  rep.line("AC3", ok, "additive relbias is zero in both constructions; psi = phi = 0 exactly", detail);
}

void ac4(Report& rep) {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.2, 2.0);
  int in_bounds = 0, closed_ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t j = 2 + i % 5, q = 2 + (i * 7) % 19;
    ScalarScenario s;
    switch (i % 3) {
      case 0:
        s = make(ScalarKernel::multiplicative(), DistSpec::normal1(u(gen), w(gen)),
                 DistSpec::normal1(u(gen), w(gen)), j, q);
        break;
      case 1:
        s = make(ScalarKernel::additive(), DistSpec::uniform1(u(gen) - 1.0, u(gen) + 1.5),
                 DistSpec::two_point1(u(gen) - 1.0, u(gen) + 1.0, 0.5 + 0.4 * u(gen)), j, q);
        break;
      default: {
        const double d = 0.2 + 1.45 * (u(gen) + 1.0);
        s = i % 2 ? make(ScalarKernel::phase(), DistSpec::uniform1(u(gen) - 1.0, u(gen) + 1.5), DistSpec::uniform1(-d, d),
                         j, q)
                  : make(ScalarKernel::phase(), DistSpec::two_point1(u(gen) - 1.0, u(gen) + 1.0, 0.5 + 0.4 * u(gen)),
                         DistSpec::uniform1(-d, d), j, q);
      }
    }
    const double closed = relbias_alternative(s);
    const double inv_q = 1.0 / static_cast<double>(q);
    closed_ok += closed >= 0.0 && closed <= inv_q;
    const EstimateResult r = estimate_combine_bias(experiment(s, 4000, 4, i), Construction::alternative);
    const bool inside = r.point >= -3.0 * r.std_error && r.point <= inv_q + 3.0 * r.std_error;
    in_bounds += inside;
    const double excess = std::max(-r.point, r.point - inv_q) / r.std_error;
    worst = std::max(worst, excess);
  }
  rep.line("AC4", in_bounds == 50 && closed_ok == 50,
           "alternative relbias within [0, 1/Q] over 50 random scenarios",
           fmt("MC inside bounds %d/50 (worst excess %.2f SE); closed form inside %d/50", in_bounds, worst, closed_ok));
}

void ac5(Report& rep) {
  MapConfig m;
  m.alphas = {0.95};
  m.lo = 0.0;
  m.hi = 8.0;
  m.points = 161;
  m.workers = 0;
  const auto psi_cells = run_map(m);
  std::size_t negative = 0, positive = 0;
  for (const auto& c : psi_cells) {
    negative += c.value < 0.0;
    positive += c.value > 0.0;
  }
  const double frac = static_cast<double>(negative) / psi_cells.size();
  m.quantity = MapQuantity::relbias_current;
  m.j = 2;
  const auto rel_cells = run_map(m);
  double max_abs = 0.0;
  for (const auto& c : rel_cells) max_abs = std::max(max_abs, std::abs(c.value));

  std::mt19937_64 pick(5);
  int matched = 0;
  double worst = 0.0, quad_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, psi_cells.size() - 1)(pick);
    const MapCell& cell = psi_cells[idx];
    const double alpha = cell.alpha;
    std::uniform_real_distribution<double> dy(cell.a, cell.b), ds(1.0 - alpha, 1.0 + alpha);
    const auto mc = oracle::bias_mc([](double y, double s) { return std::pow(y, s); },
                                    [&](std::mt19937_64& g) { return dy(g); },
                                    [&](std::mt19937_64& g) { return ds(g); }, 1.0, 2, 10000000, 2000 + i, 1000);
    const double zp = (mc.psi.value - cell.value) / mc.psi.std_error;
    const double zr = (mc.relbias_current.value - rel_cells[idx].value) / mc.relbias_current.std_error;
    quad_err = std::max(quad_err, std::abs(oracle::exponential_psi(cell.a, cell.b, alpha) - cell.value) /
                                      std::max(1e-3, std::abs(cell.value)));
    matched += std::abs(zp) <= 3.0 && std::abs(zr) <= 3.0;
    worst = std::max({worst, std::abs(zp), std::abs(zr)});
  }
  const bool ok = frac >= 0.95 && positive > 0 && max_abs >= 0.15 && max_abs <= 0.25 && matched == 10 && quad_err <= 1e-8;
  rep.line("AC5", ok, "exponential psi and relbias maps at alpha 0.95 on [0, 8]",
           fmt("psi<0 in %.1f%% of %zu cells, %zu positive; max|relbias| J=2 = %.4f; MC oracle agrees %d/10 "
               "(max |z| %.2f); quadrature oracle psi within %.1e",
               100.0 * frac, psi_cells.size(), positive, max_abs, matched, worst, quad_err));
}

void ac6(Report& rep) {
  const EstimateResult m = estimate_mean_variance(experiment(standard_multiplicative(4, 10), 100000, 6, 0));
  const double zm = (m.point + 1.0 / 400.0) / m.std_error;
  const EstimateResult a = estimate_mean_variance(experiment(standard_additive(4, 10), 100000, 6, 1));
  const double za = a.point / a.std_error;
  rep.line("AC6", std::abs(zm) <= 3.0 && std::abs(za) <= 3.0, "mean-variance gap (J=4, Q=10)",
           fmt("multiplicative %.3e+/-%.1e vs -2.5e-03 z=%.2f; additive z=%.2f", m.point, m.std_error, zm, za));
}

void ac7(Report& rep) {
  ExperimentConfig c = experiment(ScalarScenario{}, 100000, 7);
  bool ok = true;
  std::size_t checks = 0;
  double worst = 0.0;
  std::string failed;
  for (int id = 1; id <= 5; ++id) {
    c.stream_id = static_cast<std::uint64_t>(id);
    for (const auto& r : verify_lemma(id, c)) {
      ++checks;
      const double z = std::abs(z_of(r));
      worst = std::max(worst, z);
      if (!(z <= 3.0)) {
        ok = false;
        failed += r.label + "; ";
      }
    }
  }
  rep.line("AC7", ok, "lemma suite at 10^5 trials per check",
           fmt("%zu checks, max |z| = %.2f", checks, worst) + (failed.empty() ? "" : "; failed: " + failed));
}

void ac8(Report& rep) {
  bool ok = true;
  std::string detail;
  const std::size_t qs[] = {5, 50, 500};
  for (std::size_t i = 0; i < 3; ++i) {
    const EstimateResult r = estimate_vardiff(experiment(standard_additive(4, qs[i]), 100000, 8, i));
    ok &= std::abs(r.point) <= 3.0 * r.std_error;
    detail += fmt("add Q=%zu z=%.2f; ", qs[i], r.point / r.std_error);
  }
  double prev = INFINITY;
  for (std::size_t i = 0; i < 3; ++i) {
    const EstimateResult r = estimate_vardiff(experiment(standard_multiplicative(4, qs[i]), 100000, 8, 10 + i));
    ok &= std::abs(r.point) < prev;
    prev = std::abs(r.point);
    if (qs[i] == 500) ok &= std::abs(r.point) <= 3.0 * r.std_error;
    detail += fmt("mult Q=%zu %.2e z=%.2f; ", qs[i], r.point, r.point / r.std_error);
  }
  const EstimateResult e = estimate_vardiff(experiment(exponential(0.0, 8.0, 0.95, 4, 500), 100000, 8, 20));
  ok &= e.point < 0.0 && std::abs(e.point / e.std_error) >= 3.0;
  detail += fmt("exp Q=500 %.4f z=%.1f; ", e.point, e.point / e.std_error);
  bool exact = true;
  for (std::size_t q : {1u, 3u, 5u, 10u, 50u, 500u}) {
    const double gap = sample_variance_variance_gap(standard_multiplicative(4, q));
    const double want = 4.0 / (static_cast<double>(q) * static_cast<double>(q));
    exact &= std::abs(gap - want) <= 4.0 * std::numeric_limits<double>::epsilon() * want;
  }
  ok &= exact;
  detail += exact ? "closed form = 4/Q^2" : "closed form differs from 4/Q^2";
  rep.line("AC8", ok, "variance-difference asymptotics", detail);
}

void ac9(Report& rep) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> z;
  double worst_rec = 0.0, worst_orth = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + t % 16, rank = 1 + (t / 16) % n;
    Mat a(n, rank);
    for (double& v : a.data()) v = z(gen);
    Mat m = a * a.transposed();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < r; ++c) m(r, c) = m(c, r);
    const EigenPair e = sym_eigendecompose(m);
    const Mat rec = e.u * Mat::diagonal(e.d) * e.u.transposed();
    worst_rec = std::max(worst_rec, frobenius_norm(rec - m) / frobenius_norm(m));
    worst_orth = std::max(worst_orth, max_abs(e.u.transposed() * e.u - Mat::identity(n)));
  }
  double worst_quad = 0.0;
  for (double alpha : {0.05, 0.5, 0.95})
    for (auto [a, b] : {std::pair{0.0, 8.0}, std::pair{0.0, 1.0}, std::pair{0.0, 0.1}, std::pair{0.5, 3.0}}) {
      QuadratureOptions base, doubled;
      doubled.graded_order *= 2;
      doubled.graded_levels *= 2;
      doubled.error_order *= 2;
      doubled.smooth_order *= 2;
      const KMoments k1 = exponential_k_moments(a, b, alpha, base), k2 = exponential_k_moments(a, b, alpha, doubled);
      worst_quad = std::max({worst_quad, std::abs(k1.mean - k2.mean) / std::abs(k2.mean),
                             std::abs(k1.variance - k2.variance) / std::abs(k2.variance)});
      const ScalarScenario s = exponential(a, b, alpha, 2);
      const VarianceComponents c1 = variance_components(s, base), c2 = variance_components(s, doubled);
      for (auto [x, y] : {std::pair{c1.mean_var_given_s, c2.mean_var_given_s},
                          std::pair{c1.var_mean_given_s, c2.var_mean_given_s}})
        worst_quad = std::max(worst_quad, std::abs(x - y) / std::abs(y));
    }
  const bool ok = worst_rec <= 1e-10 && worst_orth <= 1e-12 && worst_quad <= 1e-8;
  rep.line("AC9", ok, "eigensolver and quadrature accuracy",
           fmt("reconstruction %.2e, orthogonality %.2e over 1000 PSD matrices up to 16x16; node doubling %.2e", worst_rec,
               worst_orth, worst_quad));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MCBIAS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void ac10(Report& rep) {
  {
    std::ofstream f("acceptance_data.csv");
    f << "y_1,y_2\n0.5,1\n1.5,-2\n2.5,0.25\n";
  }
  const std::vector<std::string> invocations{
      "bias-sweep --model multiplicative --j 4 --q 3:300:log5 --trials 2000 --construction alternative --seed 42",
      "psi-map --model exponential --alpha 0.95 --grid 0:8:41",
      "relbias-map --alpha 0.5,0.95 --grid 0:8:21 --j 2 --format json",
      "pipeline --data acceptance_data.csv --model additive --nu 0,0 --q 1000 --construction current --seed 7",
      "pipeline --data acceptance_data.csv --model phase --q 50 --construction alternative --seed 7 --format csv",
      "vardiff --model exponential --y-dist uniform:0:8 --s-dist uniform:0.05:1.95 --j 4 --q 5,50 --trials 4000 --seed 1",
      "mean-var --model multiplicative --j 4 --q 10 --trials 4000 --seed 5 --format json",
      "lemmas --trials 5000 --seed 3",
  };
  int identical = 0;
  std::string detail;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    const std::string a = "acceptance_det_a" + std::to_string(i), b = "acceptance_det_b" + std::to_string(i);
    const int ra = run_cli(invocations[i] + " --workers 1 --out " + a);
    const int rb = run_cli(invocations[i] + " --workers 4 --out " + b);
    const std::string fa = slurp(a), fb = slurp(b);
    const bool same = ra == 0 && rb == 0 && !fa.empty() && fa == fb;
    identical += same;
    if (!same) detail += "differs: " + invocations[i] + "; ";
  }
  rep.line("AC10", identical == static_cast<int>(invocations.size()),
           "CLI artifacts byte-identical across reruns and worker counts",
           fmt("%d/%zu invocations identical", identical, invocations.size()) + (detail.empty() ? "" : "; " + detail));
}

}  // namespace

int main() {
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  ac1(rep);
  ac2(rep);
  ac3(rep);
  ac4(rep);
  ac5(rep);
  ac6(rep);
  ac7(rep);
  ac8(rep);
  ac9(rep);
  ac10(rep);
  std::printf("acceptance: %d failure(s), %.1fs\n", rep.failures, seconds_since(t0));
  return rep.failures == 0 ? 0 : 1;
}

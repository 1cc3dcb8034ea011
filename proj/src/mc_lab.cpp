#include "mcbias/mc_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "mcbias/error.hpp"

namespace mcbias {

namespace {

constexpr std::uint64_t kRoleOracleData = 4;
constexpr std::uint64_t kRoleOracleError = 5;
constexpr std::uint64_t kInstanceIndex = std::uint64_t{1} << 63;

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

// Sample variance with the large-sample standard error sqrt((m4 - s^4) / n).
McValue variance_with_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = mean_of(v);
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d2 = (x - m) * (x - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double s2 = m2 / (n - 1.0);
  m4 /= n;
  return {s2, std::sqrt(std::max(m4 - s2 * s2, 0.0) / n)};
}

McValue mean_with_se(const std::vector<double>& v) {
  return {mean_of(v), std::sqrt(sample_var(v) / static_cast<double>(v.size()))};
}

// Sample covariance with the standard error of the mean centered product.
McValue covariance_with_se(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = (a[i] - ma) * (b[i] - mb);
  const double n = static_cast<double>(a.size());
  McValue r = mean_with_se(prod);
  r.value *= n / (n - 1.0);
  return r;
}

// Difference of two paired sample variances, V[a] - V[b].
McValue variance_difference_with_se(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = (a[i] - ma) * (a[i] - ma) - (b[i] - mb) * (b[i] - mb);
  const double n = static_cast<double>(a.size());
  McValue r = mean_with_se(w);
  r.value *= n / (n - 1.0);
  return r;
}

double scalar_sample_variance(const Mat& rows) {
  const std::size_t n = rows.rows();
  double m = 0.0;
  for (std::size_t r = 0; r < n; ++r) m += rows(r, 0);
  m /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) acc += (rows(r, 0) - m) * (rows(r, 0) - m);
  return acc / static_cast<double>(n - 1);
}

double scalar_mean(const Mat& rows) {
  double m = 0.0;
  for (std::size_t r = 0; r < rows.rows(); ++r) m += rows(r, 0);
  return m / static_cast<double>(rows.rows());
}

TransformOutput run_transform(const ExperimentConfig& cfg, const RngStream& trial) {
  const ScalarScenario& s = cfg.scenario;
  RngStream ys = trial.substream(kRoleData);
  RngStream ss = trial.substream(kRoleErrors);
  DataBatch data{sample(s.y_dist, s.j, ys)};
  ErrorBatch errors{sample(s.s_dist, s.q, ss), true};
  TransformSpec spec;
  spec.kernel = s.kernel;
  const Vec nu = s.s_dist.mean();
  return transform_stage(data, errors, spec, nu);
}

std::string scenario_label(const ScalarScenario& s) {
  return s.kernel.name() + " J=" + std::to_string(s.j) + " Q=" + std::to_string(s.q);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 2) throw ConfigError("trials must be at least 2");
  if (blocks < 2 || blocks > trials) throw ConfigError("blocks must lie in [2, trials]");
  scenario.validate();
}

RngStream ExperimentConfig::trial_stream(std::size_t trial) const {
  return RngStream(master_seed).substream(stream_id).substream(trial);
}

void EstimateResult::set_reference(double reference) {
  analytic_reference = reference;
  if (std_error > 0.0)
    z_score = (point - reference) / std_error;
  else if (point == reference)
    z_score = 0.0;
  else
    z_score = point > reference ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
}

std::optional<double> EstimateResult::extra(const std::string& name) const {
  for (const auto& [k, v] : extras)
    if (k == name) return v;
  return std::nullopt;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

EstimateResult estimate_target_variance_oracle(const ExperimentConfig& cfg) {
  cfg.validate();
  const ScalarScenario& s = cfg.scenario;
  const ScalarSampler ys(s.y_dist), ss(s.s_dist);
  std::vector<double> means(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    const RngStream trial = cfg.trial_stream(t);
    RngStream yr = trial.substream(kRoleOracleData);
    RngStream sr = trial.substream(kRoleOracleError);
    const double e = ss(sr);
    double acc = 0.0;
    for (std::size_t j = 0; j < s.j; ++j) acc += s.kernel(ys(yr), e);
    means[t] = acc / static_cast<double>(s.j);
  });
  const McValue v = variance_with_se(means);
  EstimateResult r;
  r.label = "target_variance " + scenario_label(s);
  r.point = v.value;
  r.std_error = v.std_error;
  r.trials = cfg.trials;
  if (has_closed_form(s)) r.set_reference(target_variance(s));
  return r;
}

EstimateResult estimate_combine_bias(const ExperimentConfig& cfg, Construction construction) {
  cfg.validate();
  const ScalarScenario& s = cfg.scenario;
  if (construction == Construction::alternative && s.q < 2)
    throw ConfigError("the alternative construction needs Q >= 2");
  if (construction == Construction::current && s.q < 2)
    throw ConfigError("the replicate sample variance needs Q >= 2");
  std::vector<double> s2(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    const RngStream trial = cfg.trial_stream(t);
    const TransformOutput out = run_transform(cfg, trial);
    RngStream zs = trial.substream(kRoleSynthesis);
    s2[t] = scalar_sample_variance(combine(out, construction, zs).replicates);
  });
  const McValue v = mean_with_se(s2);

  EstimateResult r;
  r.label = "relbias_" + std::string(to_string(construction)) + " " + scenario_label(s);
  r.trials = cfg.trials;
  r.extras.emplace_back("mean_sample_variance", v.value);
  r.extras.emplace_back("mean_sample_variance_se", v.std_error);
  if (has_closed_form(s)) {
    const BiasReport rep = bias_report(s);
    r.point = v.value / rep.target_var - 1.0;
    r.std_error = v.std_error / rep.target_var;
    r.extras.emplace_back("target_variance", rep.target_var);
    r.set_reference(construction == Construction::current ? rep.relbias_current
                                                          : rep.relbias_alternative);
  } else {
    const EstimateResult tv = estimate_target_variance_oracle(cfg);
    if (!(tv.point > 0.0)) throw NumericalError("target variance estimate is not positive");
    const double ratio = v.value / tv.point;
    r.point = ratio - 1.0;
    r.std_error = std::abs(ratio) * std::hypot(v.std_error / v.value, tv.std_error / tv.point);
    r.extras.emplace_back("target_variance", tv.point);
    r.extras.emplace_back("target_variance_se", tv.std_error);
  }
  return r;
}

EstimateResult estimate_mean_variance(const ExperimentConfig& cfg) {
  cfg.validate();
  const ScalarScenario& s = cfg.scenario;
  if (s.q < 2) throw ConfigError("the alternative construction needs Q >= 2");
  std::vector<double> mc(cfg.trials), ma(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    const RngStream trial = cfg.trial_stream(t);
    const TransformOutput out = run_transform(cfg, trial);
    RngStream zc = trial.substream(kRoleSynthesis);
    RngStream za = trial.substream(kRoleSynthesis);
    mc[t] = scalar_mean(combine_current(out, zc).replicates);
    ma[t] = scalar_mean(combine_alternative(out, za).replicates);
  });
  const McValue d = variance_difference_with_se(mc, ma);
  EstimateResult r;
  r.label = "mean_variance_gap " + scenario_label(s);
  r.point = d.value;
  r.std_error = d.std_error;
  r.trials = cfg.trials;
  r.extras.emplace_back("var_mean_current", sample_var(mc));
  r.extras.emplace_back("var_mean_alternative", sample_var(ma));
  if (has_closed_form(s)) r.set_reference(mean_variance_gap(s));
  return r;
}

EstimateResult estimate_vardiff(const ExperimentConfig& cfg) {
  cfg.validate();
  const ScalarScenario& s = cfg.scenario;
  if (s.q < 2) throw ConfigError("the alternative construction needs Q >= 2");
  std::vector<double> sc(cfg.trials), sa(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    const RngStream trial = cfg.trial_stream(t);
    const TransformOutput out = run_transform(cfg, trial);
    RngStream zc = trial.substream(kRoleSynthesis);
    RngStream za = trial.substream(kRoleSynthesisAlt);
    sc[t] = scalar_sample_variance(combine_current(out, zc).replicates);
    sa[t] = scalar_sample_variance(combine_alternative(out, za).replicates);
  });
  auto reldiff = [](double vc, double va) {
    const double den = vc + va;
    return den > 0.0 ? (vc - va) / den : 0.0;
  };
  const double vc = sample_var(sc), va = sample_var(sa);

  std::vector<double> per_block(cfg.blocks);
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const std::size_t lo = b * cfg.trials / cfg.blocks, hi = (b + 1) * cfg.trials / cfg.blocks;
    const std::vector<double> bc(sc.begin() + lo, sc.begin() + hi), ba(sa.begin() + lo, sa.begin() + hi);
    per_block[b] = reldiff(sample_var(bc), sample_var(ba));
  }
  EstimateResult r;
  r.label = "vardiff_reldiff " + scenario_label(s);
  r.point = reldiff(vc, va);
  r.std_error = std::sqrt(sample_var(per_block) / static_cast<double>(cfg.blocks));
  r.trials = cfg.trials;
  r.extras.emplace_back("var_s2_current", vc);
  r.extras.emplace_back("var_s2_alternative", va);
  if (s.kernel.kind() == KernelKind::additive) r.set_reference(0.0);
  if (s.kernel.kind() == KernelKind::multiplicative)
    r.extras.emplace_back("approx_vardiff", vardiff_sample_variances(s));
  return r;
}

namespace {

EstimateResult finish(std::string label, McValue v, std::size_t trials, double reference) {
  EstimateResult r;
  r.label = std::move(label);
  r.point = v.value;
  r.std_error = v.std_error;
  r.trials = trials;
  r.set_reference(reference);
  return r;
}

double uniform_in(RngStream& g, double lo, double hi) { return lo + (hi - lo) * g.uniform(); }

// Sample covariance of J i.i.d. vectors around a shared offset has expectation
// equal to the covariance of the per-vector part.
std::vector<EstimateResult> lemma1(const ExperimentConfig& cfg, RngStream& inst) {
  std::vector<EstimateResult> out;
  for (int variant = 0; variant < 2; ++variant) {
    const std::size_t j = 2 + static_cast<std::size_t>(inst() % 5);
    Mat l1(2, 2), l2(2, 2);
    l1(0, 0) = uniform_in(inst, 0.5, 1.5);
    l1(1, 0) = uniform_in(inst, -1.0, 1.0);
    l1(1, 1) = uniform_in(inst, 0.5, 1.5);
    if (variant == 0) {
      l2(0, 0) = uniform_in(inst, 0.5, 2.0);
      l2(1, 0) = uniform_in(inst, -1.0, 1.0);
      l2(1, 1) = uniform_in(inst, 0.5, 2.0);
    }
    const Vec mu{uniform_in(inst, -2.0, 2.0), uniform_in(inst, -2.0, 2.0)};
    const Mat sigma = l1 * l1.transposed();

    std::vector<double> c00(cfg.trials), c01(cfg.trials), c11(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
      RngStream g = cfg.trial_stream(t).substream(static_cast<std::uint64_t>(variant));
      const double u0 = g.normal(), u1 = g.normal();
      const Vec shared{l2(0, 0) * u0, l2(1, 0) * u0 + l2(1, 1) * u1};
      Mat x(j, 2);
      for (std::size_t r = 0; r < j; ++r) {
        const double e0 = g.normal(), e1 = g.normal();
        x(r, 0) = mu[0] + shared[0] + l1(0, 0) * e0;
        x(r, 1) = mu[1] + shared[1] + l1(1, 0) * e0 + l1(1, 1) * e1;
      }
      const Mat c = sample_covariance(x);
      c00[t] = c(0, 0);
      c01[t] = c(0, 1);
      c11[t] = c(1, 1);
    });
    const std::string tag = variant == 0 ? "lemma1 shared offset" : "lemma1 no offset";
    const std::string js = " J=" + std::to_string(j);
    out.push_back(finish(tag + js + " cov[0,0]", mean_with_se(c00), cfg.trials, sigma(0, 0)));
    out.push_back(finish(tag + js + " cov[0,1]", mean_with_se(c01), cfg.trials, sigma(0, 1)));
    out.push_back(finish(tag + js + " cov[1,1]", mean_with_se(c11), cfg.trials, sigma(1, 1)));
  }
  return out;
}

// V[A + B Z] = V[A] + E[B^2] for Z independent of (A, B) with mean 0 and
// variance 1.
std::vector<EstimateResult> lemma2(const ExperimentConfig& cfg, RngStream& inst) {
  const double c1 = uniform_in(inst, -1.5, 1.5), c2 = uniform_in(inst, -1.5, 1.5);
  const double c3 = uniform_in(inst, -1.5, 1.5), c4 = uniform_in(inst, -1.5, 1.5);
  std::vector<double> x(cfg.trials), a(cfg.trials), b2(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    RngStream g = cfg.trial_stream(t);
    const double u1 = g.normal(), u2 = g.normal(), z = g.normal();
    const double av = c1 * u1 + c2 * u2, bv = c3 + c4 * u2;
    x[t] = av + bv * z;
    a[t] = av;
    b2[t] = bv * bv;
  });
  const double mx = mean_of(x), ma = mean_of(a);
  std::vector<double> w(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t)
    w[t] = (x[t] - mx) * (x[t] - mx) - (a[t] - ma) * (a[t] - ma) - b2[t];
  std::vector<EstimateResult> out;
  out.push_back(finish("lemma2 V[A+BZ] - V[A] - E[B^2]", mean_with_se(w), cfg.trials, 0.0));
  out.push_back(finish("lemma2 V[A+BZ]", variance_with_se(x), cfg.trials,
                       c1 * c1 + c2 * c2 + c3 * c3 + c4 * c4));
  return out;
}

// Cov[A1 + B Z1, A2 + B Z2] = Cov[A1, A2] for independent zero-mean Z1, Z2.
std::vector<EstimateResult> lemma3(const ExperimentConfig& cfg, RngStream& inst) {
  const double c = uniform_in(inst, -1.5, 1.5), d = uniform_in(inst, -1.0, 1.0);
  const double e = uniform_in(inst, -1.0, 1.0), h = uniform_in(inst, 0.5, 1.5);
  std::vector<double> x1(cfg.trials), x2(cfg.trials), a1(cfg.trials), a2(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    RngStream g = cfg.trial_stream(t);
    const double u1 = g.normal(), u2 = g.normal(), u3 = g.normal();
    const double z1 = g.normal(), z2 = g.normal();
    const double av1 = u1 + c * u3, av2 = u2 + c * u3 + d * u1, bv = e + h * u3;
    a1[t] = av1;
    a2[t] = av2;
    x1[t] = av1 + bv * z1;
    x2[t] = av2 + bv * z2;
  });
  const double mx1 = mean_of(x1), mx2 = mean_of(x2), ma1 = mean_of(a1), ma2 = mean_of(a2);
  std::vector<double> w(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t)
    w[t] = (x1[t] - mx1) * (x2[t] - mx2) - (a1[t] - ma1) * (a2[t] - ma2);
  std::vector<EstimateResult> out;
  out.push_back(finish("lemma3 Cov[A1+BZ1, A2+BZ2] - Cov[A1, A2]", mean_with_se(w), cfg.trials, 0.0));
  out.push_back(finish("lemma3 Cov[A1+BZ1, A2+BZ2]", covariance_with_se(x1, x2), cfg.trials, d + c * c));
  return out;
}

// Cov[F(Y, S), F(Y, S')] = V[E[F(Y, S) | Y]] for independent S, S'.
std::vector<EstimateResult> lemma4(const ExperimentConfig& cfg, RngStream& inst) {
  std::vector<ScalarScenario> cases;
  {
    ScalarScenario s;
    s.kernel = ScalarKernel::multiplicative();
    cases.push_back(s);
  }
  {
    ScalarScenario s;
    s.kernel = ScalarKernel::multiplicative();
    s.y_dist = DistSpec::normal1(uniform_in(inst, -1.0, 1.0), uniform_in(inst, 0.5, 2.0));
    s.s_dist = DistSpec::normal1(uniform_in(inst, -1.0, 1.0), uniform_in(inst, 0.5, 2.0));
    cases.push_back(s);
  }
  {
    ScalarScenario s;
    s.kernel = ScalarKernel::additive();
    s.y_dist = DistSpec::uniform1(-1.0, uniform_in(inst, 0.0, 2.0));
    s.s_dist = DistSpec::two_point1(-1.0, 1.0, uniform_in(inst, 0.2, 0.8));
    cases.push_back(s);
  }
  {
    ScalarScenario s;
    s.kernel = ScalarKernel::phase();
    const double delta = uniform_in(inst, 0.5, std::numbers::pi);
    s.y_dist = DistSpec::two_point1(-std::numbers::pi / 2, std::numbers::pi / 2, 0.5);
    s.s_dist = DistSpec::uniform1(-delta, delta);
    cases.push_back(s);
  }
  {
    ScalarScenario s;
    s.kernel = ScalarKernel::exponential();
    const double alpha = uniform_in(inst, 0.2, 0.95);
    s.y_dist = DistSpec::uniform1(0.0, uniform_in(inst, 1.0, 4.0));
    s.s_dist = DistSpec::uniform1(1.0 - alpha, 1.0 + alpha);
    cases.push_back(s);
  }
  std::vector<EstimateResult> out;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const ScalarScenario& s = cases[c];
    const ScalarSampler ys(s.y_dist), ss(s.s_dist);
    std::vector<double> f1(cfg.trials), f2(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
      RngStream g = cfg.trial_stream(t).substream(c);
      const double y = ys(g), e1 = ss(g), e2 = ss(g);
      f1[t] = s.kernel(y, e1);
      f2[t] = s.kernel(y, e2);
    });
    out.push_back(finish("lemma4 case " + std::to_string(c + 1) + " " + s.kernel.name() + " Cov[F(Y,S), F(Y,S')]",
                         covariance_with_se(f1, f2), cfg.trials,
                         variance_components(s).var_mean_given_y));
  }
  return out;
}

// Mean and variance of the sample variance of N independent normals with
// common variance sigma^2 and fixed means whose sample variance is u^2.
std::vector<EstimateResult> lemma5(const ExperimentConfig& cfg) {
  std::vector<EstimateResult> out;
  const double sigma2 = 1.0;
  std::uint64_t case_index = 0;
  for (std::size_t n : {std::size_t{2}, std::size_t{11}}) {
    for (double u2 : {0.0, 2.0}) {
      Vec mu(n);
      const double centre = 0.5 * static_cast<double>(n - 1);
      double spread = 0.0;
      for (std::size_t i = 0; i < n; ++i) spread += (i - centre) * (i - centre);
      spread /= static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) mu[i] = std::sqrt(u2 / spread) * (i - centre);
      std::vector<double> s2(cfg.trials);
      parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        RngStream g = cfg.trial_stream(t).substream(case_index);
        double m = 0.0;
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = mu[i] + std::sqrt(sigma2) * g.normal();
          m += x[i];
        }
        m /= static_cast<double>(n);
        double acc = 0.0;
        for (double v : x) acc += (v - m) * (v - m);
        s2[t] = acc / static_cast<double>(n - 1);
      });
      char tag[64];
      std::snprintf(tag, sizeof tag, "lemma5 N=%zu u2=%g", n, u2);
      out.push_back(finish(std::string(tag) + " E[S^2]", mean_with_se(s2), cfg.trials, sigma2 + u2));
      out.push_back(finish(std::string(tag) + " V[S^2]", variance_with_se(s2), cfg.trials,
                           var_of_sample_variance_normal(sigma2, u2, n)));
      ++case_index;
    }
  }
  return out;
}

}  // namespace

std::vector<EstimateResult> verify_lemma(int id, const ExperimentConfig& cfg) {
  if (cfg.trials < 2) throw ConfigError("trials must be at least 2");
  RngStream inst = RngStream(cfg.master_seed).substream(cfg.stream_id).substream(kInstanceIndex + id);
  switch (id) {
    case 1: return lemma1(cfg, inst);
    case 2: return lemma2(cfg, inst);
    case 3: return lemma3(cfg, inst);
    case 4: return lemma4(cfg, inst);
    case 5: return lemma5(cfg);
    default: throw ConfigError("lemma id must be 1 to 5, got " + std::to_string(id));
  }
}

std::vector<MapCell> run_map(const MapConfig& cfg) {
  if (cfg.points < 2) throw ConfigError("map grid needs at least 2 points");
  if (!(cfg.lo >= 0.0 && cfg.hi > cfg.lo)) throw ConfigError("map grid needs 0 <= lo < hi");
  if (cfg.j < 2) throw ConfigError("J must exceed 1");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");

  std::vector<double> grid(cfg.points);
  for (std::size_t i = 0; i < cfg.points; ++i)
    grid[i] = cfg.lo + (cfg.hi - cfg.lo) * static_cast<double>(i) / static_cast<double>(cfg.points - 1);
  std::vector<MapCell> cells;
  for (double alpha : cfg.alphas)
    for (std::size_t i = 0; i < cfg.points; ++i)
      for (std::size_t k = i + 1; k < cfg.points; ++k) cells.push_back({alpha, grid[i], grid[k], 0.0});

  parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
    MapCell& cell = cells[c];
    ScalarScenario s;
    s.kernel = ScalarKernel::exponential();
    s.y_dist = DistSpec::uniform1(cell.a, cell.b);
    s.s_dist = DistSpec::uniform1(1.0 - cell.alpha, 1.0 + cell.alpha);
    s.j = cfg.j;
    cell.value = cfg.quantity == MapQuantity::psi ? psi(s) : relbias_current(s);
  });
  return cells;
}

}  // namespace mcbias

#include "mcbias/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mcbias/error.hpp"
#include "mcbias/quadrature.hpp"

namespace mcbias {

void ScalarScenario::validate() const {
  if (j < 2) throw DomainError("scenario: J must exceed 1");
  if (q < 1) throw DomainError("scenario: Q must be at least 1");
  if (y_dist.dim() != 1 || s_dist.dim() != 1)
    throw DomainError("scenario: data and error distributions must be scalar");
}

namespace {

// Probability measure as weighted nodes (weights sum to one).
using Measure = std::vector<QuadNode>;

Measure uniform_measure(double lo, double hi, std::size_t order) {
  Measure m = gauss_legendre_on(-1.0, 1.0, order);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (auto& n : m) {
    n.x = mid + half * n.x;
    n.w *= 0.5;
  }
  return m;
}

Measure graded_uniform_measure(double lo, double hi, const QuadratureOptions& opts) {
  Measure m = graded_gauss_legendre(lo, hi, opts.graded_order, opts.graded_levels);
  const double len = hi - lo;
  for (auto& n : m) n.w /= len;
  return m;
}

template <class F>
double expect(const Measure& m, F&& f) {
  double acc = 0.0;
  for (const auto& n : m) acc += n.w * f(n.x);
  return acc;
}

// Two-pass variance of f under m.
template <class F>
double variance(const Measure& m, F&& f) {
  const double mean = expect(m, f);
  return expect(m, [&](double x) {
    const double d = f(x) - mean;
    return d * d;
  });
}

const UniformDist* as_uniform(const DistSpec& d) { return d.get_if<UniformDist>(); }

// Symmetric Unif(-delta, delta) error with delta > 0, or nullptr.
std::optional<double> symmetric_uniform_halfwidth(const DistSpec& d) {
  const auto* u = as_uniform(d);
  if (!u) return std::nullopt;
  const double lo = u->lo[0], hi = u->hi[0];
  if (!(hi > 0.0) || std::abs(lo + hi) > 1e-12 * hi) return std::nullopt;
  return hi;
}

// Exponential-kernel support: Y ~ Unif[a, b] with 0 <= a < b,
// S ~ Unif[1 - alpha, 1 + alpha] with 0 <= alpha <= 1.
struct ExponentialParams {
  double a, b, alpha;
};

std::optional<ExponentialParams> exponential_params(const ScalarScenario& s) {
  const auto* y = as_uniform(s.y_dist);
  const auto* e = as_uniform(s.s_dist);
  if (!y || !e) return std::nullopt;
  const double a = y->lo[0], b = y->hi[0];
  const double alpha = 0.5 * (e->hi[0] - e->lo[0]);
  const double mid = 0.5 * (e->hi[0] + e->lo[0]);
  if (!(a >= 0.0 && b > a)) return std::nullopt;
  if (std::abs(mid - 1.0) > 1e-12 || alpha > 1.0 + 1e-12) return std::nullopt;
  return ExponentialParams{a, b, std::min(alpha, 1.0)};
}

bool phase_supported(const ScalarScenario& s) {
  if (!symmetric_uniform_halfwidth(s.s_dist)) return false;
  return s.y_dist.get_if<UniformDist>() || s.y_dist.get_if<TwoPointDist>();
}

Measure data_measure_smooth(const DistSpec& y, std::size_t order) {
  if (const auto* t = y.get_if<TwoPointDist>()) return {{t->a[0], t->p}, {t->b[0], 1.0 - t->p}};
  const auto* u = y.get_if<UniformDist>();
  return uniform_measure(u->lo[0], u->hi[0], order);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
  return std::sin(x) / x;
}

VarianceComponents additive_components(const ScalarScenario& s) {
  const MomentSet y = moments(s.y_dist), e = moments(s.s_dist);
  return {y.variance, y.variance, y.variance, e.variance};
}

VarianceComponents multiplicative_components(const ScalarScenario& s) {
  const MomentSet y = moments(s.y_dist), e = moments(s.s_dist);
  const double nu2 = e.mean * e.mean;
  return {nu2 * y.variance, nu2 * y.variance, (e.variance + nu2) * y.variance,
          y.mean * y.mean * e.variance};
}

VarianceComponents phase_components(const ScalarScenario& s, const QuadratureOptions& opts) {
  const double delta = *symmetric_uniform_halfwidth(s.s_dist);
  const Measure ym = data_measure_smooth(s.y_dist, opts.smooth_order);
  const Measure sm = uniform_measure(-delta, delta, opts.smooth_order);
  const double var_sin_y = variance(ym, [](double y) { return std::sin(y); });
  const double shrink = sinc(delta);

  VarianceComponents c;
  c.nominal_var = var_sin_y;  // nu = 0
  c.var_mean_given_y = shrink * shrink * var_sin_y;
  c.mean_var_given_s = expect(sm, [&](double e) {
    return variance(ym, [&](double y) { return std::sin(y + e); });
  });
  c.var_mean_given_s = variance(sm, [&](double e) {
    return expect(ym, [&](double y) { return std::sin(y + e); });
  });
  return c;
}

// E[Y^p] for Y ~ Unif[a, b], p > -1.
double uniform_power_mean(double a, double b, double p) {
  const double p1 = p + 1.0;
  const double top = std::pow(b, p1) - (a > 0.0 ? std::pow(a, p1) : 0.0);
  return top / (p1 * (b - a));
}

VarianceComponents exponential_components(const ExponentialParams& p,
                                          const QuadratureOptions& opts) {
  const KMoments km = exponential_k_moments(p.a, p.b, p.alpha, opts);
  const Measure sm = uniform_measure(1.0 - p.alpha, 1.0 + p.alpha, opts.error_order);
  const double w = p.b - p.a;

  VarianceComponents c;
  c.nominal_var = w * w / 12.0;  // nu = 1, F(y, 1) = y
  c.var_mean_given_y = km.variance;
  c.mean_var_given_s = expect(sm, [&](double e) {
    const double m1 = uniform_power_mean(p.a, p.b, e);
    return uniform_power_mean(p.a, p.b, 2.0 * e) - m1 * m1;
  });
  c.var_mean_given_s = variance(sm, [&](double e) { return uniform_power_mean(p.a, p.b, e); });
  return c;
}

}  // namespace

bool has_closed_form(const ScalarScenario& s) {
  if (s.y_dist.dim() != 1 || s.s_dist.dim() != 1) return false;
  switch (s.kernel.kind()) {
    case KernelKind::additive:
    case KernelKind::multiplicative: return true;
    case KernelKind::phase: return phase_supported(s);
    case KernelKind::exponential: return exponential_params(s).has_value();
    case KernelKind::custom: return false;
  }
  return false;
}

VarianceComponents variance_components(const ScalarScenario& s, const QuadratureOptions& opts) {
  s.validate();
  switch (s.kernel.kind()) {
    case KernelKind::additive: return additive_components(s);
    case KernelKind::multiplicative: return multiplicative_components(s);
    case KernelKind::phase:
      if (!phase_supported(s))
        throw DomainError(
            "phase kernel: closed form needs S ~ Unif(-delta, delta) and two-point or uniform Y");
      return phase_components(s, opts);
    case KernelKind::exponential:
      if (auto p = exponential_params(s)) return exponential_components(*p, opts);
      throw DomainError(
          "exponential kernel: closed form needs Y ~ Unif[a, b] (0 <= a < b) and "
          "S ~ Unif[1 - alpha, 1 + alpha] (0 <= alpha <= 1)");
    case KernelKind::custom: break;
  }
  throw DomainError("kernel '" + s.kernel.name() +
                    "' has no closed form; use estimate_bias_terms_mc");
}

namespace {

double phi_from(const VarianceComponents& c) {
  const double raw = c.mean_var_given_s - c.var_mean_given_y;
  // phi is a variance in disguise; only rounding can push it below zero.
  if (raw < 0.0 && raw > -1e-10 * std::max(c.mean_var_given_s, 1e-300)) return 0.0;
  return raw;
}

double target_from(const VarianceComponents& c, std::size_t j) {
  return c.mean_var_given_s / static_cast<double>(j) + c.var_mean_given_s;
}

double psi_from(const ScalarScenario& s, const VarianceComponents& c) {
  if (s.kernel.kind() == KernelKind::additive || s.kernel.kind() == KernelKind::multiplicative)
    return 0.0;
  return c.nominal_var - c.var_mean_given_y;
}

double phi_exact(const ScalarScenario& s, const VarianceComponents& c) {
  if (s.kernel.kind() == KernelKind::additive) return 0.0;
  if (s.kernel.kind() == KernelKind::multiplicative)
    return moments(s.s_dist).variance * moments(s.y_dist).variance;
  return phi_from(c);
}

double checked_target(const VarianceComponents& c, std::size_t j) {
  const double t = target_from(c, j);
  if (!(t > 0.0)) throw DomainError("target variance is zero; relative bias undefined");
  return t;
}

}  // namespace

double psi(const ScalarScenario& s) { return psi_from(s, variance_components(s)); }

double phi(const ScalarScenario& s) { return phi_exact(s, variance_components(s)); }

double target_variance(const ScalarScenario& s) { return target_from(variance_components(s), s.j); }

double relbias_current(const ScalarScenario& s) {
  const auto c = variance_components(s);
  return (psi_from(s, c) / static_cast<double>(s.j)) / checked_target(c, s.j);
}

double relbias_alternative(const ScalarScenario& s) {
  const auto c = variance_components(s);
  const double jq = static_cast<double>(s.j) * static_cast<double>(s.q);
  return (phi_exact(s, c) / jq) / checked_target(c, s.j);
}

double mean_variance_gap(const ScalarScenario& s) {
  const auto c = variance_components(s);
  const double jd = static_cast<double>(s.j), qd = static_cast<double>(s.q);
  return psi_from(s, c) / (jd * qd) - phi_exact(s, c) / (jd * qd * qd);
}

BiasReport bias_report(const ScalarScenario& s) {
  const auto c = variance_components(s);
  BiasReport r;
  r.psi = psi_from(s, c);
  r.phi = phi_exact(s, c);
  r.target_var = target_from(c, s.j);
  const double jd = static_cast<double>(s.j), qd = static_cast<double>(s.q);
  r.relbias_current = (r.psi / jd) / checked_target(c, s.j);
  r.relbias_alternative = (r.phi / (jd * qd)) / r.target_var;
  r.mean_var_gap = r.psi / (jd * qd) - r.phi / (jd * qd * qd);
  return r;
}

double var_of_sample_variance_normal(double sigma2, double u2, std::size_t n) {
  if (n < 2) throw DomainError("var_of_sample_variance_normal: N must be at least 2");
  if (sigma2 < 0.0 || u2 < 0.0) throw DomainError("var_of_sample_variance_normal: negative variance");
  const double nm1 = static_cast<double>(n - 1);
  return 2.0 / nm1 * sigma2 * sigma2 + 4.0 / nm1 * sigma2 * u2;
}

double sample_variance_variance_gap(const ScalarScenario& s) {
  s.validate();
  if (s.kernel.kind() == KernelKind::additive) return 0.0;
  if (s.kernel.kind() != KernelKind::multiplicative)
    throw DomainError("sample-variance variance gap has a closed form only for additive and "
                      "multiplicative kernels");
  const MomentSet y = moments(s.y_dist), e = moments(s.s_dist);
  const double jd = static_cast<double>(s.j), qd = static_cast<double>(s.q);
  const double nu = e.mean, tau2 = e.variance, omega3 = e.third, psi4 = e.fourth;
  const double sigma2 = y.variance, phi4 = y.fourth;
  const double sigma4 = sigma2 * sigma2, tau4 = tau2 * tau2;
  const double excess = psi4 - 3.0 * tau4;

  // V[mean_q S_q^2] and E[mean_q S_q^4] - nu^4
  const double var_mean_sq = 4.0 * nu * nu * tau2 / qd + (2.0 * tau4 + 4.0 * nu * omega3) / (qd * qd) +
                             excess / (qd * qd * qd);
  const double fourth_minus_nu4 = 6.0 * nu * nu * tau2 / qd +
                                  (3.0 * tau4 + 4.0 * nu * omega3) / (qd * qd) +
                                  excess / (qd * qd * qd);
  // V[S_Y^2] over J data values.
  const double var_sample_var = (phi4 - sigma4) / jd + 2.0 * sigma4 / (jd * (jd - 1.0));
  return sigma4 * var_mean_sq + fourth_minus_nu4 * var_sample_var;
}

double vardiff_sample_variances(const ScalarScenario& s) {
  const double jd = static_cast<double>(s.j);
  return sample_variance_variance_gap(s) / (jd * jd);
}

double exponential_k(double y, double alpha) {
  if (!(y > 0.0)) throw DomainError("exponential_k: y must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("exponential_k: alpha must lie in [0, 1]");
  const double x = alpha * std::log(y);
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return y * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
  }
  return y * std::sinh(x) / x;
}

KMoments exponential_k_moments(double a, double b, double alpha, const QuadratureOptions& opts) {
  if (!(a >= 0.0 && b > a)) throw DomainError("exponential_k_moments: need 0 <= a < b");
  const Measure ym = graded_uniform_measure(a, b, opts);
  auto k = [alpha](double y) { return exponential_k(y, alpha); };
  KMoments m;
  m.mean = expect(ym, k);
  m.variance = expect(ym, [&](double y) {
    const double d = k(y) - m.mean;
    return d * d;
  });
  if (!std::isfinite(m.mean) || !std::isfinite(m.variance))
    throw NumericalError("exponential_k_moments: quadrature produced a non-finite value");
  return m;
}

McBiasTerms estimate_bias_terms_mc(const ScalarScenario& s, std::size_t draws, RngStream& stream,
                                   std::size_t batches) {
  s.validate();
  if (batches < 2 || draws < 2 * batches)
    throw DomainError("estimate_bias_terms_mc: need at least two draws per batch and two batches");
  const ScalarSampler ys(s.y_dist), ss(s.s_dist);
  const double nu = s.s_dist.mean()[0];
  const ScalarKernel& f = s.kernel;
  const std::size_t per = draws / batches;
  const double jd = static_cast<double>(s.j), qd = static_cast<double>(s.q);

  struct Batch {
    double psi, phi, target, rc, ra;
  };
  std::vector<Batch> out(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    RngStream bs = stream.substream(b);
    // Running sums for var(a), cov(m1, m2), mean(half squared diff), cov(m1, c1).
    double sa = 0, saa = 0, s1 = 0, s2 = 0, s12 = 0, sc = 0, s1c = 0, shd = 0;
    for (std::size_t i = 0; i < per; ++i) {
      const double y = ys(bs), y2 = ys(bs), e = ss(bs), e2 = ss(bs);
      const double a = f(y, nu);
      const double m1 = f(y, e), m2 = f(y, e2), c1 = f(y2, e);
      sa += a;
      saa += a * a;
      s1 += m1;
      s2 += m2;
      s12 += m1 * m2;
      sc += c1;
      s1c += m1 * c1;
      shd += 0.5 * (m1 - c1) * (m1 - c1);
    }
    const double n = static_cast<double>(per);
    const double var_a = (saa - sa * sa / n) / (n - 1.0);
    const double cov_12 = (s12 - s1 * s2 / n) / (n - 1.0);
    const double cov_1c = (s1c - s1 * sc / n) / (n - 1.0);
    const double mean_var_s = shd / n;
    Batch r;
    r.psi = var_a - cov_12;
    r.phi = mean_var_s - cov_12;
    r.target = mean_var_s / jd + cov_1c;
    r.rc = (r.psi / jd) / r.target;
    r.ra = (r.phi / (jd * qd)) / r.target;
    out[b] = r;
  }

  auto summarize = [&](auto field) {
    double m = 0.0;
    for (const auto& r : out) m += field(r);
    m /= static_cast<double>(batches);
    double v = 0.0;
    for (const auto& r : out) v += (field(r) - m) * (field(r) - m);
    v /= static_cast<double>(batches - 1);
    return McValue{m, std::sqrt(v / static_cast<double>(batches))};
  };
  McBiasTerms t;
  t.psi = summarize([](const Batch& r) { return r.psi; });
  t.phi = summarize([](const Batch& r) { return r.phi; });
  t.target = summarize([](const Batch& r) { return r.target; });
  t.relbias_current = summarize([](const Batch& r) { return r.rc; });
  t.relbias_alternative = summarize([](const Batch& r) { return r.ra; });
  t.draws = per * batches;
  return t;
}

}  // namespace mcbias

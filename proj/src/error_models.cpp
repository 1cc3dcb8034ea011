#include "mcbias/error_models.hpp"

#include <cmath>
#include <string>

#include "mcbias/error.hpp"

namespace mcbias {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::additive: return "additive";
    case KernelKind::multiplicative: return "multiplicative";
    case KernelKind::phase: return "phase";
    case KernelKind::exponential: return "exponential";
    case KernelKind::custom: return "custom";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "additive") return KernelKind::additive;
  if (name == "multiplicative") return KernelKind::multiplicative;
  if (name == "phase") return KernelKind::phase;
  if (name == "exponential") return KernelKind::exponential;
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected additive, multiplicative, phase or exponential)");
}

ScalarKernel ScalarKernel::of(KernelKind kind) {
  if (kind == KernelKind::custom)
    throw DomainError("ScalarKernel::of: custom kernels need a function");
  return ScalarKernel(kind);
}

ScalarKernel ScalarKernel::custom(std::string name, Function fn) {
  if (!fn) throw DomainError("ScalarKernel::custom: empty function");
  ScalarKernel k(KernelKind::custom);
  k.custom_name_ = std::move(name);
  k.fn_ = std::move(fn);
  return k;
}

std::string ScalarKernel::name() const {
  return kind_ == KernelKind::custom ? custom_name_ : std::string(to_string(kind_));
}

double ScalarKernel::operator()(double y, double s) const {
  switch (kind_) {
    case KernelKind::additive: return y + s;
    case KernelKind::multiplicative: return y * s;
    case KernelKind::phase: return std::sin(y + s);
    case KernelKind::exponential:
      if (!(y > 0.0))
        throw DomainError("exponential kernel needs y > 0, got " + std::to_string(y));
      return std::pow(y, s);
    case KernelKind::custom: return fn_(y, s);
  }
  return 0.0;
}

double apply_scalar(const ScalarKernel& kernel, double y, double s) { return kernel(y, s); }

namespace {

void check_square_finite(const std::optional<Mat>& m, std::size_t k, const char* what) {
  if (!m) return;
  if (m->rows() != k || m->cols() != k)
    throw DomainError(std::string(what) + " must be " + std::to_string(k) + "x" +
                      std::to_string(k));
  for (double v : m->data())
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " has a non-finite entry");
}

}  // namespace

void TransformSpec::validate(std::size_t k) const {
  check_square_finite(t_y, k, "t_y");
  check_square_finite(t_s, k, "t_s");
}

Vec apply_vector(const TransformSpec& spec, std::span<const double> y, std::span<const double> s) {
  if (y.size() != s.size())
    throw DomainError("apply_vector: y has length " + std::to_string(y.size()) + ", s has " +
                      std::to_string(s.size()));
  spec.validate(y.size());
  Vec ty = spec.t_y ? (*spec.t_y) * y : Vec(y.begin(), y.end());
  Vec ts = spec.t_s ? (*spec.t_s) * s : Vec(s.begin(), s.end());
  Vec out(y.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = spec.kernel(ty[k], ts[k]);
  return out;
}

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError(std::string(what) + " has a non-finite entry");
}

}  // namespace

DistSpec DistSpec::normal(Vec mean, Mat cov) {
  if (mean.empty()) throw DomainError("normal: empty mean");
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw DomainError("normal: covariance must be K x K with K = mean length");
  check_finite(mean, "normal mean");
  check_finite(cov.data(), "normal covariance");
  scaled_rotation_factor(cov);  // rejects non-symmetric or indefinite covariances
  return DistSpec(NormalDist{std::move(mean), std::move(cov)});
}

DistSpec DistSpec::uniform(Vec lo, Vec hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw DomainError("uniform: lo and hi must be non-empty and equally long");
  check_finite(lo, "uniform lo");
  check_finite(hi, "uniform hi");
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (lo[k] > hi[k]) throw DomainError("uniform: lo > hi in component " + std::to_string(k));
  return DistSpec(UniformDist{std::move(lo), std::move(hi)});
}

DistSpec DistSpec::two_point(Vec a, Vec b, double p) {
  if (a.empty() || a.size() != b.size())
    throw DomainError("two_point: a and b must be non-empty and equally long");
  check_finite(a, "two_point a");
  check_finite(b, "two_point b");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("two_point: p must lie in (0, 1)");
  return DistSpec(TwoPointDist{std::move(a), std::move(b), p});
}

DistSpec DistSpec::normal1(double mean, double variance) {
  return normal({mean}, Mat{{variance}});
}
DistSpec DistSpec::uniform1(double lo, double hi) { return uniform({lo}, {hi}); }
DistSpec DistSpec::two_point1(double a, double b, double p) { return two_point({a}, {b}, p); }

std::size_t DistSpec::dim() const {
  return std::visit(
      [](const auto& d) -> std::size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NormalDist>) return d.mean.size();
        else if constexpr (std::is_same_v<T, UniformDist>) return d.lo.size();
        else return d.a.size();
      },
      v_);
}

Vec DistSpec::mean() const {
  return std::visit(
      [](const auto& d) -> Vec {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NormalDist>) {
          return d.mean;
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          Vec m(d.lo.size());
          for (std::size_t k = 0; k < m.size(); ++k) m[k] = 0.5 * (d.lo[k] + d.hi[k]);
          return m;
        } else {
          Vec m(d.a.size());
          for (std::size_t k = 0; k < m.size(); ++k) m[k] = d.p * d.a[k] + (1.0 - d.p) * d.b[k];
          return m;
        }
      },
      v_);
}

Mat DistSpec::covariance() const {
  return std::visit(
      [](const auto& d) -> Mat {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NormalDist>) {
          return d.cov;
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          Mat c(d.lo.size(), d.lo.size());
          for (std::size_t k = 0; k < d.lo.size(); ++k) {
            const double w = d.hi[k] - d.lo[k];
            c(k, k) = w * w / 12.0;
          }
          return c;
        } else {
          const std::size_t n = d.a.size();
          Mat c(n, n);
          const double pq = d.p * (1.0 - d.p);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c(i, j) = pq * (d.b[i] - d.a[i]) * (d.b[j] - d.a[j]);
          return c;
        }
      },
      v_);
}

Mat sample(const DistSpec& dist, std::size_t n, RngStream& stream) {
  if (n == 0) throw DomainError("sample: n must be at least 1");
  const std::size_t k = dist.dim();
  Mat out(n, k);
  if (const auto* d = dist.get_if<NormalDist>()) {
    const Mat factor = scaled_rotation_factor(d->cov);
    Vec z(k);
    for (std::size_t r = 0; r < n; ++r) {
      for (double& zi : z) zi = stream.normal();
      auto row = out.row(r);
      for (std::size_t i = 0; i < k; ++i) {
        double acc = d->mean[i];
        for (std::size_t j = 0; j < k; ++j) acc += factor(i, j) * z[j];
        row[i] = acc;
      }
    }
  } else if (const auto* d = dist.get_if<UniformDist>()) {
    for (std::size_t r = 0; r < n; ++r) {
      auto row = out.row(r);
      for (std::size_t i = 0; i < k; ++i) row[i] = d->lo[i] + (d->hi[i] - d->lo[i]) * stream.uniform();
    }
  } else if (const auto* d = dist.get_if<TwoPointDist>()) {
    for (std::size_t r = 0; r < n; ++r) {
      const Vec& pick = stream.uniform() < d->p ? d->a : d->b;
      std::copy(pick.begin(), pick.end(), out.row(r).begin());
    }
  }
  return out;
}

ScalarSampler::ScalarSampler(const DistSpec& dist) {
  if (dist.dim() != 1) throw DomainError("ScalarSampler: distribution must be scalar");
  if (const auto* d = dist.get_if<NormalDist>()) {
    kind_ = Kind::normal;
    p0_ = d->mean[0];
    p1_ = scaled_rotation_factor(d->cov)(0, 0);
  } else if (const auto* d = dist.get_if<UniformDist>()) {
    kind_ = Kind::uniform;
    p0_ = d->lo[0];
    p1_ = d->hi[0];
  } else {
    const auto* t = dist.get_if<TwoPointDist>();
    kind_ = Kind::two_point;
    p0_ = t->a[0];
    p1_ = t->b[0];
    p_ = t->p;
  }
}

double ScalarSampler::operator()(RngStream& stream) const noexcept {
  switch (kind_) {
    case Kind::normal: {
      double acc = p0_;
      acc += p1_ * stream.normal();
      return acc;
    }
    case Kind::uniform: return p0_ + (p1_ - p0_) * stream.uniform();
    case Kind::two_point: return stream.uniform() < p_ ? p0_ : p1_;
  }
  return 0.0;
}

MomentSet moments(const DistSpec& dist) {
  if (dist.dim() != 1) throw DomainError("moments: only scalar (K = 1) distributions");
  MomentSet m;
  if (const auto* d = dist.get_if<NormalDist>()) {
    const double var = d->cov(0, 0);
    m = {d->mean[0], var, 0.0, 3.0 * var * var};
  } else if (const auto* d = dist.get_if<UniformDist>()) {
    const double w = d->hi[0] - d->lo[0];
    m = {0.5 * (d->lo[0] + d->hi[0]), w * w / 12.0, 0.0, w * w * w * w / 80.0};
  } else if (const auto* d = dist.get_if<TwoPointDist>()) {
    const double p = d->p, q = 1.0 - p, h = d->b[0] - d->a[0];
    const double pq = p * q;
    m.mean = p * d->a[0] + q * d->b[0];
    m.variance = pq * h * h;
    m.third = pq * (p - q) * h * h * h;
    m.fourth = pq * (1.0 - 3.0 * pq) * h * h * h * h;
  }
  return m;
}

}  // namespace mcbias

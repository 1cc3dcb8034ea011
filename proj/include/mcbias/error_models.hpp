#pragma once

// Transformation kernels f(y, s), the Transform-stage map F, and the
// distributions of data vectors Y_j and systematic errors S_q.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "mcbias/linalg.hpp"
#include "mcbias/rng.hpp"

namespace mcbias {

enum class KernelKind { additive, multiplicative, phase, exponential, custom };

std::string_view to_string(KernelKind kind);
/// Parses "additive", "multiplicative", "phase" or "exponential".
KernelKind kernel_kind_from_string(std::string_view name);

/// Scalar kernel f(y, s):
///   additive       y + s
///   multiplicative y * s
///   phase          sin(y + s)
///   exponential    y^s, defined for y > 0
/// or a user-supplied pure function.
class ScalarKernel {
 public:
  using Function = std::function<double(double, double)>;

  static ScalarKernel additive() { return ScalarKernel(KernelKind::additive); }
  static ScalarKernel multiplicative() { return ScalarKernel(KernelKind::multiplicative); }
  static ScalarKernel phase() { return ScalarKernel(KernelKind::phase); }
  static ScalarKernel exponential() { return ScalarKernel(KernelKind::exponential); }
  static ScalarKernel of(KernelKind kind);
  /// `fn` must be pure and deterministic.
  static ScalarKernel custom(std::string name, Function fn);

  KernelKind kind() const noexcept { return kind_; }
  std::string name() const;

  double operator()(double y, double s) const;

 private:
  explicit ScalarKernel(KernelKind kind) : kind_(kind) {}

  KernelKind kind_;
  std::string custom_name_;
  Function fn_;
};

/// f(y, s) for the given kernel. Exponential with y <= 0 throws DomainError.
double apply_scalar(const ScalarKernel& kernel, double y, double s);

/// Kernel plus optional K x K pre-transforms applied to y and s before the
/// componentwise kernel. An absent matrix means identity.
struct TransformSpec {
  ScalarKernel kernel = ScalarKernel::additive();
  std::optional<Mat> t_y;
  std::optional<Mat> t_s;

  /// Checks that present matrices are K x K and finite.
  void validate(std::size_t k) const;
};

/// F(y, s) = (f((T_Y y)_k, (T_S s)_k))_k.
Vec apply_vector(const TransformSpec& spec, std::span<const double> y, std::span<const double> s);

struct NormalDist {
  Vec mean;
  Mat cov;
};

/// Independent components, component k uniform on [lo_k, hi_k].
struct UniformDist {
  Vec lo;
  Vec hi;
};

/// The whole vector equals `a` with probability p and `b` otherwise.
struct TwoPointDist {
  Vec a;
  Vec b;
  double p = 0.5;
};

/// Distribution of a data vector or a systematic-error vector.
class DistSpec {
 public:
  using Variant = std::variant<NormalDist, UniformDist, TwoPointDist>;

  /// Factories validate their arguments and throw DomainError.
  static DistSpec normal(Vec mean, Mat cov);
  static DistSpec uniform(Vec lo, Vec hi);
  static DistSpec two_point(Vec a, Vec b, double p);

  /// Scalar shorthands.
  static DistSpec normal1(double mean, double variance);
  static DistSpec uniform1(double lo, double hi);
  static DistSpec two_point1(double a, double b, double p);

  std::size_t dim() const;
  Vec mean() const;
  Mat covariance() const;

  const Variant& variant() const noexcept { return v_; }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

 private:
  explicit DistSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// n i.i.d. draws as an n x K matrix. Normal draws are
/// mean + scaled_rotation_factor(cov) z with z standard normal. Uniform
/// draws never land exactly on an endpoint of a non-degenerate interval,
/// so Unif[0, b] data is always a valid base for the exponential kernel.
Mat sample(const DistSpec& dist, std::size_t n, RngStream& stream);

/// Single scalar draws from a K = 1 distribution. Produces the same values,
/// draw for draw, as the rows of sample(dist, n, stream).
class ScalarSampler {
 public:
  explicit ScalarSampler(const DistSpec& dist);
  double operator()(RngStream& stream) const noexcept;

 private:
  enum class Kind { normal, uniform, two_point } kind_;
  double p0_ = 0.0;  // mean | lo | a
  double p1_ = 0.0;  // sd   | hi | b
  double p_ = 0.5;
};

/// Mean and central moments of a scalar distribution.
struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  double third = 0.0;   // third central moment
  double fourth = 0.0;  // fourth central moment
};

/// Exact moments of a K = 1 distribution. K > 1 throws DomainError.
MomentSet moments(const DistSpec& dist);

}  // namespace mcbias

#include "mcbias/pipeline.hpp"

#include <cmath>
#include <string>

#include "mcbias/error.hpp"

namespace mcbias {

std::string_view to_string(Construction c) {
  return c == Construction::current ? "current" : "alternative";
}

Construction construction_from_string(std::string_view name) {
  if (name == "current") return Construction::current;
  if (name == "alternative") return Construction::alternative;
  throw ConfigError("unknown construction '" + std::string(name) +
                    "' (expected current or alternative)");
}

namespace {

// Rows of m mapped through t (identity when absent).
Mat pre_transform(const Mat& m, const std::optional<Mat>& t) {
  if (!t) return m;
  Mat out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const Vec v = (*t) * m.row(r);
    std::copy(v.begin(), v.end(), out.row(r).begin());
  }
  return out;
}

void check_finite(const Mat& m, const char* what) {
  for (double v : m.data())
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " has a non-finite entry");
}

}  // namespace

TransformOutput transform_stage(const DataBatch& data, const ErrorBatch& errors,
                                const TransformSpec& spec, std::span<const double> nu) {
  const std::size_t jn = data.rows.rows();
  const std::size_t k = data.rows.cols();
  if (jn == 0 || k == 0) throw DomainError("transform_stage: empty data batch");
  if (errors.rows.cols() != k)
    throw DomainError("transform_stage: errors have length " +
                      std::to_string(errors.rows.cols()) + ", data have " + std::to_string(k));
  if (nu.size() != k) throw DomainError("transform_stage: nu length differs from K");
  if (errors.rows.rows() == 0) throw DomainError("transform_stage: no error draws");
  std::size_t qn = errors.rows.rows();
  if (!errors.shared) {
    if (qn % jn != 0)
      throw DomainError("transform_stage: unshared errors need J*Q rows, got " +
                        std::to_string(qn) + " for J=" + std::to_string(jn));
    qn /= jn;
  }
  check_finite(data.rows, "data");
  check_finite(errors.rows, "errors");
  spec.validate(k);

  const Mat ty = pre_transform(data.rows, spec.t_y);
  const Mat ts = pre_transform(errors.rows, spec.t_s);
  const Vec tnu = spec.t_s ? (*spec.t_s) * nu : Vec(nu.begin(), nu.end());
  const ScalarKernel& f = spec.kernel;

  TransformOutput out;
  out.j = jn;
  out.q = qn;
  out.k = k;
  out.nominals = Mat(jn, k);
  out.replicates.resize(jn * qn * k);
  for (std::size_t j = 0; j < jn; ++j) {
    auto y = ty.row(j);
    for (std::size_t c = 0; c < k; ++c) out.nominals(j, c) = f(y[c], tnu[c]);
    const std::size_t block = errors.shared ? 0 : j * qn;
    for (std::size_t q = 0; q < qn; ++q) {
      auto s = ts.row(block + q);
      double* dst = out.replicates.data() + (j * qn + q) * k;
      for (std::size_t c = 0; c < k; ++c) dst[c] = f(y[c], s[c]);
    }
  }
  for (double v : out.nominals.data())
    if (!std::isfinite(v)) throw NumericalError("transform_stage: kernel produced a non-finite nominal");
  for (double v : out.replicates)
    if (!std::isfinite(v)) throw NumericalError("transform_stage: kernel produced a non-finite replicate");
  return out;
}

Vec combine_nominal(const TransformOutput& t) { return sample_mean(t.nominals); }

Mat replicate_means_over_data(const TransformOutput& t) {
  Mat out(t.q, t.k);
  for (std::size_t j = 0; j < t.j; ++j)
    for (std::size_t q = 0; q < t.q; ++q) {
      auto m = t.replicate(j, q);
      for (std::size_t c = 0; c < t.k; ++c) out(q, c) += m[c];
    }
  const double n = static_cast<double>(t.j);
  for (double& v : out.data()) v /= n;
  return out;
}

Mat replicate_means_over_errors(const TransformOutput& t) {
  Mat out(t.j, t.k);
  for (std::size_t j = 0; j < t.j; ++j)
    for (std::size_t q = 0; q < t.q; ++q) {
      auto m = t.replicate(j, q);
      for (std::size_t c = 0; c < t.k; ++c) out(j, c) += m[c];
    }
  const double n = static_cast<double>(t.q);
  for (double& v : out.data()) v /= n;
  return out;
}

namespace {

CombineOutput synthesize(const TransformOutput& t, Construction c, Mat input_cov,
                         RngStream& z_stream) {
  CombineOutput out;
  out.construction = c;
  out.nominal = combine_nominal(t);
  for (double v : input_cov.data())
    if (!std::isfinite(v)) throw NumericalError("combine: input covariance overflowed");
  const Mat factor = scaled_rotation_factor(input_cov);
  out.input_cov = std::move(input_cov);
  out.replicates = replicate_means_over_data(t);
  const double scale = 1.0 / std::sqrt(static_cast<double>(t.j));
  Vec z(t.k);
  for (std::size_t q = 0; q < t.q; ++q) {
    for (double& zi : z) zi = z_stream.normal();
    auto row = out.replicates.row(q);
    for (std::size_t i = 0; i < t.k; ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < t.k; ++m) acc += factor(i, m) * z[m];
      row[i] += scale * acc;
    }
  }
  return out;
}

void require_combinable(const TransformOutput& t, std::size_t min_q, const char* who) {
  if (t.j < 2) throw DomainError(std::string(who) + ": needs J > 1");
  if (t.q < min_q)
    throw DomainError(std::string(who) + ": needs Q >= " + std::to_string(min_q));
}

}  // namespace

CombineOutput combine_current(const TransformOutput& t, RngStream& z_stream) {
  require_combinable(t, 1, "combine_current");
  return synthesize(t, Construction::current, sample_covariance(t.nominals), z_stream);
}

CombineOutput combine_alternative(const TransformOutput& t, RngStream& z_stream) {
  require_combinable(t, 2, "combine_alternative");
  return synthesize(t, Construction::alternative,
                    sample_covariance(replicate_means_over_errors(t)), z_stream);
}

CombineOutput combine(const TransformOutput& t, Construction c, RngStream& z_stream) {
  return c == Construction::current ? combine_current(t, z_stream)
                                    : combine_alternative(t, z_stream);
}

}  // namespace mcbias

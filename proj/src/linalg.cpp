#include "mcbias/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcbias/error.hpp"

namespace mcbias {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("Mat: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_rows(std::span<const Vec> rows) {
  if (rows.empty()) return {};
  Mat m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DomainError("Mat::from_rows: rows differ in length");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vec Mat::row_vec(std::size_t r) const {
  auto s = row(r);
  return {s.begin(), s.end()};
}

Vec Mat::col_vec(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw DomainError("Mat product: inner dimensions differ");
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Vec operator*(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DomainError("Mat-vector product: dimensions differ");
  Vec out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * x[k];
    out[i] = acc;
  }
  return out;
}

Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DomainError("Mat difference: shapes differ");
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

double max_abs(const Mat& m) {
  double mx = 0.0;
  for (double v : m.data()) mx = std::max(mx, std::abs(v));
  return mx;
}

double frobenius_norm(const Mat& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double inf_norm(const Mat& m) {
  double mx = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (double v : m.row(r)) s += std::abs(v);
    mx = std::max(mx, s);
  }
  return mx;
}

Vec sample_mean(const Mat& rows) {
  if (rows.rows() == 0) throw DomainError("sample_mean: no rows");
  Vec mean(rows.cols(), 0.0);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto x = rows.row(r);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += x[k];
  }
  const double n = static_cast<double>(rows.rows());
  for (double& m : mean) m /= n;
  return mean;
}

Mat cross_covariance(const Mat& rows_a, const Mat& rows_b) {
  if (rows_a.rows() != rows_b.rows())
    throw DomainError("cross_covariance: row counts differ (" + std::to_string(rows_a.rows()) +
                      " vs " + std::to_string(rows_b.rows()) + ")");
  if (rows_a.rows() < 2) throw DomainError("cross_covariance: need at least two rows");
  const Vec ma = sample_mean(rows_a);
  const Vec mb = sample_mean(rows_b);
  const std::size_t ka = rows_a.cols(), kb = rows_b.cols();
  Mat cov(ka, kb);
  Vec da(ka), db(kb);
  for (std::size_t r = 0; r < rows_a.rows(); ++r) {
    for (std::size_t i = 0; i < ka; ++i) da[i] = rows_a(r, i) - ma[i];
    for (std::size_t j = 0; j < kb; ++j) db[j] = rows_b(r, j) - mb[j];
    for (std::size_t i = 0; i < ka; ++i)
      for (std::size_t j = 0; j < kb; ++j) cov(i, j) += da[i] * db[j];
  }
  const double denom = static_cast<double>(rows_a.rows() - 1);
  for (double& v : cov.data()) v /= denom;
  return cov;
}

Mat sample_covariance(const Mat& rows) {
  if (rows.rows() < 2) throw DomainError("sample_covariance: need at least two rows");
  const Vec mean = sample_mean(rows);
  const std::size_t k = rows.cols();
  Mat cov(k, k);
  Vec d(k);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t i = 0; i < k; ++i) d[i] = rows(r, i) - mean[i];
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) cov(i, j) += d[i] * d[j];
  }
  const double denom = static_cast<double>(rows.rows() - 1);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      cov(i, j) /= denom;
      cov(j, i) = cov(i, j);
    }
  return cov;
}

namespace {

double off_diagonal_norm(const Mat& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-14;
constexpr double kSymmetryTol = 1e-10;

}  // namespace

EigenPair sym_eigendecompose(const Mat& m) {
  if (!m.square() || m.rows() == 0)
    throw DomainError("sym_eigendecompose: matrix must be square and non-empty");
  const std::size_t n = m.rows();
  const double scale = max_abs(m);
  for (double v : m.data())
    if (!std::isfinite(v)) throw DomainError("sym_eigendecompose: non-finite entry");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > kSymmetryTol * scale)
        throw DomainError("sym_eigendecompose: matrix is not symmetric");

  // Work on the exactly symmetrized input.
  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Mat v = Mat::identity(n);

  const double target = kOffDiagonalTol * frobenius_norm(a);
  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (++sweep > kMaxSweeps)
      throw NumericalError("sym_eigendecompose: Jacobi did not converge in 100 sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(p, p), aqq = a(q, q);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenPair out{Mat(n, n), Vec(n)};
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.d[col] = a(src, src);
    std::size_t big = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, src)) > std::abs(v(big, src))) big = k;
    const double sign = v(big, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.u(k, col) = sign * v(k, src);
  }
  return out;
}

Mat scaled_rotation_factor(const Mat& cov) {
  EigenPair eig = sym_eigendecompose(cov);
  double dmax = 0.0;
  for (double d : eig.d) dmax = std::max(dmax, std::abs(d));
  const double floor = -1e-10 * dmax;
  Mat factor = std::move(eig.u);
  for (std::size_t col = 0; col < eig.d.size(); ++col) {
    double d = eig.d[col];
    if (d < floor)
      throw DomainError("scaled_rotation_factor: covariance has a negative eigenvalue " +
                        std::to_string(d));
    const double root = std::sqrt(std::max(d, 0.0));
    for (std::size_t k = 0; k < factor.rows(); ++k) factor(k, col) *= root;
  }
  return factor;
}

}  // namespace mcbias

#pragma once

// Dense vector/matrix kernels and sampling statistics.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mcbias {

using Vec = std::vector<double>;

/// Row-major dense matrix. A batch of n observations of length K is stored
/// as an n x K Mat, one observation per row.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat from_rows(std::span<const Vec> rows);
  static Mat diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  Vec row_vec(std::size_t r) const;
  Vec col_vec(std::size_t c) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Mat transposed() const;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, std::span<const double> x);
Mat operator-(const Mat& a, const Mat& b);

double max_abs(const Mat& m);
double frobenius_norm(const Mat& m);
/// Max absolute row sum.
double inf_norm(const Mat& m);

/// Eigendecomposition of a symmetric matrix: m = u * diag(d) * u^T with
/// eigenvalues in descending order.
struct EigenPair {
  Mat u;
  Vec d;
};

/// Componentwise mean of the rows.
Vec sample_mean(const Mat& rows);

/// Unbiased (1/(n-1)) sample covariance of the rows. The result is exactly
/// symmetric. Throws DomainError for fewer than two rows.
Mat sample_covariance(const Mat& rows);

/// (1/(n-1)) sum (a_i - a_bar)(b_i - b_bar)^T over paired rows.
Mat cross_covariance(const Mat& rows_a, const Mat& rows_b);

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps until the off-diagonal Frobenius norm drops to 1e-14 of the
/// input's, with at most 100 sweeps (NumericalError otherwise). Eigenvalues
/// are sorted descending; each eigenvector is signed so its
/// largest-magnitude component is positive. Inputs that are not symmetric
/// to 1e-10 relative are rejected with DomainError.
EigenPair sym_eigendecompose(const Mat& m);

/// U * diag(sqrt(d)) for the eigendecomposition of a covariance, so that
/// factor * factor^T reproduces the positive semidefinite part of cov.
/// Eigenvalues in [-1e-10 max|d|, 0) are clamped to zero; anything more
/// negative throws DomainError.
Mat scaled_rotation_factor(const Mat& cov);

}  // namespace mcbias

#pragma once

// Dense real matrices in row-major layout and the handful of kernels the
// walk simulations need: products, Gram matrices, symmetric
// eigendecomposition, PSD square roots and Frobenius geometry.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "radwalk/errors.hpp"

namespace radwalk {

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat ones(std::size_t rows, std::size_t cols);
  static Mat identity(std::size_t n);
  static Mat diag(std::span<const double> d);
  static Mat column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Mat transpose() const;
  double frobenius_norm() const noexcept;
  bool all_finite() const noexcept;

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double s) noexcept;

  friend bool operator==(const Mat& a, const Mat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);

/// Symmetric square matrix. Construction from a Mat stores (M + M')/2, so
/// the mirrored entries are bit-identical.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(const Mat& m);
  explicit SymMat(std::size_t dim);

  static SymMat identity(std::size_t n) { return SymMat(Mat::identity(n)); }
  static SymMat diag(std::span<const double> d) { return SymMat(Mat::diag(d)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  /// Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) noexcept {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Mat& mat() const noexcept { return m_; }
  operator const Mat&() const noexcept { return m_; }

  friend bool operator==(const SymMat& a, const SymMat& b) = default;

 private:
  Mat m_;
};

SymMat operator+(const SymMat& a, const SymMat& b);
SymMat operator-(const SymMat& a, const SymMat& b);
SymMat operator*(double s, const SymMat& a);

/// x'x.
SymMat gram(const Mat& x);

/// a'b for matrices with the same number of rows.
Mat cross_gram(const Mat& a, const Mat& b);

double frobenius_inner(const Mat& x, const Mat& y);

struct SymEig {
  std::vector<double> values;  // descending
  Mat vectors;                 // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition.
SymEig sym_eig(const SymMat& s);

inline constexpr double kDefaultPsdTol = 1e-10;

/// Unique PSD square root. Eigenvalues in [-tol*|s|_F, 0) are clamped to
/// zero; anything more negative raises NotPSD.
SymMat psd_sqrt(const SymMat& s, double tol = kDefaultPsdTol);

/// Lower-triangular L with L L' = s, or nullopt when s is not numerically
/// positive definite.
std::optional<Mat> cholesky(const SymMat& s);

/// True when the smallest eigenvalue is >= -tol * max(1, |s|_F).
bool is_psd(const SymMat& s, double tol = kDefaultPsdTol);

/// Reconstructs V diag(f(lambda)) V'.
template <class F>
SymMat spectral_map(const SymEig& eig, F&& f) {
  const std::size_t n = eig.values.size();
  Mat out(n, n);
  std::vector<double> fl(n);
  for (std::size_t k = 0; k < n; ++k) fl[k] = f(eig.values[k]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += eig.vectors(i, k) * fl[k] * eig.vectors(j, k);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return SymMat(out);
}

}  // namespace radwalk

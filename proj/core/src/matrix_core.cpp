#include "radwalk/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace radwalk {

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw ShapeMismatch("Mat: " + std::to_string(data_.size()) + " entries for a " +
                        std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  }
}

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
    : Mat(rows, cols, std::vector<double>(entries)) {}

Mat Mat::ones(std::size_t rows, std::size_t cols) {
  return Mat(rows, cols, std::vector<double>(rows * cols, 1.0));
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::column(std::span<const double> v) {
  return Mat(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat::frobenius_norm() const noexcept {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

bool Mat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Mat& Mat::operator+=(const Mat& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw ShapeMismatch("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                        std::to_string(b.rows()));
  }
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

SymMat::SymMat(const Mat& m) : m_(m) {
  if (m.rows() != m.cols()) {
    throw ShapeMismatch("SymMat: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMat::SymMat(std::size_t dim) : m_(dim, dim) {}

SymMat operator+(const SymMat& a, const SymMat& b) { return SymMat(a.mat() + b.mat()); }
SymMat operator-(const SymMat& a, const SymMat& b) { return SymMat(a.mat() - b.mat()); }
SymMat operator*(double s, const SymMat& a) { return SymMat(s * a.mat()); }

SymMat gram(const Mat& x) {
  const std::size_t q = x.cols();
  Mat g(q, q);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t k = 0; k < q; ++k) {
      const double rk = r[k];
      for (std::size_t l = k; l < q; ++l) g(k, l) += rk * r[l];
    }
  }
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t l = 0; l < k; ++l) g(k, l) = g(l, k);
  return SymMat(g);
}

Mat cross_gram(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) {
    throw ShapeMismatch("cross_gram: row counts " + std::to_string(a.rows()) + " and " +
                        std::to_string(b.rows()));
  }
  Mat g(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ra = a.row(i);
    auto rb = b.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t l = 0; l < b.cols(); ++l) g(k, l) += ra[k] * rb[l];
  }
  return g;
}

double frobenius_inner(const Mat& x, const Mat& y) {
  require_same_shape(x, y, "frobenius_inner");
  auto a = x.data();
  auto b = y.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

SymEig sym_eig(const SymMat& s) {
  const std::size_t n = s.dim();
  Mat a = s.mat();
  Mat v = Mat::identity(n);

  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  constexpr int kMaxSweeps = 100;
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) > 1e-12 * scale) {
      throw NoConvergence("sym_eig: Jacobi sweeps did not converge for dimension " +
                          std::to_string(n));
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymEig out{std::vector<double>(n), Mat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

SymMat psd_sqrt(const SymMat& s, double tol) {
  const std::size_t n = s.dim();
  if (n == 1) {
    const double v = s(0, 0);
    const double floor = -tol * std::abs(v);
    if (v < floor) throw NotPSD("psd_sqrt: eigenvalue " + std::to_string(v) + " is negative");
    return SymMat(Mat(1, 1, {v > 0.0 ? std::sqrt(v) : 0.0}));
  }
  const SymEig eig = sym_eig(s);
  const double floor = -tol * s.mat().frobenius_norm();
  if (!eig.values.empty() && eig.values.back() < floor) {
    throw NotPSD("psd_sqrt: smallest eigenvalue " + std::to_string(eig.values.back()) +
                 " below tolerance " + std::to_string(floor));
  }
  return spectral_map(eig, [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

std::optional<Mat> cholesky(const SymMat& s) {
  const std::size_t n = s.dim();
  Mat l(n, n);
  const double floor = 1e-14 * std::max(1.0, s.mat().frobenius_norm());
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > floor)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

bool is_psd(const SymMat& s, double tol) {
  if (s.dim() == 0) return true;
  const SymEig eig = sym_eig(s);
  return eig.values.back() >= -tol * std::max(1.0, s.mat().frobenius_norm());
}

}  // namespace radwalk

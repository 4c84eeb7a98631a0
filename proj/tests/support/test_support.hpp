#pragma once

// Random inputs and brute-force oracles shared by the unit tests. Nothing in
// here calls into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "radwalk/matrix_core.hpp"

namespace radwalk::testing {

inline Mat random_mat(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> nd;
  Mat m(rows, cols);
  for (double& v : m.data()) v = nd(gen);
  return m;
}

inline Mat random_int_mat(std::mt19937_64& gen, std::size_t rows, std::size_t cols, int lo = -4, int hi = 4) {
  std::uniform_int_distribution<int> ud(lo, hi);
  Mat m(rows, cols);
  for (double& v : m.data()) v = ud(gen);
  return m;
}

/// Householder reflector I - 2 v v' / v'v for a random v.
inline Mat householder(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  double vv = 0.0;
  for (double& x : v) {
    x = nd(gen);
    vv += x * x;
  }
  Mat h = Mat::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) -= 2.0 * v[i] * v[j] / vv;
  return h;
}

/// Product of a few reflectors: a generic orthogonal matrix.
inline Mat random_orthogonal(std::mt19937_64& gen, std::size_t n) {
  Mat q = Mat::identity(n);
  for (int i = 0; i < 3; ++i) q = householder(gen, n) * q;
  return q;
}

/// Q diag(d) Q' with nonnegative d.
inline SymMat random_psd(std::mt19937_64& gen, std::size_t n, double lo = 0.0, double hi = 3.0) {
  std::uniform_real_distribution<double> ud(lo, hi);
  std::vector<double> d(n);
  for (double& x : d) x = ud(gen);
  const Mat q = random_orthogonal(gen, n);
  return SymMat(q * Mat::diag(d) * q.transpose());
}

/// Entry formula of the Kronecker product, independent of radwalk::kron.
inline Mat naive_kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) = a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
  return out;
}

inline Mat naive_kron_all(const std::vector<Mat>& fs) {
  Mat out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = naive_kron(out, fs[i]);
  return out;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double rel_frob(const Mat& a, const Mat& b) {
  const double nb = b.frobenius_norm();
  return (a - b).frobenius_norm() / (nb > 0.0 ? nb : 1.0);
}

}  // namespace radwalk::testing

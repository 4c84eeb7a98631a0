#pragma once

// Matrix-variate normal laws N(mu, Sigma) on q x q matrices.
//
// Covariance indexing: entry (i,j) of Z maps to position i*q + j, and
//   cov(i*q + j, l*q + k) = Cov(Z_ij, Z_lk) = E(Z (x) Z)_{(i,j),(l,k)}  (mu = 0).
// Moment tensors use the layout of Z^{(x)k}: row index is the base-q number
// (i_1 ... i_k), column index is (j_1 ... j_k).

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "radwalk/matrix_core.hpp"
#include "radwalk/random_stream.hpp"

namespace radwalk {

using EntryIndex = std::pair<std::size_t, std::size_t>;
/// I = ((i_1,j_1), ..., (i_k,j_k)), 0-based.
using MomentIndex = std::vector<EntryIndex>;

class MatrixNormalSpec {
 public:
  /// Throws ShapeMismatch on inconsistent sizes and NotPSD when cov has an
  /// eigenvalue below -tol * max(1, |cov|_F).
  MatrixNormalSpec(std::size_t q, Mat mean, SymMat cov, double tol = kDefaultPsdTol);

  static MatrixNormalSpec centered(std::size_t q, SymMat cov) {
    return MatrixNormalSpec(q, Mat(q, q), std::move(cov));
  }

  std::size_t q() const noexcept { return q_; }
  const Mat& mean() const noexcept { return mean_; }
  const SymMat& cov() const noexcept { return cov_; }
  bool centered() const noexcept;

  double cov_at(EntryIndex a, EntryIndex b) const noexcept {
    return cov_(a.first * q_ + a.second, b.first * q_ + b.second);
  }

 private:
  std::size_t q_;
  Mat mean_;
  SymMat cov_;
};

/// Holds the covariance factor so repeated draws skip the factorization.
/// Cholesky first; eigendecomposition with clamping for singular cov.
class MatrixNormalSampler {
 public:
  explicit MatrixNormalSampler(MatrixNormalSpec spec);

  Mat operator()(RandomStream& rng) const;
  const MatrixNormalSpec& spec() const noexcept { return spec_; }
  const Mat& factor() const noexcept { return factor_; }

 private:
  MatrixNormalSpec spec_;
  Mat factor_;  // factor * factor' = cov
};

Mat sample_matrix_normal(const MatrixNormalSpec& spec, RandomStream& rng);

/// Pair-partition (Wick) moment E prod_m Z_{i_m j_m} of N(0, Sigma). Zero for
/// odd orders; for k = 2u it is (1/u!) sum over pi in S((2,...,2)) of
/// prod_i Sigma_{pi(I)_i}. Throws InvalidArgument if the mean is non-zero.
double wick_moment(const MatrixNormalSpec& spec, const MomentIndex& index);

/// k-th moment M_k = E(Z^{(x)k}). Dense storage when q^k <= kMaxDenseAxis,
/// otherwise entries are evaluated on demand through the accessor.
class MomentTensor {
 public:
  static constexpr std::size_t kMaxDenseAxis = 4096;

  MomentTensor(std::size_t q, unsigned k, Mat dense);
  MomentTensor(MatrixNormalSpec spec, unsigned k);

  std::size_t q() const noexcept { return q_; }
  unsigned order() const noexcept { return k_; }
  bool is_dense() const noexcept { return dense_.has_value(); }
  /// Throws InvalidArgument in accessor-only mode.
  const Mat& dense() const;

  double at(const MomentIndex& index) const;

  /// Row/column position of an index in the dense layout.
  std::pair<std::size_t, std::size_t> position(const MomentIndex& index) const;
  MomentIndex index_of(std::size_t row, std::size_t col) const;

 private:
  std::size_t q_;
  unsigned k_;
  std::optional<Mat> dense_;
  std::optional<MatrixNormalSpec> spec_;
};

/// Throws Overflow if dense is requested beyond kMaxDenseAxis.
MomentTensor moment_tensor(const MatrixNormalSpec& spec, unsigned k, bool dense = true);

/// E((Z_1 + Z_2)^{(x)k}) for independent centered Z_1, Z_2 through the
/// Hadamard split sum over l and pi in S((l, k-l)) of
/// E pi(Z_1, 1) o E pi(1, Z_2).
MomentTensor sum_moment(const MatrixNormalSpec& spec1, const MatrixNormalSpec& spec2, unsigned k);

/// (k-1)!! for even k, 0 for odd k.
double double_factorial_moment(unsigned k);

}  // namespace radwalk

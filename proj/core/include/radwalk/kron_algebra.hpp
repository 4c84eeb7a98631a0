#pragma once

// Kronecker and Hadamard products, Kronecker powers, vec, and the
// permutation matrices that reorder the factors of a Kronecker product.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "radwalk/matrix_core.hpp"

namespace radwalk {

/// Upper bound on the number of entries any Kronecker-type result may have.
/// Defaults to 1'000'000. Process-wide; set once at start-up.
std::size_t kron_entry_cap() noexcept;
void set_kron_entry_cap(std::size_t cap) noexcept;

/// A x B, block matrix [a_ij B].
Mat kron(const Mat& a, const Mat& b);

/// Entrywise product.
Mat hadamard(const Mat& a, const Mat& b);

/// A^{(x)k} with A^{(x)1} = A and A^{(x)k} = A (x) A^{(x)(k-1)}.
Mat kron_power(const Mat& a, unsigned k);

/// Row-stacking vec: row i of x occupies positions [i*cols, (i+1)*cols).
Mat vec(const Mat& x);

/// Inverse of vec for a given shape.
Mat unvec(std::span<const double> v, std::size_t rows, std::size_t cols);

/// Permutation matrix stored as an index map: row i carries its single 1 in
/// column image()[i].
class PermMat {
 public:
  PermMat() = default;
  explicit PermMat(std::vector<std::size_t> image);

  static PermMat identity(std::size_t n);

  std::size_t size() const noexcept { return image_.size(); }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  /// P * m.
  Mat apply_left(const Mat& m) const;
  /// m * P.
  Mat apply_right(const Mat& m) const;
  /// Matrix product this * other.
  PermMat compose(const PermMat& other) const;
  PermMat transpose() const;
  Mat to_dense() const;

  friend bool operator==(const PermMat&, const PermMat&) = default;

 private:
  std::vector<std::size_t> image_;
};

/// I_left (x) P (x) I_right for a permutation P.
PermMat embed(const PermMat& p, std::size_t left, std::size_t right);

/// Returns (P, Q) with B (x) A = P (A (x) B) Q for A of shape a_shape and B
/// of shape b_shape.
std::pair<PermMat, PermMat> commutation_perm(std::pair<std::size_t, std::size_t> a_shape,
                                             std::pair<std::size_t, std::size_t> b_shape);

/// Factor-reordering permutations: for matrices A_i with the given shapes and
/// a 1-based permutation sigma of {1..k},
///   A_sigma(1) (x) ... (x) A_sigma(k) = P (A_1 (x) ... (x) A_k) Q.
/// Built by composing adjacent transpositions.
std::pair<PermMat, PermMat> reorder_perm(std::span<const std::pair<std::size_t, std::size_t>> shapes,
                                         std::span<const std::size_t> sigma);

/// Kronecker product of a sequence of matrices, left to right.
Mat kron_all(std::span<const Mat> factors);

namespace detail {
/// Test hook: when non-zero, kron() adds this value to entry (0,0) of its
/// result. Used by the self-test canary only.
void set_kron_fault(double delta) noexcept;
double kron_fault() noexcept;
}  // namespace detail

}  // namespace radwalk

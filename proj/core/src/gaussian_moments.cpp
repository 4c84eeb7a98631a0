#include "radwalk/gaussian_moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radwalk/combinatorics.hpp"
#include "radwalk/kron_algebra.hpp"

namespace radwalk {

namespace {

std::size_t ipow(std::size_t base, unsigned e) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

double factorial(unsigned n) {
  double r = 1.0;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Every pi in S((2,...,2)) of order k as block position pairs.
const std::vector<PairPartitionAssignment>& word_pairings(unsigned k) {
  static thread_local std::vector<std::vector<PairPartitionAssignment>> cache;
  if (cache.size() <= k) cache.resize(k + 1);
  auto& slot = cache[k];
  if (slot.empty() && k % 2 == 0 && k > 0) {
    for (const MultisetPermutation& pi : multiset_perms(Composition{std::vector<unsigned>(k / 2, 2)}))
      slot.push_back(pair_blocks(pi));
  }
  return slot;
}

double wick_sum(const MatrixNormalSpec& spec, const MomentIndex& index) {
  const auto k = static_cast<unsigned>(index.size());
  if (k == 0) return 1.0;
  if (k % 2 != 0) return 0.0;
  double total = 0.0;
  for (const auto& blocks : word_pairings(k)) {
    double term = 1.0;
    for (const auto& [a, b] : blocks) {
      term *= spec.cov_at(index[a], index[b]);
      if (term == 0.0) break;
    }
    total += term;
  }
  return total / factorial(k / 2);
}

void require_centered(const MatrixNormalSpec& spec, const char* what) {
  if (!spec.centered()) throw InvalidArgument(std::string(what) + ": mean must be zero");
}

}  // namespace

MatrixNormalSpec::MatrixNormalSpec(std::size_t q, Mat mean, SymMat cov, double tol)
    : q_(q), mean_(std::move(mean)), cov_(std::move(cov)) {
  if (q_ == 0) throw ShapeMismatch("MatrixNormalSpec: q must be positive");
  if (mean_.rows() != q_ || mean_.cols() != q_) throw ShapeMismatch("MatrixNormalSpec: mean must be q x q");
  if (cov_.dim() != q_ * q_) throw ShapeMismatch("MatrixNormalSpec: cov must be q^2 x q^2");
  if (!cov_.mat().all_finite() || !mean_.all_finite())
    throw InvalidArgument("MatrixNormalSpec: non-finite parameters");
  if (!is_psd(cov_, tol)) throw NotPSD("MatrixNormalSpec: covariance is not positive semidefinite");
}

bool MatrixNormalSpec::centered() const noexcept {
  return std::ranges::all_of(mean_.data(), [](double v) { return v == 0.0; });
}

MatrixNormalSampler::MatrixNormalSampler(MatrixNormalSpec spec) : spec_(std::move(spec)) {
  if (auto l = cholesky(spec_.cov())) {
    factor_ = std::move(*l);
  } else {
    factor_ = psd_sqrt(spec_.cov()).mat();
  }
}

Mat MatrixNormalSampler::operator()(RandomStream& rng) const {
  const std::size_t d = factor_.rows();
  std::vector<double> g(d);
  for (double& v : g) v = rng.normal();
  std::vector<double> z(spec_.mean().data().begin(), spec_.mean().data().end());
  for (std::size_t i = 0; i < d; ++i) {
    auto row = factor_.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * g[j];
    z[i] += acc;
  }
  return unvec(z, spec_.q(), spec_.q());
}

Mat sample_matrix_normal(const MatrixNormalSpec& spec, RandomStream& rng) {
  return MatrixNormalSampler(spec)(rng);
}

double wick_moment(const MatrixNormalSpec& spec, const MomentIndex& index) {
  require_centered(spec, "wick_moment");
  for (const auto& [i, j] : index) {
    if (i >= spec.q() || j >= spec.q()) throw InvalidArgument("wick_moment: index outside q x q");
  }
  return wick_sum(spec, index);
}

MomentTensor::MomentTensor(std::size_t q, unsigned k, Mat dense) : q_(q), k_(k), dense_(std::move(dense)) {
  const std::size_t axis = ipow(q_, k_);
  if (dense_->rows() != axis || dense_->cols() != axis)
    throw ShapeMismatch("MomentTensor: dense storage must be q^k x q^k");
}

MomentTensor::MomentTensor(MatrixNormalSpec spec, unsigned k) : q_(spec.q()), k_(k), spec_(std::move(spec)) {}

const Mat& MomentTensor::dense() const {
  if (!dense_) throw InvalidArgument("MomentTensor: accessor-only mode has no dense storage");
  return *dense_;
}

std::pair<std::size_t, std::size_t> MomentTensor::position(const MomentIndex& index) const {
  if (index.size() != k_) throw BadArity("MomentTensor: index length differs from order");
  std::size_t r = 0, c = 0;
  for (const auto& [i, j] : index) {
    r = r * q_ + i;
    c = c * q_ + j;
  }
  return {r, c};
}

MomentIndex MomentTensor::index_of(std::size_t row, std::size_t col) const {
  MomentIndex idx(k_);
  for (unsigned m = k_; m-- > 0;) {
    idx[m] = {row % q_, col % q_};
    row /= q_;
    col /= q_;
  }
  return idx;
}

double MomentTensor::at(const MomentIndex& index) const {
  if (dense_) {
    const auto [r, c] = position(index);
    return (*dense_)(r, c);
  }
  if (index.size() != k_) throw BadArity("MomentTensor: index length differs from order");
  return wick_moment(*spec_, index);
}

MomentTensor moment_tensor(const MatrixNormalSpec& spec, unsigned k, bool dense) {
  require_centered(spec, "moment_tensor");
  if (!dense) return MomentTensor(spec, k);
  const std::size_t axis = ipow(spec.q(), k);
  if (axis > MomentTensor::kMaxDenseAxis)
    throw Overflow("moment_tensor: q^k = " + std::to_string(axis) + " exceeds dense cap");
  MomentTensor shape(spec.q(), k, Mat(axis, axis));
  Mat m(axis, axis);
  if (k % 2 == 0) {
    for (std::size_t r = 0; r < axis; ++r)
      for (std::size_t c = 0; c < axis; ++c) m(r, c) = wick_sum(spec, shape.index_of(r, c));
  }
  return MomentTensor(spec.q(), k, std::move(m));
}

MomentTensor sum_moment(const MatrixNormalSpec& spec1, const MatrixNormalSpec& spec2, unsigned k) {
  require_centered(spec1, "sum_moment");
  require_centered(spec2, "sum_moment");
  if (spec1.q() != spec2.q()) throw ShapeMismatch("sum_moment: specs differ in q");
  const std::size_t q = spec1.q();
  const std::size_t axis = ipow(q, k);
  if (axis > MomentTensor::kMaxDenseAxis)
    throw Overflow("sum_moment: q^k = " + std::to_string(axis) + " exceeds dense cap");

  const MomentTensor layout(q, k, Mat(axis, axis));
  Mat total(axis, axis);
  MomentIndex sub1, sub2;
  for (unsigned l = 0; l <= k; ++l) {
    for (const MultisetPermutation& pi : multiset_perms(Composition{{l, k - l}})) {
      // E pi(Z_1, 1) and E pi(1, Z_2): moments of the factors at the
      // positions carrying the respective symbol.
      Mat e1(axis, axis), e2(axis, axis);
      for (std::size_t r = 0; r < axis; ++r) {
        for (std::size_t c = 0; c < axis; ++c) {
          const MomentIndex idx = layout.index_of(r, c);
          sub1.clear();
          sub2.clear();
          for (unsigned m = 0; m < k; ++m) (pi.word[m] == 1 ? sub1 : sub2).push_back(idx[m]);
          e1(r, c) = wick_sum(spec1, sub1);
          e2(r, c) = wick_sum(spec2, sub2);
        }
      }
      total += hadamard(e1, e2);
    }
  }
  return MomentTensor(q, k, std::move(total));
}

double double_factorial_moment(unsigned k) {
  if (k % 2 != 0) return 0.0;
  double r = 1.0;
  for (unsigned i = k; i > 1; i -= 2) r *= (i - 1);
  return r;
}

}  // namespace radwalk

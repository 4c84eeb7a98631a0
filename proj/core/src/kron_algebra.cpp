#include "radwalk/kron_algebra.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <string>

namespace radwalk {

namespace {

std::atomic<std::size_t> g_entry_cap{1'000'000};
std::atomic<double> g_kron_fault{0.0};

std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw Overflow(std::string(what) + ": dimension product overflows");
  }
  return a * b;
}

void check_cap(std::size_t rows, std::size_t cols, const char* what) {
  const std::size_t n = checked_mul(rows, cols, what);
  if (n > kron_entry_cap()) {
    throw Overflow(std::string(what) + ": result " + std::to_string(rows) + "x" +
                   std::to_string(cols) + " exceeds entry cap " + std::to_string(kron_entry_cap()));
  }
}

}  // namespace

std::size_t kron_entry_cap() noexcept { return g_entry_cap.load(std::memory_order_relaxed); }
void set_kron_entry_cap(std::size_t cap) noexcept { g_entry_cap.store(cap, std::memory_order_relaxed); }

namespace detail {
void set_kron_fault(double delta) noexcept { g_kron_fault.store(delta, std::memory_order_relaxed); }
double kron_fault() noexcept { return g_kron_fault.load(std::memory_order_relaxed); }
}  // namespace detail

Mat kron(const Mat& a, const Mat& b) {
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "kron");
  const std::size_t cols = checked_mul(a.cols(), b.cols(), "kron");
  check_cap(rows, cols, "kron");
  Mat out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k) {
        auto brow = b.row(k);
        double* dst = &out(i * b.rows() + k, j * b.cols());
        for (std::size_t l = 0; l < b.cols(); ++l) dst[l] = aij * brow[l];
      }
    }
  }
  if (const double f = detail::kron_fault(); f != 0.0 && !out.empty()) out(0, 0) += f;
  return out;
}

Mat hadamard(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("hadamard: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Mat out(a.rows(), a.cols());
  auto x = a.data();
  auto y = b.data();
  auto z = out.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] * y[i];
  return out;
}

Mat kron_power(const Mat& a, unsigned k) {
  if (k == 0) throw BadArity("kron_power: k must be positive");
  std::size_t rows = a.rows();
  std::size_t cols = a.cols();
  for (unsigned i = 1; i < k; ++i) {
    rows = checked_mul(rows, a.rows(), "kron_power");
    cols = checked_mul(cols, a.cols(), "kron_power");
  }
  check_cap(rows, cols, "kron_power");
  Mat out = a;
  for (unsigned i = 1; i < k; ++i) out = kron(a, out);
  return out;
}

Mat vec(const Mat& x) {
  return Mat(x.size(), 1, std::vector<double>(x.data().begin(), x.data().end()));
}

Mat unvec(std::span<const double> v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) {
    throw ShapeMismatch("unvec: length " + std::to_string(v.size()) + " for " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Mat(rows, cols, std::vector<double>(v.begin(), v.end()));
}

PermMat::PermMat(std::vector<std::size_t> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (std::size_t v : image_) {
    if (v >= image_.size() || seen[v]) throw InvalidArgument("PermMat: image is not a bijection");
    seen[v] = true;
  }
}

PermMat PermMat::identity(std::size_t n) {
  std::vector<std::size_t> img(n);
  std::iota(img.begin(), img.end(), 0);
  return PermMat(std::move(img));
}

Mat PermMat::apply_left(const Mat& m) const {
  if (m.rows() != size()) throw ShapeMismatch("PermMat::apply_left: row count mismatch");
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < size(); ++i) std::ranges::copy(m.row(image_[i]), out.row(i).begin());
  return out;
}

Mat PermMat::apply_right(const Mat& m) const {
  if (m.cols() != size()) throw ShapeMismatch("PermMat::apply_right: column count mismatch");
  Mat out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row(r);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < size(); ++c) dst[image_[c]] = src[c];
  }
  return out;
}

PermMat PermMat::compose(const PermMat& other) const {
  if (other.size() != size()) throw ShapeMismatch("PermMat::compose: size mismatch");
  std::vector<std::size_t> img(size());
  for (std::size_t i = 0; i < size(); ++i) img[i] = other.image_[image_[i]];
  return PermMat(std::move(img));
}

PermMat PermMat::transpose() const {
  std::vector<std::size_t> img(size());
  for (std::size_t i = 0; i < size(); ++i) img[image_[i]] = i;
  return PermMat(std::move(img));
}

Mat PermMat::to_dense() const {
  Mat out(size(), size());
  for (std::size_t i = 0; i < size(); ++i) out(i, image_[i]) = 1.0;
  return out;
}

PermMat embed(const PermMat& p, std::size_t left, std::size_t right) {
  const std::size_t s = p.size();
  std::vector<std::size_t> img(checked_mul(checked_mul(left, s, "embed"), right, "embed"));
  for (std::size_t x = 0; x < left; ++x)
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t z = 0; z < right; ++z)
        img[(x * s + y) * right + z] = (x * s + p.image()[y]) * right + z;
  return PermMat(std::move(img));
}

std::pair<PermMat, PermMat> commutation_perm(std::pair<std::size_t, std::size_t> a_shape,
                                             std::pair<std::size_t, std::size_t> b_shape) {
  const auto [m, n] = a_shape;
  const auto [p, q] = b_shape;
  // (B x A)(k*m + i, l*n + j) = b_kl a_ij = (A x B)(i*p + k, j*q + l)
  std::vector<std::size_t> rows(m * p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < m; ++i) rows[k * m + i] = i * p + k;
  std::vector<std::size_t> cols(n * q);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < q; ++l) cols[j * q + l] = l * n + j;
  return {PermMat(std::move(rows)), PermMat(std::move(cols))};
}

std::pair<PermMat, PermMat> reorder_perm(std::span<const std::pair<std::size_t, std::size_t>> shapes,
                                         std::span<const std::size_t> sigma) {
  const std::size_t k = shapes.size();
  if (k == 0) throw BadArity("reorder_perm: need at least one factor");
  if (sigma.size() != k) throw BadArity("reorder_perm: sigma length differs from factor count");
  {
    std::vector<bool> seen(k, false);
    for (std::size_t s : sigma) {
      if (s < 1 || s > k || seen[s - 1]) throw InvalidArgument("reorder_perm: sigma is not a permutation");
      seen[s - 1] = true;
    }
  }
  std::size_t total_rows = 1;
  std::size_t total_cols = 1;
  for (const auto& [r, c] : shapes) {
    total_rows = checked_mul(total_rows, r, "reorder_perm");
    total_cols = checked_mul(total_cols, c, "reorder_perm");
  }
  check_cap(total_rows, total_cols, "reorder_perm");

  // order[m] = 0-based factor currently in position m; bubble it towards sigma.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  PermMat p = PermMat::identity(total_rows);
  PermMat q = PermMat::identity(total_cols);

  auto swap_adjacent = [&](std::size_t m) {
    std::size_t left_r = 1, left_c = 1, right_r = 1, right_c = 1;
    for (std::size_t i = 0; i < m; ++i) {
      left_r *= shapes[order[i]].first;
      left_c *= shapes[order[i]].second;
    }
    for (std::size_t i = m + 2; i < k; ++i) {
      right_r *= shapes[order[i]].first;
      right_c *= shapes[order[i]].second;
    }
    auto [ps, qs] = commutation_perm(shapes[order[m]], shapes[order[m + 1]]);
    // current = P orig Q; swapped = Ps current Qs = (Ps P) orig (Q Qs)
    p = embed(ps, left_r, right_r).compose(p);
    q = q.compose(embed(qs, left_c, right_c));
    std::swap(order[m], order[m + 1]);
  };

  // Selection by adjacent swaps: bring sigma(m) into position m.
  for (std::size_t m = 0; m < k; ++m) {
    const std::size_t target = sigma[m] - 1;
    std::size_t pos = m;
    while (order[pos] != target) ++pos;
    while (pos > m) {
      swap_adjacent(pos - 1);
      --pos;
    }
  }
  return {std::move(p), std::move(q)};
}

Mat kron_all(std::span<const Mat> factors) {
  if (factors.empty()) throw BadArity("kron_all: no factors");
  Mat out = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

}  // namespace radwalk

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "radwalk/cli/cli.hpp"
#include "radwalk/combinatorics.hpp"
#include "radwalk/gaussian_moments.hpp"
#include "radwalk/kron_algebra.hpp"

namespace radwalk::cli {

namespace {

using Gen = std::mt19937_64;

Mat gaussian_mat(Gen& gen, std::size_t r, std::size_t c) {
  std::normal_distribution<double> nd;
  Mat m(r, c);
  for (double& v : m.data()) v = nd(gen);
  return m;
}

// Small integers keep every product exact, so identities that only
// reorder factors can be checked with ==.
Mat integer_mat(Gen& gen, std::size_t r, std::size_t c) {
  std::uniform_int_distribution<int> ud(-4, 4);
  Mat m(r, c);
  for (double& v : m.data()) v = ud(gen);
  return m;
}

SymMat random_cov(Gen& gen, std::size_t d) {
  const Mat a = gaussian_mat(gen, d, d);
  return SymMat(a * a.transpose());
}

std::vector<std::size_t> shuffled(Gen& gen, std::size_t n, std::size_t base) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), base);
  std::shuffle(v.begin(), v.end(), gen);
  return v;
}

double max_abs(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

SuiteResult kron_entries(Gen& gen) {
  SuiteResult r{"kron_entry_formula", true, 0, 0.0, 0.0};
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  for (int t = 0; t < 50; ++t, ++r.cases) {
    const Mat a = gaussian_mat(gen, dim(gen), dim(gen));
    const Mat b = gaussian_mat(gen, dim(gen), dim(gen));
    const Mat k = kron(a, b);
    for (std::size_t i = 0; i < k.rows(); ++i)
      for (std::size_t j = 0; j < k.cols(); ++j) {
        const double d = std::abs(k(i, j) - a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols()));
        r.worst = std::max(r.worst, d);
      }
  }
  r.pass = r.worst <= r.tolerance;
  return r;
}

SuiteResult multinomial(Gen& gen) {
  SuiteResult r{"kron_multinomial", true, 0, 0.0, 1e-12};
  std::uniform_int_distribution<std::size_t> dim(1, 2);
  for (int t = 0; t < 100; ++t, ++r.cases) {
    const std::size_t n = 1 + t % 3;
    const unsigned k = 1 + (t / 3) % 4;
    const std::size_t rows = dim(gen), cols = dim(gen);
    std::vector<Mat> xs;
    Mat sum(rows, cols), abs_sum(rows, cols);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(gaussian_mat(gen, rows, cols));
      sum += xs.back();
      for (std::size_t e = 0; e < sum.size(); ++e) abs_sum.data()[e] += std::abs(xs.back().data()[e]);
    }
    // error relative to the term-by-term magnitude of the expansion
    const double scale = kron_power(abs_sum, k).frobenius_norm();
    const double err = (kron_multinomial_expand(xs, k) - kron_power(sum, k)).frobenius_norm() / scale;
    r.worst = std::max(r.worst, err);
  }
  r.pass = r.worst <= r.tolerance;
  return r;
}

SuiteResult reordering(Gen& gen) {
  SuiteResult r{"reorder_perm", true, 0, 0.0, 0.0};
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  for (int t = 0; t < 200; ++t, ++r.cases) {
    const std::size_t k = 1 + t % 4;
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    std::vector<Mat> fs;
    for (std::size_t i = 0; i < k; ++i) {
      shapes.emplace_back(dim(gen), dim(gen));
      fs.push_back(integer_mat(gen, shapes.back().first, shapes.back().second));
    }
    const std::vector<std::size_t> sigma = shuffled(gen, k, 1);
    std::vector<Mat> permuted;
    for (std::size_t s : sigma) permuted.push_back(fs[s - 1]);
    const auto [p, q] = reorder_perm(shapes, sigma);
    r.worst = std::max(r.worst, max_abs(q.apply_right(p.apply_left(kron_all(fs))), kron_all(permuted)));
  }
  r.pass = r.worst <= r.tolerance;
  return r;
}

SuiteResult hadamard_conjugation(Gen& gen) {
  SuiteResult r{"hadamard_conjugation", true, 0, 0.0, 0.0};
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int t = 0; t < 100; ++t, ++r.cases) {
    const std::size_t rows = dim(gen), cols = dim(gen);
    const PermMat p(shuffled(gen, rows, 0)), q(shuffled(gen, cols, 0));
    const Mat a = gaussian_mat(gen, rows, cols), b = gaussian_mat(gen, rows, cols);
    const Mat lhs = q.apply_right(p.apply_left(hadamard(a, b)));
    const Mat rhs = hadamard(q.apply_right(p.apply_left(a)), q.apply_right(p.apply_left(b)));
    r.worst = std::max(r.worst, max_abs(lhs, rhs));
    // A (x) B as the Hadamard product of the two blown-up factors
    const Mat c = gaussian_mat(gen, 2, 2);
    const Mat blown = hadamard(kron(a, Mat::ones(2, 2)), kron(Mat::ones(rows, cols), c));
    r.worst = std::max(r.worst, max_abs(kron(a, c), blown));
  }
  r.pass = r.worst <= r.tolerance;
  return r;
}

SuiteResult wick_univariate(Gen& gen) {
  SuiteResult r{"wick_univariate", true, 0, 0.0, 0.0};
  std::uniform_int_distribution<int> var(1, 4);
  for (int t = 0; t < 10; ++t) {
    const double s2 = var(gen);
    const auto spec = MatrixNormalSpec::centered(1, SymMat(Mat(1, 1, {s2})));
    for (unsigned k = 1; k <= 8; ++k, ++r.cases) {
      double expect = 0.0;
      if (k % 2 == 0) {
        expect = std::pow(s2, k / 2);
        for (int j = static_cast<int>(k) - 1; j > 1; j -= 2) expect *= j;
      }
      r.worst = std::max(r.worst, std::abs(wick_moment(spec, MomentIndex(k, {0, 0})) - expect));
    }
  }
  r.pass = r.worst <= r.tolerance;
  return r;
}

SuiteResult sum_additivity(Gen& gen) {
  SuiteResult r{"sum_moment_additivity", true, 0, 0.0, 1e-10};
  for (int t = 0; t < 50; ++t, ++r.cases) {
    const std::size_t q = 1 + t % 2;
    const unsigned k = 2 + 2 * ((t / 2) % 2);
    const auto s1 = MatrixNormalSpec::centered(q, random_cov(gen, q * q));
    const auto s2 = MatrixNormalSpec::centered(q, random_cov(gen, q * q));
    const auto both = MatrixNormalSpec::centered(q, s1.cov() + s2.cov());
    const Mat expect = moment_tensor(both, k).dense();
    const double err = max_abs(sum_moment(s1, s2, k).dense(), expect) / std::max(1.0, expect.frobenius_norm());
    r.worst = std::max(r.worst, err);
  }
  r.pass = r.worst <= r.tolerance;
  return r;
}

}  // namespace

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
  Gen gen(seed);
  std::vector<SuiteResult> out;
  out.push_back(kron_entries(gen));
  out.push_back(multinomial(gen));
  out.push_back(reordering(gen));
  out.push_back(hadamard_conjugation(gen));
  out.push_back(wick_univariate(gen));
  out.push_back(sum_additivity(gen));
  return out;
}

int cmd_selftest(std::optional<std::uint64_t> seed, bool inject_kron_fault, std::ostream& out) {
  // negative control: a skewed kron must be caught by the suites
  if (inject_kron_fault) detail::set_kron_fault(1e-6);
  std::vector<SuiteResult> results;
  try {
    results = run_selftest(seed.value_or(kSelftestSeed));
  } catch (...) {
    detail::set_kron_fault(0.0);
    throw;
  }
  detail::set_kron_fault(0.0);

  bool all = true;
  for (const auto& r : results) {
    out << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " (cases=" << r.cases
        << ", worst=" << format_double(r.worst) << ", tol=" << format_double(r.tolerance) << ")\n";
    all = all && r.pass;
  }
  return all ? kExitPass : kExitFail;
}

}  // namespace radwalk::cli

#include "radwalk/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace radwalk {

namespace {

std::vector<double> column_means(const Mat& s) {
  std::vector<double> mean(s.cols(), 0.0);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    auto row = s.row(r);
    for (std::size_t j = 0; j < s.cols(); ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(s.rows());
  return mean;
}

// Jackknife variance of the unbiased covariance of (x, y) from the products
// d_i = (x_i - xbar)(y_i - ybar): leaving out observation i gives
// c_(-i) = (D - d_i N/(N-1)) / (N-2), hence
// var_jk = N / ((N-1)(N-2)^2) * sum (d_i - dbar)^2.
CrossCovariance cross_moments(const Mat& a, const Mat& b) {
  const std::size_t n = a.rows();
  if (n < 2) throw TooFewSamples("covariance needs at least 2 samples, got " + std::to_string(n));
  if (b.rows() != n) throw ShapeMismatch("cross covariance: sample counts differ");
  const std::vector<double> ma = column_means(a);
  const std::vector<double> mb = column_means(b);
  const std::size_t da = a.cols(), db = b.cols();
  Mat sum_d(da, db), sum_d2(da, db);
  std::vector<double> ca(da), cb(db);
  for (std::size_t r = 0; r < n; ++r) {
    auto ra = a.row(r);
    auto rb = b.row(r);
    for (std::size_t i = 0; i < da; ++i) ca[i] = ra[i] - ma[i];
    for (std::size_t j = 0; j < db; ++j) cb[j] = rb[j] - mb[j];
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t j = 0; j < db; ++j) {
        const double d = ca[i] * cb[j];
        sum_d(i, j) += d;
        sum_d2(i, j) += d * d;
      }
    }
  }
  const double nn = static_cast<double>(n);
  CrossCovariance out{Mat(da, db), Mat(da, db)};
  for (std::size_t i = 0; i < da; ++i) {
    for (std::size_t j = 0; j < db; ++j) {
      out.cov(i, j) = sum_d(i, j) / (nn - 1.0);
      if (n >= 3) {
        const double dbar = sum_d(i, j) / nn;
        const double ss = std::max(0.0, sum_d2(i, j) - nn * dbar * dbar);
        out.std_error(i, j) = std::sqrt(nn / ((nn - 1.0) * (nn - 2.0) * (nn - 2.0)) * ss);
      }
    }
  }
  return out;
}

}  // namespace

CovarianceEstimate estimate_covariance(const Mat& samples) {
  CrossCovariance cc = cross_moments(samples, samples);
  return {column_means(samples), SymMat(cc.cov), std::move(cc.std_error), samples.rows()};
}

CovarianceEstimate estimate_covariance(std::span<const std::vector<double>> samples) {
  if (samples.empty()) throw TooFewSamples("covariance needs at least 2 samples, got 0");
  const std::size_t d = samples.front().size();
  Mat m(samples.size(), d);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].size() != d) throw ShapeMismatch("estimate_covariance: ragged samples");
    std::ranges::copy(samples[r], m.row(r).begin());
  }
  return estimate_covariance(m);
}

CrossCovariance estimate_cross_covariance(const Mat& a, const Mat& b) { return cross_moments(a, b); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic_normal(std::span<const double> sample) {
  std::vector<double> s(sample.begin(), sample.end());
  std::ranges::sort(s);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::ranges::sort(x);
  std::ranges::sort(y);
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

double ks_critical_value_two_sample(std::size_t n, std::size_t m, double alpha) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) * std::sqrt((nn + mm) / (nn * mm));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeMismatch("fit_line: x and y differ in length");
  if (x.size() < 3) throw TooFewSamples("fit_line: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: x values are all equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - intercept - slope * x[i];
    rss += e * e;
  }
  return {slope, intercept, std::sqrt(rss / (n - 2.0) / sxx)};
}

}  // namespace radwalk

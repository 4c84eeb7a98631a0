#pragma once

// Estimators and goodness-of-fit tools used to compare simulated walks with
// their predicted laws.

#include <cstddef>
#include <span>
#include <vector>

#include "radwalk/matrix_core.hpp"

namespace radwalk {

struct CovarianceEstimate {
  std::vector<double> mean;
  SymMat cov;       // unbiased (divisor N - 1)
  Mat std_error;    // jackknife standard error of each cov entry
  std::size_t samples = 0;
};

/// Rows of `samples` are observations. Needs at least 2 rows (TooFewSamples);
/// the jackknife needs 3, so with exactly 2 rows std_error is left at zero.
CovarianceEstimate estimate_covariance(const Mat& samples);
CovarianceEstimate estimate_covariance(std::span<const std::vector<double>> samples);

/// Unbiased cross-covariance of two column blocks with per-entry jackknife
/// standard errors: cov(a_i, b_j).
struct CrossCovariance {
  Mat cov;
  Mat std_error;
};
CrossCovariance estimate_cross_covariance(const Mat& a, const Mat& b);

double normal_cdf(double x);

/// sup |F_n - Phi| of the sample against the standard normal.
double ks_statistic_normal(std::span<const double> sample);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);
double ks_critical_value_two_sample(std::size_t n, std::size_t m, double alpha);

struct LineFit {
  double slope;
  double intercept;
  double slope_std_error;
};

/// Ordinary least squares y = intercept + slope x. Needs >= 3 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace radwalk

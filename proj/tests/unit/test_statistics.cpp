#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "radwalk/random_stream.hpp"
#include "radwalk/statistics.hpp"
#include "test_support.hpp"

using namespace radwalk;

TEST_CASE("covariance of constant samples is zero") {
  Mat s(10, 3);
  for (std::size_t i = 0; i < 10; ++i) s(i, 0) = s(i, 1) = s(i, 2) = 1.5;
  const auto est = estimate_covariance(s);
  CHECK(est.cov.mat() == Mat::zeros(3, 3));
  CHECK(est.mean == std::vector<double>{1.5, 1.5, 1.5});
  CHECK(est.std_error == Mat::zeros(3, 3));
}

TEST_CASE("two samples v and -v give 2 v v'") {
  const std::vector<std::vector<double>> rows{{1.0, -2.0}, {-1.0, 2.0}};
  const auto est = estimate_covariance(rows);
  CHECK(est.cov.mat() == Mat(2, 2, {2.0, -4.0, -4.0, 8.0}));
  CHECK(est.samples == 2);
}

TEST_CASE("too few samples") {
  CHECK_THROWS_AS(estimate_covariance(Mat(1, 2)), TooFewSamples);
  const std::vector<std::vector<double>> ragged{{1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(estimate_covariance(ragged), ShapeMismatch);
}

TEST_CASE("jackknife standard error against the leave-one-out definition") {
  std::mt19937_64 gen(111);
  const Mat s = testing::random_mat(gen, 25, 2);
  const auto est = estimate_covariance(s);
  const std::size_t n = 25;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      std::vector<double> loo;
      for (std::size_t drop = 0; drop < n; ++drop) {
        double ma = 0, mb = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (i != drop) {
            ma += s(i, a);
            mb += s(i, b);
          }
        ma /= (n - 1);
        mb /= (n - 1);
        double c = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (i != drop) c += (s(i, a) - ma) * (s(i, b) - mb);
        loo.push_back(c / (n - 2));
      }
      double m = 0;
      for (double v : loo) m += v;
      m /= n;
      double v = 0;
      for (double x : loo) v += (x - m) * (x - m);
      const double se = std::sqrt(v * (n - 1) / n);
      CHECK(est.std_error(a, b) == doctest::Approx(se).epsilon(1e-10));
      double direct = 0;
      for (std::size_t i = 0; i < n; ++i) direct += (s(i, a) - est.mean[a]) * (s(i, b) - est.mean[b]);
      CHECK(est.cov(a, b) == doctest::Approx(direct / (n - 1)).epsilon(1e-13));
    }
}

TEST_CASE("Gaussian input recovers its covariance") {
  const Mat l(3, 3, {1.0, 0.0, 0.0, 0.5, 1.2, 0.0, -0.3, 0.4, 0.8});
  const Mat sigma = l * l.transpose();
  RandomStream rng(112);
  const std::size_t n = 100000;
  Mat s(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double g[3] = {rng.normal(), rng.normal(), rng.normal()};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b <= a; ++b) s(i, a) += l(a, b) * g[b];
  }
  const auto est = estimate_covariance(s);
  CHECK(testing::rel_frob(est.cov.mat(), sigma) < 0.05);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      // Var of a sample covariance entry: (S_aa S_bb + S_ab^2) / n
      const double se = std::sqrt((sigma(a, a) * sigma(b, b) + sigma(a, b) * sigma(a, b)) / n);
      CHECK(est.std_error(a, b) == doctest::Approx(se).epsilon(0.05));
    }
}

TEST_CASE("cross covariance") {
  RandomStream rng(113);
  const std::size_t n = 20000;
  Mat a(n, 1), b(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = rng.normal();
    b(i, 0) = 2.0 * a(i, 0) + rng.normal();
    b(i, 1) = rng.normal();
  }
  const auto cc = estimate_cross_covariance(a, b);
  CHECK(std::abs(cc.cov(0, 0) - 2.0) < 5.0 * cc.std_error(0, 0));
  CHECK(std::abs(cc.cov(0, 1)) < 5.0 * cc.std_error(0, 1));
  CHECK_THROWS_AS(estimate_cross_covariance(a, Mat(n - 1, 1)), ShapeMismatch);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("Kolmogorov-Smirnov") {
  CHECK(ks_critical_value(10000, 0.001) == doctest::Approx(1.9494746035204051 / 100.0).epsilon(1e-12));
  CHECK(ks_critical_value_two_sample(10000, 10000, 0.001) ==
        doctest::Approx(1.9494746035204051 * std::sqrt(2.0 / 10000.0)).epsilon(1e-12));

  const std::vector<double> one{0.0};
  CHECK(ks_statistic_normal(one) == 0.5);

  RandomStream rng(114);
  std::vector<double> g(20000), u(20000);
  for (auto& v : g) v = rng.normal();
  for (auto& v : u) v = std::sqrt(12.0) * (rng.uniform() - 0.5);
  CHECK(ks_statistic_normal(g) < ks_critical_value(g.size(), 0.001));
  CHECK(ks_statistic_normal(u) > ks_critical_value(u.size(), 0.001));

  std::vector<double> g2(20000);
  for (auto& v : g2) v = rng.normal();
  CHECK(ks_statistic_two_sample(g, g2) < ks_critical_value_two_sample(g.size(), g2.size(), 0.001));
  CHECK(ks_statistic_two_sample(g, u) > ks_critical_value_two_sample(g.size(), u.size(), 0.001));
  CHECK(ks_statistic_two_sample(g, g) == 0.0);

  const std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, 5.0};
  CHECK(ks_statistic_two_sample(a, b) == 1.0);
}

TEST_CASE("line fit") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_std_error == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(fit_line(two, two), TooFewSamples);
}

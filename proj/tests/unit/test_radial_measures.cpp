#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "radwalk/radial_measures.hpp"
#include "test_support.hpp"

using namespace radwalk;
using radwalk::testing::householder;

namespace {

SymMat scalar(double v) { return SymMat(Mat(1, 1, {v})); }

RadialLaw two_point_law() { return RadialLaw::two_point_squared(1.0, 0.5, 3.0); }

RadialLaw q2_law() {
  return RadialLaw::discrete(2, {{0.5, SymMat(Mat(2, 2, {1.5, 0.5, 0.5, 0.5}))}, {0.5, SymMat::identity(2)}});
}

}  // namespace

TEST_CASE("law validation") {
  CHECK_THROWS_AS(RadialLaw::discrete(1, {{0.5, scalar(1.0)}, {0.4, scalar(2.0)}}), InvalidArgument);
  CHECK_THROWS_AS(RadialLaw::discrete(1, {{1.0, scalar(-1.0)}}), NotPSD);
  CHECK_THROWS_AS(RadialLaw::discrete(2, {{1.0, scalar(1.0)}}), ShapeMismatch);
  CHECK_THROWS_AS(RadialLaw::discrete(1, {{0.0, scalar(1.0)}, {1.0, scalar(2.0)}}), InvalidArgument);
  CHECK_THROWS_AS(RadialLaw::discrete(1, {}), InvalidArgument);
  try {
    RadialLaw::discrete(2, {{0.5, SymMat::identity(2)}, {0.5, SymMat::diag(std::vector<double>{1.0, -1.0})}});
    FAIL("expected NotPSD");
  } catch (const NotPSD& e) {
    CHECK(std::string(e.what()).find("atom 1") != std::string::npos);
  }
}

TEST_CASE("r2") {
  CHECK(r2(RadialLaw::point_mass(1.0)).mat() == Mat::identity(1));
  CHECK(r2(RadialLaw::discrete(3, {{1.0, SymMat::identity(3)}})).mat() == Mat::identity(3));
  CHECK(r2(two_point_law())(0, 0) == 2.0);
  CHECK(r2(RadialLaw::two_point(1.0, 0.5, std::sqrt(3.0)))(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  const auto law = RadialLaw::discrete(
      2, {{0.5, SymMat::diag(std::vector<double>{1.0, 0.0})}, {0.5, SymMat::diag(std::vector<double>{0.0, 1.0})}});
  CHECK(r2(law).mat() == Mat(2, 2, {0.5, 0.0, 0.0, 0.5}));
  // uniform on [a, b]: E r^2 = (a^2 + ab + b^2) / 3
  CHECK(r2(RadialLaw::uniform_interval(1.0, 2.0))(0, 0) == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("sigma_nu") {
  CHECK(sigma_nu(RadialLaw::point_mass(2.0))(0, 0) == 0.0);
  CHECK(sigma_nu(RadialLaw::discrete(2, {{1.0, SymMat::identity(2)}})).mat() == Mat::zeros(4, 4));
  CHECK(sigma_nu(two_point_law())(0, 0) == 1.0);
  CHECK(two_point_law().r4() == 5.0);

  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> ud(0.1, 3.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<RadialAtom> atoms;
    std::vector<double> w(4), r(4);
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      w[i] = ud(gen);
      r[i] = ud(gen);
      total += w[i];
    }
    double e2 = 0.0, e4 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      w[i] /= total;
      e2 += w[i] * r[i] * r[i];
      e4 += w[i] * std::pow(r[i], 4);
    }
    for (std::size_t i = 0; i < 4; ++i) atoms.push_back({i == 3 ? 1.0 - w[0] - w[1] - w[2] : w[i], scalar(r[i])});
    const auto law = RadialLaw::discrete(1, atoms);
    CHECK(sigma_nu(law)(0, 0) == doctest::Approx(e4 - e2 * e2).epsilon(1e-12));
  }
}

TEST_CASE("sigma_nu for q = 2 is the covariance of vec(r r)") {
  const auto law = q2_law();
  const Mat a2 = Mat(2, 2, {1.5, 0.5, 0.5, 0.5}) * Mat(2, 2, {1.5, 0.5, 0.5, 0.5});
  const Mat b2 = Mat::identity(2);
  const Mat mean = 0.5 * (a2 + b2);
  Mat cov(4, 4);
  for (const Mat* m : {&a2, &b2}) {
    const Mat d = *m - mean;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) cov(i, j) += 0.5 * d.data()[i] * d.data()[j];
  }
  CHECK(testing::max_abs_diff(sigma_nu(law).mat(), cov) < 1e-14);
  CHECK(testing::max_abs_diff(r2(law).mat(), mean) < 1e-14);
  CHECK(is_psd(sigma_nu(law)));
}

TEST_CASE("t_nu") {
  CHECK(t_nu(RadialLaw::point_mass(1.0))(0, 0) == 2.0);
  CHECK(t_nu(two_point_law())(0, 0) == 8.0);
  const SymMat t = t_from_r2(SymMat::identity(2));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          CHECK(t(i * 2 + j, k * 2 + l) == double(i == k && j == l) + double(i == l && j == k));
}

TEST_CASE("uniform orbit sampler") {
  RandomStream rng(61);
  SUBCASE("q = 1 lands on the sphere") {
    for (int t = 0; t < 100; ++t) {
      const Mat x = sample_uniform_orbit(7, scalar(1.0), rng);
      CHECK(std::abs(x.frobenius_norm() - 1.0) < 1e-10);
    }
  }
  SUBCASE("gram reproduces the squared radius") {
    std::mt19937_64 gen(62);
    for (int t = 0; t < 200; ++t) {
      const std::size_t q = 1 + t % 3;
      const SymMat r = testing::random_psd(gen, q, 0.1, 2.0);
      const Mat x = sample_uniform_orbit(q + 3, r, rng);
      const Mat rr = r.mat() * r.mat();
      CHECK((gram(x).mat() - rr).frobenius_norm() <= 1e-8 * rr.frobenius_norm());
      CHECK((phi(x).mat() - r.mat()).frobenius_norm() <= 1e-8 * r.mat().frobenius_norm());
    }
  }
  SUBCASE("p < q is rejected") {
    CHECK_THROWS_AS(sample_uniform_orbit(1, SymMat::identity(2), rng), InvalidArgument);
  }
}

TEST_CASE("phi") {
  const Mat x(3, 1, {1.0, 2.0, 2.0});
  CHECK(phi(x)(0, 0) == doctest::Approx(3.0));
  std::mt19937_64 gen(63);
  const Mat q = testing::random_orthogonal(gen, 4);
  Mat cols(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    cols(i, 0) = q(i, 1);
    cols(i, 1) = q(i, 2);
  }
  CHECK(testing::max_abs_diff(phi(cols).mat(), Mat::identity(2)) < 1e-12);
  for (int t = 0; t < 50; ++t) {
    const Mat y = testing::random_mat(gen, 5, 2);
    CHECK((phi(householder(gen, 5) * y).mat() - phi(y).mat()).frobenius_norm() < 1e-9);
  }
}

TEST_CASE("radial samples have mean zero and row covariance r2 / p") {
  const std::size_t p = 50, draws = 100000;
  for (std::size_t q : {1u, 2u}) {
    const RadialLaw law = q == 1 ? two_point_law() : q2_law();
    RandomStream rng(70 + q);
    const std::size_t d = q;
    std::vector<double> sum(p * q, 0.0), sq(p * q, 0.0);
    Mat row_m2(d, d), row_m4(d, d);
    Mat x;
    for (std::size_t t = 0; t < draws; ++t) {
      const auto [idx, r] = law.sample_radius(rng);
      sample_uniform_orbit_into(p, r, rng, x);
      for (std::size_t k = 0; k < p * q; ++k) {
        sum[k] += x.data()[k];
        sq[k] += x.data()[k] * x.data()[k];
      }
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          const double v = x(0, a) * x(0, b);
          row_m2(a, b) += v;
          row_m4(a, b) += v * v;
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < p * q; ++k) {
      const double mean = sum[k] / draws;
      const double se = std::sqrt((sq[k] / draws - mean * mean) / draws);
      worst = std::max(worst, std::abs(mean) / se);
    }
    // p q = 100 entries: 4.5 sigma keeps the family-wise false alarm rate tiny
    CHECK(worst < 4.5);

    const SymMat expect = (1.0 / p) * r2(law);
    Mat est = (1.0 / draws) * row_m2;
    CHECK(testing::rel_frob(est, expect) < 0.05);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        const double m = est(a, b);
        const double se = std::sqrt((row_m4(a, b) / draws - m * m) / draws);
        CHECK(std::abs(m - expect(a, b)) <= 5.0 * se);
      }
  }
}

TEST_CASE("point mass at 1, p = 4: E X_i^2 = 1/4") {
  const auto law = RadialLaw::point_mass(1.0);
  RandomStream rng(81);
  const std::size_t draws = 100000;
  std::vector<double> m2(4, 0.0), m4(4, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    const Mat x = sample_radial(4, law, rng);
    CHECK_MESSAGE(std::abs(phi(x)(0, 0) - 1.0) < 1e-12, "draw " << t);
    for (std::size_t i = 0; i < 4; ++i) {
      m2[i] += x(i, 0) * x(i, 0);
      m4[i] += std::pow(x(i, 0), 4);
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double m = m2[i] / draws;
    const double se = std::sqrt((m4[i] / draws - m * m) / draws);
    CHECK(std::abs(m - 0.25) <= 4.0 * se);
  }
}

TEST_CASE("orthogonal invariance of the first two moments") {
  std::mt19937_64 gen(82);
  const std::size_t p = 6, draws = 50000;
  const Mat a = testing::random_orthogonal(gen, p);
  const auto law = two_point_law();
  RandomStream r1(83), r2s(84);
  std::vector<double> s1(p, 0), s2(p, 0), q1(p, 0), q2(p, 0), f1(p, 0), f2(p, 0);
  for (std::size_t t = 0; t < draws; ++t) {
    const Mat x = sample_radial(p, law, r1);
    const Mat y = a * sample_radial(p, law, r2s);
    for (std::size_t i = 0; i < p; ++i) {
      s1[i] += x(i, 0);
      s2[i] += y(i, 0);
      q1[i] += x(i, 0) * x(i, 0);
      q2[i] += y(i, 0) * y(i, 0);
      f1[i] += std::pow(x(i, 0), 4);
      f2[i] += std::pow(y(i, 0), 4);
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    const double m1 = s1[i] / draws, m2 = s2[i] / draws;
    const double v1 = q1[i] / draws, v2 = q2[i] / draws;
    CHECK(std::abs(m1 - m2) <= 4.0 * std::sqrt((v1 + v2) / draws));
    const double se = std::sqrt((f1[i] / draws - v1 * v1 + f2[i] / draws - v2 * v2) / draws);
    CHECK(std::abs(v1 - v2) <= 4.0 * se);
  }
}

TEST_CASE("atom frequencies match the weights") {
  const auto law = RadialLaw::discrete(1, {{0.2, scalar(1.0)}, {0.3, scalar(2.0)}, {0.5, scalar(4.0)}});
  RandomStream rng(91);
  const std::size_t draws = 10000;
  std::vector<double> counts(3, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    const double r = phi(sample_radial(5, law, rng))(0, 0);
    const std::size_t k = r < 1.5 ? 0 : (r < 3.0 ? 1 : 2);
    counts[k] += 1.0;
  }
  const std::vector<double> w{0.2, 0.3, 0.5};
  double chi2 = 0.0;
  for (std::size_t k = 0; k < 3; ++k) chi2 += std::pow(counts[k] - draws * w[k], 2) / (draws * w[k]);
  // chi-square with 2 degrees of freedom: P(X > x) = exp(-x / 2)
  CHECK(std::exp(-chi2 / 2.0) > 0.001);
}

TEST_CASE("batches are deterministic") {
  const auto law = q2_law();
  const auto b1 = sample_radial_batch(5, law, 200, 1234);
  const auto b2 = sample_radial_batch(5, law, 200, 1234);
  const auto b3 = sample_radial_batch(5, law, 200, 1235);
  CHECK(b1.count() == 200);
  CHECK(std::ranges::equal(b1.storage(), b2.storage()));
  CHECK_FALSE(std::ranges::equal(b1.storage(), b3.storage()));
  for (std::size_t i = 0; i < b1.count(); ++i) {
    const Mat rr = b1.radius(i).mat() * b1.radius(i).mat();
    CHECK((gram(b1.sample(i)).mat() - rr).frobenius_norm() <= 1e-8 * rr.frobenius_norm());
  }
}

TEST_CASE("multi-index bookkeeping") {
  const MultiIndex kappa{{{{0, 0}, 2}, {{1, 0}, 1}, {{1, 1}, 1}}};
  CHECK(kappa.degree() == 4);
  CHECK(kappa.row_sums() == std::map<std::size_t, unsigned>{{0, 2}, {1, 2}});
  CHECK_FALSE(kappa.has_odd_row_sum());
  const MultiIndex odd{{{{0, 0}, 1}, {{1, 0}, 1}}};
  CHECK(odd.has_odd_row_sum());
  const Mat x(2, 2, {2.0, 3.0, 5.0, 7.0});
  CHECK(kappa.monomial(x) == 4.0 * 5.0 * 7.0);
}

TEST_CASE("radial moments by Monte Carlo") {
  const auto delta = RadialLaw::point_mass(1.0);
  SUBCASE("second moment of a coordinate is 1/p") {
    RandomStream rng(101);
    const MultiIndex k2{{{{0, 0}, 2}}};
    const auto est = radial_moment_mc(10, delta, k2, 100000, rng);
    CHECK(std::abs(est.estimate - 0.1) <= 4.0 * est.std_error);
  }
  SUBCASE("odd row sum vanishes") {
    RandomStream rng(102);
    const MultiIndex odd{{{{0, 0}, 3}, {{1, 0}, 1}}};
    const auto est = radial_moment_mc(10, two_point_law(), odd, 100000, rng);
    CHECK(std::abs(est.estimate) < 4.0 * est.std_error);
  }
  SUBCASE("E X_1^2 X_2^2 = 1/(p(p+2))") {
    RandomStream rng(103);
    const MultiIndex k{{{{0, 0}, 2}, {{1, 0}, 2}}};
    const auto est = radial_moment_mc(8, delta, k, 200000, rng);
    CHECK(std::abs(est.estimate - 1.0 / 80.0) <= 4.0 * est.std_error);
  }
  SUBCASE("input checks") {
    RandomStream rng(104);
    const MultiIndex big{{{{0, 0}, 9}}};
    CHECK_THROWS_AS(radial_moment_mc(4, delta, big, 1000, rng), InvalidArgument);
    const MultiIndex k2{{{{0, 0}, 2}}};
    CHECK_THROWS_AS(radial_moment_mc(4, delta, k2, 999, rng), InvalidArgument);
  }
}

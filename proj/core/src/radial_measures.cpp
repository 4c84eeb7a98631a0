#include "radwalk/radial_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radwalk/kron_algebra.hpp"

namespace radwalk {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kRadiusPsdTol = 1e-10;
constexpr int kOrbitRetries = 5;

void check_weights(const std::vector<RadialAtom>& atoms) {
  if (atoms.empty()) throw InvalidArgument("RadialLaw: no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double w = atoms[i].weight;
    if (!(w > 0.0) || !std::isfinite(w))
      throw InvalidArgument("RadialLaw: atom " + std::to_string(i) + " has non-positive weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw InvalidArgument("RadialLaw: weights sum to " + std::to_string(total) + ", expected 1");
}

SymMat scalar(double v) { return SymMat(Mat(1, 1, {v})); }

}  // namespace

RadialLaw RadialLaw::discrete(std::size_t q, std::vector<RadialAtom> atoms) {
  if (q == 0) throw InvalidArgument("RadialLaw: q must be positive");
  check_weights(atoms);
  RadialLaw law;
  law.q_ = q;
  law.family_ = Family::kDiscrete;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const SymMat& r = atoms[i].radius;
    if (r.dim() != q)
      throw ShapeMismatch("RadialLaw: atom " + std::to_string(i) + " radius is not " +
                            std::to_string(q) + "x" + std::to_string(q));
    if (!r.mat().all_finite())
      throw InvalidArgument("RadialLaw: atom " + std::to_string(i) + " radius is not finite");
    const SymEig eig = sym_eig(r);
    if (eig.values.back() < -kRadiusPsdTol)
      throw NotPSD("RadialLaw: atom " + std::to_string(i) + " radius is not positive semidefinite");
    law.squares_.push_back(SymMat(r.mat() * r.mat()));
  }
  law.atoms_ = std::move(atoms);
  double acc = 0.0;
  for (const auto& a : law.atoms_) law.cumulative_.push_back(acc += a.weight);
  return law;
}

RadialLaw RadialLaw::point_mass(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("point_mass: radius must be >= 0");
  RadialLaw law = discrete(1, {{1.0, scalar(r)}});
  law.family_ = Family::kPointMass;
  return law;
}

RadialLaw RadialLaw::two_point(double r_a, double p_a, double r_b) {
  if (!(r_a >= 0.0) || !(r_b >= 0.0)) throw InvalidArgument("two_point: radii must be >= 0");
  return two_point_squared(r_a * r_a, p_a, r_b * r_b);
}

RadialLaw RadialLaw::two_point_squared(double r_a_sq, double p_a, double r_b_sq) {
  if (!(r_a_sq >= 0.0) || !(r_b_sq >= 0.0) || !std::isfinite(r_a_sq) || !std::isfinite(r_b_sq))
    throw InvalidArgument("two_point: squared radii must be finite and >= 0");
  if (!(p_a > 0.0 && p_a < 1.0)) throw InvalidArgument("two_point: p_a must lie in (0, 1)");
  RadialLaw law = discrete(1, {{p_a, scalar(std::sqrt(r_a_sq))}, {1.0 - p_a, scalar(std::sqrt(r_b_sq))}});
  law.family_ = Family::kTwoPoint;
  law.squares_ = {scalar(r_a_sq), scalar(r_b_sq)};
  return law;
}

RadialLaw RadialLaw::uniform_interval(double a, double b) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b))
    throw InvalidArgument("uniform_interval: need 0 <= a < b");
  RadialLaw law;
  law.q_ = 1;
  law.family_ = Family::kUniformInterval;
  law.lo_ = a;
  law.hi_ = b;
  return law;
}

std::size_t RadialLaw::pick_atom(RandomStream& rng) const {
  if (atoms_.size() == 1) return 0;
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
}

std::pair<std::size_t, SymMat> RadialLaw::sample_radius(RandomStream& rng) const {
  if (family_ == Family::kUniformInterval) {
    const double r = lo_ + (hi_ - lo_) * rng.uniform();
    return {SIZE_MAX, scalar(r)};
  }
  const std::size_t i = pick_atom(rng);
  return {i, atoms_[i].radius};
}

std::pair<double, double> RadialLaw::sample_scalar_radius(RandomStream& rng) const {
  if (q_ != 1) throw BadArity("sample_scalar_radius: law has q = " + std::to_string(q_));
  if (family_ == Family::kUniformInterval) {
    const double r = lo_ + (hi_ - lo_) * rng.uniform();
    return {r, r * r};
  }
  const std::size_t i = pick_atom(rng);
  return {atoms_[i].radius(0, 0), squares_[i](0, 0)};
}

double RadialLaw::r4() const {
  if (q_ != 1) throw BadArity("r4: defined for q = 1 only");
  if (family_ == Family::kUniformInterval) {
    const double a = lo_, b = hi_;
    return (std::pow(b, 5) - std::pow(a, 5)) / (5.0 * (b - a));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double s = squares_[i](0, 0);
    acc += atoms_[i].weight * s * s;
  }
  return acc;
}

SymMat r2(const RadialLaw& nu) {
  if (nu.family() == RadialLaw::Family::kUniformInterval) {
    const auto [a, b] = nu.interval();
    return scalar((b * b * b - a * a * a) / (3.0 * (b - a)));
  }
  const std::size_t q = nu.q();
  Mat acc(q, q);
  for (std::size_t i = 0; i < nu.atoms().size(); ++i) acc += nu.atoms()[i].weight * nu.atom_squares()[i].mat();
  return SymMat(acc);
}

SymMat sigma_nu(const RadialLaw& nu) {
  if (nu.q() == 1) {
    const double m2 = r2(nu)(0, 0);
    if (nu.family() == RadialLaw::Family::kUniformInterval) return scalar(nu.r4() - m2 * m2);
    // centered form keeps point masses at exactly zero
    double acc = 0.0;
    for (std::size_t i = 0; i < nu.atoms().size(); ++i) {
      const double d = nu.atom_squares()[i](0, 0) - m2;
      acc += nu.atoms()[i].weight * d * d;
    }
    return scalar(acc);
  }
  const std::size_t q = nu.q();
  const std::size_t d = q * q;
  const SymMat mean = r2(nu);
  Mat acc(d, d);
  std::vector<double> dev(d);
  for (std::size_t a = 0; a < nu.atoms().size(); ++a) {
    const Mat& s = nu.atom_squares()[a].mat();
    for (std::size_t i = 0; i < d; ++i) dev[i] = s.data()[i] - mean.mat().data()[i];
    const double w = nu.atoms()[a].weight;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) acc(i, j) += w * dev[i] * dev[j];
  }
  return SymMat(acc);
}

SymMat t_from_r2(const SymMat& r) {
  const std::size_t q = r.dim();
  Mat t(q * q, q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < q; ++k)
        for (std::size_t l = 0; l < q; ++l) t(i * q + j, k * q + l) = r(i, k) * r(j, l) + r(i, l) * r(j, k);
  return SymMat(t);
}

SymMat t_nu(const RadialLaw& nu) { return t_from_r2(r2(nu)); }

void sample_uniform_orbit_into(std::size_t p, const SymMat& r, RandomStream& rng, Mat& out) {
  const std::size_t q = r.dim();
  if (p < q) throw InvalidArgument("sample_uniform_orbit: need p >= q");
  if (out.rows() != p || out.cols() != q) out = Mat(p, q);
  auto x = out.data();

  if (q == 1) {
    for (int attempt = 0; attempt <= kOrbitRetries; ++attempt) {
      double ss = 0.0;
      for (double& v : x) {
        v = rng.normal();
        ss += v * v;
      }
      if (ss > 0.0) {
        const double scale = r(0, 0) / std::sqrt(ss);
        for (double& v : x) v *= scale;
        return;
      }
    }
    throw RankDeficient("sample_uniform_orbit: Gaussian draw vanished after retries");
  }

  for (int attempt = 0; attempt <= kOrbitRetries; ++attempt) {
    for (double& v : x) v = rng.normal();
    const SymEig eig = sym_eig(gram(out));
    if (!(eig.values.back() > 1e-12 * eig.values.front())) continue;
    // M = (G'G)^{-1/2} r, then X = G M
    const SymMat inv_sqrt = spectral_map(eig, [](double l) { return 1.0 / std::sqrt(l); });
    const Mat m = inv_sqrt.mat() * r.mat();
    std::vector<double> row(q);
    for (std::size_t i = 0; i < p; ++i) {
      auto xi = out.row(i);
      std::ranges::copy(xi, row.begin());
      for (std::size_t c = 0; c < q; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < q; ++k) acc += row[k] * m(k, c);
        xi[c] = acc;
      }
    }
    return;
  }
  throw RankDeficient("sample_uniform_orbit: G'G singular after " + std::to_string(kOrbitRetries) +
                      " retries (p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
}

Mat sample_uniform_orbit(std::size_t p, const SymMat& r, RandomStream& rng) {
  Mat out(p, r.dim());
  sample_uniform_orbit_into(p, r, rng, out);
  return out;
}

Mat sample_radial(std::size_t p, const RadialLaw& nu, RandomStream& rng) {
  const auto [idx, r] = nu.sample_radius(rng);
  return sample_uniform_orbit(p, r, rng);
}

SymMat phi(const Mat& x) { return psd_sqrt(gram(x)); }

RadialSampleBatch::RadialSampleBatch(std::size_t p, std::size_t q, std::uint64_t seed)
    : p_(p), q_(q), seed_(seed) {}

Mat RadialSampleBatch::sample(std::size_t i) const {
  const std::size_t n = p_ * q_;
  if (i >= count()) throw InvalidArgument("RadialSampleBatch: index out of range");
  return Mat(p_, q_, std::vector<double>(storage_.begin() + i * n, storage_.begin() + (i + 1) * n));
}

void RadialSampleBatch::push(const Mat& x, SymMat radius) {
  if (x.rows() != p_ || x.cols() != q_) throw ShapeMismatch("RadialSampleBatch: sample shape");
  storage_.insert(storage_.end(), x.data().begin(), x.data().end());
  radii_.push_back(std::move(radius));
}

RadialSampleBatch sample_radial_batch(std::size_t p, const RadialLaw& nu, std::size_t count,
                                      std::uint64_t seed, std::uint64_t stream) {
  RandomStream rng(seed, stream);
  RadialSampleBatch batch(p, nu.q(), seed);
  Mat x(p, nu.q());
  for (std::size_t i = 0; i < count; ++i) {
    auto [idx, r] = nu.sample_radius(rng);
    sample_uniform_orbit_into(p, r, rng, x);
    batch.push(x, std::move(r));
  }
  return batch;
}

unsigned MultiIndex::degree() const noexcept {
  unsigned d = 0;
  for (const auto& [entry, e] : terms) d += e;
  return d;
}

std::map<std::size_t, unsigned> MultiIndex::row_sums() const {
  std::map<std::size_t, unsigned> sums;
  for (const auto& [entry, e] : terms) sums[entry.first] += e;
  return sums;
}

bool MultiIndex::has_odd_row_sum() const {
  return std::ranges::any_of(row_sums(), [](const auto& kv) { return kv.second % 2 != 0; });
}

double MultiIndex::monomial(const Mat& x) const {
  double v = 1.0;
  for (const auto& [entry, e] : terms) {
    const double b = x(entry.first, entry.second);
    for (unsigned i = 0; i < e; ++i) v *= b;
  }
  return v;
}

MomentEstimate radial_moment_mc(std::size_t p, const RadialLaw& nu, const MultiIndex& kappa,
                                std::size_t trials, RandomStream& rng) {
  if (kappa.degree() > 8) throw InvalidArgument("radial_moment_mc: |kappa| must be <= 8");
  if (trials < 1000) throw InvalidArgument("radial_moment_mc: need at least 1000 trials");
  for (const auto& [entry, e] : kappa.terms) {
    if (entry.first >= p || entry.second >= nu.q())
      throw InvalidArgument("radial_moment_mc: kappa entry outside the p x q matrix");
  }
  Mat x(p, nu.q());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto [idx, r] = nu.sample_radius(rng);
    sample_uniform_orbit_into(p, r, rng, x);
    const double v = kappa.monomial(x);
    const double delta = v - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(trials - 1);
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

}  // namespace radwalk

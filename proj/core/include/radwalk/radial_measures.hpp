#pragma once

// Radial laws nu on the PSD cone, their moment functionals r2, Sigma, T, and
// samplers for the radial lift nu_p on p x q matrices.
//
// A law on p x q matrices is radial when it is invariant under x -> A x for
// every orthogonal p x p matrix A; it is determined by the image nu of
// phi_p(x) = sqrt(x'x). Sampling uses the mixture decomposition: draw a
// radius r ~ nu, then a uniform point of the orbit {x : sqrt(x'x) = r}.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "radwalk/gaussian_moments.hpp"
#include "radwalk/matrix_core.hpp"
#include "radwalk/random_stream.hpp"

namespace radwalk {

struct RadialAtom {
  double weight;
  SymMat radius;
};

class RadialLaw {
 public:
  enum class Family { kDiscrete, kPointMass, kTwoPoint, kUniformInterval };

  /// Finite discrete law on PSD q x q radii. Weights must be positive and
  /// sum to 1 within 1e-12; radii must have eigenvalues >= -1e-10.
  static RadialLaw discrete(std::size_t q, std::vector<RadialAtom> atoms);

  // Scalar (q = 1) families with closed-form moments.
  static RadialLaw point_mass(double r);
  /// Radius r_a with probability p_a, r_b otherwise.
  static RadialLaw two_point(double r_a, double p_a, double r_b);
  /// As two_point, parameterized by the squared radii so r2 and r4 stay
  /// exact for irrational radii such as sqrt(3).
  static RadialLaw two_point_squared(double r_a_sq, double p_a, double r_b_sq);
  static RadialLaw uniform_interval(double a, double b);

  std::size_t q() const noexcept { return q_; }
  Family family() const noexcept { return family_; }
  /// Atoms of the discrete representation. Empty for uniform_interval.
  const std::vector<RadialAtom>& atoms() const noexcept { return atoms_; }
  /// Squared radius of each atom (r*r), exact for the squared parameterization.
  const std::vector<SymMat>& atom_squares() const noexcept { return squares_; }
  std::pair<double, double> interval() const noexcept { return {lo_, hi_}; }

  /// Draws a radius. The returned index is the atom index, or SIZE_MAX for
  /// continuous families.
  std::pair<std::size_t, SymMat> sample_radius(RandomStream& rng) const;
  /// q = 1 only: draws (r, r^2).
  std::pair<double, double> sample_scalar_radius(RandomStream& rng) const;

  /// E r^4 for q = 1.
  double r4() const;

 private:
  RadialLaw() = default;
  std::size_t pick_atom(RandomStream& rng) const;

  std::size_t q_ = 1;
  Family family_ = Family::kDiscrete;
  std::vector<RadialAtom> atoms_;
  std::vector<SymMat> squares_;
  std::vector<double> cumulative_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// r2(nu) = E(r r), a PSD q x q matrix.
SymMat r2(const RadialLaw& nu);

/// Sigma(nu) = Cov(vec(r r)), q^2 x q^2.
SymMat sigma_nu(const RadialLaw& nu);

/// T(nu) = T_1 + T_2 with T_1[(i,j),(k,l)] = r2_ik r2_jl and
/// T_2[(i,j),(k,l)] = r2_il r2_jk.
SymMat t_nu(const RadialLaw& nu);
SymMat t_from_r2(const SymMat& r2m);

/// Uniform point on {x in M_{p,q} : sqrt(x'x) = r}: X = G (G'G)^{-1/2} r for
/// a standard Gaussian G. Resamples up to 5 times if G'G is singular, then
/// throws RankDeficient.
Mat sample_uniform_orbit(std::size_t p, const SymMat& r, RandomStream& rng);

/// Allocation-free variant writing into `out` (resized to p x q).
void sample_uniform_orbit_into(std::size_t p, const SymMat& r, RandomStream& rng, Mat& out);

/// One draw from nu_p.
Mat sample_radial(std::size_t p, const RadialLaw& nu, RandomStream& rng);

/// phi_p(x) = sqrt(x'x).
SymMat phi(const Mat& x);

/// count draws from nu_p stored contiguously, with the radius used for each.
class RadialSampleBatch {
 public:
  RadialSampleBatch(std::size_t p, std::size_t q, std::uint64_t seed);

  std::size_t p() const noexcept { return p_; }
  std::size_t q() const noexcept { return q_; }
  std::size_t count() const noexcept { return radii_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const double> storage() const noexcept { return storage_; }
  Mat sample(std::size_t i) const;
  const SymMat& radius(std::size_t i) const { return radii_.at(i); }

  void push(const Mat& x, SymMat radius);

 private:
  std::size_t p_;
  std::size_t q_;
  std::uint64_t seed_;
  std::vector<double> storage_;
  std::vector<SymMat> radii_;
};

RadialSampleBatch sample_radial_batch(std::size_t p, const RadialLaw& nu, std::size_t count,
                                      std::uint64_t seed, std::uint64_t stream = 0);

/// Sparse multi-index kappa over entries (row, col) of a p x q matrix.
struct MultiIndex {
  std::vector<std::pair<EntryIndex, unsigned>> terms;

  unsigned degree() const noexcept;
  /// R_i(kappa) for each row that appears.
  std::map<std::size_t, unsigned> row_sums() const;
  bool has_odd_row_sum() const;
  /// Evaluates x^kappa.
  double monomial(const Mat& x) const;
};

struct MomentEstimate {
  double estimate;
  double std_error;
};

/// Monte Carlo estimate of m_kappa(nu_p) = E X^kappa. Requires |kappa| <= 8
/// and trials >= 1000.
MomentEstimate radial_moment_mc(std::size_t p, const RadialLaw& nu, const MultiIndex& kappa,
                                std::size_t trials, RandomStream& rng);

}  // namespace radwalk

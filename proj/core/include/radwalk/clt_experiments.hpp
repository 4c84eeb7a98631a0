#pragma once

// Radial random walks S_n = X_1 + ... + X_n with X_k ~ nu_p, the centered
// squared-radius statistic
//   Xi_n = phi_p(S_n)^2 - n r2(nu),
// its split Xi_n = A_n + B_n into per-step terms A_n = sum (X_i'X_i - r2)
// and cross terms B_n = sum_{a != b} X_a'X_b, exact finite-n covariance
// predictions, and the experiment drivers that compare them with Monte
// Carlo estimates.
//
// Exact finite-n covariances (vec indexing (i,j) -> i*q + j):
//   Cov(vec A_n) = n Sigma(nu),  Cov(vec B_n) = n(n-1)/p T(nu),
//   Cov(vec A_n, vec B_n) = 0.
// Limits: (sqrt(p)/n) Xi_n -> N(0, T) when n/p -> inf, and
// Xi_n / sqrt(n) -> N(0, Sigma + c T) when n/p -> c.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radwalk/matrix_core.hpp"
#include "radwalk/radial_measures.hpp"
#include "radwalk/random_stream.hpp"

namespace radwalk {

enum class Regime {
  kCltI,   // n/p -> infinity, scale sqrt(p)/n
  kCltII,  // n/p -> c, scale 1/sqrt(n); c = 0 by default
  kMixed,  // CLT II with c > 0
};

std::string_view regime_name(Regime r) noexcept;
std::optional<Regime> parse_regime(std::string_view s) noexcept;

/// Canonical dimension schedules: CLT I p = ceil(n^gamma); CLT II/mixed
/// p = n^2 when c = 0, ceil(n / c) otherwise.
std::size_t schedule_dimension(Regime regime, std::size_t n, double c, double gamma = 0.5);

struct Tolerances {
  double rel_finite = 0.05;  // relative band for the exact finite-n covariance
  double rel_limit = 0.05;   // relative band for the limit covariance
  double z = 5.0;            // standard-error multiplier
  double ks_alpha = 1e-3;
};

struct WalkConfig {
  explicit WalkConfig(RadialLaw law) : nu(std::move(law)) {}

  RadialLaw nu;
  std::size_t n = 1;
  std::size_t p = 1;
  std::size_t trials = 1000;
  Regime regime = Regime::kCltII;
  double c = 0.0;
  std::uint64_t seed = 0;
  /// Separates the random streams of distinct experiments sharing a seed.
  std::uint64_t stream = 0;
  bool fast_path = false;
  bool validate_decomposition = false;
  Tolerances tol{};

  /// Throws InvalidArgument: p >= q, trials >= 100, fast_path needs q = 1,
  /// mixed regime needs c > 0.
  void validate() const;
};

struct TrialStatistics {
  std::vector<double> xi;  // vec(Xi_n), length q^2
  std::vector<double> a;   // vec(A_n)
  std::vector<double> b;   // vec(B_n) = vec(Xi_n - A_n)
  /// Direct cross-term accumulation, present in validation mode.
  std::optional<std::vector<double>> b_direct;
};

/// One walk of n steps on p x q matrices.
TrialStatistics run_walk_trial(const WalkConfig& cfg, RandomStream& rng);

/// q = 1 walk tracking only s^2 = |S_k|^2: with u_k the first coordinate of
/// a uniform point on the unit sphere of R^p ((u+1)/2 ~ Beta((p-1)/2, (p-1)/2)),
///   s^2 <- s^2 + 2 s r_k u_k + r_k^2.
/// Same law as run_walk_trial, O(n) per trial.
TrialStatistics fast_walk_trial_q1(const WalkConfig& cfg, RandomStream& rng);

/// First coordinate of a uniform point on the unit sphere of R^p.
double sphere_coordinate(std::size_t p, RandomStream& rng);

struct PredictedCovariances {
  SymMat cov_a;
  SymMat cov_b;
  SymMat cov_xi;
};

PredictedCovariances predict_covariances(const RadialLaw& nu, std::size_t n, std::size_t p);

/// sqrt(p)/n for CLT I, 1/sqrt(n) otherwise.
double normalization(const WalkConfig& cfg);

/// T(nu) for CLT I, Sigma(nu) + c T(nu) otherwise.
SymMat limit_covariance(const WalkConfig& cfg);

/// Runs every trial; trial t uses RandomStream(seed, stream, t), so the
/// result does not depend on the worker count. workers = 0 picks the
/// hardware concurrency.
std::vector<TrialStatistics> run_trials(const WalkConfig& cfg, unsigned workers = 0);

enum class Verdict { kPass, kFail, kInconclusive, kSkipped };
std::string_view verdict_name(Verdict v) noexcept;

struct CriterionResult {
  std::string name;
  Verdict verdict;
  double statistic;
  double threshold;
};

struct ExperimentReport {
  std::size_t q = 1;
  double scale = 1.0;
  SymMat predicted_finite;  // exact finite-n covariance of scale * vec(Xi_n)
  SymMat predicted_limit;
  SymMat empirical;
  Mat std_error;
  std::vector<double> empirical_mean;
  double rel_frob_err_finite = 0.0;
  double rel_frob_err_limit = 0.0;
  Mat z_scores;  // (empirical - predicted_finite) / std_error
  std::vector<double> ks_stats;  // one per upper-triangular coordinate of Xi
  double ks_stat = 0.0;          // max of ks_stats
  double ks_critical = 0.0;
  double max_cross_cov_z = 0.0;  // |Cov(vec A, vec B)| / std_error, max entry
  std::optional<double> max_decomposition_residual;
  std::vector<CriterionResult> criteria;
  Verdict verdict = Verdict::kPass;
  double wall_seconds = 0.0;
};

/// Runs the trials and compares the empirical covariance of scale * vec(Xi_n)
/// with both the exact finite-n and the limit covariance, plus KS tests of
/// the standardized coordinates against N(0,1).
ExperimentReport verify_clt(const WalkConfig& cfg, unsigned workers = 0);

/// Builds the report from already computed trials.
ExperimentReport summarize_trials(const WalkConfig& cfg, std::span<const TrialStatistics> trials);

struct DecayPoint {
  std::size_t p;
  double estimate;
  double std_error;
};

struct MomentDecayReport {
  bool parity_branch = false;  // some row sum of kappa is odd
  unsigned l = 0;              // |kappa| / 2
  std::vector<DecayPoint> points;
  std::optional<double> slope;  // of log|estimate| against log p
  std::optional<double> slope_std_error;
  std::optional<double> intercept;
  double max_abs_z = 0.0;  // parity branch: max |estimate| / std_error
  double slope_tol = 0.5;
  double z_tol = 4.0;
  Verdict verdict = Verdict::kPass;
};

/// Decay branch (all row sums even): fits the log-log slope, PASS when it is
/// within slope_tol of -l. Parity branch: PASS when every |estimate|/stderr
/// is below z_tol. Needs at least 3 grid points.
MomentDecayReport moment_decay_experiment(const RadialLaw& nu, const MultiIndex& kappa,
                                          std::span<const std::size_t> p_grid, std::size_t trials,
                                          std::uint64_t seed, std::uint64_t stream = 0,
                                          double slope_tol = 0.5, double z_tol = 4.0);

}  // namespace radwalk

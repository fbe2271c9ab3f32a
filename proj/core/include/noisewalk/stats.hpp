#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisewalk/exact.hpp"
#include "noisewalk/group.hpp"
#include "noisewalk/measure.hpp"
#include "noisewalk/trajectory.hpp"

namespace noisewalk {

/// Tolerance of the centering guard |E phi_* mu|.
inline constexpr double kCenteringTolerance = 1e-9;

/// Default guard: ray prefixes are read only up to (1 - guard) * speed * N.
inline constexpr double kDefaultGuard = 0.2;

// ---------------------------------------------------------------------------
// Escape rate and stopping times

struct SpeedEstimate {
  double lambda = 0.0;
  double half_width = 0.0;  // 95% normal-approximation CI of the mean
  double sample_sd = 0.0;   // standard deviation of |w_n| / n across trajectories
  double sigma = 0.0;       // LIL scale of |w_t| - lambda t
  std::size_t steps = 0;
  std::size_t trajectories = 0;
  bool degenerate = false;  // zero variance of |w_n| / n
};

/// Mean of |w_n| / n over `trajectories` walks of `steps` steps
/// (steps >= 100, trajectories >= 10).
///
/// `sigma` is the median over trajectories of half the spread of the
/// running extremes of (|w_t| - lambda t) / sqrt(2 t log log t) over
/// t in [max(3, n/16), n].
SpeedEstimate estimate_speed(const MarkedGroup& group, const FiniteMeasure& mu, std::size_t steps,
                             std::size_t trajectories, std::uint64_t seed, unsigned workers = 1);

/// First k >= 1 with |w_k| >= lambda * n. Throws HorizonExhaustedError when
/// the level is not reached within the trajectory.
std::size_t stopping_time(const Trajectory& trajectory, double lambda, std::size_t n);

// ---------------------------------------------------------------------------
// Winding along rays

enum class Normalization { None, Sqrt, Lil };

/// Values of phi along a ray approximant at increasing times.
struct WindingSeries {
  std::vector<std::size_t> times;
  std::vector<double> values;
  Normalization mode = Normalization::None;

  /// Raw values divided by 1, sqrt(t) or sqrt(2 t log log t) per `mode`.
  std::vector<double> normalized() const;
  WindingSeries with_mode(Normalization m) const;
  WindingSeries scaled(double c) const;
};

/// Largest ray time accepted for a horizon-N trajectory.
std::size_t max_ray_time(double lambda, std::size_t horizon, double guard = kDefaultGuard);

/// Smallest horizon whose guarded ray window reaches time t.
std::size_t horizon_for_ray_time(double lambda, std::size_t t, double guard = kDefaultGuard);

/// phi(prefix_t(w_N)) for each requested t; the endpoint's canonical word
/// stands in for the ray toward the limit point. Times above
/// (1 - guard) * lambda * N are refused with DomainError.
WindingSeries ray_winding(const Trajectory& trajectory, const Homomorphism& phi, std::span<const std::size_t> times,
                          double lambda, double guard = kDefaultGuard);

/// (n log log n)^-1/2 |phi(r(floor(lambda n))) - phi(w_n)|.
double marginal_gap(const FiniteMeasure& mu, const Trajectory& trajectory, const Homomorphism& phi, double lambda,
                    std::size_t n, double guard = kDefaultGuard);

/// E phi_* mu and E (phi_* mu)^2 by support enumeration.
double winding_mean(const FiniteMeasure& mu, const Homomorphism& phi);
double winding_variance(const FiniteMeasure& mu, const Homomorphism& phi);
/// Throws HypothesisError unless |E phi_* mu| <= kCenteringTolerance.
void require_centered(const FiniteMeasure& mu, const Homomorphism& phi);

struct KsResult {
  double statistic = 0.0;
  bool degenerate = false;    // kappa^2 == 0
  bool inconsistent = false;  // kappa^2 == 0 but samples vary
};

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// N(0, kappa2). Ties are handled by comparing both sides of each jump.
KsResult clt_check(std::span<const double> samples, double kappa2);

struct LilExtremes {
  double max = 0.0;
  double min = 0.0;
};

/// Running extremes of the log-log normalized series over times in
/// [first, last]. Requires first >= 3.
LilExtremes lil_window(const WindingSeries& series, std::size_t first, std::size_t last);

/// phi(prefix_t) for every t = 0..last of a trajectory endpoint, as a
/// series (times 0..last). Used for LIL windows.
WindingSeries full_ray_winding(const Trajectory& trajectory, const Homomorphism& phi, std::size_t last,
                               double lambda, double guard = kDefaultGuard);

// ---------------------------------------------------------------------------
// Joint covariance

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct CovarianceMatrix2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  std::array<double, 2> eigenvalues() const;  // ascending
  double operator_norm() const;
  CovarianceMatrix2 sqrt() const;  // principal square root (PSD input)
  CovarianceMatrix2 operator-(const CovarianceMatrix2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  CovarianceMatrix2 operator*(double c) const { return {xx * c, xy * c, yy * c}; }
};

/// Cov((phi x phi)_* pi^rho) by enumerating the atoms of the coupling.
/// Rejects non-centered phi.
CovarianceMatrix2 cov_formula(const FiniteMeasure& mu, const Homomorphism& phi, double rho);
/// cov_formula / lambda.
CovarianceMatrix2 joint_matrix(const FiniteMeasure& mu, const Homomorphism& phi, double rho, double lambda);

struct EllipseCheck {
  CovarianceMatrix2 empirical;
  CovarianceMatrix2 predicted;
  double discrepancy = 0.0;          // operator norm of the difference
  double offdiag_half_width = 0.0;   // 95% CI half-width of the empirical xy
  std::size_t samples = 0;
};

/// (phi(prefix_t(w1)), phi(prefix_t(w2))) / sqrt(t) for one pair.
std::array<double, 2> pair_winding_point(const TrajectoryPair& pair, const Homomorphism& phi, std::size_t t,
                                         double lambda, double guard = kDefaultGuard);

/// Empirical covariance of normalized pair windings against
/// joint_matrix(mu, phi, rho, lambda).
EllipseCheck joint_ellipse_check(const FiniteMeasure& mu, const Homomorphism& phi, double rho, double lambda,
                                 std::span<const std::array<double, 2>> points);

// ---------------------------------------------------------------------------
// Perturbation-robust separation

/// Parameters of the prefix-correlation discriminator at one n.
struct Discriminator {
  std::size_t prefix_length = 0;       // floor((lambda - alpha) n / 2)
  std::size_t perturbation = 0;        // floor(alpha n)
  std::vector<std::size_t> scales;     // t_j = floor(L 2^-j), j = 0..k-1, then 0
  double threshold = 0.0;              // midpoint of 1 - rho and 1 - rho'

  /// k = 0 picks the scale count reaching t = 1: bit_width(L).
  static Discriminator make(double lambda, double alpha, std::size_t n, std::size_t k, double rho, double rho_prime);

  /// Endpoints whose prefixes a perturbation of size `perturbation` could
  /// alter: min |z_i| < prefix_length + perturbation.
  bool is_short(const ElementPair& z) const;
  /// The only data the discriminator reads: the length-L prefixes.
  std::pair<std::vector<Letter>, std::vector<Letter>> inputs(const ElementPair& z) const;
  /// Correlation of normalized winding increments across the dyadic scales.
  double correlation(const Homomorphism& phi, const ElementPair& z) const;
  /// True when the correlation exceeds the threshold.
  bool decide(const Homomorphism& phi, const ElementPair& z) const;
};

struct SeparationLowerBound {
  double rho = 0.0;
  double rho_prime = 0.0;
  double alpha = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> scales;
  double threshold = 0.0;
  double bound = 0.0;        // clamped to [0, 1]
  double raw = 0.0;          // before the confidence correction
  double correction = 0.0;   // Hoeffding half-width
  double confidence = 0.95;
  std::size_t samples = 0;
  double p_decide_rho = 0.0;        // fraction with D = 1 under pi^rho
  double p_decide_rho_prime = 0.0;  // fraction with D = 1 under pi^rho'
  double p_short_rho = 0.0;
  double p_short_rho_prime = 0.0;
};

/// Empirical lower bound on U^{alpha n}(pi^rho_n, pi^rho'_n), valid at the
/// stated confidence. Free backend only.
///
/// With B = {D = 1}, every non-short point of B is at distance > alpha n
/// from the complement of B and vice versa, so
///   U >= P_rho(D = 1, not short) - P_rho'(D = 1 or short),
/// and symmetrically with the roles swapped. The larger empirical value is
/// reduced by sqrt(log(2 / (1 - confidence)) / m), a Hoeffding bound with a
/// union over the two orientations. Samples for a given rho depend only on
/// (seed, rho), so rho == rho' yields a bound of exactly 0.
SeparationLowerBound separation_lower_bound(const MarkedGroup& group, const FiniteMeasure& mu,
                                            const Homomorphism& phi, double rho, double rho_prime, double alpha,
                                            std::size_t n, std::size_t scales, std::size_t samples,
                                            std::uint64_t seed, double lambda, double confidence = 0.95,
                                            unsigned workers = 1);

// ---------------------------------------------------------------------------
// Entropy

enum class EntropyMethod { Exact, Sampled };

struct EntropyEstimate {
  double rho = 0.0;
  std::vector<int> grid;
  std::vector<double> h;  // h(n) = H(pi^rho_n) / n per grid point
  double h_inf = 0.0;     // intercept of the fit h(n) = h_inf + c / n
  double slope = 0.0;     // c
  std::optional<double> dimension;  // h_inf / lambda when lambda is given
};

struct EntropyOptions {
  EntropyMethod method = EntropyMethod::Exact;
  std::size_t samples = 10000;  // sampled method
  std::uint64_t seed = 0;       // sampled method
  std::optional<double> lambda;
  EngineOptions engine;
};

/// Least-squares fit of h(n) = h_inf + c / n. Needs >= 3 points.
std::pair<double, double> fit_inverse_n(std::span<const int> grid, std::span<const double> h);

EntropyEstimate estimate_entropy(const MarkedGroup& group, const FiniteMeasure& mu, double rho,
                                 std::span<const int> grid, const EntropyOptions& options = {});
/// Same estimator for the single walk mu.
EntropyEstimate estimate_single_entropy(const MarkedGroup& group, const FiniteMeasure& mu, std::span<const int> grid,
                                        const EntropyOptions& options = {});

}  // namespace noisewalk

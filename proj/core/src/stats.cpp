#include "noisewalk/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "noisewalk/error.hpp"
#include "noisewalk/numerics.hpp"
#include "noisewalk/parallel.hpp"

namespace noisewalk {

namespace {

double as_double(std::size_t x) { return static_cast<double>(x); }

// phi of every prefix of a word: out[t] = phi(word[0..t)).
std::vector<double> prefix_windings(const Homomorphism& phi, std::span<const Letter> word, std::size_t last) {
  std::vector<double> out(last + 1, 0.0);
  for (std::size_t t = 0; t < last; ++t) out[t + 1] = out[t] + phi.weight(word[t]);
  return out;
}

void check_ray_time(std::size_t t, const Trajectory& trajectory, double lambda, double guard) {
  if (t > max_ray_time(lambda, trajectory.steps(), guard))
    throw DomainError("ray time " + std::to_string(t) + " beyond the guarded window of a horizon-" +
                      std::to_string(trajectory.steps()) + " trajectory");
  if (t > trajectory.endpoint().size())
    throw HorizonExhaustedError("endpoint shorter than the requested ray time " + std::to_string(t));
}

}  // namespace

// ---------------------------------------------------------------------------

SpeedEstimate estimate_speed(const MarkedGroup& group, const FiniteMeasure& mu, std::size_t steps,
                             std::size_t trajectories, std::uint64_t seed, unsigned workers) {
  if (steps < 100 || trajectories < 10) throw DomainError("speed estimate needs steps >= 100 and trajectories >= 10");
  const WalkSampler sampler(group, mu);
  auto lengths = parallel_map(trajectories, workers, [&](std::size_t i) {
    const Trajectory w = sampler(steps, SeedRecord{seed, i});
    return std::vector<std::uint32_t>(w.lengths().begin(), w.lengths().end());
  });

  std::vector<double> ratios(trajectories);
  for (std::size_t i = 0; i < trajectories; ++i) ratios[i] = as_double(lengths[i][steps]) / as_double(steps);

  SpeedEstimate est;
  est.steps = steps;
  est.trajectories = trajectories;
  est.lambda = mean(ratios);
  est.sample_sd = std::sqrt(sample_variance(ratios));
  est.half_width = 1.96 * est.sample_sd / std::sqrt(as_double(trajectories));
  est.degenerate = est.sample_sd == 0.0;

  const std::size_t first = std::max<std::size_t>(3, steps / 16);
  if (first <= steps) {
    std::vector<double> spreads(trajectories);
    for (std::size_t i = 0; i < trajectories; ++i) {
      double hi = -INFINITY, lo = INFINITY;
      for (std::size_t t = first; t <= steps; ++t) {
        const double v = (as_double(lengths[i][t]) - est.lambda * as_double(t)) / lil_scale(as_double(t));
        hi = std::max(hi, v);
        lo = std::min(lo, v);
      }
      spreads[i] = 0.5 * (hi - lo);
    }
    est.sigma = median(spreads);
  }
  return est;
}

std::size_t stopping_time(const Trajectory& trajectory, double lambda, std::size_t n) {
  const double level = lambda * as_double(n);
  const auto lengths = trajectory.lengths();
  for (std::size_t k = 1; k < lengths.size(); ++k)
    if (as_double(lengths[k]) >= level) return k;
  throw HorizonExhaustedError("level " + std::to_string(level) + " not reached within " +
                              std::to_string(trajectory.steps()) + " steps");
}

// ---------------------------------------------------------------------------

std::vector<double> WindingSeries::normalized() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = as_double(times[i]);
    switch (mode) {
      case Normalization::None: out[i] = values[i]; break;
      case Normalization::Sqrt: out[i] = t > 0 ? values[i] / std::sqrt(t) : 0.0; break;
      case Normalization::Lil: out[i] = values[i] / lil_scale(t); break;
    }
  }
  return out;
}

WindingSeries WindingSeries::with_mode(Normalization m) const {
  WindingSeries out = *this;
  out.mode = m;
  return out;
}

WindingSeries WindingSeries::scaled(double c) const {
  WindingSeries out = *this;
  for (double& v : out.values) v *= c;
  return out;
}

std::size_t max_ray_time(double lambda, std::size_t horizon, double guard) {
  if (!(guard >= 0.0 && guard < 1.0)) throw DomainError("ray guard must lie in [0, 1)");
  if (!(lambda > 0.0)) throw DomainError("ray windows need a positive speed");
  return static_cast<std::size_t>(std::floor((1.0 - guard) * lambda * as_double(horizon)));
}

std::size_t horizon_for_ray_time(double lambda, std::size_t t, double guard) {
  auto n = static_cast<std::size_t>(std::ceil(as_double(t) / ((1.0 - guard) * lambda)));
  while (max_ray_time(lambda, n, guard) < t) ++n;
  return std::max<std::size_t>(n, 1);
}

WindingSeries ray_winding(const Trajectory& trajectory, const Homomorphism& phi, std::span<const std::size_t> times,
                          double lambda, double guard) {
  std::size_t last = 0;
  for (std::size_t t : times) {
    check_ray_time(t, trajectory, lambda, guard);
    last = std::max(last, t);
  }
  const auto prefix = prefix_windings(phi, trajectory.endpoint().letters(), last);
  WindingSeries out;
  out.times.assign(times.begin(), times.end());
  for (std::size_t t : times) out.values.push_back(prefix[t]);
  return out;
}

WindingSeries full_ray_winding(const Trajectory& trajectory, const Homomorphism& phi, std::size_t last,
                               double lambda, double guard) {
  check_ray_time(last, trajectory, lambda, guard);
  WindingSeries out;
  out.values = prefix_windings(phi, trajectory.endpoint().letters(), last);
  out.times.resize(last + 1);
  for (std::size_t t = 0; t <= last; ++t) out.times[t] = t;
  return out;
}

double marginal_gap(const FiniteMeasure& mu, const Trajectory& trajectory, const Homomorphism& phi, double lambda,
                    std::size_t n, double guard) {
  require_centered(mu, phi);
  if (n < 3) throw DomainError("marginal gap needs n >= 3");
  if (n > trajectory.steps()) throw DomainError("marginal gap beyond the trajectory horizon");
  const auto t = static_cast<std::size_t>(std::floor(lambda * as_double(n)));
  check_ray_time(t, trajectory, lambda, guard);
  const double ray = phi.apply(trajectory.endpoint().letters().first(t));
  double walk = 0.0;
  for (std::size_t k = 1; k <= n; ++k) walk += phi(trajectory.increment(k));
  const double nd = as_double(n);
  return std::abs(ray - walk) / std::sqrt(nd * std::log(std::log(nd)));
}

double winding_mean(const FiniteMeasure& mu, const Homomorphism& phi) {
  std::vector<double> terms;
  for (const auto& [g, p] : mu.atoms()) terms.push_back(p * phi(g));
  return pairwise_sum(terms);
}

double winding_variance(const FiniteMeasure& mu, const Homomorphism& phi) {
  const double m = winding_mean(mu, phi);
  std::vector<double> terms;
  for (const auto& [g, p] : mu.atoms()) terms.push_back(p * (phi(g) - m) * (phi(g) - m));
  return pairwise_sum(terms);
}

void require_centered(const FiniteMeasure& mu, const Homomorphism& phi) {
  const double m = winding_mean(mu, phi);
  if (std::abs(m) > kCenteringTolerance)
    throw HypothesisError("winding is not centered: E phi = " + std::to_string(m));
}

KsResult clt_check(std::span<const double> samples, double kappa2) {
  if (samples.empty()) throw DomainError("KS statistic of an empty sample");
  if (kappa2 < 0.0) throw DomainError("negative limit variance");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double m = as_double(xs.size());
  KsResult res;
  if (kappa2 == 0.0) {
    res.degenerate = true;
    const auto neg = std::lower_bound(xs.begin(), xs.end(), 0.0) - xs.begin();
    const auto pos = xs.end() - std::upper_bound(xs.begin(), xs.end(), 0.0);
    res.inconsistent = neg + pos > 0;
    res.statistic = std::max(as_double(static_cast<std::size_t>(neg)), as_double(static_cast<std::size_t>(pos))) / m;
    return res;
  }
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double f = normal_cdf(xs[i], kappa2);
    d = std::max({d, std::abs(f - as_double(i) / m), std::abs(f - as_double(j) / m)});
    i = j;
  }
  res.statistic = d;
  return res;
}

LilExtremes lil_window(const WindingSeries& series, std::size_t first, std::size_t last) {
  if (first < 3) throw DomainError("LIL window must start at t >= 3");
  if (first > last) throw DomainError("empty LIL window");
  LilExtremes ext{-INFINITY, INFINITY};
  bool any = false;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const std::size_t t = series.times[i];
    if (t < first || t > last) continue;
    const double v = series.values[i] / lil_scale(as_double(t));
    ext.max = std::max(ext.max, v);
    ext.min = std::min(ext.min, v);
    any = true;
  }
  if (!any) throw DomainError("LIL window contains no series times");
  return ext;
}

// ---------------------------------------------------------------------------

std::array<double, 2> CovarianceMatrix2::eigenvalues() const {
  const double c = 0.5 * (xx + yy);
  const double r = std::hypot(0.5 * (xx - yy), xy);
  return {c - r, c + r};
}

double CovarianceMatrix2::operator_norm() const {
  const auto ev = eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

CovarianceMatrix2 CovarianceMatrix2::sqrt() const {
  // For a 2x2 PSD matrix: sqrt(M) = (M + s I) / t with s = sqrt(det), t = sqrt(tr + 2 s).
  const double det = std::max(0.0, xx * yy - xy * xy);
  const double s = std::sqrt(det);
  const double t = std::sqrt(std::max(0.0, xx + yy + 2.0 * s));
  if (t == 0.0) return {};
  return {(xx + s) / t, xy / t, (yy + s) / t};
}

CovarianceMatrix2 cov_formula(const FiniteMeasure& mu, const Homomorphism& phi, double rho) {
  require_centered(mu, phi);
  const PairMeasure pi = noisy_coupling(mu, rho);
  std::vector<double> ex, ey, exx, exy, eyy;
  for (const auto& a : pi.atoms()) {
    const double x = phi(a.pair.first), y = phi(a.pair.second);
    ex.push_back(a.mass * x);
    ey.push_back(a.mass * y);
    exx.push_back(a.mass * x * x);
    exy.push_back(a.mass * x * y);
    eyy.push_back(a.mass * y * y);
  }
  const double mx = pairwise_sum(ex), my = pairwise_sum(ey);
  return {pairwise_sum(exx) - mx * mx, pairwise_sum(exy) - mx * my, pairwise_sum(eyy) - my * my};
}

CovarianceMatrix2 joint_matrix(const FiniteMeasure& mu, const Homomorphism& phi, double rho, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("joint matrix needs a positive speed");
  return cov_formula(mu, phi, rho) * (1.0 / lambda);
}

std::array<double, 2> pair_winding_point(const TrajectoryPair& pair, const Homomorphism& phi, std::size_t t,
                                         double lambda, double guard) {
  if (t == 0) throw DomainError("pair winding needs t >= 1");
  std::array<double, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const Trajectory& w = pair.coord(i);
    check_ray_time(t, w, lambda, guard);
    out[static_cast<std::size_t>(i)] = phi.apply(w.endpoint().letters().first(t)) / std::sqrt(as_double(t));
  }
  return out;
}

EllipseCheck joint_ellipse_check(const FiniteMeasure& mu, const Homomorphism& phi, double rho, double lambda,
                                 std::span<const std::array<double, 2>> points) {
  if (points.size() < 2) throw DomainError("ellipse check needs at least two points");
  const std::size_t m = points.size();
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = points[i][0];
    ys[i] = points[i][1];
  }
  const double mx = mean(xs), my = mean(ys);
  std::vector<double> pxx(m), pxy(m), pyy(m);
  for (std::size_t i = 0; i < m; ++i) {
    pxx[i] = (xs[i] - mx) * (xs[i] - mx);
    pxy[i] = (xs[i] - mx) * (ys[i] - my);
    pyy[i] = (ys[i] - my) * (ys[i] - my);
  }
  const double denom = as_double(m - 1);
  EllipseCheck out;
  out.samples = m;
  out.empirical = {pairwise_sum(pxx) / denom, pairwise_sum(pxy) / denom, pairwise_sum(pyy) / denom};
  out.predicted = joint_matrix(mu, phi, rho, lambda);
  out.discrepancy = (out.empirical - out.predicted).operator_norm();
  out.offdiag_half_width = 1.96 * std::sqrt(sample_variance(pxy) / as_double(m));
  return out;
}

// ---------------------------------------------------------------------------

Discriminator Discriminator::make(double lambda, double alpha, std::size_t n, std::size_t k, double rho,
                                  double rho_prime) {
  if (alpha < 0.0) throw DomainError("perturbation fraction must be non-negative");
  Discriminator d;
  const double nd = as_double(n);
  d.prefix_length = static_cast<std::size_t>(std::floor(std::max(0.0, (lambda - alpha) * nd / 2.0)));
  d.perturbation = static_cast<std::size_t>(std::floor(alpha * nd));
  if (k == 0) k = std::max<std::size_t>(1, static_cast<std::size_t>(std::bit_width(d.prefix_length)));
  for (std::size_t j = 0; j < k; ++j) d.scales.push_back(j < 64 ? d.prefix_length >> j : 0);
  d.scales.push_back(0);
  d.threshold = 0.5 * ((1.0 - rho) + (1.0 - rho_prime));
  return d;
}

bool Discriminator::is_short(const ElementPair& z) const {
  return std::min(z.first.size(), z.second.size()) < prefix_length + perturbation;
}

std::pair<std::vector<Letter>, std::vector<Letter>> Discriminator::inputs(const ElementPair& z) const {
  auto cut = [&](const GroupElement& x) {
    const auto l = x.letters();
    return std::vector<Letter>(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(std::min(prefix_length, l.size())));
  };
  return {cut(z.first), cut(z.second)};
}

double Discriminator::correlation(const Homomorphism& phi, const ElementPair& z) const {
  const auto [p1, p2] = inputs(z);
  const auto w1 = prefix_windings(phi, p1, p1.size());
  const auto w2 = prefix_windings(phi, p2, p2.size());
  double s12 = 0.0, s11 = 0.0, s22 = 0.0;
  for (std::size_t j = 0; j + 1 < scales.size(); ++j) {
    const std::size_t hi = scales[j], lo = scales[j + 1];
    if (hi == lo) continue;
    const double norm = std::sqrt(as_double(hi - lo));
    const double u1 = (w1[std::min(hi, p1.size())] - w1[std::min(lo, p1.size())]) / norm;
    const double u2 = (w2[std::min(hi, p2.size())] - w2[std::min(lo, p2.size())]) / norm;
    s12 += u1 * u2;
    s11 += u1 * u1;
    s22 += u2 * u2;
  }
  const double denom = std::sqrt(s11 * s22);
  return denom > 0.0 ? s12 / denom : 0.0;
}

bool Discriminator::decide(const Homomorphism& phi, const ElementPair& z) const {
  return correlation(phi, z) > threshold;
}

SeparationLowerBound separation_lower_bound(const MarkedGroup& group, const FiniteMeasure& mu,
                                            const Homomorphism& phi, double rho, double rho_prime, double alpha,
                                            std::size_t n, std::size_t scales, std::size_t samples,
                                            std::uint64_t seed, double lambda, double confidence,
                                            unsigned workers) {
  if (!group.is_free()) throw DomainError("separation lower bound is implemented for free groups only");
  if (!(alpha < lambda)) throw HypothesisError("perturbation fraction alpha must be below the speed");
  if (n < 1 || samples < 1) throw DomainError("separation lower bound needs n >= 1 and samples >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");

  const Discriminator disc = Discriminator::make(lambda, alpha, n, scales, rho, rho_prime);

  struct Outcome {
    bool decide = false;
    bool is_short = false;
  };
  auto run = [&](double r) {
    const PairSampler sampler(group, noisy_coupling(mu, r));
    const std::uint64_t stream = derive_seed(seed, std::bit_cast<std::uint64_t>(r));
    return parallel_map(samples, workers, [&](std::size_t i) {
      const TrajectoryPair w = sampler(n, SeedRecord{stream, i});
      const ElementPair z{w.first.endpoint(), w.second.endpoint()};
      return Outcome{disc.decide(phi, z), disc.is_short(z)};
    });
  };
  const auto a = run(rho);
  const auto b = run(rho_prime);

  std::size_t a_d = 0, a_short = 0, a_keep_d = 0, a_keep_nd = 0;
  std::size_t b_d = 0, b_short = 0, b_keep_d = 0, b_keep_nd = 0;
  for (const auto& o : a) {
    a_d += o.decide;
    a_short += o.is_short;
    a_keep_d += o.decide && !o.is_short;
    a_keep_nd += !o.decide && !o.is_short;
  }
  for (const auto& o : b) {
    b_d += o.decide;
    b_short += o.is_short;
    b_keep_d += o.decide && !o.is_short;
    b_keep_nd += !o.decide && !o.is_short;
  }
  const double m = as_double(samples);
  // P(D or short) = 1 - P(not D and not short). Swapping the roles of the
  // set and its complement gives the same two expressions.
  const double high_rho = (as_double(a_keep_d) + as_double(b_keep_nd) - m) / m;
  const double high_rho_prime = (as_double(b_keep_d) + as_double(a_keep_nd) - m) / m;

  SeparationLowerBound out;
  out.rho = rho;
  out.rho_prime = rho_prime;
  out.alpha = alpha;
  out.n = n;
  out.scales = disc.scales;
  out.threshold = disc.threshold;
  out.confidence = confidence;
  out.samples = samples;
  out.p_decide_rho = as_double(a_d) / m;
  out.p_decide_rho_prime = as_double(b_d) / m;
  out.p_short_rho = as_double(a_short) / m;
  out.p_short_rho_prime = as_double(b_short) / m;
  out.raw = std::max(high_rho, high_rho_prime);
  out.correction = std::sqrt(std::log(2.0 / (1.0 - confidence)) / m);
  out.bound = std::clamp(out.raw - out.correction, 0.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------

std::pair<double, double> fit_inverse_n(std::span<const int> grid, std::span<const double> h) {
  if (grid.size() != h.size()) throw DomainError("fit needs one value per grid point");
  if (grid.size() < 3) throw DomainError("fit needs at least three grid points");
  std::vector<double> xs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw DomainError("grid points must be positive");
    xs[i] = 1.0 / grid[i];
  }
  const double mx = mean(xs), my = mean(h);
  std::vector<double> sxy(xs.size()), sxx(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy[i] = (xs[i] - mx) * (h[i] - my);
    sxx[i] = (xs[i] - mx) * (xs[i] - mx);
  }
  const double vxx = pairwise_sum(sxx);
  if (vxx == 0.0) throw DomainError("fit needs distinct grid points");
  const double slope = pairwise_sum(sxy) / vxx;
  return {my - slope * mx, slope};
}

namespace {

void check_grid(std::span<const int> grid) {
  if (grid.empty()) throw DomainError("entropy grid is empty");
  for (int n : grid)
    if (n < 1) throw DomainError("entropy grid points must be >= 1");
}

void finish(EntropyEstimate& est, const EntropyOptions& options) {
  if (est.grid.size() >= 3) {
    const auto [h_inf, slope] = fit_inverse_n(est.grid, est.h);
    est.h_inf = h_inf;
    est.slope = slope;
  } else {
    est.h_inf = est.h.back();
  }
  if (options.lambda) {
    if (!(*options.lambda > 0.0)) throw DomainError("dimension needs a positive speed");
    est.dimension = est.h_inf / *options.lambda;
  }
}

// Plug-in -E log p(W_n) / n over samples drawn from the same law.
template <class Sampler, class Key>
double sampled_entropy(const ConvolutionTable& table, const Sampler& sampler, std::size_t n,
                       const EntropyOptions& options, Key key) {
  std::unordered_map<ElementPair, double, ElementPairHash> lookup;
  lookup.reserve(table.size());
  for (const auto& a : table.atoms()) lookup.emplace(ElementPair{table.element(a.first), table.element(a.second)}, a.mass);
  const std::uint64_t stream = derive_seed(options.seed, n);
  const auto logs = parallel_map(options.samples, options.engine.workers, [&](std::size_t i) {
    const auto it = lookup.find(key(sampler(n, SeedRecord{stream, i})));
    if (it == lookup.end()) throw Error("sampled endpoint missing from the exact table");
    return -std::log(it->second);
  });
  return mean(logs) / as_double(n);
}

}  // namespace

EntropyEstimate estimate_entropy(const MarkedGroup& group, const FiniteMeasure& mu, double rho,
                                 std::span<const int> grid, const EntropyOptions& options) {
  check_grid(grid);
  EntropyEstimate est;
  est.rho = rho;
  est.grid.assign(grid.begin(), grid.end());
  const PairMeasure pi = noisy_coupling(mu, rho);
  ExactEngine engine(group, options.engine);
  const auto tables = engine.convolve_pair_series(pi, *std::max_element(grid.begin(), grid.end()));
  const PairSampler sampler(group, pi);
  for (int n : grid) {
    const auto& table = tables[static_cast<std::size_t>(n)];
    if (options.method == EntropyMethod::Exact) {
      est.h.push_back(table_entropy(table) / n);
    } else {
      est.h.push_back(sampled_entropy(table, sampler, static_cast<std::size_t>(n), options, [](const TrajectoryPair& w) {
        return ElementPair{w.first.endpoint(), w.second.endpoint()};
      }));
    }
  }
  finish(est, options);
  return est;
}

EntropyEstimate estimate_single_entropy(const MarkedGroup& group, const FiniteMeasure& mu, std::span<const int> grid,
                                        const EntropyOptions& options) {
  check_grid(grid);
  EntropyEstimate est;
  est.rho = 0.0;
  est.grid.assign(grid.begin(), grid.end());
  ExactEngine engine(group, options.engine);
  const auto tables = engine.convolve_series(mu, *std::max_element(grid.begin(), grid.end()));
  const WalkSampler sampler(group, mu);
  for (int n : grid) {
    const auto& table = tables[static_cast<std::size_t>(n)];
    if (options.method == EntropyMethod::Exact) {
      est.h.push_back(table_entropy(table) / n);
    } else {
      est.h.push_back(sampled_entropy(table, sampler, static_cast<std::size_t>(n), options, [&](const Trajectory& w) {
        return ElementPair{w.endpoint(), group.identity()};
      }));
    }
  }
  finish(est, options);
  return est;
}

}  // namespace noisewalk

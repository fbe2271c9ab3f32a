#include <gtest/gtest.h>

#include <cmath>

#include "noisewalk/error.hpp"
#include "noisewalk/numerics.hpp"
#include "noisewalk/stats.hpp"
#include "support/oracles.hpp"

using namespace noisewalk;

namespace {

MarkedGroup f2() { return MarkedGroup::free_group(2); }
FiniteMeasure srw(const MarkedGroup& g) { return FiniteMeasure::uniform_generators(g); }

// Speed of SRW on F_k: away from the identity |w_n| moves up with
// probability (2k-1)/2k and down otherwise, so the drift is (k-1)/k.
double birth_death_speed(int k) { return (2.0 * k - 1) / (2.0 * k) - 1.0 / (2.0 * k); }

Trajectory dirac_walk(const MarkedGroup& g, std::size_t steps) {
  return sample_walk(g, FiniteMeasure::dirac(g.parse("a")), steps, SeedRecord{0, 0});
}

}  // namespace

TEST(Numerics, PairwiseSumAndMedian) {
  std::vector<double> xs(1001);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(xs), 500500.0);
  EXPECT_EQ(median(xs), 500.0);
  EXPECT_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_NEAR(sample_variance(std::vector<double>{1, 2, 3, 4}), 5.0 / 3.0, 1e-15);
  EXPECT_THROW(median(std::vector<double>{}), DomainError);
  EXPECT_THROW(lil_scale(2.0), DomainError);
  EXPECT_NEAR(normal_cdf(0.0, 4.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054, 1.0), 0.975, 1e-12);
}

TEST(EstimateSpeed, DiracIsExactlyOne) {
  const auto g = f2();
  const auto s = estimate_speed(g, FiniteMeasure::dirac(g.parse("a")), 100, 10, 1);
  EXPECT_EQ(s.lambda, 1.0);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.half_width, 0.0);
  EXPECT_THROW(estimate_speed(g, srw(g), 99, 10, 1), DomainError);
}

TEST(EstimateSpeed, MatchesBirthDeathDrift) {
  for (int k : {2, 3}) {
    const auto g = MarkedGroup::free_group(k);
    const auto s = estimate_speed(g, srw(g), 2000, 200, 40 + static_cast<unsigned>(k));
    EXPECT_NEAR(s.lambda, birth_death_speed(k), 0.01) << "k=" << k;
    EXPECT_FALSE(s.degenerate);
    EXPECT_GT(s.sigma, 0.0);
  }
}

TEST(EstimateSpeed, StableUnderDoublingAndWorkers) {
  const auto g = f2();
  const auto a = estimate_speed(g, srw(g), 1000, 200, 5);
  const auto b = estimate_speed(g, srw(g), 2000, 200, 5);
  EXPECT_NEAR(a.lambda, b.lambda, a.half_width + b.half_width);
  const auto c = estimate_speed(g, srw(g), 1000, 200, 5, 4);
  EXPECT_EQ(a.lambda, c.lambda);
  EXPECT_EQ(a.sigma, c.sigma);
  const auto d = estimate_speed(g, srw(g), 1000, 800, 5);
  EXPECT_LT(d.half_width, a.half_width);
}

TEST(StoppingTime, DefinitionAndDirac) {
  const auto g = f2();
  EXPECT_EQ(stopping_time(dirac_walk(g, 50), 1.0, 20), 20u);
  const auto w = sample_walk(g, srw(g), 3000, SeedRecord{6, 2});
  for (std::size_t n : {10u, 100u, 1000u}) {
    const auto tau = stopping_time(w, 0.5, n);
    EXPECT_GE(static_cast<double>(w.length_at(tau)), 0.5 * static_cast<double>(n));
    EXPECT_LT(static_cast<double>(w.length_at(tau - 1)), 0.5 * static_cast<double>(n));
  }
  EXPECT_THROW(stopping_time(w, 0.5, 100000), HorizonExhaustedError);
}

TEST(StoppingTime, FluctuationsStayBounded) {
  const auto g = f2();
  const WalkSampler sampler(g, srw(g));
  std::vector<double> medians;
  for (std::size_t n : {256u, 1024u, 4096u, 16384u}) {
    std::vector<double> z;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto w = sampler(3 * n, SeedRecord{12, i});
      const double tau = static_cast<double>(stopping_time(w, 0.5, n));
      const double nd = static_cast<double>(n);
      z.push_back(std::abs(tau - nd) / std::sqrt(nd * std::log(std::log(nd))));
    }
    medians.push_back(median(z));
  }
  for (double m : medians) EXPECT_LT(m, 3.0);
}

TEST(RayWinding, DiracAndZeroWeights) {
  const auto g = f2();
  const auto w = dirac_walk(g, 100);
  const Homomorphism phi(g, {2.5, 0.0});
  const std::vector<std::size_t> times{1, 10, 50, 80};
  const auto series = ray_winding(w, phi, times, 1.0);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_EQ(series.values[i], 2.5 * static_cast<double>(times[i]));
  const auto zero = ray_winding(w, Homomorphism(g, {0.0, 0.0}), times, 1.0);
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(ray_winding(w, phi, std::vector<std::size_t>{81}, 1.0), DomainError);
}

TEST(RayWinding, PrefixesStabilize) {
  const auto g = f2();
  const auto mu = srw(g);
  const WalkSampler sampler(g, mu);
  const std::size_t n = 2000;
  const std::size_t t = max_ray_time(0.5, n);
  std::size_t agree = 0;
  const std::size_t m = 500;
  for (std::size_t i = 0; i < m; ++i) {
    const auto w = sampler(2 * n, SeedRecord{13, i});
    const auto early = w.position(g, n);
    if (early.size() < t) continue;
    agree += g.geodesic_prefix(early, t) == g.geodesic_prefix(w.endpoint(), t);
  }
  EXPECT_GE(static_cast<double>(agree), 0.99 * m);
}

TEST(RayWinding, HorizonHelpers) {
  for (std::size_t t : {1u, 7u, 100u, 2048u, 65536u}) {
    const auto n = horizon_for_ray_time(0.5, t);
    EXPECT_GE(max_ray_time(0.5, n), t);
    EXPECT_LT(max_ray_time(0.5, n - 1), t);
  }
}

TEST(WindingSeries, Normalization) {
  WindingSeries s{{4, 16, 100}, {2.0, -4.0, 10.0}, Normalization::None};
  EXPECT_EQ(s.normalized(), s.values);
  const auto sq = s.with_mode(Normalization::Sqrt).normalized();
  EXPECT_EQ(sq, (std::vector<double>{1.0, -1.0, 1.0}));
  const auto lil = s.with_mode(Normalization::Lil).normalized();
  EXPECT_NEAR(lil[2], 10.0 / std::sqrt(200.0 * std::log(std::log(100.0))), 1e-15);
}

TEST(MarginalGap, GuardsAndCoupledPairs) {
  const auto g = f2();
  const auto mu = srw(g);
  const Homomorphism phi(g, {1.0, 0.0});
  const auto pair = resampling_sampler(g, mu, 0.0, 800, SeedRecord{14, 0});
  EXPECT_EQ(marginal_gap(mu, pair.first, phi, 0.5, 400), marginal_gap(mu, pair.second, phi, 0.5, 400));
  EXPECT_THROW(marginal_gap(mu, pair.first, phi, 0.5, 2), DomainError);
  const FiniteMeasure drift({{g.parse("a"), 0.75}, {g.parse("a'"), 0.25}});
  EXPECT_THROW(marginal_gap(drift, pair.first, phi, 0.5, 400), HypothesisError);
}

TEST(WindingMoments, SimpleRandomWalk) {
  const auto g = f2();
  const Homomorphism phi(g, {1.0, 0.0});
  EXPECT_EQ(winding_mean(srw(g), phi), 0.0);
  EXPECT_EQ(winding_variance(srw(g), phi), 0.5);
  EXPECT_NO_THROW(require_centered(srw(g), phi));
  EXPECT_THROW(require_centered(FiniteMeasure::dirac(g.parse("a")), phi), HypothesisError);
}

TEST(CltCheck, DegenerateAndExact) {
  const std::vector<double> zeros(100, 0.0);
  const auto z = clt_check(zeros, 0.0);
  EXPECT_EQ(z.statistic, 0.0);
  EXPECT_TRUE(z.degenerate);
  EXPECT_FALSE(z.inconsistent);
  const auto bad = clt_check(std::vector<double>{0.0, 1.0}, 0.0);
  EXPECT_TRUE(bad.inconsistent);
  EXPECT_EQ(bad.statistic, 0.5);

  // One sample at 0: the empirical CDF jumps from 0 to 1 where Phi = 1/2.
  EXPECT_NEAR(clt_check(std::vector<double>{0.0}, 1.0).statistic, 0.5, 1e-15);
  // Ties: four copies of one value behave like a single jump of size 1.
  EXPECT_NEAR(clt_check(std::vector<double>{0.0, 0.0, 0.0, 0.0}, 1.0).statistic, 0.5, 1e-15);
  // Quartiles of N(0,1): the largest gap is 1/4 at either end.
  std::vector<double> q{-0.6744897501960817, 0.0, 0.6744897501960817};
  const double m = 3.0;
  const auto r = clt_check(q, 1.0);
  EXPECT_NEAR(r.statistic, std::max({0.25, 0.5 - 1.0 / m, 1.0 - 0.75}), 1e-12);
}

TEST(CltCheck, SimpleRandomWalkRay) {
  const auto g = f2();
  const auto mu = srw(g);
  const Homomorphism phi(g, {1.0, 0.0});
  const double kappa2 = winding_variance(mu, phi) / 0.5;
  EXPECT_EQ(kappa2, 1.0);
  const std::size_t t = 1024;
  const auto horizon = horizon_for_ray_time(0.5, t);
  const WalkSampler sampler(g, mu);
  std::vector<double> xs;
  for (std::size_t i = 0; i < 4000; ++i) {
    const auto w = sampler(horizon, SeedRecord{15, i});
    xs.push_back(ray_winding(w, phi, std::vector<std::size_t>{t}, 0.5).values[0] / std::sqrt(static_cast<double>(t)));
  }
  const double ks = clt_check(xs, kappa2).statistic;
  EXPECT_LT(ks, 1.36 / std::sqrt(4000.0) + 0.01);
  std::vector<double> half(xs.begin(), xs.begin() + 2000);
  EXPECT_LT(ks, clt_check(half, kappa2).statistic + 1.36 / std::sqrt(2000.0));
}

TEST(LilWindow, ExtremesAndHomogeneity) {
  WindingSeries zero{{3, 10, 100}, {0.0, 0.0, 0.0}, Normalization::Lil};
  const auto z = lil_window(zero, 3, 100);
  EXPECT_EQ(z.max, 0.0);
  EXPECT_EQ(z.min, 0.0);
  EXPECT_THROW(lil_window(zero, 2, 100), DomainError);

  oracle::Gen gen(41);
  WindingSeries s;
  for (std::size_t t = 3; t < 500; ++t) {
    s.times.push_back(t);
    s.values.push_back(gen.uniform() - 0.5);
  }
  const auto e = lil_window(s, 10, 400);
  for (double c : {2.0, 0.5, 3.0}) {
    const auto f = lil_window(s.scaled(c), 10, 400);
    EXPECT_DOUBLE_EQ(f.max, c * e.max);
    EXPECT_DOUBLE_EQ(f.min, c * e.min);
  }
  const auto neg = lil_window(s.scaled(-1.0), 10, 400);
  EXPECT_EQ(neg.max, -e.min);
}

TEST(CovFormula, ClosedFormAgainstEnumeration) {
  const auto g = f2();
  const auto mu = srw(g);
  const Homomorphism phi(g, {1.0, 0.0});
  const double var = winding_variance(mu, phi);
  for (double rho : {0.0, 0.25, 0.5, 1.0}) {
    const auto c = cov_formula(mu, phi, rho);
    EXPECT_NEAR(c.xx, var, 1e-15);
    EXPECT_NEAR(c.yy, var, 1e-15);
    EXPECT_NEAR(c.xy, var * (1 - rho), 1e-15);
  }
  const auto half = cov_formula(mu, phi, 0.5);
  EXPECT_NEAR(half.xx, 0.5, 1e-15);
  EXPECT_NEAR(half.xy, 0.25, 1e-15);
  const auto one = cov_formula(mu, phi, 1.0);
  EXPECT_NEAR(one.xy, 0.0, 1e-15);
  const auto zero = cov_formula(mu, phi, 0.0);
  EXPECT_NEAR(zero.eigenvalues()[0], 0.0, 1e-15);
  const auto a = joint_matrix(mu, phi, 0.5, 0.5);
  EXPECT_NEAR(a.xx, 1.0, 1e-15);
  EXPECT_THROW(cov_formula(FiniteMeasure::dirac(g.parse("a")), phi, 0.5), HypothesisError);
}

TEST(CovFormula, RandomSymmetricMeasures) {
  const auto g = f2();
  oracle::Gen gen(42);
  for (int t = 0; t < 50; ++t) {
    // Symmetrize a random measure so every phi is centered.
    const auto base = gen.measure(g, gen.uniform_int(1, 4), 3);
    std::vector<FiniteMeasure::Atom> atoms;
    for (const auto& [x, p] : base.atoms()) {
      atoms.emplace_back(x, p / 2);
      atoms.emplace_back(g.inverse(x), p / 2);
    }
    const FiniteMeasure mu(atoms);
    const Homomorphism phi(g, {gen.uniform() - 0.5, gen.uniform() - 0.5});
    const double var = winding_variance(mu, phi);
    const double r1 = gen.uniform(), r2 = gen.uniform();
    const auto c1 = cov_formula(mu, phi, r1), c2 = cov_formula(mu, phi, r2);
    EXPECT_NEAR(c1.xy - c2.xy, var * (r2 - r1), 1e-12);
    EXPECT_NEAR(c1.xx, c1.yy, 1e-15);
    EXPECT_GE(c1.eigenvalues()[0], -1e-12);
    if (var > 1e-9 && r1 > 1e-6) EXPECT_GT(c1.eigenvalues()[0], 0.0);
  }
}

TEST(CovarianceMatrix2, SqrtAndNorm) {
  const CovarianceMatrix2 m{0.5, 0.25, 0.5};
  const auto r = m.sqrt();
  EXPECT_NEAR(r.xx * r.xx + r.xy * r.xy, m.xx, 1e-15);
  EXPECT_NEAR(r.xx * r.xy + r.xy * r.yy, m.xy, 1e-15);
  EXPECT_NEAR(m.operator_norm(), 0.75, 1e-15);
  EXPECT_NEAR((CovarianceMatrix2{1, 0, -3}).operator_norm(), 3.0, 1e-15);
}

TEST(JointEllipse, ExtremeCouplings) {
  const auto g = f2();
  const auto mu = srw(g);
  const Homomorphism phi(g, {1.0, 0.0});
  const std::size_t t = 256;
  // Twice the minimal horizon so no endpoint falls short of t.
  const auto horizon = 2 * horizon_for_ray_time(0.5, t);
  for (double rho : {0.0, 0.5, 1.0}) {
    const ResamplingSampler sampler(g, mu, rho);
    std::vector<std::array<double, 2>> points;
    for (std::size_t i = 0; i < 3000; ++i)
      points.push_back(pair_winding_point(sampler(horizon, SeedRecord{16, i}), phi, t, 0.5));
    const auto check = joint_ellipse_check(mu, phi, rho, 0.5, points);
    if (rho == 0.0) {
      EXPECT_EQ(check.empirical.xy, check.empirical.xx);
      EXPECT_EQ(check.empirical.xx, check.empirical.yy);
    }
    if (rho == 1.0) EXPECT_LE(std::abs(check.empirical.xy), check.offdiag_half_width * 1.5);
    EXPECT_LT(check.discrepancy, 0.15) << "rho=" << rho;
  }
}

TEST(Discriminator, Schedule) {
  const auto d = Discriminator::make(0.5, 0.25, 1024, 3, 0.0, 1.0);
  EXPECT_EQ(d.prefix_length, 128u);
  EXPECT_EQ(d.perturbation, 256u);
  EXPECT_EQ(d.scales, (std::vector<std::size_t>{128, 64, 32, 0}));
  EXPECT_EQ(d.threshold, 0.5);
  const auto a = Discriminator::make(0.5, 0.25, 1024, 0, 0.0, 1.0);
  EXPECT_EQ(a.scales.size(), 9u);
  EXPECT_EQ(a.scales[7], 1u);
}

TEST(Discriminator, IdenticalAndOppositePrefixes) {
  const auto g = f2();
  const Homomorphism phi(g, {1.0, 0.0});
  const auto d = Discriminator::make(0.5, 0.0, 64, 3, 0.0, 1.0);
  const auto x = g.parse("aab'aaba'a'bbaaabab'aa'b'baab'abaaa'b'ba");
  EXPECT_NEAR(d.correlation(phi, {x, x}), 1.0, 1e-15);
  EXPECT_TRUE(d.decide(phi, {x, x}));
  EXPECT_NEAR(d.correlation(phi, {x, g.inverse(g.inverse(x))}), 1.0, 1e-15);
  const Homomorphism flip(g, {1.0, 0.0});
  std::vector<Letter> neg(x.letters().begin(), x.letters().end());
  for (auto& l : neg)
    if (generator_of(l) == 0) l = inverse_letter(l);
  const auto y = g.element(neg);
  if (y.size() == x.size()) EXPECT_LT(d.correlation(flip, {x, y}), 0.0);
  EXPECT_EQ(d.correlation(phi, {g.identity(), x}), 0.0);
}

TEST(Discriminator, PerturbationsNeverChangeInputs) {
  const auto g = f2();
  const auto mu = srw(g);
  const std::size_t n = 256;
  const double alpha = 0.25;
  const auto d = Discriminator::make(0.5, alpha, n, 0, 0.0, 1.0);
  oracle::Gen gen(43);
  const PairSampler sampler(g, noisy_coupling(mu, 0.5));
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto w = sampler(n, SeedRecord{17, i});
    const ElementPair z{w.first.endpoint(), w.second.endpoint()};
    if (d.is_short(z)) continue;
    const auto before = d.inputs(z);
    const ElementPair moved{g.multiply(z.first, gen.element(g, static_cast<int>(d.perturbation))),
                            g.multiply(z.second, gen.element(g, static_cast<int>(d.perturbation)))};
    EXPECT_LE(pair_distance(g, z, moved), d.perturbation);
    EXPECT_EQ(d.inputs(moved), before);
    ++checked;
  }
  EXPECT_GT(checked, 900u);
}

TEST(SeparationLowerBound, EqualRhoIsZero) {
  const auto g = f2();
  const auto mu = srw(g);
  const Homomorphism phi(g, {1.0, 0.0});
  const auto b = separation_lower_bound(g, mu, phi, 0.4, 0.4, 0.25, 256, 0, 500, 3, 0.5);
  EXPECT_EQ(b.bound, 0.0);
  EXPECT_EQ(b.p_decide_rho, b.p_decide_rho_prime);
}

TEST(SeparationLowerBound, PreconditionsAndDeterminism) {
  const auto g = f2();
  const auto mu = srw(g);
  const Homomorphism phi(g, {1.0, 0.0});
  EXPECT_THROW(separation_lower_bound(g, mu, phi, 0.0, 1.0, 0.5, 256, 0, 10, 3, 0.5), HypothesisError);
  const auto s = MarkedGroup::presentation({"a", "b"}, {}, 2);
  EXPECT_THROW(separation_lower_bound(s, FiniteMeasure::uniform_generators(s), Homomorphism(s, {1, 0}), 0.0, 1.0,
                                      0.1, 4, 0, 10, 3, 0.5),
               DomainError);
  const auto a = separation_lower_bound(g, mu, phi, 0.0, 1.0, 0.25, 512, 8, 2000, 3, 0.5, 0.95, 1);
  const auto b = separation_lower_bound(g, mu, phi, 0.0, 1.0, 0.25, 512, 8, 2000, 3, 0.5, 0.95, 4);
  EXPECT_EQ(a.bound, b.bound);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_GT(a.bound, 0.5);
  EXPECT_NEAR(a.correction, std::sqrt(std::log(40.0) / 2000.0), 1e-15);
}

TEST(SeparationLowerBound, NeverExceedsExactSeparation) {
  // Small instances where L > 0 so the discriminator is not trivial.
  const auto g3 = MarkedGroup::free_group(3);
  const auto mu = srw(g3);
  const Homomorphism phi(g3, {1.0, -0.5, 0.25});
  const double lambda = 2.0 / 3.0;
  for (int n : {2, 3, 4}) {
    for (double alpha : {0.0, 0.1}) {
      const auto b = separation_lower_bound(g3, mu, phi, 0.0, 1.0, alpha, static_cast<std::size_t>(n), 1, 20000,
                                            19, lambda);
      ExactEngine e1(g3), e2(g3);
      const auto t1 = e1.convolve_pair_series(noisy_coupling(mu, 0.0), n)[static_cast<std::size_t>(n)];
      const auto t2 = e2.convolve_pair_series(noisy_coupling(mu, 1.0), n)[static_cast<std::size_t>(n)];
      const double exact = separation_U(g3, t1, t2, alpha * n);
      EXPECT_LE(b.bound, exact + 1e-12) << "n=" << n << " alpha=" << alpha;
      EXPECT_LE(b.raw, exact + 2.0 * b.correction) << "n=" << n << " alpha=" << alpha;
    }
  }
}

TEST(Entropy, FitRecoversLine) {
  const std::vector<int> grid{2, 3, 5, 8};
  std::vector<double> h;
  for (int n : grid) h.push_back(1.25 + 0.5 / n);
  const auto [hi, c] = fit_inverse_n(grid, h);
  EXPECT_NEAR(hi, 1.25, 1e-14);
  EXPECT_NEAR(c, 0.5, 1e-14);
  EXPECT_THROW(fit_inverse_n(std::vector<int>{2, 3}, std::vector<double>{1, 2}), DomainError);
}

TEST(Entropy, CouplingExtremes) {
  const auto g = f2();
  const auto mu = srw(g);
  const std::vector<int> grid{3, 4, 5};
  const auto single = estimate_single_entropy(g, mu, grid);
  const auto zero = estimate_entropy(g, mu, 0.0, grid);
  const auto half = estimate_entropy(g, mu, 0.5, grid);
  const auto one = estimate_entropy(g, mu, 1.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(zero.h[i], single.h[i], 1e-12);
    EXPECT_NEAR(one.h[i], 2.0 * single.h[i], 1e-12);
    EXPECT_GT(half.h[i], zero.h[i]);
    EXPECT_LT(half.h[i], one.h[i]);
    EXPECT_GE(half.h[i], 0.0);
    EXPECT_LE(half.h[i], std::log(16.0) + 1e-12);
  }
  EXPECT_NEAR(one.h_inf, 2.0 * zero.h_inf, 1e-9);
  const auto with_speed = estimate_entropy(g, mu, 0.5, grid, {.lambda = 0.5});
  ASSERT_TRUE(with_speed.dimension.has_value());
  EXPECT_NEAR(*with_speed.dimension, with_speed.h_inf / 0.5, 1e-15);
}

TEST(Entropy, SampledAgreesWithExact) {
  const auto g = f2();
  const auto mu = srw(g);
  const std::vector<int> grid{2, 3, 4};
  const auto exact = estimate_entropy(g, mu, 0.5, grid);
  EntropyOptions opts;
  opts.method = EntropyMethod::Sampled;
  opts.samples = 20000;
  opts.seed = 5;
  const auto sampled = estimate_entropy(g, mu, 0.5, grid, opts);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(sampled.h[i], exact.h[i], 0.03);
  const auto single = estimate_single_entropy(g, mu, grid, opts);
  const auto single_exact = estimate_single_entropy(g, mu, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(single.h[i], single_exact.h[i], 0.03);
}

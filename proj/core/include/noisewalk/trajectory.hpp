#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "noisewalk/group.hpp"
#include "noisewalk/measure.hpp"
#include "noisewalk/rng.hpp"

namespace noisewalk {

/// One sampled path w_0 = id, w_n = w_{n-1} * gamma_n for n = 1..N.
///
/// Increments are stored as indices into a shared alphabet. Word lengths
/// |w_n| and the endpoint w_N are kept; intermediate positions are
/// recomputed on demand by `position`.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(const MarkedGroup& group, std::shared_ptr<const std::vector<GroupElement>> alphabet,
             std::vector<std::uint32_t> increments);

  std::size_t steps() const { return increments_.size(); }
  const GroupElement& endpoint() const { return endpoint_; }
  std::size_t length_at(std::size_t n) const { return lengths_.at(n); }
  std::span<const std::uint32_t> lengths() const { return lengths_; }
  /// gamma_k for k = 1..N.
  const GroupElement& increment(std::size_t k) const { return (*alphabet_)[increments_.at(k - 1)]; }
  std::span<const std::uint32_t> increment_ids() const { return increments_; }
  const std::vector<GroupElement>& alphabet() const { return *alphabet_; }

  /// w_n, replayed from the increments.
  GroupElement position(const MarkedGroup& group, std::size_t n) const;
  /// phi(w_n) for n = 0..N.
  std::vector<double> winding_path(const Homomorphism& phi) const;

 private:
  std::shared_ptr<const std::vector<GroupElement>> alphabet_;
  std::vector<std::uint32_t> increments_;
  std::vector<std::uint32_t> lengths_;
  GroupElement endpoint_;
};

/// A sampled path of the coupled walk on pairs, with its seed record.
struct TrajectoryPair {
  Trajectory first;
  Trajectory second;
  SeedRecord seed;

  std::size_t steps() const { return first.steps(); }
  ElementPair increment(std::size_t k) const { return {first.increment(k), second.increment(k)}; }
  const Trajectory& coord(int i) const { return i == 0 ? first : second; }
};

/// Samples mu-walks; prepared once, then called per trajectory.
class WalkSampler {
 public:
  WalkSampler(const MarkedGroup& group, const FiniteMeasure& mu);
  Trajectory operator()(std::size_t steps, const SeedRecord& seed) const;

 private:
  MarkedGroup group_;
  std::shared_ptr<const std::vector<GroupElement>> alphabet_;
  AliasTable table_;
};

/// Samples walks with i.i.d. pair increments drawn from a PairMeasure.
class PairSampler {
 public:
  PairSampler(const MarkedGroup& group, const PairMeasure& pi);
  TrajectoryPair operator()(std::size_t steps, const SeedRecord& seed) const;

 private:
  MarkedGroup group_;
  std::shared_ptr<const std::vector<GroupElement>> alphabet_;
  std::vector<std::uint32_t> first_ids_, second_ids_;
  AliasTable table_;
};

/// Two-stage sampler: gamma ~ mu, then gamma' is a fresh mu draw with
/// probability rho and gamma otherwise.
class ResamplingSampler {
 public:
  ResamplingSampler(const MarkedGroup& group, const FiniteMeasure& mu, double rho);
  TrajectoryPair operator()(std::size_t steps, const SeedRecord& seed) const;

 private:
  MarkedGroup group_;
  std::shared_ptr<const std::vector<GroupElement>> alphabet_;
  AliasTable table_;
  double rho_;
};

Trajectory sample_walk(const MarkedGroup& group, const FiniteMeasure& mu, std::size_t steps,
                       const SeedRecord& seed);
TrajectoryPair sample_pair_trajectory(const MarkedGroup& group, const PairMeasure& pi, std::size_t steps,
                                      const SeedRecord& seed);
TrajectoryPair resampling_sampler(const MarkedGroup& group, const FiniteMeasure& mu, double rho,
                                  std::size_t steps, const SeedRecord& seed);

}  // namespace noisewalk

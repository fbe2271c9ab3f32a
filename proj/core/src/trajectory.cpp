#include "noisewalk/trajectory.hpp"

#include <map>

#include "noisewalk/error.hpp"

namespace noisewalk {

Trajectory::Trajectory(const MarkedGroup& group, std::shared_ptr<const std::vector<GroupElement>> alphabet,
                       std::vector<std::uint32_t> increments)
    : alphabet_(std::move(alphabet)), increments_(std::move(increments)) {
  lengths_.reserve(increments_.size() + 1);
  lengths_.push_back(0);
  for (std::uint32_t id : increments_) {
    group.multiply_in_place(endpoint_, alphabet_->at(id));
    lengths_.push_back(static_cast<std::uint32_t>(endpoint_.size()));
  }
}

GroupElement Trajectory::position(const MarkedGroup& group, std::size_t n) const {
  if (n > steps()) throw DomainError("position beyond the trajectory horizon");
  if (n == steps()) return endpoint_;
  GroupElement w;
  for (std::size_t k = 0; k < n; ++k) group.multiply_in_place(w, (*alphabet_)[increments_[k]]);
  return w;
}

std::vector<double> Trajectory::winding_path(const Homomorphism& phi) const {
  std::vector<double> weights(alphabet_->size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = phi((*alphabet_)[i]);
  std::vector<double> out(increments_.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments_.size(); ++k) out[k + 1] = out[k] + weights[increments_[k]];
  return out;
}

namespace {

/// Deduplicated alphabet in shortlex order plus a lookup function.
struct AlphabetBuilder {
  std::map<GroupElement, std::uint32_t, ShortlexLess> ids;

  void add(const GroupElement& x) { ids.emplace(x, 0); }
  std::shared_ptr<const std::vector<GroupElement>> finish() {
    auto out = std::make_shared<std::vector<GroupElement>>();
    for (auto& [x, id] : ids) {
      id = static_cast<std::uint32_t>(out->size());
      out->push_back(x);
    }
    return out;
  }
  std::uint32_t id(const GroupElement& x) const { return ids.at(x); }
};

}  // namespace

WalkSampler::WalkSampler(const MarkedGroup& group, const FiniteMeasure& mu)
    : group_(group), table_([&] {
        std::vector<double> w;
        for (const auto& a : mu.atoms()) w.push_back(a.second);
        return AliasTable(w);
      }()) {
  auto alphabet = std::make_shared<std::vector<GroupElement>>();
  for (const auto& a : mu.atoms()) alphabet->push_back(a.first);
  alphabet_ = std::move(alphabet);
}

Trajectory WalkSampler::operator()(std::size_t steps, const SeedRecord& seed) const {
  CounterRng rng(seed.substream_key());
  std::vector<std::uint32_t> inc(steps);
  for (auto& id : inc) id = static_cast<std::uint32_t>(table_.sample(rng));
  return Trajectory(group_, alphabet_, std::move(inc));
}

PairSampler::PairSampler(const MarkedGroup& group, const PairMeasure& pi)
    : group_(group), table_([&] {
        std::vector<double> w;
        for (const auto& a : pi.atoms()) w.push_back(a.mass);
        return AliasTable(w);
      }()) {
  AlphabetBuilder builder;
  for (const auto& a : pi.atoms()) {
    builder.add(a.pair.first);
    builder.add(a.pair.second);
  }
  alphabet_ = builder.finish();
  for (const auto& a : pi.atoms()) {
    first_ids_.push_back(builder.id(a.pair.first));
    second_ids_.push_back(builder.id(a.pair.second));
  }
}

TrajectoryPair PairSampler::operator()(std::size_t steps, const SeedRecord& seed) const {
  CounterRng rng(seed.substream_key());
  std::vector<std::uint32_t> a(steps), b(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto atom = table_.sample(rng);
    a[k] = first_ids_[atom];
    b[k] = second_ids_[atom];
  }
  return {Trajectory(group_, alphabet_, std::move(a)), Trajectory(group_, alphabet_, std::move(b)), seed};
}

ResamplingSampler::ResamplingSampler(const MarkedGroup& group, const FiniteMeasure& mu, double rho)
    : group_(group), table_([&] {
        std::vector<double> w;
        for (const auto& a : mu.atoms()) w.push_back(a.second);
        return AliasTable(w);
      }()),
      rho_(rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  auto alphabet = std::make_shared<std::vector<GroupElement>>();
  for (const auto& a : mu.atoms()) alphabet->push_back(a.first);
  alphabet_ = std::move(alphabet);
}

TrajectoryPair ResamplingSampler::operator()(std::size_t steps, const SeedRecord& seed) const {
  CounterRng rng(seed.substream_key());
  std::vector<std::uint32_t> a(steps), b(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    a[k] = static_cast<std::uint32_t>(table_.sample(rng));
    b[k] = rng.uniform() < rho_ ? static_cast<std::uint32_t>(table_.sample(rng)) : a[k];
  }
  return {Trajectory(group_, alphabet_, std::move(a)), Trajectory(group_, alphabet_, std::move(b)), seed};
}

Trajectory sample_walk(const MarkedGroup& group, const FiniteMeasure& mu, std::size_t steps,
                       const SeedRecord& seed) {
  return WalkSampler(group, mu)(steps, seed);
}

TrajectoryPair sample_pair_trajectory(const MarkedGroup& group, const PairMeasure& pi, std::size_t steps,
                                      const SeedRecord& seed) {
  if (steps < 1) throw DomainError("trajectory needs at least one step");
  return PairSampler(group, pi)(steps, seed);
}

TrajectoryPair resampling_sampler(const MarkedGroup& group, const FiniteMeasure& mu, double rho,
                                  std::size_t steps, const SeedRecord& seed) {
  if (steps < 1) throw DomainError("trajectory needs at least one step");
  return ResamplingSampler(group, mu, rho)(steps, seed);
}

}  // namespace noisewalk

#pragma once

#include <cstdint>
#include <vector>

namespace noisewalk {

/// Dinic's maximum flow on integer capacities.
///
/// Augmenting paths are searched iteratively, so arbitrarily long level
/// graphs are fine. Capacities must be non-negative; the total flow must fit
/// in int64.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : nodes_(nodes) {}

  /// Returns the edge id; its reverse edge is id ^ 1.
  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t capacity);
  std::int64_t solve(std::size_t source, std::size_t sink);
  /// Flow routed along an edge after solve().
  std::int64_t flow(std::size_t edge) const { return cap_[edge ^ 1U] - initial_reverse_[edge >> 1U]; }
  std::size_t edge_count() const { return to_.size() / 2; }

 private:
  bool build_levels(std::size_t source, std::size_t sink);

  std::size_t nodes_;
  std::vector<std::uint32_t> from_, to_;
  std::vector<std::int64_t> cap_;
  std::vector<std::int64_t> initial_reverse_;
  std::vector<std::uint32_t> offsets_, adjacency_;
  std::vector<std::int32_t> level_;
  std::vector<std::uint32_t> cursor_;
};

}  // namespace noisewalk

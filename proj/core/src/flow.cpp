#include "noisewalk/flow.hpp"

#include <algorithm>
#include <limits>

#include "noisewalk/error.hpp"

namespace noisewalk {

std::size_t MaxFlow::add_edge(std::size_t from, std::size_t to, std::int64_t capacity) {
  if (from >= nodes_ || to >= nodes_) throw DomainError("flow edge endpoint out of range");
  if (capacity < 0) throw DomainError("negative flow capacity");
  const std::size_t id = to_.size();
  from_.push_back(static_cast<std::uint32_t>(from));
  to_.push_back(static_cast<std::uint32_t>(to));
  cap_.push_back(capacity);
  from_.push_back(static_cast<std::uint32_t>(to));
  to_.push_back(static_cast<std::uint32_t>(from));
  cap_.push_back(0);
  initial_reverse_.push_back(0);
  return id;
}

bool MaxFlow::build_levels(std::size_t source, std::size_t sink) {
  level_.assign(nodes_, -1);
  std::vector<std::uint32_t> queue;
  queue.reserve(nodes_);
  queue.push_back(static_cast<std::uint32_t>(source));
  level_[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t v = queue[head];
    for (std::uint32_t i = offsets_[v]; i < offsets_[v + 1]; ++i) {
      const std::uint32_t e = adjacency_[i];
      const std::uint32_t w = to_[e];
      if (cap_[e] > 0 && level_[w] < 0) {
        level_[w] = level_[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return level_[sink] >= 0;
}

std::int64_t MaxFlow::solve(std::size_t source, std::size_t sink) {
  if (source == sink) throw DomainError("flow source equals sink");
  offsets_.assign(nodes_ + 1, 0);
  for (std::uint32_t f : from_) ++offsets_[f + 1];
  for (std::size_t v = 0; v < nodes_; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.assign(to_.size(), 0);
  {
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t e = 0; e < to_.size(); ++e) adjacency_[fill[from_[e]]++] = static_cast<std::uint32_t>(e);
  }
  for (std::size_t e = 0; e < initial_reverse_.size(); ++e) initial_reverse_[e] = cap_[2 * e + 1];

  std::int64_t total = 0;
  std::vector<std::uint32_t> path;
  while (build_levels(source, sink)) {
    cursor_.assign(offsets_.begin(), offsets_.end() - 1);
    path.clear();
    std::size_t v = source;
    for (;;) {
      if (v == sink) {
        std::int64_t push = std::numeric_limits<std::int64_t>::max();
        for (std::uint32_t e : path) push = std::min(push, cap_[e]);
        std::size_t first_saturated = path.size();
        for (std::size_t i = 0; i < path.size(); ++i) {
          cap_[path[i]] -= push;
          cap_[path[i] ^ 1U] += push;
          if (cap_[path[i]] == 0 && first_saturated == path.size()) first_saturated = i;
        }
        total += push;
        path.resize(first_saturated);
        v = path.empty() ? source : to_[path.back()];
        continue;
      }
      bool advanced = false;
      for (auto& c = cursor_[v]; c < offsets_[v + 1]; ++c) {
        const std::uint32_t e = adjacency_[c];
        if (cap_[e] > 0 && level_[to_[e]] == level_[v] + 1) {
          path.push_back(e);
          v = to_[e];
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      if (v == source) break;
      level_[v] = -1;
      const std::uint32_t back = path.back();
      path.pop_back();
      v = from_[back];
      ++cursor_[v];
    }
  }
  return total;
}

}  // namespace noisewalk

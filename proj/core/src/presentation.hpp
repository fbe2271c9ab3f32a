#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "noisewalk/group.hpp"

namespace noisewalk {

struct LetterWordHash {
  std::size_t operator()(const std::vector<Letter>& w) const noexcept;
};

/// Free reduction of an arbitrary word.
std::vector<Letter> free_reduce(std::span<const Letter> word);

/// Formal inverse of a word (reversed, letters inverted).
std::vector<Letter> invert_word(std::span<const Letter> word);

/// Dehn's algorithm: repeatedly replace a subword that is more than half of
/// a cyclic conjugate of a relator (or its inverse) by the shorter
/// complement. Returns the irreducible result.
std::vector<Letter> dehn_reduce(std::span<const Letter> word,
                                const std::vector<std::vector<Letter>>& symmetrized);

/// All cyclic permutations of the cyclically reduced relators and their
/// inverses, deduplicated.
std::vector<std::vector<Letter>> symmetrize_relators(const std::vector<std::vector<Letter>>& relators);

struct MarkedGroup::PresentationData {
  int radius = 0;
  int letter_count = 0;  // 2 * rank
  std::vector<std::vector<Letter>> relators;
  std::vector<std::vector<Letter>> symmetrized;
  /// Canonical (shortlex-least geodesic) words in shortlex order.
  std::vector<std::vector<Letter>> words;
  std::unordered_map<std::vector<Letter>, std::uint32_t, LetterWordHash> index;
  /// neighbor[id * letter_count + letter_rank(l)] = id of words[id] * l, or -1.
  std::vector<std::int32_t> neighbor;

  std::int32_t step(std::int32_t id, Letter l) const {
    return neighbor[static_cast<std::size_t>(id) * static_cast<std::size_t>(letter_count) +
                    static_cast<std::size_t>(letter_rank(l))];
  }
};

/// Breadth-first construction of the ball of the given radius.
std::shared_ptr<const MarkedGroup::PresentationData> build_presentation_ball(
    int rank, std::vector<std::vector<Letter>> relators, int radius);

}  // namespace noisewalk

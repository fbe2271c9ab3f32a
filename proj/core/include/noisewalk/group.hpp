#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace noisewalk {

/// Signed generator index: +(i+1) is generator i, -(i+1) its inverse.
using Letter = std::int8_t;

constexpr Letter letter_of(int generator, bool inverse = false) {
  return static_cast<Letter>(inverse ? -(generator + 1) : (generator + 1));
}
constexpr int generator_of(Letter l) { return (l > 0 ? l : -l) - 1; }
constexpr Letter inverse_letter(Letter l) { return static_cast<Letter>(-l); }

/// Position of a letter in the fixed letter order a < a' < b < b' < ...
constexpr int letter_rank(Letter l) { return 2 * generator_of(l) + (l < 0 ? 1 : 0); }

/// A group element stored as its canonical word.
///
/// For the free backend the canonical word is the freely reduced word; for
/// the presentation backend it is the shortlex-least geodesic word. Either
/// way the canonical word is a geodesic, so its size is the word length.
/// Elements are only meaningful together with the MarkedGroup that built
/// them.
class GroupElement {
 public:
  GroupElement() = default;
  /// `letters` must already be canonical; use MarkedGroup::element otherwise.
  explicit GroupElement(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  std::span<const Letter> letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  friend class MarkedGroup;
  std::vector<Letter> letters_;
};

/// Shortlex order on canonical words: shorter first, then lexicographic in
/// the letter order a < a' < b < b' < ...
std::strong_ordering shortlex_compare(const GroupElement& x, const GroupElement& y);

struct ShortlexLess {
  bool operator()(const GroupElement& x, const GroupElement& y) const {
    return shortlex_compare(x, y) < 0;
  }
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& x) const noexcept;
};

using ElementPair = std::pair<GroupElement, GroupElement>;

struct ElementPairHash {
  std::size_t operator()(const ElementPair& p) const noexcept;
};

/// Shortlex order on pairs, first coordinate major.
std::strong_ordering shortlex_compare(const ElementPair& x, const ElementPair& y);

enum class Backend { Free, Presentation };

/// A finitely generated group with a marked symmetric generating set.
///
/// Two backends share this interface. `free_group(k)` is exact: canonical
/// forms are reduced words, geodesics and Gromov products are exact.
/// `presentation(...)` precomputes the ball of radius R by breadth-first
/// search; equality of words is decided by Dehn's algorithm, which is exact
/// for Dehn presentations (for instance C'(1/6) small-cancellation groups
/// such as closed surface groups). Any query whose result lies beyond R
/// throws OutOfBallError.
///
/// Instances are immutable and cheap to copy.
class MarkedGroup {
 public:
  static MarkedGroup free_group(int rank, std::vector<std::string> names = {});
  static MarkedGroup presentation(std::vector<std::string> names,
                                  const std::vector<std::string>& relators, int radius);

  Backend backend() const;
  bool is_free() const { return backend() == Backend::Free; }
  int rank() const;
  /// Ball radius of the presentation backend; -1 for the free backend.
  int radius() const;
  const std::vector<std::string>& generator_names() const;
  /// Relators as letter words (empty for the free backend).
  const std::vector<std::vector<Letter>>& relators() const;

  GroupElement identity() const { return {}; }
  GroupElement generator(int i, bool inverse = false) const;
  /// Symmetric generating set in letter order a, a', b, b', ...
  std::vector<GroupElement> generating_set() const;

  /// Canonical element represented by an arbitrary letter word.
  GroupElement element(std::span<const Letter> word) const;
  GroupElement element(std::initializer_list<int> word) const;

  GroupElement multiply(const GroupElement& x, const GroupElement& y) const;
  /// x <- x * y, the sampling hot path.
  void multiply_in_place(GroupElement& x, const GroupElement& y) const;
  GroupElement inverse(const GroupElement& x) const;

  std::size_t word_length(const GroupElement& x) const { return x.size(); }
  /// d(x, y) = |x^-1 y|.
  std::size_t distance(const GroupElement& x, const GroupElement& y) const;
  /// (x|y) = (|x| + |y| - |x^-1 y|) / 2 based at the identity.
  double gromov_product(const GroupElement& x, const GroupElement& y) const;
  /// Length-m prefix of the canonical geodesic word of x.
  GroupElement geodesic_prefix(const GroupElement& x, std::size_t m) const;

  /// All elements with |x| <= r, in shortlex order.
  std::vector<GroupElement> ball(int r) const;

  /// Parse a word such as "ab'a", "a1.b1'" or "1" (identity).
  GroupElement parse(std::string_view text) const;
  std::vector<Letter> parse_letters(std::string_view text) const;
  std::string format(const GroupElement& x) const;
  std::string format_letters(std::span<const Letter> word) const;

  /// Canonical one-line description (backend, names, relators, radius).
  std::string descriptor() const;

  friend bool operator==(const MarkedGroup& a, const MarkedGroup& b) {
    return a.descriptor() == b.descriptor();
  }

  struct PresentationData;

 private:
  MarkedGroup() = default;
  Backend backend_ = Backend::Free;
  int rank_ = 0;
  std::vector<std::string> names_;
  std::shared_ptr<const PresentationData> pres_;
};

/// l-infinity distance on pairs: max(d(g1,h1), d(g2,h2)).
std::size_t pair_distance(const MarkedGroup& group, const ElementPair& g, const ElementPair& h);

/// A real-valued homomorphism given by one weight per generator.
class Homomorphism {
 public:
  /// Throws DomainError when the weight count differs from the rank or when
  /// a relator of a presentation does not map to zero.
  Homomorphism(const MarkedGroup& group, std::vector<double> weights);

  double operator()(const GroupElement& x) const { return apply(x.letters()); }
  double apply(std::span<const Letter> word) const;
  double weight(Letter l) const {
    const double w = weights_[static_cast<std::size_t>(generator_of(l))];
    return l > 0 ? w : -w;
  }
  const std::vector<double>& weights() const { return weights_; }
  double max_abs_weight() const;
  bool is_zero() const;

 private:
  std::vector<double> weights_;
};

/// A geodesic prefix of a sampled endpoint standing in for r_xi(m).
struct RayPrefix {
  GroupElement word;
  std::size_t horizon = 0;
};

}  // namespace noisewalk

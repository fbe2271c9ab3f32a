#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noisewalk/group.hpp"
#include "noisewalk/rng.hpp"

namespace noisewalk {

inline constexpr double kMassTolerance = 1e-12;

/// Finitely supported probability measure on a group.
///
/// Atoms are kept in shortlex order with strictly positive masses summing to
/// one within kMassTolerance; duplicate atoms are merged on construction.
class FiniteMeasure {
 public:
  using Atom = std::pair<GroupElement, double>;

  explicit FiniteMeasure(std::vector<Atom> atoms);

  /// Simple random walk: uniform on the symmetric generating set.
  static FiniteMeasure uniform_generators(const MarkedGroup& group);
  static FiniteMeasure dirac(const GroupElement& x);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  /// Mass of x (zero off the support).
  double mass(const GroupElement& x) const;

 private:
  std::vector<Atom> atoms_;
};

/// Finitely supported probability measure on pairs of group elements.
class PairMeasure {
 public:
  struct Atom {
    ElementPair pair;
    double mass;
  };

  explicit PairMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double mass(const ElementPair& p) const;
  /// Projection onto the first (coord 0) or second (coord 1) coordinate.
  FiniteMeasure marginal(int coord) const;

 private:
  std::vector<Atom> atoms_;
};

/// Law of (g, g) with g ~ mu.
PairMeasure diag_measure(const FiniteMeasure& mu);
/// Product law mu (x) mu.
PairMeasure product_measure(const FiniteMeasure& mu);
/// The noisy coupling rho * (mu (x) mu) + (1 - rho) * mu_diag.
PairMeasure noisy_coupling(const FiniteMeasure& mu, double rho);

struct MeasureReport {
  bool symmetric = false;
  bool lazy = false;  // mu(id) > 0
  bool non_elementary = false;
  /// Whether the support generates the whole group (free backend only).
  std::optional<bool> generates_group;
  std::vector<std::string> warnings;
};

/// Symmetry check and the heuristic non-elementarity test: the symmetrized
/// support must contain two non-commuting elements. Never throws.
MeasureReport validate_measure(const MarkedGroup& group, const FiniteMeasure& mu);

/// Whether the subgroup generated by `words` is the whole free group,
/// decided by Stallings folding.
bool generates_free_group(const MarkedGroup& group, const std::vector<GroupElement>& words);

/// Walker alias table over a fixed list of weights.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t sample(CounterRng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace noisewalk

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "noisewalk/group.hpp"
#include "noisewalk/measure.hpp"

namespace noisewalk {

enum class TableKind { Single, Pair };

/// Interned group elements shared by tables of one engine. Ids are stable
/// within a lineage: a later snapshot only appends elements.
struct ElementUniverse {
  std::uint64_t lineage = 0;
  std::vector<GroupElement> elements;
  /// Shortlex rank of every element within this snapshot.
  std::vector<std::uint32_t> rank;
};

/// Exact finitely supported law of w_n (single kind) or of (w_n, w'_n)
/// (pair kind). Atoms are sorted in shortlex order of their elements.
class ConvolutionTable {
 public:
  struct Atom {
    std::uint32_t first;
    std::uint32_t second;  // 0 (the identity) for single tables
    double mass;
  };

  ConvolutionTable(TableKind kind, int steps, std::shared_ptr<const ElementUniverse> universe,
                   std::vector<Atom> atoms);

  static ConvolutionTable from_measure(const FiniteMeasure& mu, int steps = 1);
  static ConvolutionTable from_pair_measure(const PairMeasure& pi, int steps = 1);

  TableKind kind() const { return kind_; }
  int steps() const { return steps_; }
  std::size_t size() const { return atoms_.size(); }
  std::span<const Atom> atoms() const { return atoms_; }
  const GroupElement& element(std::uint32_t id) const { return universe_->elements[id]; }
  const ElementUniverse& universe() const { return *universe_; }
  const std::shared_ptr<const ElementUniverse>& universe_ptr() const { return universe_; }

  double mass(const GroupElement& x) const;
  double mass(const ElementPair& p) const;
  double total_mass() const;
  /// Projection of a pair table onto one coordinate.
  ConvolutionTable marginal(int coord) const;

 private:
  TableKind kind_;
  int steps_;
  std::shared_ptr<const ElementUniverse> universe_;
  std::vector<Atom> atoms_;
};

struct EngineOptions {
  /// Largest table the engine may build, measured as projected atoms.
  std::uint64_t table_cap = 50'000'000;
  unsigned workers = 1;
};

/// Exact convolution powers by sparse pull-based convolution.
///
/// Destination atoms are enumerated first; each destination mass is then
/// summed over the increments in their fixed shortlex order, so tables are
/// bit-identical for any worker count. Not thread-safe; the tables it
/// returns are immutable and may be shared freely.
class ExactEngine {
 public:
  explicit ExactEngine(MarkedGroup group, EngineOptions options = {});
  ~ExactEngine();
  ExactEngine(const ExactEngine&) = delete;
  ExactEngine& operator=(const ExactEngine&) = delete;

  /// Tables for 0..max_steps; entry n is the law of w_n.
  std::vector<ConvolutionTable> convolve_series(const FiniteMeasure& mu, int max_steps);
  std::vector<ConvolutionTable> convolve_pair_series(const PairMeasure& pi, int max_steps);

  const MarkedGroup& group() const { return group_; }

 private:
  struct State;
  MarkedGroup group_;
  EngineOptions options_;
  std::unique_ptr<State> state_;
};

ConvolutionTable convolve_n(const MarkedGroup& group, const FiniteMeasure& mu, int n,
                            const EngineOptions& options = {});
ConvolutionTable convolve_pair_n(const MarkedGroup& group, const PairMeasure& pi, int n,
                                 const EngineOptions& options = {});

/// Total variation 1/2 * sum |t1 - t2| over the union support, summed in
/// shortlex order. Throws DomainError on kind mismatch.
double tv_distance(const ConvolutionTable& t1, const ConvolutionTable& t2);

struct HahnJordan {
  double positive = 0.0;  // (t1 - t2)_+ total mass
  double negative = 0.0;  // (t1 - t2)_- total mass
  /// Atoms where t1 > t2, in shortlex order. Single tables use only `first`.
  std::vector<ElementPair> witness;
};

HahnJordan hahn_jordan(const ConvolutionTable& t1, const ConvolutionTable& t2);

/// Bipartite instance for the relaxed separation: left/right masses and the
/// compatible (left, right) index pairs.
struct MatchingInstance {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Largest total mass of a partial coupling supported on the compatible
/// edges, by max flow on capacities scaled to multiples of 2^-60.
double max_matched_mass(const MatchingInstance& instance);

struct SeparationOptions {
  std::uint64_t edge_cap = 50'000'000;
};

/// Compatible pairs for U^s: l-infinity pair distance at most 2 * floor(s).
MatchingInstance build_matching_instance(const MarkedGroup& group, const ConvolutionTable& t1,
                                         const ConvolutionTable& t2, double s,
                                         const SeparationOptions& options = {});

/// U^s(t1, t2) = 1 - M*, with M* the maximal matched mass. Pair tables only.
double separation_U(const MarkedGroup& group, const ConvolutionTable& t1, const ConvolutionTable& t2,
                    double s, const SeparationOptions& options = {});

/// A pair z' within floor(s) of both z1 and z2 in every coordinate, built
/// from geodesic prefixes. Throws DomainError when d(z1, z2) > 2 floor(s).
ElementPair common_perturbation_target(const MarkedGroup& group, const ElementPair& z1,
                                       const ElementPair& z2, double s);

/// Shannon entropy -sum p log p in shortlex order.
double table_entropy(const ConvolutionTable& table);

/// 16 hex digits identifying a group descriptor.
std::string group_hash(const MarkedGroup& group);

/// Sorted text export: a commented header (schema, group hash, n, kind),
/// then one atom per line, word [tab] word [tab] probability with 17
/// significant digits (single tables omit the second word).
void write_table(const MarkedGroup& group, const ConvolutionTable& table, std::ostream& out);
ConvolutionTable read_table(const MarkedGroup& group, std::istream& in);

}  // namespace noisewalk

#include "noisewalk/exact.hpp"

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "noisewalk/error.hpp"
#include "noisewalk/flow.hpp"
#include "noisewalk/numerics.hpp"
#include "noisewalk/parallel.hpp"

namespace noisewalk {

namespace {

std::atomic<std::uint64_t> g_next_lineage{1};

constexpr std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}
constexpr std::uint32_t hi(std::uint64_t k) { return static_cast<std::uint32_t>(k >> 32); }
constexpr std::uint32_t lo(std::uint64_t k) { return static_cast<std::uint32_t>(k); }

/// Mutable interning table; `snapshot` freezes it with shortlex ranks.
class Interner {
 public:
  Interner() : lineage_(g_next_lineage.fetch_add(1)) { intern(GroupElement{}); }

  std::uint32_t intern(const GroupElement& x) {
    const auto [it, inserted] = index_.try_emplace(x, static_cast<std::uint32_t>(elements_.size()));
    if (inserted) elements_.push_back(x);
    return it->second;
  }
  std::size_t size() const { return elements_.size(); }
  const GroupElement& element(std::uint32_t id) const { return elements_[id]; }

  // Sorts only the ids added since the previous call and merges them in.
  const std::vector<std::uint32_t>& ranks() const {
    const auto n = static_cast<std::uint32_t>(elements_.size());
    const auto old = static_cast<std::uint32_t>(order_.size());
    if (old == n) return rank_;
    auto less = [&](std::uint32_t a, std::uint32_t b) { return shortlex_compare(elements_[a], elements_[b]) < 0; };
    order_.resize(n);
    std::iota(order_.begin() + old, order_.end(), old);
    std::sort(order_.begin() + old, order_.end(), less);
    std::inplace_merge(order_.begin(), order_.begin() + old, order_.end(), less);
    rank_.resize(n);
    for (std::uint32_t r = 0; r < n; ++r) rank_[order_[r]] = r;
    return rank_;
  }

  std::shared_ptr<const ElementUniverse> snapshot() const {
    auto u = std::make_shared<ElementUniverse>();
    u->lineage = lineage_;
    u->elements = elements_;
    u->rank = ranks();
    return u;
  }

 private:
  std::uint64_t lineage_;
  std::vector<GroupElement> elements_;
  absl::flat_hash_map<GroupElement, std::uint32_t, GroupElementHash> index_;
  mutable std::vector<std::uint32_t> order_;
  mutable std::vector<std::uint32_t> rank_;
};

void sort_canonical(std::vector<ConvolutionTable::Atom>& atoms, const std::vector<std::uint32_t>& rank) {
  auto key = [&](const ConvolutionTable::Atom& a) { return pack(rank[a.first], rank[a.second]); };
  if (!std::is_sorted(atoms.begin(), atoms.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); })) {
    std::sort(atoms.begin(), atoms.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
  }
}

std::uint32_t find_id(const ElementUniverse& u, const GroupElement& x) {
  // Universes are small (a ball of the group); a linear scan keeps the
  // snapshot free of a second index.
  for (std::uint32_t i = 0; i < u.elements.size(); ++i) {
    if (u.elements[i] == x) return i;
  }
  return std::numeric_limits<std::uint32_t>::max();
}

}  // namespace

ConvolutionTable::ConvolutionTable(TableKind kind, int steps, std::shared_ptr<const ElementUniverse> universe,
                                   std::vector<Atom> atoms)
    : kind_(kind), steps_(steps), universe_(std::move(universe)), atoms_(std::move(atoms)) {
  if (!universe_) throw DomainError("table needs an element universe");
  for (const auto& a : atoms_) {
    if (a.first >= universe_->elements.size() || a.second >= universe_->elements.size()) {
      throw DomainError("table atom refers to an unknown element");
    }
    if (kind_ == TableKind::Single && a.second != 0) throw DomainError("single table with a second coordinate");
  }
  sort_canonical(atoms_, universe_->rank);
}

ConvolutionTable ConvolutionTable::from_measure(const FiniteMeasure& mu, int steps) {
  Interner in;
  std::vector<Atom> atoms;
  for (const auto& [x, m] : mu.atoms()) atoms.push_back({in.intern(x), 0, m});
  return {TableKind::Single, steps, in.snapshot(), std::move(atoms)};
}

ConvolutionTable ConvolutionTable::from_pair_measure(const PairMeasure& pi, int steps) {
  Interner in;
  std::vector<Atom> atoms;
  for (const auto& a : pi.atoms()) atoms.push_back({in.intern(a.pair.first), in.intern(a.pair.second), a.mass});
  return {TableKind::Pair, steps, in.snapshot(), std::move(atoms)};
}

double ConvolutionTable::mass(const GroupElement& x) const {
  if (kind_ != TableKind::Single) throw DomainError("element lookup on a pair table");
  return mass(ElementPair{x, GroupElement{}});
}

double ConvolutionTable::mass(const ElementPair& p) const {
  const auto a = find_id(*universe_, p.first);
  const auto b = find_id(*universe_, p.second);
  if (a == std::numeric_limits<std::uint32_t>::max() || b == std::numeric_limits<std::uint32_t>::max()) return 0.0;
  const auto& rank = universe_->rank;
  const auto key = pack(rank[a], rank[b]);
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key, [&](const Atom& atom, std::uint64_t k) {
    return pack(rank[atom.first], rank[atom.second]) < k;
  });
  return (it != atoms_.end() && it->first == a && it->second == b) ? it->mass : 0.0;
}

double ConvolutionTable::total_mass() const {
  std::vector<double> m(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) m[i] = atoms_[i].mass;
  return pairwise_sum(m);
}

ConvolutionTable ConvolutionTable::marginal(int coord) const {
  if (kind_ != TableKind::Pair) throw DomainError("marginal of a single table");
  std::vector<std::uint32_t> order;
  absl::flat_hash_map<std::uint32_t, std::vector<double>> parts;
  for (const auto& a : atoms_) {
    const std::uint32_t x = coord == 0 ? a.first : a.second;
    auto [it, inserted] = parts.try_emplace(x);
    if (inserted) order.push_back(x);
    it->second.push_back(a.mass);
  }
  std::vector<Atom> out;
  for (std::uint32_t x : order) out.push_back({x, 0, pairwise_sum(parts[x])});
  return {TableKind::Single, steps_, universe_, std::move(out)};
}

// ---------------------------------------------------------------------------
// Convolution

struct ExactEngine::State {
  Interner interner;
  /// right[c][x] = id of x * c, or -1 when not yet computed.
  absl::flat_hash_map<std::uint32_t, std::vector<std::int64_t>> right;
  /// left_div[c][x] = id of x * c^-1, -1 unknown, -2 outside the ball.
  absl::flat_hash_map<std::uint32_t, std::vector<std::int64_t>> div;
};

ExactEngine::ExactEngine(MarkedGroup group, EngineOptions options)
    : group_(std::move(group)), options_(options), state_(std::make_unique<State>()) {}

ExactEngine::~ExactEngine() = default;

namespace {

struct Increment {
  std::uint32_t first;
  std::uint32_t second;
  double mass;
};

}  // namespace

std::vector<ConvolutionTable> ExactEngine::convolve_series(const FiniteMeasure& mu, int max_steps) {
  std::vector<PairMeasure::Atom> atoms;
  for (const auto& [x, m] : mu.atoms()) atoms.push_back({{x, GroupElement{}}, m});
  auto series = convolve_pair_series(PairMeasure(std::move(atoms)), max_steps);
  std::vector<ConvolutionTable> out;
  for (const auto& t : series) {
    std::vector<ConvolutionTable::Atom> a(t.atoms().begin(), t.atoms().end());
    out.emplace_back(TableKind::Single, t.steps(), t.universe_ptr(), std::move(a));
  }
  return out;
}

std::vector<ConvolutionTable> ExactEngine::convolve_pair_series(const PairMeasure& pi, int max_steps) {
  if (max_steps < 0) throw DomainError("step count must be non-negative");
  auto& st = *state_;
  auto& in = st.interner;

  std::vector<Increment> incs;
  for (const auto& a : pi.atoms()) incs.push_back({in.intern(a.pair.first), in.intern(a.pair.second), a.mass});
  std::vector<std::uint32_t> letters;
  for (const auto& inc : incs) {
    letters.push_back(inc.first);
    letters.push_back(inc.second);
  }
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());

  auto times = [&](std::uint32_t x, std::uint32_t c) -> std::uint32_t {
    auto& cache = st.right[c];
    if (cache.size() <= x) cache.resize(in.size(), -1);
    if (cache[x] < 0) cache[x] = in.intern(group_.multiply(in.element(x), in.element(c)));
    return static_cast<std::uint32_t>(cache[x]);
  };
  auto divide = [&](std::uint32_t x, std::uint32_t c) -> std::int64_t {
    auto& cache = st.div[c];
    if (cache.size() <= x) cache.resize(in.size(), -1);
    if (cache[x] == -1) {
      try {
        cache[x] = in.intern(group_.multiply(in.element(x), group_.inverse(in.element(c))));
      } catch (const OutOfBallError&) {
        cache[x] = -2;
      }
    }
    return cache[x];
  };

  std::vector<std::vector<ConvolutionTable::Atom>> tables;
  tables.push_back({{0, 0, 1.0}});
  for (int n = 1; n <= max_steps; ++n) {
    const auto& src = tables.back();
    const std::uint64_t projected = static_cast<std::uint64_t>(src.size()) * incs.size();
    if (projected > options_.table_cap) {
      throw CapExceededError("convolution step " + std::to_string(n) + " projects " + std::to_string(projected) +
                                 " atoms, above the cap of " + std::to_string(options_.table_cap),
                             projected);
    }
    absl::flat_hash_map<std::uint64_t, double> lookup;
    lookup.reserve(src.size());
    for (const auto& a : src) lookup.emplace(pack(a.first, a.second), a.mass);

    absl::flat_hash_set<std::uint64_t> dest_set;
    dest_set.reserve(src.size() * 4);
    for (const auto& a : src) {
      for (const auto& inc : incs) dest_set.insert(pack(times(a.first, inc.first), times(a.second, inc.second)));
    }
    std::vector<std::uint64_t> dest(dest_set.begin(), dest_set.end());
    dest_set = {};

    // Intern every predecessor now so the summation below is read-only.
    absl::flat_hash_set<std::uint32_t> coords;
    for (std::uint64_t k : dest) {
      coords.insert(hi(k));
      coords.insert(lo(k));
    }
    std::vector<std::uint32_t> coord_list(coords.begin(), coords.end());
    std::sort(coord_list.begin(), coord_list.end());
    for (std::uint32_t x : coord_list) {
      for (std::uint32_t c : letters) divide(x, c);
    }
    const auto& rank = in.ranks();
    std::sort(dest.begin(), dest.end(), [&](std::uint64_t a, std::uint64_t b) {
      return pack(rank[hi(a)], rank[lo(a)]) < pack(rank[hi(b)], rank[lo(b)]);
    });

    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (dest.size() + kChunk - 1) / kChunk;
    auto parts = parallel_map(chunks, options_.workers, [&](std::size_t c) {
      std::vector<ConvolutionTable::Atom> out;
      const std::size_t end = std::min(dest.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        const std::uint32_t x = hi(dest[i]);
        const std::uint32_t y = lo(dest[i]);
        double m = 0.0;
        for (const auto& inc : incs) {
          const std::int64_t px = st.div.find(inc.first)->second[x];
          const std::int64_t py = st.div.find(inc.second)->second[y];
          if (px < 0 || py < 0) continue;
          const auto it = lookup.find(pack(static_cast<std::uint32_t>(px), static_cast<std::uint32_t>(py)));
          if (it != lookup.end()) m += inc.mass * it->second;
        }
        out.push_back({x, y, m});
      }
      return out;
    });
    std::vector<ConvolutionTable::Atom> next;
    next.reserve(dest.size());
    for (auto& p : parts) next.insert(next.end(), p.begin(), p.end());
    tables.push_back(std::move(next));
  }

  const auto universe = in.snapshot();
  std::vector<ConvolutionTable> out;
  for (std::size_t n = 0; n < tables.size(); ++n) {
    out.emplace_back(TableKind::Pair, static_cast<int>(n), universe, std::move(tables[n]));
  }
  return out;
}

ConvolutionTable convolve_n(const MarkedGroup& group, const FiniteMeasure& mu, int n, const EngineOptions& options) {
  ExactEngine engine(group, options);
  return std::move(engine.convolve_series(mu, n).back());
}

ConvolutionTable convolve_pair_n(const MarkedGroup& group, const PairMeasure& pi, int n,
                                 const EngineOptions& options) {
  ExactEngine engine(group, options);
  return std::move(engine.convolve_pair_series(pi, n).back());
}

// ---------------------------------------------------------------------------
// Comparisons

namespace {

/// Maps the local ids of two tables to ranks in one common shortlex order.
struct CommonRanks {
  std::vector<std::uint32_t> first;
  std::vector<std::uint32_t> second;
  std::vector<const GroupElement*> element;  // by common rank
};

CommonRanks common_ranks(const ConvolutionTable& t1, const ConvolutionTable& t2) {
  const auto& u1 = t1.universe();
  const auto& u2 = t2.universe();
  CommonRanks out;
  if (u1.lineage == u2.lineage) {
    const auto& big = u1.elements.size() >= u2.elements.size() ? u1 : u2;
    out.first = big.rank;
    out.second = big.rank;
    out.element.resize(big.elements.size());
    for (std::size_t i = 0; i < big.elements.size(); ++i) out.element[big.rank[i]] = &big.elements[i];
    return out;
  }
  std::vector<const GroupElement*> all;
  for (const auto& x : u1.elements) all.push_back(&x);
  for (const auto& x : u2.elements) all.push_back(&x);
  std::sort(all.begin(), all.end(), [](const auto* a, const auto* b) { return shortlex_compare(*a, *b) < 0; });
  all.erase(std::unique(all.begin(), all.end(), [](const auto* a, const auto* b) { return *a == *b; }), all.end());
  auto rank_of = [&](const GroupElement& x) {
    const auto it = std::lower_bound(all.begin(), all.end(), &x,
                                     [](const auto* a, const auto* b) { return shortlex_compare(*a, *b) < 0; });
    return static_cast<std::uint32_t>(it - all.begin());
  };
  for (const auto& x : u1.elements) out.first.push_back(rank_of(x));
  for (const auto& x : u2.elements) out.second.push_back(rank_of(x));
  out.element = std::move(all);
  return out;
}

std::vector<std::pair<std::uint64_t, double>> keyed(const ConvolutionTable& t, const std::vector<std::uint32_t>& r) {
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(t.size());
  for (const auto& a : t.atoms()) out.emplace_back(pack(r[a.first], r[a.second]), a.mass);
  return out;
}

/// Calls fn(key, m1, m2) over the union support in common shortlex order.
template <class Fn>
void merge_join(const ConvolutionTable& t1, const ConvolutionTable& t2, const CommonRanks& cr, Fn fn) {
  if (t1.kind() != t2.kind()) throw DomainError("tables of different kinds");
  const auto a = keyed(t1, cr.first);
  const auto b = keyed(t2, cr.second);
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      fn(a[i].first, a[i].second, 0.0);
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      fn(b[j].first, 0.0, b[j].second);
      ++j;
    } else {
      fn(a[i].first, a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
}

}  // namespace

double tv_distance(const ConvolutionTable& t1, const ConvolutionTable& t2) {
  const auto cr = common_ranks(t1, t2);
  std::vector<double> diffs;
  merge_join(t1, t2, cr, [&](std::uint64_t, double m1, double m2) { diffs.push_back(std::abs(m1 - m2)); });
  return 0.5 * pairwise_sum(diffs);
}

HahnJordan hahn_jordan(const ConvolutionTable& t1, const ConvolutionTable& t2) {
  const auto cr = common_ranks(t1, t2);
  std::vector<double> pos, neg;
  HahnJordan out;
  merge_join(t1, t2, cr, [&](std::uint64_t key, double m1, double m2) {
    if (m1 > m2) {
      pos.push_back(m1 - m2);
      out.witness.emplace_back(*cr.element[hi(key)], *cr.element[lo(key)]);
    } else if (m2 > m1) {
      neg.push_back(m2 - m1);
    }
  });
  out.positive = pairwise_sum(pos);
  out.negative = pairwise_sum(neg);
  return out;
}

// ---------------------------------------------------------------------------
// Relaxed separation

double max_matched_mass(const MatchingInstance& instance) {
  constexpr double kScale = 0x1.0p60;
  constexpr std::int64_t kInfinite = std::int64_t{1} << 62;
  const std::size_t nl = instance.left.size();
  const std::size_t nr = instance.right.size();
  MaxFlow flow(nl + nr + 2);
  const std::size_t source = nl + nr;
  const std::size_t sink = source + 1;
  for (std::size_t i = 0; i < nl; ++i) flow.add_edge(source, i, std::llround(instance.left[i] * kScale));
  for (std::size_t j = 0; j < nr; ++j) flow.add_edge(nl + j, sink, std::llround(instance.right[j] * kScale));
  for (const auto& [i, j] : instance.edges) {
    if (i >= nl || j >= nr) throw DomainError("matching edge out of range");
    flow.add_edge(i, nl + j, kInfinite);
  }
  return static_cast<double>(flow.solve(source, sink)) / kScale;
}

MatchingInstance build_matching_instance(const MarkedGroup& group, const ConvolutionTable& t1,
                                         const ConvolutionTable& t2, double s, const SeparationOptions& options) {
  if (t1.kind() != TableKind::Pair || t2.kind() != TableKind::Pair) {
    throw DomainError("relaxed separation needs pair tables");
  }
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("perturbation scale must be finite and >= 0");
  const int radius = 2 * static_cast<int>(std::floor(s));
  const auto cr = common_ranks(t1, t2);

  MatchingInstance inst;
  absl::flat_hash_map<std::uint64_t, std::uint32_t> right_index;
  for (const auto& a : t2.atoms()) {
    right_index.emplace(pack(cr.second[a.first], cr.second[a.second]), static_cast<std::uint32_t>(inst.right.size()));
    inst.right.push_back(a.mass);
  }
  for (const auto& a : t1.atoms()) inst.left.push_back(a.mass);

  if (radius == 0) {
    std::uint32_t i = 0;
    for (const auto& a : t1.atoms()) {
      const auto it = right_index.find(pack(cr.first[a.first], cr.first[a.second]));
      if (it != right_index.end()) inst.edges.emplace_back(i, it->second);
      ++i;
    }
    return inst;
  }

  // Per coordinate: common ranks of right-side elements within `radius`.
  const auto ball = group.ball(radius);
  auto neighbors = [&](bool second) {
    absl::flat_hash_map<GroupElement, std::uint32_t, GroupElementHash> present;
    for (const auto& a : t2.atoms()) {
      const auto id = second ? a.second : a.first;
      present.emplace(t2.element(id), cr.second[id]);
    }
    absl::flat_hash_map<std::uint32_t, std::vector<std::uint32_t>> out;
    for (const auto& a : t1.atoms()) {
      const auto id = second ? a.second : a.first;
      auto [it, inserted] = out.try_emplace(id);
      if (!inserted) continue;
      for (const auto& b : ball) {
        try {
          const auto p = present.find(group.multiply(t1.element(id), b));
          if (p != present.end()) it->second.push_back(p->second);
        } catch (const OutOfBallError&) {
        }
      }
    }
    return out;
  };
  const auto n1 = neighbors(false);
  const auto n2 = neighbors(true);

  std::uint64_t projected = 0;
  for (const auto& a : t1.atoms()) projected += n1.at(a.first).size() * n2.at(a.second).size();
  if (projected > options.edge_cap) {
    throw CapExceededError("matching network projects " + std::to_string(projected) + " edges, above the cap of " +
                               std::to_string(options.edge_cap),
                           projected);
  }
  std::uint32_t i = 0;
  for (const auto& a : t1.atoms()) {
    for (std::uint32_t x : n1.at(a.first)) {
      for (std::uint32_t y : n2.at(a.second)) {
        const auto it = right_index.find(pack(x, y));
        if (it != right_index.end()) inst.edges.emplace_back(i, it->second);
      }
    }
    ++i;
  }
  return inst;
}

double separation_U(const MarkedGroup& group, const ConvolutionTable& t1, const ConvolutionTable& t2, double s,
                    const SeparationOptions& options) {
  const auto inst = build_matching_instance(group, t1, t2, s, options);
  return std::clamp(1.0 - max_matched_mass(inst), 0.0, 1.0);
}

ElementPair common_perturbation_target(const MarkedGroup& group, const ElementPair& z1, const ElementPair& z2,
                                       double s) {
  const auto budget = static_cast<std::size_t>(std::floor(s));
  auto midpoint = [&](const GroupElement& x, const GroupElement& y) {
    const auto step = group.multiply(group.inverse(x), y);
    if (step.size() > 2 * budget) throw DomainError("points are farther apart than 2 floor(s)");
    return group.multiply(x, group.geodesic_prefix(step, (step.size() + 1) / 2));
  };
  return {midpoint(z1.first, z2.first), midpoint(z1.second, z2.second)};
}

double table_entropy(const ConvolutionTable& table) {
  std::vector<double> terms;
  terms.reserve(table.size());
  for (const auto& a : table.atoms()) terms.push_back(-a.mass * std::log(a.mass));
  return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Text format

std::string group_hash(const MarkedGroup& group) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : group.descriptor()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_table(const MarkedGroup& group, const ConvolutionTable& table, std::ostream& out) {
  out << "# noisewalk convolution table\n"
      << "# schema_version=1\n"
      << "# group=" << group_hash(group) << "\n"
      << "# n=" << table.steps() << "\n"
      << "# kind=" << (table.kind() == TableKind::Pair ? "pair" : "single") << "\n";
  char buf[64];
  for (const auto& a : table.atoms()) {
    out << group.format(table.element(a.first));
    if (table.kind() == TableKind::Pair) out << '\t' << group.format(table.element(a.second));
    std::snprintf(buf, sizeof buf, "%.17g", a.mass);
    out << '\t' << buf << '\n';
  }
}

ConvolutionTable read_table(const MarkedGroup& group, std::istream& in) {
  std::string line;
  int steps = -1;
  std::string kind;
  std::string hash;
  Interner interner;
  std::vector<ConvolutionTable::Atom> atoms;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = line.substr(2, eq - 2);
      const auto value = line.substr(eq + 1);
      if (key == "schema_version" && value != "1") throw DomainError("unsupported table schema " + value);
      if (key == "group") hash = value;
      if (key == "n") steps = std::stoi(value);
      if (key == "kind") kind = value;
      continue;
    }
    if (kind != "pair" && kind != "single") throw DomainError("table header lacks a valid kind");
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    const std::size_t expected = kind == "pair" ? 3 : 2;
    if (fields.size() != expected) throw DomainError("malformed table line: " + line);
    const auto a = interner.intern(group.parse(fields[0]));
    const auto b = kind == "pair" ? interner.intern(group.parse(fields[1])) : 0U;
    atoms.push_back({a, b, std::stod(fields.back())});
  }
  if (hash != group_hash(group)) throw DomainError("table was written for a different group");
  if (steps < 0) throw DomainError("table header lacks n");
  if (kind.empty()) throw DomainError("table header lacks a kind");
  return {kind == "pair" ? TableKind::Pair : TableKind::Single, steps, interner.snapshot(), std::move(atoms)};
}

}  // namespace noisewalk

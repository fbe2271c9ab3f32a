#include "noisewalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "noisewalk/error.hpp"
#include "noisewalk/numerics.hpp"

namespace noisewalk {

namespace {

template <class Atoms, class Key>
void check_total(const Atoms& atoms, Key mass_of) {
  std::vector<double> masses;
  for (const auto& a : atoms) {
    const double m = mass_of(a);
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("measure masses must be positive and finite");
    masses.push_back(m);
  }
  if (masses.empty()) throw DomainError("measure must have at least one atom");
  const double total = pairwise_sum(masses);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw DomainError("measure masses sum to " + std::to_string(total) + ", not 1");
  }
}

}  // namespace

FiniteMeasure::FiniteMeasure(std::vector<Atom> atoms) {
  std::map<GroupElement, double, ShortlexLess> merged;
  for (auto& [x, m] : atoms) merged[x] += m;
  atoms_.assign(merged.begin(), merged.end());
  check_total(atoms_, [](const Atom& a) { return a.second; });
}

FiniteMeasure FiniteMeasure::uniform_generators(const MarkedGroup& group) {
  const auto gens = group.generating_set();
  std::vector<Atom> atoms;
  for (const auto& g : gens) atoms.emplace_back(g, 1.0 / static_cast<double>(gens.size()));
  return FiniteMeasure(std::move(atoms));
}

FiniteMeasure FiniteMeasure::dirac(const GroupElement& x) { return FiniteMeasure({{x, 1.0}}); }

double FiniteMeasure::mass(const GroupElement& x) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                   [](const Atom& a, const GroupElement& k) { return shortlex_compare(a.first, k) < 0; });
  return (it != atoms_.end() && it->first == x) ? it->second : 0.0;
}

PairMeasure::PairMeasure(std::vector<Atom> atoms) {
  auto less = [](const ElementPair& a, const ElementPair& b) { return shortlex_compare(a, b) < 0; };
  std::map<ElementPair, double, decltype(less)> merged(less);
  for (auto& a : atoms) merged[a.pair] += a.mass;
  for (auto& [p, m] : merged) atoms_.push_back({p, m});
  check_total(atoms_, [](const Atom& a) { return a.mass; });
}

double PairMeasure::mass(const ElementPair& p) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), p,
                                   [](const Atom& a, const ElementPair& k) { return shortlex_compare(a.pair, k) < 0; });
  return (it != atoms_.end() && it->pair == p) ? it->mass : 0.0;
}

FiniteMeasure PairMeasure::marginal(int coord) const {
  std::vector<FiniteMeasure::Atom> out;
  for (const auto& a : atoms_) out.emplace_back(coord == 0 ? a.pair.first : a.pair.second, a.mass);
  return FiniteMeasure(std::move(out));
}

PairMeasure diag_measure(const FiniteMeasure& mu) {
  std::vector<PairMeasure::Atom> atoms;
  for (const auto& [x, m] : mu.atoms()) atoms.push_back({{x, x}, m});
  return PairMeasure(std::move(atoms));
}

PairMeasure product_measure(const FiniteMeasure& mu) {
  std::vector<PairMeasure::Atom> atoms;
  for (const auto& [x, mx] : mu.atoms()) {
    for (const auto& [y, my] : mu.atoms()) atoms.push_back({{x, y}, mx * my});
  }
  return PairMeasure(std::move(atoms));
}

PairMeasure noisy_coupling(const FiniteMeasure& mu, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  std::vector<PairMeasure::Atom> atoms;
  for (const auto& [x, mx] : mu.atoms()) {
    for (const auto& [y, my] : mu.atoms()) {
      const double m = x == y ? rho * mx * mx + (1.0 - rho) * mx : rho * mx * my;
      if (m > 0.0) atoms.push_back({{x, y}, m});
    }
  }
  return PairMeasure(std::move(atoms));
}

bool generates_free_group(const MarkedGroup& group, const std::vector<GroupElement>& words) {
  if (!group.is_free()) throw DomainError("Stallings folding needs the free backend");
  const int letters = 2 * group.rank();
  // Vertex 0 is the base; each word contributes a loop of fresh vertices.
  std::vector<std::vector<std::pair<Letter, int>>> edges(1);
  for (const auto& w : words) {
    if (w.is_identity()) continue;
    int prev = 0;
    const auto ls = w.letters();
    for (std::size_t i = 0; i < ls.size(); ++i) {
      int next = 0;
      if (i + 1 < ls.size()) {
        next = static_cast<int>(edges.size());
        edges.emplace_back();
      }
      edges[static_cast<std::size_t>(prev)].emplace_back(ls[i], next);
      edges[static_cast<std::size_t>(next)].emplace_back(inverse_letter(ls[i]), prev);
      prev = next;
    }
  }
  const int n = static_cast<int>(edges.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  // Fold until every vertex class has at most one outgoing edge per label.
  bool changed = true;
  std::vector<std::vector<int>> target;
  while (changed) {
    changed = false;
    target.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(letters), -1));
    for (int v = 0; v < n && !changed; ++v) {
      const int rv = find(v);
      for (const auto& [l, to] : edges[static_cast<std::size_t>(v)]) {
        int& slot = target[static_cast<std::size_t>(rv)][static_cast<std::size_t>(letter_rank(l))];
        const int rt = find(to);
        if (slot < 0) {
          slot = rt;
        } else if (find(slot) != rt) {
          parent[static_cast<std::size_t>(find(slot))] = rt;
          changed = true;
          break;
        }
      }
    }
  }
  const int base = find(0);
  for (int g = 0; g < group.rank(); ++g) {
    const int t = target[static_cast<std::size_t>(base)][static_cast<std::size_t>(letter_rank(letter_of(g)))];
    if (t < 0 || find(t) != base) return false;
  }
  return true;
}

MeasureReport validate_measure(const MarkedGroup& group, const FiniteMeasure& mu) {
  MeasureReport report;
  report.symmetric = true;
  std::vector<GroupElement> support;
  for (const auto& [x, m] : mu.atoms()) {
    if (x.is_identity()) {
      report.lazy = true;
      continue;
    }
    support.push_back(x);
    try {
      if (std::abs(mu.mass(group.inverse(x)) - m) > kMassTolerance) report.symmetric = false;
    } catch (const OutOfBallError&) {
      report.symmetric = false;
    }
  }
  if (!report.symmetric) report.warnings.emplace_back("measure is not symmetric");
  if (report.lazy) report.warnings.emplace_back("measure charges the identity (lazy walk)");

  for (std::size_t i = 0; i < support.size() && !report.non_elementary; ++i) {
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      try {
        if (group.multiply(support[i], support[j]) != group.multiply(support[j], support[i])) {
          report.non_elementary = true;
          break;
        }
      } catch (const OutOfBallError&) {
        report.warnings.emplace_back("commutator test left the precomputed ball");
      }
    }
  }
  if (!report.non_elementary) {
    report.warnings.emplace_back("support has no two non-commuting elements; walk is elementary");
  }
  if (group.is_free()) {
    report.generates_group = generates_free_group(group, support);
    if (!*report.generates_group) report.warnings.emplace_back("support generates a proper subgroup");
  }
  return report;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw DomainError("alias table needs at least one weight");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = static_cast<std::uint32_t>(l);
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) prob_[i] = 1.0;
  for (std::size_t i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(CounterRng& rng) const {
  const double u = rng.uniform() * static_cast<double>(prob_.size());
  const auto column = std::min(static_cast<std::size_t>(u), prob_.size() - 1);
  const double frac = u - static_cast<double>(column);
  return frac < prob_[column] ? column : alias_[column];
}

}  // namespace noisewalk

#include "presentation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace noisewalk {

std::size_t LetterWordHash::operator()(const std::vector<Letter>& w) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Letter l : w) {
    h ^= static_cast<std::uint8_t>(l);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<Letter> free_reduce(std::span<const Letter> word) {
  std::vector<Letter> out;
  out.reserve(word.size());
  for (Letter l : word) {
    if (!out.empty() && out.back() == inverse_letter(l)) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

std::vector<Letter> invert_word(std::span<const Letter> word) {
  std::vector<Letter> out(word.rbegin(), word.rend());
  for (Letter& l : out) l = inverse_letter(l);
  return out;
}

namespace {

std::vector<Letter> cyclically_reduce(std::vector<Letter> w) {
  w = free_reduce(w);
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == inverse_letter(w[hi - 1])) {
    ++lo;
    --hi;
  }
  return {w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi)};
}

}  // namespace

std::vector<std::vector<Letter>> symmetrize_relators(const std::vector<std::vector<Letter>>& relators) {
  std::set<std::vector<Letter>> out;
  for (const auto& raw : relators) {
    const auto r = cyclically_reduce(raw);
    if (r.empty()) continue;
    for (const auto& base : {r, invert_word(r)}) {
      for (std::size_t shift = 0; shift < base.size(); ++shift) {
        std::vector<Letter> rot(base.size());
        std::rotate_copy(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(shift), base.end(),
                         rot.begin());
        out.insert(std::move(rot));
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<Letter> dehn_reduce(std::span<const Letter> word,
                                const std::vector<std::vector<Letter>>& symmetrized) {
  std::vector<Letter> w = free_reduce(word);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < w.size() && !changed; ++i) {
      for (const auto& r : symmetrized) {
        std::size_t m = 0;
        while (m < r.size() && i + m < w.size() && w[i + m] == r[m]) ++m;
        if (2 * m <= r.size()) continue;
        // w[i, i+m) = r[0, m) and r = id, so r[0, m) = r[m, |r|)^-1.
        const auto replacement = invert_word(std::span<const Letter>(r).subspan(m));
        std::vector<Letter> next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
        next.insert(next.end(), replacement.begin(), replacement.end());
        next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i + m), w.end());
        w = free_reduce(next);
        changed = true;
        break;
      }
    }
  }
  return w;
}

namespace {

/// Bucket key that is constant on group elements: the exponent-sum vector
/// when every relator has zero exponent sums, plus length parity when every
/// relator has even length.
class InvariantKey {
 public:
  InvariantKey(int rank, const std::vector<std::vector<Letter>>& relators) : rank_(rank) {
    for (const auto& r : relators) {
      std::vector<int> sums(static_cast<std::size_t>(rank), 0);
      for (Letter l : r) sums[static_cast<std::size_t>(generator_of(l))] += l > 0 ? 1 : -1;
      if (std::any_of(sums.begin(), sums.end(), [](int s) { return s != 0; })) use_sums_ = false;
      if (r.size() % 2 != 0) use_parity_ = false;
    }
  }

  std::vector<int> operator()(std::span<const Letter> w) const {
    std::vector<int> key;
    if (use_sums_) {
      key.assign(static_cast<std::size_t>(rank_), 0);
      for (Letter l : w) key[static_cast<std::size_t>(generator_of(l))] += l > 0 ? 1 : -1;
    }
    if (use_parity_) key.push_back(static_cast<int>(w.size() % 2));
    return key;
  }

 private:
  int rank_;
  bool use_sums_ = true;
  bool use_parity_ = true;
};

}  // namespace

std::shared_ptr<const MarkedGroup::PresentationData> build_presentation_ball(
    int rank, std::vector<std::vector<Letter>> relators, int radius) {
  auto data = std::make_shared<MarkedGroup::PresentationData>();
  data->radius = radius;
  data->letter_count = 2 * rank;
  data->symmetrized = symmetrize_relators(relators);
  const InvariantKey invariant(rank, relators);
  data->relators = std::move(relators);

  std::vector<Letter> letters;
  for (int g = 0; g < rank; ++g) {
    letters.push_back(letter_of(g));
    letters.push_back(letter_of(g, true));
  }

  auto& words = data->words;
  auto& neighbor = data->neighbor;
  const auto lc = static_cast<std::size_t>(data->letter_count);
  std::map<std::vector<int>, std::vector<std::uint32_t>> buckets;

  auto add_element = [&](std::vector<Letter> w) {
    const auto id = static_cast<std::uint32_t>(words.size());
    buckets[invariant(w)].push_back(id);
    data->index.emplace(w, id);
    words.push_back(std::move(w));
    neighbor.resize(words.size() * lc, -1);
    return id;
  };
  auto link = [&](std::uint32_t from, Letter l, std::uint32_t to) {
    neighbor[from * lc + static_cast<std::size_t>(letter_rank(l))] = static_cast<std::int32_t>(to);
    neighbor[to * lc + static_cast<std::size_t>(letter_rank(inverse_letter(l)))] =
        static_cast<std::int32_t>(from);
  };
  auto equal = [&](std::span<const Letter> u, std::span<const Letter> v) {
    auto w = invert_word(u);
    w.insert(w.end(), v.begin(), v.end());
    return dehn_reduce(w, data->symmetrized).empty();
  };

  add_element({});
  std::size_t layer_begin = 0;
  for (int len = 0; len <= radius; ++len) {
    const std::size_t layer_end = words.size();
    for (std::size_t e = layer_begin; e < layer_end; ++e) {
      for (Letter l : letters) {
        if (neighbor[e * lc + static_cast<std::size_t>(letter_rank(l))] >= 0) continue;
        std::vector<Letter> cand = words[e];
        cand.push_back(l);
        std::int32_t found = -1;
        for (std::uint32_t other : buckets[invariant(cand)]) {
          const auto olen = static_cast<int>(words[other].size());
          if (olen + 1 < len || olen > len + 1) continue;
          if (equal(words[other], cand)) {
            found = static_cast<std::int32_t>(other);
            break;
          }
        }
        if (found >= 0) {
          link(static_cast<std::uint32_t>(e), l, static_cast<std::uint32_t>(found));
        } else if (len < radius) {
          const auto id = add_element(std::move(cand));
          link(static_cast<std::uint32_t>(e), l, id);
        }
      }
    }
    layer_begin = layer_end;
  }
  return data;
}

}  // namespace noisewalk

#include "noisewalk/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "noisewalk/error.hpp"
#include "presentation.hpp"

namespace noisewalk {

std::strong_ordering shortlex_compare(const GroupElement& x, const GroupElement& y) {
  if (auto c = x.size() <=> y.size(); c != 0) return c;
  const auto xl = x.letters();
  const auto yl = y.letters();
  for (std::size_t i = 0; i < xl.size(); ++i) {
    if (auto c = letter_rank(xl[i]) <=> letter_rank(yl[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::strong_ordering shortlex_compare(const ElementPair& x, const ElementPair& y) {
  if (auto c = shortlex_compare(x.first, y.first); c != 0) return c;
  return shortlex_compare(x.second, y.second);
}

std::size_t GroupElementHash::operator()(const GroupElement& x) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Letter l : x.letters()) {
    h ^= static_cast<std::uint8_t>(l);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t ElementPairHash::operator()(const ElementPair& p) const noexcept {
  const GroupElementHash h;
  return h(p.first) * 0x9e3779b97f4a7c15ULL ^ h(p.second);
}

namespace {

bool valid_name(const std::string& name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string> default_names(int rank) {
  std::vector<std::string> names;
  for (int i = 0; i < rank; ++i) {
    names.push_back(rank <= 26 ? std::string(1, static_cast<char>('a' + i)) : "g" + std::to_string(i));
  }
  return names;
}

void check_names(const std::vector<std::string>& names) {
  if (names.empty()) throw DomainError("group needs at least one generator");
  if (names.size() > 100) throw DomainError("at most 100 generators are supported");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!valid_name(names[i])) throw DomainError("invalid generator name '" + names[i] + "'");
    if (names[i] == "id") throw DomainError("'id' is reserved for the identity");
    for (std::size_t j = 0; j < i; ++j) {
      if (names[i] == names[j]) throw DomainError("duplicate generator name '" + names[i] + "'");
    }
  }
}

}  // namespace

MarkedGroup MarkedGroup::free_group(int rank, std::vector<std::string> names) {
  if (rank < 1) throw DomainError("free group rank must be >= 1");
  if (names.empty()) names = default_names(rank);
  if (static_cast<int>(names.size()) != rank) throw DomainError("generator name count differs from rank");
  check_names(names);
  MarkedGroup g;
  g.backend_ = Backend::Free;
  g.rank_ = rank;
  g.names_ = std::move(names);
  return g;
}

MarkedGroup MarkedGroup::presentation(std::vector<std::string> names,
                                      const std::vector<std::string>& relators, int radius) {
  check_names(names);
  if (radius < 1) throw DomainError("presentation ball radius must be >= 1");
  MarkedGroup g;
  g.backend_ = Backend::Presentation;
  g.rank_ = static_cast<int>(names.size());
  g.names_ = std::move(names);
  std::vector<std::vector<Letter>> rel;
  for (const auto& r : relators) rel.push_back(g.parse_letters(r));
  g.pres_ = build_presentation_ball(g.rank_, std::move(rel), radius);
  return g;
}

Backend MarkedGroup::backend() const { return backend_; }
int MarkedGroup::rank() const { return rank_; }
int MarkedGroup::radius() const { return pres_ ? pres_->radius : -1; }
const std::vector<std::string>& MarkedGroup::generator_names() const { return names_; }

const std::vector<std::vector<Letter>>& MarkedGroup::relators() const {
  static const std::vector<std::vector<Letter>> none;
  return pres_ ? pres_->relators : none;
}

GroupElement MarkedGroup::generator(int i, bool inverse) const {
  if (i < 0 || i >= rank_) throw DomainError("generator index out of range");
  return GroupElement({letter_of(i, inverse)});
}

std::vector<GroupElement> MarkedGroup::generating_set() const {
  std::vector<GroupElement> out;
  for (int i = 0; i < rank_; ++i) {
    out.push_back(generator(i));
    out.push_back(generator(i, true));
  }
  return out;
}

namespace {

void check_letters(std::span<const Letter> word, int rank) {
  for (Letter l : word) {
    if (l == 0 || generator_of(l) >= rank) throw DomainError("letter outside the generating set");
  }
}

std::int32_t walk(const MarkedGroup::PresentationData& p, std::int32_t id, std::span<const Letter> word) {
  for (Letter l : word) {
    id = p.step(id, l);
    if (id < 0) throw OutOfBallError("product leaves the ball of radius " + std::to_string(p.radius));
  }
  return id;
}

std::int32_t lookup(const MarkedGroup::PresentationData& p, const GroupElement& x) {
  const std::vector<Letter> key(x.letters().begin(), x.letters().end());
  const auto it = p.index.find(key);
  if (it == p.index.end()) throw DomainError("element is not a canonical word of this presentation");
  return static_cast<std::int32_t>(it->second);
}

}  // namespace

GroupElement MarkedGroup::element(std::span<const Letter> word) const {
  check_letters(word, rank_);
  if (is_free()) return GroupElement(free_reduce(word));
  return GroupElement(pres_->words[static_cast<std::size_t>(walk(*pres_, 0, word))]);
}

GroupElement MarkedGroup::element(std::initializer_list<int> word) const {
  std::vector<Letter> letters;
  for (int v : word) letters.push_back(static_cast<Letter>(v));
  return element(letters);
}

GroupElement MarkedGroup::multiply(const GroupElement& x, const GroupElement& y) const {
  GroupElement out = x;
  multiply_in_place(out, y);
  return out;
}

void MarkedGroup::multiply_in_place(GroupElement& x, const GroupElement& y) const {
  if (is_free()) {
    auto& w = x.letters_;
    for (Letter l : y.letters_) {
      if (!w.empty() && w.back() == inverse_letter(l)) {
        w.pop_back();
      } else {
        w.push_back(l);
      }
    }
    return;
  }
  const auto id = walk(*pres_, lookup(*pres_, x), y.letters());
  x.letters_ = pres_->words[static_cast<std::size_t>(id)];
}

GroupElement MarkedGroup::inverse(const GroupElement& x) const {
  auto w = invert_word(x.letters());
  if (is_free()) return GroupElement(std::move(w));
  return GroupElement(pres_->words[static_cast<std::size_t>(walk(*pres_, 0, w))]);
}

std::size_t MarkedGroup::distance(const GroupElement& x, const GroupElement& y) const {
  if (is_free()) {
    const auto xl = x.letters();
    const auto yl = y.letters();
    std::size_t common = 0;
    while (common < xl.size() && common < yl.size() && xl[common] == yl[common]) ++common;
    return xl.size() + yl.size() - 2 * common;
  }
  return multiply(inverse(x), y).size();
}

double MarkedGroup::gromov_product(const GroupElement& x, const GroupElement& y) const {
  const double d = static_cast<double>(distance(x, y));
  return 0.5 * (static_cast<double>(x.size()) + static_cast<double>(y.size()) - d);
}

GroupElement MarkedGroup::geodesic_prefix(const GroupElement& x, std::size_t m) const {
  if (m > x.size()) throw DomainError("prefix length exceeds word length");
  return GroupElement(std::vector<Letter>(x.letters().begin(), x.letters().begin() + static_cast<std::ptrdiff_t>(m)));
}

std::vector<GroupElement> MarkedGroup::ball(int r) const {
  if (r < 0) throw DomainError("negative ball radius");
  std::vector<GroupElement> out;
  if (!is_free()) {
    if (r > pres_->radius) throw OutOfBallError("ball radius exceeds the precomputed radius");
    for (const auto& w : pres_->words) {
      if (static_cast<int>(w.size()) <= r) out.emplace_back(w);
    }
    return out;
  }
  out.emplace_back();
  std::size_t begin = 0;
  for (int len = 0; len < r; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int g = 0; g < rank_; ++g) {
        for (bool inv : {false, true}) {
          const Letter l = letter_of(g, inv);
          const auto w = out[i].letters();
          if (!w.empty() && w.back() == inverse_letter(l)) continue;
          std::vector<Letter> next(w.begin(), w.end());
          next.push_back(l);
          out.emplace_back(std::move(next));
        }
      }
    }
    begin = end;
  }
  return out;
}

std::vector<Letter> MarkedGroup::parse_letters(std::string_view text) const {
  std::vector<Letter> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '.' || text[i] == '*')) ++i;
  };
  skip();
  std::string_view rest = text.substr(i);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  if (rest.empty() || rest == "1" || rest == "id") return out;
  while (i < text.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (int g = 0; g < rank_; ++g) {
      const auto& name = names_[static_cast<std::size_t>(g)];
      if (name.size() > best_len && text.substr(i, name.size()) == name) {
        best = g;
        best_len = name.size();
      }
    }
    if (best < 0) throw DomainError("cannot parse word '" + std::string(text) + "'");
    i += best_len;
    bool inv = false;
    if (i < text.size() && text[i] == '\'') {
      inv = true;
      ++i;
    }
    out.push_back(letter_of(best, inv));
    skip();
  }
  return out;
}

GroupElement MarkedGroup::parse(std::string_view text) const { return element(parse_letters(text)); }

std::string MarkedGroup::format_letters(std::span<const Letter> word) const {
  if (word.empty()) return "1";
  const bool single = std::all_of(names_.begin(), names_.end(), [](const std::string& n) { return n.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!single && i > 0) out += '.';
    out += names_[static_cast<std::size_t>(generator_of(word[i]))];
    if (word[i] < 0) out += '\'';
  }
  return out;
}

std::string MarkedGroup::format(const GroupElement& x) const { return format_letters(x.letters()); }

std::string MarkedGroup::descriptor() const {
  std::ostringstream os;
  os << (is_free() ? "free" : "presentation") << " rank=" << rank_ << " generators=";
  for (std::size_t i = 0; i < names_.size(); ++i) os << (i ? "," : "") << names_[i];
  if (!is_free()) {
    os << " relators=";
    for (std::size_t i = 0; i < pres_->relators.size(); ++i) {
      os << (i ? "," : "") << format_letters(pres_->relators[i]);
    }
    os << " radius=" << pres_->radius;
  }
  return os.str();
}

std::size_t pair_distance(const MarkedGroup& group, const ElementPair& g, const ElementPair& h) {
  return std::max(group.distance(g.first, h.first), group.distance(g.second, h.second));
}

Homomorphism::Homomorphism(const MarkedGroup& group, std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (static_cast<int>(weights_.size()) != group.rank()) {
    throw DomainError("homomorphism needs one weight per generator");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw DomainError("homomorphism weights must be finite");
  }
  const double scale = std::max(1.0, max_abs_weight());
  for (const auto& r : group.relators()) {
    if (std::abs(apply(r)) > 1e-9 * scale * static_cast<double>(r.size())) {
      throw DomainError("homomorphism does not vanish on relator " + group.format_letters(r));
    }
  }
}

double Homomorphism::apply(std::span<const Letter> word) const {
  double s = 0.0;
  for (Letter l : word) s += weight(l);
  return s;
}

double Homomorphism::max_abs_weight() const {
  double m = 0.0;
  for (double w : weights_) m = std::max(m, std::abs(w));
  return m;
}

bool Homomorphism::is_zero() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 0.0; });
}

}  // namespace noisewalk

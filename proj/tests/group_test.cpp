#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "noisewalk/error.hpp"
#include "noisewalk/group.hpp"
#include "support/oracles.hpp"

using namespace noisewalk;

namespace {

MarkedGroup f2() { return MarkedGroup::free_group(2); }

}  // namespace

TEST(Multiply, CancelsAcrossTheJoin) {
  const auto g = f2();
  EXPECT_EQ(g.format(g.multiply(g.parse("ab"), g.parse("b'a"))), "aa");
  EXPECT_TRUE(g.multiply(g.parse("a"), g.parse("a'")).is_identity());
}

TEST(Multiply, AgreesWithStringReduction) {
  const auto g = MarkedGroup::free_group(3);
  oracle::Gen gen(11);
  for (int i = 0; i < 1000; ++i) {
    const auto u = gen.word(3, 12), v = gen.word(3, 12);
    const auto x = g.element(u), y = g.element(v);
    const std::string expect =
        oracle::reduce_string(oracle::to_string_word(u) + oracle::to_string_word(v));
    EXPECT_EQ(oracle::to_string_word(g.multiply(x, y).letters()), expect);
    GroupElement z = x;
    g.multiply_in_place(z, y);
    EXPECT_EQ(z, g.multiply(x, y));
  }
}

TEST(Multiply, Associative) {
  const auto g = f2();
  oracle::Gen gen(12);
  for (int i = 0; i < 1000; ++i) {
    const auto x = gen.element(g, 10), y = gen.element(g, 10), z = gen.element(g, 10);
    EXPECT_EQ(g.multiply(g.multiply(x, y), z), g.multiply(x, g.multiply(y, z)));
  }
}

TEST(Multiply, MatchesMatrixRepresentation) {
  const auto g = f2();
  oracle::Gen gen(13);
  for (int i = 0; i < 500; ++i) {
    const auto u = gen.word(2, 10), v = gen.word(2, 10);
    const auto xy = g.multiply(g.element(u), g.element(v));
    EXPECT_EQ(oracle::word_matrix(xy.letters()), oracle::mat_mul(oracle::word_matrix(u), oracle::word_matrix(v)));
  }
}

TEST(WordLength, Examples) {
  const auto g = f2();
  EXPECT_EQ(g.word_length(g.identity()), 0u);
  EXPECT_EQ(g.word_length(g.parse("aba'")), 3u);
}

TEST(WordLength, EqualsCayleyGraphDistance) {
  const auto g = f2();
  const auto dist = oracle::cayley_bfs_f2(8);
  oracle::Gen gen(14);
  for (int i = 0; i < 2000; ++i) {
    const auto w = gen.word(2, 14);
    const auto x = g.element(w);
    const auto it = dist.find(oracle::word_matrix(w));
    if (it == dist.end()) {
      EXPECT_GT(x.size(), 8u);
      continue;
    }
    EXPECT_EQ(x.size(), static_cast<std::size_t>(it->second));
    EXPECT_EQ(g.inverse(x).size(), x.size());
  }
}

TEST(WordLength, SphereSizes) {
  for (int k : {1, 2, 3}) {
    const auto g = MarkedGroup::free_group(k);
    const auto ball = g.ball(6);
    std::vector<std::size_t> count(7, 0);
    for (const auto& x : ball) ++count[x.size()];
    EXPECT_EQ(count[0], 1u);
    for (int n = 1; n <= 6; ++n) {
      const auto expect = static_cast<std::size_t>(2 * k * std::pow(2 * k - 1, n - 1));
      EXPECT_EQ(count[static_cast<std::size_t>(n)], expect) << "k=" << k << " n=" << n;
    }
  }
}

TEST(Ball, ShortlexOrdered) {
  const auto ball = f2().ball(3);
  for (std::size_t i = 1; i < ball.size(); ++i) EXPECT_TRUE(shortlex_compare(ball[i - 1], ball[i]) < 0);
  EXPECT_EQ(f2().format(ball[1]), "a");
  EXPECT_EQ(f2().format(ball[2]), "a'");
}

TEST(GromovProduct, Examples) {
  const auto g = f2();
  EXPECT_EQ(g.gromov_product(g.parse("ab"), g.parse("aba")), 2.0);
  const auto x = g.parse("ab'ab");
  EXPECT_EQ(g.gromov_product(x, x), 4.0);
  EXPECT_EQ(g.gromov_product(g.parse("a"), g.parse("a'")), 0.0);
}

TEST(GromovProduct, CommonPrefixAndTreeInequality) {
  const auto g = f2();
  oracle::Gen gen(15);
  for (int i = 0; i < 1000; ++i) {
    const auto x = gen.element(g, 10), y = gen.element(g, 10), z = gen.element(g, 10);
    const auto sx = oracle::to_string_word(x.letters()), sy = oracle::to_string_word(y.letters());
    std::size_t prefix = 0;
    while (prefix < sx.size() && prefix < sy.size() && sx[prefix] == sy[prefix]) ++prefix;
    const double xy = g.gromov_product(x, y);
    EXPECT_EQ(xy, static_cast<double>(prefix));
    EXPECT_EQ(xy, g.gromov_product(y, x));
    EXPECT_GE(xy, 0.0);
    EXPECT_LE(xy, static_cast<double>(std::min(x.size(), y.size())));
    EXPECT_GE(g.gromov_product(x, z), std::min(xy, g.gromov_product(y, z)));
  }
}

TEST(GeodesicPrefix, Examples) {
  const auto g = f2();
  const auto x = g.parse("abab");
  EXPECT_EQ(g.format(g.geodesic_prefix(x, 2)), "ab");
  EXPECT_TRUE(g.geodesic_prefix(x, 0).is_identity());
  EXPECT_EQ(g.geodesic_prefix(x, 4), x);
  EXPECT_THROW(g.geodesic_prefix(x, 5), DomainError);
}

TEST(GeodesicPrefix, RemainderLength) {
  const auto g = f2();
  oracle::Gen gen(16);
  for (int i = 0; i < 500; ++i) {
    const auto x = gen.element(g, 16);
    const auto m = static_cast<std::size_t>(gen.uniform_int(0, static_cast<int>(x.size())));
    const auto p = g.geodesic_prefix(x, m);
    EXPECT_EQ(p.size(), m);
    EXPECT_EQ(g.multiply(g.inverse(p), x).size(), x.size() - m);
  }
}

TEST(PairDistance, Examples) {
  const auto g = f2();
  const ElementPair ab{g.parse("a"), g.parse("b")};
  EXPECT_EQ(pair_distance(g, ab, ab), 0u);
  EXPECT_EQ(pair_distance(g, {g.identity(), g.identity()}, {g.parse("a"), g.parse("ab")}), 2u);
}

TEST(PairDistance, MetricAxioms) {
  const auto g = f2();
  oracle::Gen gen(17);
  for (int i = 0; i < 1000; ++i) {
    const ElementPair x{gen.element(g, 8), gen.element(g, 8)};
    const ElementPair y{gen.element(g, 8), gen.element(g, 8)};
    const ElementPair z{gen.element(g, 8), gen.element(g, 8)};
    EXPECT_EQ(pair_distance(g, x, y), pair_distance(g, y, x));
    EXPECT_LE(pair_distance(g, x, z), pair_distance(g, x, y) + pair_distance(g, y, z));
    EXPECT_EQ(pair_distance(g, x, y) == 0, x == y);
  }
}

TEST(Homomorphism, Examples) {
  const auto g = f2();
  const Homomorphism phi(g, {1.0, 0.0});
  EXPECT_EQ(phi(g.parse("abab'")), 2.0);
  EXPECT_EQ(phi(g.identity()), 0.0);
}

TEST(Homomorphism, AdditiveAndLipschitz) {
  const auto g = f2();
  const Homomorphism phi(g, {0.7, -1.3});
  oracle::Gen gen(18);
  for (int i = 0; i < 1000; ++i) {
    const auto x = gen.element(g, 12), y = gen.element(g, 12);
    EXPECT_NEAR(phi(g.multiply(x, y)), phi(x) + phi(y), 1e-12);
    EXPECT_LE(std::abs(phi(x)), phi.max_abs_weight() * static_cast<double>(x.size()) + 1e-12);
  }
}

TEST(Homomorphism, RejectsBadWeights) {
  EXPECT_THROW(Homomorphism(f2(), {1.0}), DomainError);
  EXPECT_THROW(Homomorphism(f2(), {1.0, NAN}), DomainError);
  const auto s = MarkedGroup::presentation({"a", "b", "c", "d"}, {"aba'b'cdc'd'"}, 2);
  EXPECT_NO_THROW(Homomorphism(s, {1, 2, 3, 4}));
  const auto t = MarkedGroup::presentation({"a", "b"}, {"aab"}, 2);
  EXPECT_THROW(Homomorphism(t, {1, 0}), DomainError);
  EXPECT_NO_THROW(Homomorphism(t, {1, -2}));
}

TEST(Parse, RoundTripAndSyntax) {
  const auto g = f2();
  oracle::Gen gen(19);
  for (int i = 0; i < 200; ++i) {
    const auto x = gen.element(g, 10);
    EXPECT_EQ(g.parse(g.format(x)), x);
  }
  EXPECT_TRUE(g.parse("1").is_identity());
  EXPECT_TRUE(g.parse(" id ").is_identity());
  EXPECT_EQ(g.parse("a a'b"), g.parse("b"));
  EXPECT_THROW(g.parse("ac"), DomainError);

  const auto h = MarkedGroup::free_group(2, {"x1", "x2"});
  EXPECT_EQ(h.format(h.parse("x1.x2'")), "x1.x2'");
  EXPECT_EQ(h.parse("x1x2'").size(), 2u);
  EXPECT_EQ(f2().descriptor(), "free rank=2 generators=a,b");
}

TEST(Presentation, EmptyRelatorsMatchFreeGroup) {
  const auto p = MarkedGroup::presentation({"a", "b"}, {}, 5);
  const auto f = f2();
  EXPECT_EQ(p.ball(5).size(), f.ball(5).size());
  oracle::Gen gen(20);
  for (int i = 0; i < 300; ++i) {
    const auto x = gen.element(f, 2), y = gen.element(f, 3);
    const auto px = p.element(x.letters()), py = p.element(y.letters());
    EXPECT_EQ(p.multiply(px, py).letters().size(), f.multiply(x, y).size());
    EXPECT_EQ(p.gromov_product(px, py), f.gromov_product(x, y));
  }
}

TEST(Presentation, SurfaceGroupSpheres) {
  // Genus-2 surface group: reduced words of length <= 3 are distinct (the
  // shortest relation has length 8) and length 4 loses one element for each
  // of the 8 ways to split a rotation of the relator into two halves.
  const auto s = MarkedGroup::presentation({"a", "b", "c", "d"}, {"aba'b'cdc'd'"}, 4);
  std::vector<std::size_t> count(5, 0);
  for (const auto& x : s.ball(4)) ++count[x.size()];
  EXPECT_EQ(count, (std::vector<std::size_t>{1, 8, 56, 392, 2736}));
  const auto r = s.element(s.parse_letters("aba'b'cdc'd'"));
  EXPECT_TRUE(r.is_identity());
  const auto half = s.parse("aba'b'");
  EXPECT_EQ(half, s.parse("dcd'c'"));
  EXPECT_EQ(s.gromov_product(half, half), 4.0);
}

TEST(Presentation, QueriesBeyondRadiusFail) {
  const auto s = MarkedGroup::presentation({"a", "b", "c", "d"}, {"aba'b'cdc'd'"}, 3);
  EXPECT_THROW(s.parse("abcd"), OutOfBallError);
  EXPECT_THROW(s.multiply(s.parse("abc"), s.parse("d")), OutOfBallError);
  EXPECT_THROW(s.ball(4), OutOfBallError);
  EXPECT_THROW(MarkedGroup::presentation({"a"}, {}, 0), DomainError);
}

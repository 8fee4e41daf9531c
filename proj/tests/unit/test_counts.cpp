#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vlmc/counts.hpp"
#include "vlmc/error.hpp"
#include "vlmc/sampler.hpp"

using namespace vlmc;

namespace {

Word W(std::string_view s) { return Alphabet::binary().parse(s); }

CountTrie counts_of(std::string_view s, std::size_t d) { return build_counts(W(s), 2, d); }

}  // namespace

TEST(Counts, SmallExample) {
  const CountTrie t = counts_of("00010", 2);
  EXPECT_EQ(n_count(t, W("0")), 4u);
  EXPECT_EQ(n_count(t, W("1")), 1u);
  EXPECT_EQ(n_count(t, W("00")), 2u);
  EXPECT_EQ(n_count(t, W("01")), 1u);
  EXPECT_EQ(n_count(t, W("10")), 1u);
  EXPECT_EQ(n_count(t, W("11")), 0u);
  EXPECT_EQ(n_count(t, Word{}), 5u);
}

TEST(Counts, AlternatingExample) {
  const CountTrie t = counts_of("0101", 2);
  EXPECT_EQ(n_count(t, W("01")), 2u);
  EXPECT_EQ(n_count(t, W("10")), 1u);
}

TEST(Counts, ConstantSample) {
  const Word x(50, 1);
  const CountTrie t = build_counts(x, 2, 3);
  EXPECT_EQ(n_count(t, W("1")), 50u);
  EXPECT_EQ(n_count(t, W("111")), 48u);
  EXPECT_EQ(n_count(t, W("0")), 0u);
}

TEST(Counts, Preconditions) {
  EXPECT_THROW(build_counts(W("0101"), 2, 0), PreconditionError);
  EXPECT_THROW(build_counts(W("0101"), 2, 5), PreconditionError);
  const CountTrie t = counts_of("0101", 2);
  EXPECT_THROW(n_count(t, W("010")), PreconditionError);
}

TEST(Counts, MatchesNaiveScanOnRandomSamples) {
  std::mt19937_64 g(123);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> len(1, 200), depth(1, 8), alpha(2, 5);
    const std::size_t n = len(g);
    const std::size_t A = alpha(g);
    const std::size_t d = std::min(n, depth(g));
    const Word x = oracle::random_word(g, n, A);
    const CountTrie t = build_counts(x, A, d);
    const auto naive = oracle::naive_all_counts(x, d);
    std::size_t visited = 0;
    t.for_each_string([&](const Word& w, CountTrie::NodeId node) {
      ++visited;
      auto it = naive.find(w);
      ASSERT_NE(it, naive.end());
      EXPECT_EQ(t.count(node), it->second);
    });
    EXPECT_EQ(visited, naive.size());
    for (const auto& [w, c] : naive) EXPECT_EQ(n_count(t, w), c);
    // Random (mostly unobserved) queries.
    for (int q = 0; q < 20; ++q) {
      std::uniform_int_distribution<std::size_t> qlen(1, d);
      const Word w = oracle::random_word(g, qlen(g), A);
      EXPECT_EQ(n_count(t, w), oracle::naive_count(x, w));
    }
  }
}

TEST(Counts, SparseAlphabetMatchesNaive) {
  std::mt19937_64 g(9);
  const std::size_t A = 1000;
  Word x = oracle::random_word(g, 3000, 20);
  for (auto& s : x) s = static_cast<Symbol>(s * 47 % A);
  const CountTrie t = build_counts(x, A, 3);
  for (const auto& [w, c] : oracle::naive_all_counts(x, 3)) EXPECT_EQ(n_count(t, w), c);
}

TEST(Counts, IncrementalPrefixEqualsFreshBuild) {
  std::mt19937_64 g(4);
  const Word x = oracle::random_word(g, 300, 3);
  CountTrie inc(3, 4);
  for (std::size_t j = 0; j < x.size(); ++j) {
    inc.append(x[j]);
    if (j % 37 != 5 || j + 1 < 4) continue;
    const Word prefix(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(j + 1));
    for (const auto& [w, c] : oracle::naive_all_counts(prefix, 4)) EXPECT_EQ(n_count(inc, w), c);
  }
}

TEST(PHat, SmallExample) {
  const CountTrie t = counts_of("00010", 2);
  EXPECT_DOUBLE_EQ(p_hat(t, 1, W("0")), 1.0 / 3.0);
}

TEST(PHat, ZeroDenominatorIsUniform) {
  const CountTrie t = counts_of("00010", 3);
  EXPECT_EQ(p_hat(t, 1, W("11")), 0.5);
  EXPECT_EQ(p_hat(t, 0, W("11")), 0.5);
  // "10" occurs only at the end: never followed by anything.
  EXPECT_EQ(p_hat(t, 1, W("10")), 0.5);
}

TEST(PHat, AlternatingSample) {
  const CountTrie t = counts_of("0101010101", 2);
  EXPECT_EQ(p_hat(t, 1, W("0")), 1.0);
  EXPECT_EQ(p_hat(t, 0, W("1")), 1.0);
}

TEST(PHat, MatchesNaive) {
  std::mt19937_64 g(8);
  const Word x = oracle::random_word(g, 150, 3);
  const CountTrie t = build_counts(x, 3, 4);
  for (const auto& [w, c] : oracle::naive_all_counts(x, 3))
    for (Symbol a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(p_hat(t, a, w), oracle::naive_p_hat(x, 3, a, w));
}

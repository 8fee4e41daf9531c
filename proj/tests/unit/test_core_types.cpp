#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "vlmc/context_tree.hpp"
#include "vlmc/error.hpp"
#include "vlmc/harness.hpp"
#include "vlmc/io.hpp"
#include "vlmc/sampler.hpp"

using namespace vlmc;

namespace {

Word W(std::string_view s) { return Alphabet::binary().parse(s); }

Eigen::VectorXd row2(double p1) {
  Eigen::VectorXd r(2);
  r << 1.0 - p1, p1;
  return r;
}

std::set<Word> as_set(const ContextTree& t) { return {t.contexts().begin(), t.contexts().end()}; }

}  // namespace

TEST(Alphabet, RejectsBadLabels) {
  EXPECT_THROW(Alphabet({"a"}), PreconditionError);
  EXPECT_THROW(Alphabet({"a", "a"}), PreconditionError);
  EXPECT_THROW(Alphabet({"a", "b c"}), PreconditionError);
  EXPECT_THROW(Alphabet({"a", "b,c"}), PreconditionError);
}

TEST(Alphabet, FormatParseRoundTrip) {
  const Alphabet single({"a", "b", "c"});
  EXPECT_EQ(single.format(Word{0, 2, 1}), "acb");
  EXPECT_EQ(single.parse("acb"), (Word{0, 2, 1}));
  const Alphabet multi({"up", "down"});
  EXPECT_FALSE(multi.single_char());
  EXPECT_EQ(multi.format(Word{1, 0}), "down,up");
  EXPECT_EQ(multi.parse("down,up"), (Word{1, 0}));
}

TEST(ValidateTree, ReferenceTreeIsValid) { EXPECT_TRUE(validate_tree(reference_tree()).valid()); }

TEST(ValidateTree, SuffixViolationReported) {
  const ProbabilisticContextTree pct(Alphabet::binary(),
                                     {{W("1"), row2(0.3)}, {W("10"), row2(0.8)}, {W("00"), row2(0.2)}, {W("0"), row2(0.5)}});
  const auto report = validate_tree(pct);
  ASSERT_EQ(report.suffix.size(), 2u);
  for (const auto& v : report.suffix) EXPECT_EQ(v.shorter, W("0"));
  std::set<Word> longer;
  for (const auto& v : report.suffix) longer.insert(v.longer);
  EXPECT_EQ(longer, (std::set<Word>{W("10"), W("00")}));
  EXPECT_TRUE(report.rows.empty());
}

TEST(ValidateTree, NormalizationViolationReported) {
  Eigen::VectorXd bad(2);
  bad << 0.5, 0.6;
  const ProbabilisticContextTree pct(Alphabet::binary(), {{W("0"), bad}, {W("1"), row2(0.5)}});
  const auto report = validate_tree(pct);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].context, W("0"));
  EXPECT_FALSE(report.valid());
}

TEST(ValidateTree, NegativeEntryReported) {
  Eigen::VectorXd bad(2);
  bad << -0.1, 1.1;
  const ProbabilisticContextTree pct(Alphabet::binary(), {{W("0"), bad}, {W("1"), row2(0.5)}});
  EXPECT_FALSE(validate_tree(pct).valid());
}

TEST(ContextOf, RenewalFirstOneGoingBack) {
  const auto pct = renewal_tree(RenewalSpec::constant(0.5), 3);
  const auto ctx = context_of(pct, W("00100"));
  ASSERT_TRUE(ctx);
  EXPECT_EQ(*ctx, W("100"));
  EXPECT_FALSE(context_of(pct, W("0000")));
}

TEST(ContextOf, BoundedTree) {
  const auto ref = reference_tree();
  EXPECT_EQ(*context_of(ref, W("0101")), W("1"));
  EXPECT_EQ(*context_of(ref, W("0110")), W("10"));
  EXPECT_FALSE(context_of(ref, W("0")));
}

TEST(TruncateTree, RenewalAtTwo) {
  const auto pct = renewal_tree(RenewalSpec::constant(0.5), 5);
  EXPECT_EQ(as_set(truncate_tree(pct.tree(), 2)), (std::set<Word>{W("1"), W("10"), W("00")}));
}

TEST(TruncateTree, ShortTreeUnchanged) {
  const ContextTree t({W("1"), W("10"), W("00")});
  EXPECT_EQ(truncate_tree(t, 2).contexts(), t.contexts());
  EXPECT_EQ(truncate_tree(t, 7).contexts(), t.contexts());
}

TEST(TruncateTree, FourContextsAtTwo) {
  const ContextTree t({W("1"), W("10"), W("100"), W("000")});
  EXPECT_EQ(as_set(truncate_tree(t, 2)), (std::set<Word>{W("1"), W("10"), W("00")}));
}

TEST(TruncateTree, RejectsShallowMaterialization) {
  const auto pct = renewal_tree(RenewalSpec::constant(0.5), 2);
  EXPECT_THROW(truncate_tree(pct.tree(), 2), PreconditionError);
  EXPECT_THROW(truncate_tree(pct.tree(), 0), PreconditionError);
}

// Brute force: for every context keep it if short, else its length-K suffix.
TEST(TruncateTree, MatchesBruteForceOnRandomTrees) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    // Random complete binary tree by random splitting.
    std::vector<Word> leaves{W("0"), W("1")};
    std::uniform_int_distribution<int> splits(0, 6);
    for (int s = splits(g); s > 0; --s) {
      std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
      const std::size_t i = pick(g);
      Word leaf = leaves[i];
      if (leaf.size() >= 6) continue;
      leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(i));
      leaves.push_back(oracle::concat({0}, leaf));
      leaves.push_back(oracle::concat({1}, leaf));
    }
    const ContextTree t(leaves);
    for (std::size_t K = 1; K <= 5; ++K) {
      std::set<Word> brute;
      for (const auto& c : leaves) brute.insert(c.size() <= K ? c : Word(c.end() - static_cast<std::ptrdiff_t>(K), c.end()));
      EXPECT_EQ(as_set(truncate_tree(t, K)), brute);
    }
  }
}

TEST(CompareTrees, IdenticalAreEqual) {
  const ContextTree t({W("1"), W("10"), W("00")});
  EXPECT_TRUE(compare_trees(t, t).equal);
}

TEST(CompareTrees, MissingAndExtraFromFirstTreesView) {
  const ContextTree a({W("1"), W("10"), W("00")});
  const ContextTree b({W("1"), W("0")});
  const TreeDiff d = compare_trees(a, b);
  EXPECT_FALSE(d.equal);
  EXPECT_EQ(d.missing, (std::vector<Word>{W("0")}));
  EXPECT_EQ(d.extra, (std::vector<Word>{W("00"), W("10")}));
}

TEST(CompareTrees, RenewalVersusItsTruncation) {
  const auto pct = renewal_tree(RenewalSpec::constant(0.3), 6);
  for (std::size_t K = 1; K <= 4; ++K) {
    const ContextTree truncated = truncate_tree(pct.tree(), K);
    EXPECT_TRUE(compare_trees(pct.tree(), truncated, K).equal);
  }
}

TEST(TreeFile, RoundTripIsBitExact) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<Word, Eigen::VectorXd>> rows;
  for (auto w : {W("1"), W("10"), W("00")}) {
    const double p = u(g);
    rows.emplace_back(w, row2(p));
  }
  const ProbabilisticContextTree pct(Alphabet::binary(), rows);
  std::stringstream ss;
  write_tree(ss, pct);
  const auto back = read_tree(ss, "mem");
  ASSERT_EQ(back.tree().contexts(), pct.tree().contexts());
  for (std::size_t i = 0; i < pct.tree().size(); ++i)
    for (Eigen::Index a = 0; a < 2; ++a) EXPECT_EQ(back.row(i)[a], pct.row(i)[a]);
}

TEST(TreeFile, MultiCharacterLabels) {
  const Alphabet A({"up", "down", "flat"});
  Eigen::VectorXd r(3);
  r << 0.2, 0.3, 0.5;
  const ProbabilisticContextTree pct(A, {{Word{0}, r}, {Word{1}, r}, {Word{2, 2}, r}, {Word{0, 2}, r}, {Word{1, 2}, r}});
  std::stringstream ss;
  write_tree(ss, pct);
  const auto back = read_tree(ss, "mem");
  EXPECT_EQ(back.alphabet(), A);
  EXPECT_EQ(back.tree().contexts(), pct.tree().contexts());
}

TEST(TreeFile, RenewalRoundTrip) {
  RenewalSpec spec = RenewalSpec::geometric(0.5, 1.0);
  spec.head = {0.9, 0.1};
  const auto pct = renewal_tree(spec, 3);
  std::stringstream ss;
  write_tree(ss, pct);
  const auto back = read_tree(ss, "mem");
  ASSERT_TRUE(back.family());
  EXPECT_EQ(*back.family(), spec);
}

TEST(TreeFile, SyntaxErrorsAreIoErrors) {
  std::stringstream missing("1 0.5 0.5\n");
  EXPECT_THROW(read_tree(missing, "mem"), IoError);
  std::stringstream short_row("alphabet 0 1\n1 0.5\n");
  EXPECT_THROW(read_tree(short_row, "mem"), IoError);
  std::stringstream nan_row("alphabet 0 1\n1 0.5 x\n");
  EXPECT_THROW(read_tree(nan_row, "mem"), IoError);
  EXPECT_THROW(load_tree("/nonexistent/tree.txt"), IoError);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlmc/alphabet.hpp"
#include "vlmc/renewal_spec.hpp"

namespace vlmc {

/// A set of contexts, each a Word in time order.
///
/// Bounded trees list every context. Unbounded trees are the depth-limited
/// materialization of a closed-form family: every context of length up to
/// depth() is listed and longer contexts are known to exist.
///
/// The suffix property is not enforced on construction; validate_tree()
/// reports violations so that estimated trees can be carried around as-is.
class ContextTree {
 public:
  ContextTree() = default;
  /// A bounded tree. Contexts must be non-empty; they are sorted canonically
  /// (by length, then lexicographically).
  explicit ContextTree(std::vector<Word> contexts);
  /// Materialized prefix of an unbounded family.
  static ContextTree unbounded_prefix(std::vector<Word> contexts, std::size_t depth);

  const std::vector<Word>& contexts() const noexcept { return contexts_; }
  std::size_t size() const noexcept { return contexts_.size(); }
  bool empty() const noexcept { return contexts_.empty(); }

  bool bounded() const noexcept { return bounded_; }
  /// Maximum listed context length (the height K when bounded).
  std::size_t height() const noexcept { return height_; }
  /// Materialization depth; equals height() for bounded trees.
  std::size_t depth() const noexcept { return depth_; }

  /// Index of `w` in contexts(), if present.
  std::optional<std::size_t> index_of(WordView w) const;
  bool contains(WordView w) const { return index_of(w).has_value(); }

  /// Index of the shortest listed context that is a suffix of `past`.
  std::optional<std::size_t> match(WordView past) const;

  bool operator==(const ContextTree& other) const {
    return bounded_ == other.bounded_ && depth_ == other.depth_ && contexts_ == other.contexts_;
  }

 private:
  void build_index();

  struct Node {
    std::map<Symbol, std::uint32_t> children;
    std::int64_t context = -1;
  };

  std::vector<Word> contexts_;
  bool bounded_ = true;
  std::size_t height_ = 0;
  std::size_t depth_ = 0;
  // Trie keyed most-recent-symbol first.
  std::vector<Node> nodes_;
};

/// Order used everywhere contexts are listed: shorter first, then
/// lexicographic on symbol indices in time order.
bool canonical_less(const Word& a, const Word& b);

/// A context tree with one next-symbol distribution per context.
///
/// Rows are aligned with tree().contexts(). When family() is set the tree is
/// the materialized prefix of a renewal chain and rows beyond the
/// materialization are available through row_for().
class ProbabilisticContextTree {
 public:
  ProbabilisticContextTree() = default;
  ProbabilisticContextTree(Alphabet alphabet, std::vector<std::pair<Word, Eigen::VectorXd>> rows);
  ProbabilisticContextTree(Alphabet alphabet, ContextTree tree, std::vector<Eigen::VectorXd> rows,
                           std::optional<RenewalSpec> family = std::nullopt);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const ContextTree& tree() const noexcept { return tree_; }
  const std::vector<Eigen::VectorXd>& rows() const noexcept { return rows_; }
  const Eigen::VectorXd& row(std::size_t context_index) const { return rows_.at(context_index); }
  const std::optional<RenewalSpec>& family() const noexcept { return family_; }

  /// Transition row of a context, including contexts of a renewal family
  /// beyond the materialized depth. Throws if `context` is not a context.
  Eigen::VectorXd row_for(WordView context) const;

  bool bounded() const noexcept { return tree_.bounded(); }

 private:
  Alphabet alphabet_;
  ContextTree tree_;
  std::vector<Eigen::VectorXd> rows_;
  std::optional<RenewalSpec> family_;
};

struct SuffixViolation {
  Word shorter;
  Word longer;  // equal to `shorter` for duplicated contexts
};

struct RowViolation {
  Word context;
  std::string reason;
};

struct ValidationReport {
  std::vector<SuffixViolation> suffix;
  std::vector<RowViolation> rows;

  bool valid() const noexcept { return suffix.empty() && rows.empty(); }
};

inline constexpr double kRowTolerance = 1e-9;

/// Check the suffix property and that every row is a probability vector
/// (nonnegative, sums to 1 within kRowTolerance). For renewal families the
/// check runs on a materialization of depth `depth` when given.
ValidationReport validate_tree(const ProbabilisticContextTree& pct,
                               std::optional<std::size_t> depth = std::nullopt);
/// Suffix-property check only.
std::vector<SuffixViolation> suffix_violations(const ContextTree& tree);

/// The unique context that is a suffix of `past` (last element = most recent
/// symbol), or nullopt when `past` is too short to decide.
std::optional<Word> context_of(const ProbabilisticContextTree& pct, WordView past);

/// tau|_K: contexts of length <= K together with the length-K suffixes of the
/// longer ones. For unbounded trees the materialization must exceed K.
ContextTree truncate_tree(const ContextTree& tree, std::size_t K);

struct TreeDiff {
  std::vector<Word> missing;  // in `reference`, absent from `candidate`
  std::vector<Word> extra;    // in `candidate`, absent from `reference`
  bool equal = true;
};

/// Set difference between a candidate tree and a reference tree, optionally
/// after truncating both at K.
TreeDiff compare_trees(const ContextTree& candidate, const ContextTree& reference,
                       std::optional<std::size_t> K = std::nullopt);

}  // namespace vlmc

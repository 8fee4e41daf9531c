#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "vlmc/alphabet.hpp"

namespace vlmc {

struct SymbolSequence;

/// Window counts N_n(w) for every string 1 <= |w| <= depth occurring in a
/// sample, where N_n(w) is the number of positions t in [0, n - |w|] with
/// X_t^{t+|w|-1} = w.
///
/// Keys are reversed: the child of the node for w along symbol y is the node
/// for y·w, so moving one step further into the past is a single lookup.
/// The trie grows by append(), which adds the windows ending at the new
/// position; a trie built from a prefix therefore holds that prefix's counts.
class CountTrie {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kNone = ~NodeId{0};

  CountTrie(std::size_t alphabet_size, std::size_t max_depth);

  void append(Symbol x);

  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t max_depth() const noexcept { return max_depth_; }
  std::size_t sample_length() const noexcept { return sample_.size(); }
  const Word& sample() const noexcept { return sample_; }

  NodeId root() const noexcept { return 0; }
  /// Node for older·w given the node for w, or kNone when never observed.
  NodeId child(NodeId node, Symbol older) const;
  /// N_n of the node's string; the root (empty string) reports n.
  std::uint64_t count(NodeId node) const noexcept { return node == kNone ? 0 : nodes_[node].count; }
  std::size_t node_depth(NodeId node) const noexcept { return nodes_[node].depth; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }

  /// Node for w (time order), kNone when unobserved. Requires |w| <= depth.
  NodeId find(WordView w) const;

  /// Visit every observed string (as its node) with its string, in
  /// lexicographic order of the time-ordered strings.
  void for_each_string(const std::function<void(const Word&, NodeId)>& fn) const;

 private:
  NodeId child_or_create(NodeId node, Symbol older);

  struct Node {
    std::uint64_t count = 0;
    std::uint32_t depth = 0;
    std::uint32_t block = kNone;  // dense child block, small alphabets only
  };

  std::size_t alphabet_size_;
  std::size_t max_depth_;
  bool dense_;
  std::vector<Node> nodes_;
  std::vector<NodeId> blocks_;
  std::unordered_map<std::uint64_t, NodeId> sparse_children_;
  Word sample_;
};

/// Counts of every window of length 1..d. Throws PreconditionError unless
/// 1 <= d <= n.
CountTrie build_counts(const SymbolSequence& sample, std::size_t d);
CountTrie build_counts(WordView sample, std::size_t alphabet_size, std::size_t d);

/// Exact N_n(w); 0 for unobserved strings. Throws "depth exceeded" when
/// |w| > depth.
std::uint64_t n_count(const CountTrie& trie, WordView w);

/// N_n(w b) for every symbol b.
std::vector<std::uint64_t> transition_counts(const CountTrie& trie, WordView w);

/// Empirical transition probability N(wa) / sum_b N(wb), or exactly 1/|A|
/// when the denominator is 0. Requires |w| + 1 <= depth.
double p_hat(const CountTrie& trie, Symbol a, WordView w);

/// The whole row p_hat(. | w).
std::vector<double> p_hat_row(const CountTrie& trie, WordView w);

}  // namespace vlmc

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vlmc/alphabet.hpp"
#include "vlmc/context_tree.hpp"
#include "vlmc/counts.hpp"

namespace vlmc {

struct SymbolSequence;

/// How the longest candidate context is chosen.
enum class DepthMode {
  kRandom,         // M(n): longest suffix still seen often enough
  kDeterministic,  // k(n) = floor(C1 log n)
};

/// Constants of algorithm Context. The count threshold of M(n) and the
/// pruning threshold are independent constants.
struct ContextConfig {
  double c1 = 1.0;
  double c2_count = 1.0;
  double c2_prune = 1.0;
  DepthMode depth_mode = DepthMode::kDeterministic;

  void check() const;
};

/// Parameters of the Delta-threshold estimator.
struct DeltaConfig {
  double delta = 0.1;
  std::size_t k = 1;

  void check() const;
};

struct EstimatedTree {
  std::vector<Word> contexts;  // canonical order, deduplicated
  std::string provenance;

  ContextTree tree() const { return ContextTree(contexts); }
  bool operator==(const EstimatedTree& other) const { return contexts == other.contexts; }
};

/// Log-likelihood ratio gain of splitting w into its one-step-older
/// extensions:
///   2 sum_y sum_a N(ywa) log[ p_hat(a|yw) / p_hat(a|w) ]
/// with 0 log(.) = 0. Clamped at 0 (it is non-negative up to rounding).
/// Requires |w| + 2 <= trie depth.
double lambda_stat(const CountTrie& trie, WordView w);

/// floor(C1 log n), the deterministic candidate depth, limited to n - 1.
std::size_t candidate_depth(std::size_t n, double c1);

/// M(n): the largest i in {0, ..., floor(C1 log n)} whose length-i suffix of
/// the trie's sample occurs more than C2_count n / sqrt(log n) times; 0 when
/// none does. Requires n >= 3 and trie depth >= floor(C1 log n).
std::size_t max_candidate_length(const CountTrie& trie, const ContextConfig& cfg);

/// Estimated length of the context of the trie's whole sample:
///   1 + max{ i in 1..D-1 : Lambda(X_{n-i}^{n-1}) > C2_prune log n }
/// or 1 when no i qualifies, with D = M(n) or floor(C1 log n).
/// Requires trie depth >= candidate_depth(n) + 1.
std::size_t ell_hat(const CountTrie& trie, const ContextConfig& cfg);
/// Convenience overload building its own counts.
std::size_t ell_hat(const SymbolSequence& sample, const ContextConfig& cfg);

/// { X_{j - ell_hat_j}^{j-1} : j = ceil(n/2), ..., n } with counts grown
/// incrementally along the sample. Requires n >= 6.
EstimatedTree empirical_tree_rissanen(const SymbolSequence& sample, const ContextConfig& cfg);

/// max_a | p_hat(a|w) - p_hat(a|w minus its oldest symbol) |; for |w| = 1 the
/// comparison is against the empirical marginal N(a)/n.
/// Requires 1 <= |w| and |w| + 1 <= trie depth.
double delta_stat(const CountTrie& trie, WordView w);

/// Strings x with 1 <= |x| <= k, Delta(x) > delta, and Delta(y x) <= delta
/// for every extension y x with |y x| <= k. Strings range over those with at
/// least one observed transition (sum_b N(xb) > 0). Requires k < n.
EstimatedTree estimate_tree_delta(const SymbolSequence& sample, const DeltaConfig& cfg);

/// Same as above on prebuilt counts (trie depth must be >= k + 1).
EstimatedTree estimate_tree_delta(const CountTrie& trie, const DeltaConfig& cfg);

}  // namespace vlmc

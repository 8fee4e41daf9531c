#include "vlmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "vlmc/error.hpp"
#include "vlmc/sampler.hpp"

namespace vlmc {

using NodeId = CountTrie::NodeId;

void ContextConfig::check() const {
  if (!(c1 > 0.0) || !(c2_count > 0.0) || !(c2_prune > 0.0))
    throw PreconditionError("Context constants C1, C2_count, C2_prune must be > 0");
}

void DeltaConfig::check() const {
  if (!(delta > 0.0)) throw PreconditionError("delta must be > 0");
  if (k < 1) throw PreconditionError("k must be >= 1");
}

namespace {

// Lambda for the string whose "next symbol" nodes are given: next[a] is the
// node for w·a (or kNone).
double lambda_from_nodes(const CountTrie& trie, const std::vector<NodeId>& next) {
  const std::size_t A = trie.alphabet_size();
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < A; ++a) total += trie.count(next[a]);
  if (total == 0) return 0.0;
  double sum = 0.0;
  std::vector<std::uint64_t> split(A);
  for (std::size_t y = 0; y < A; ++y) {
    std::uint64_t split_total = 0;
    for (std::size_t a = 0; a < A; ++a) {
      split[a] = trie.count(trie.child(next[a], static_cast<Symbol>(y)));
      split_total += split[a];
    }
    if (split_total == 0) continue;
    for (std::size_t a = 0; a < A; ++a) {
      if (split[a] == 0) continue;
      const double n_ywa = static_cast<double>(split[a]);
      const double n_wa = static_cast<double>(trie.count(next[a]));
      sum += n_ywa * std::log((n_ywa * static_cast<double>(total)) / (static_cast<double>(split_total) * n_wa));
    }
  }
  return std::max(0.0, 2.0 * sum);
}

std::vector<NodeId> next_nodes(const CountTrie& trie, WordView w) {
  std::vector<NodeId> next(trie.alphabet_size());
  for (std::size_t a = 0; a < next.size(); ++a) {
    NodeId node = trie.child(trie.root(), static_cast<Symbol>(a));
    for (auto it = w.rbegin(); it != w.rend() && node != CountTrie::kNone; ++it) node = trie.child(node, *it);
    next[a] = node;
  }
  return next;
}

void require_length(std::size_t n) {
  if (n < 3) throw PreconditionError("algorithm Context needs n >= 3");
}

std::size_t ell_hat_prefix(const CountTrie& trie, const ContextConfig& cfg) {
  const std::size_t n = trie.sample_length();
  require_length(n);
  const std::size_t D =
      cfg.depth_mode == DepthMode::kRandom ? max_candidate_length(trie, cfg) : candidate_depth(n, cfg.c1);
  if (D < 2) return 1;
  if (trie.max_depth() < D + 1) throw PreconditionError("depth exceeded");
  const double threshold = cfg.c2_prune * std::log(static_cast<double>(n));
  const Word& x = trie.sample();
  // next[a] walks root -> a -> X_{n-1} -> X_{n-2} -> ... one step per i.
  std::vector<NodeId> next(trie.alphabet_size());
  for (std::size_t a = 0; a < next.size(); ++a) next[a] = trie.child(trie.root(), static_cast<Symbol>(a));
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 <= D; ++i) {
    const Symbol older = x[n - i];
    for (auto& node : next) node = trie.child(node, older);
    if (lambda_from_nodes(trie, next) > threshold) best = i;
  }
  return 1 + best;
}

}  // namespace

double lambda_stat(const CountTrie& trie, WordView w) {
  if (w.size() + 2 > trie.max_depth()) throw PreconditionError("depth exceeded");
  return lambda_from_nodes(trie, next_nodes(trie, w));
}

std::size_t candidate_depth(std::size_t n, double c1) {
  if (n < 2) return 0;
  const auto raw = static_cast<std::size_t>(std::floor(c1 * std::log(static_cast<double>(n))));
  return std::min(raw, n - 1);
}

std::size_t max_candidate_length(const CountTrie& trie, const ContextConfig& cfg) {
  cfg.check();
  const std::size_t n = trie.sample_length();
  require_length(n);
  const std::size_t bound = candidate_depth(n, cfg.c1);
  if (trie.max_depth() < bound) throw PreconditionError("depth exceeded");
  const double log_n = std::log(static_cast<double>(n));
  const double threshold = cfg.c2_count * static_cast<double>(n) / std::sqrt(log_n);
  const Word& x = trie.sample();
  std::size_t best = 0;
  NodeId node = trie.root();
  for (std::size_t i = 1; i <= bound; ++i) {
    node = trie.child(node, x[n - i]);
    if (static_cast<double>(trie.count(node)) > threshold) best = i;
  }
  return best;
}

std::size_t ell_hat(const CountTrie& trie, const ContextConfig& cfg) {
  cfg.check();
  return ell_hat_prefix(trie, cfg);
}

std::size_t ell_hat(const SymbolSequence& sample, const ContextConfig& cfg) {
  cfg.check();
  const std::size_t n = sample.size();
  require_length(n);
  const CountTrie trie = build_counts(sample, std::min(n, candidate_depth(n, cfg.c1) + 1));
  return ell_hat_prefix(trie, cfg);
}

EstimatedTree empirical_tree_rissanen(const SymbolSequence& sample, const ContextConfig& cfg) {
  cfg.check();
  const std::size_t n = sample.size();
  if (n < 6) throw PreconditionError("empirical tree needs n >= 6");
  CountTrie trie(sample.alphabet.size(), std::min(n, candidate_depth(n, cfg.c1) + 1));
  const std::size_t first = (n + 1) / 2;
  std::set<Word> found;
  for (std::size_t j = 1; j <= n; ++j) {
    trie.append(sample.symbols[j - 1]);
    if (j < first) continue;
    const std::size_t len = ell_hat_prefix(trie, cfg);
    found.emplace(sample.symbols.begin() + static_cast<std::ptrdiff_t>(j - len),
                  sample.symbols.begin() + static_cast<std::ptrdiff_t>(j));
  }
  EstimatedTree out{std::vector<Word>(found.begin(), found.end()), {}};
  std::sort(out.contexts.begin(), out.contexts.end(), canonical_less);
  std::ostringstream os;
  os << "context " << (cfg.depth_mode == DepthMode::kRandom ? "random-depth" : "fixed-depth") << " c1=" << cfg.c1
     << " c2_count=" << cfg.c2_count << " c2_prune=" << cfg.c2_prune << " n=" << n;
  out.provenance = os.str();
  return out;
}

double delta_stat(const CountTrie& trie, WordView w) {
  if (w.empty()) throw PreconditionError("Delta needs |w| >= 1");
  const auto row = p_hat_row(trie, w);
  const auto parent = p_hat_row(trie, w.subspan(1));
  double best = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) best = std::max(best, std::abs(row[a] - parent[a]));
  return best;
}

namespace {

struct DeltaWalk {
  const CountTrie& trie;
  const DeltaConfig& cfg;
  std::vector<Word> members;

  // Returns the maximum Delta over strict extensions of `reversed` (the
  // current string, most recent symbol first) whose transitions are observed.
  double visit(NodeId node, Word& reversed, const std::vector<double>& row) {
    double subtree = 0.0;
    if (reversed.size() >= cfg.k) return subtree;
    for (std::size_t y = 0; y < trie.alphabet_size(); ++y) {
      const NodeId c = trie.child(node, static_cast<Symbol>(y));
      if (c == CountTrie::kNone) continue;
      reversed.push_back(static_cast<Symbol>(y));
      const Word w(reversed.rbegin(), reversed.rend());
      const auto counts = transition_counts(trie, w);
      std::uint64_t total = 0;
      for (auto v : counts) total += v;
      if (total > 0) {
        std::vector<double> child_row(counts.size());
        double delta = 0.0;
        for (std::size_t a = 0; a < counts.size(); ++a) {
          child_row[a] = static_cast<double>(counts[a]) / static_cast<double>(total);
          delta = std::max(delta, std::abs(child_row[a] - row[a]));
        }
        const double below = visit(c, reversed, child_row);
        if (delta > cfg.delta && below <= cfg.delta) members.push_back(w);
        subtree = std::max({subtree, delta, below});
      }
      reversed.pop_back();
    }
    return subtree;
  }
};

}  // namespace

EstimatedTree estimate_tree_delta(const CountTrie& trie, const DeltaConfig& cfg) {
  cfg.check();
  if (cfg.k >= trie.sample_length()) throw PreconditionError("Delta estimator needs k < n");
  if (trie.max_depth() < cfg.k + 1) throw PreconditionError("depth exceeded");
  DeltaWalk walk{trie, cfg, {}};
  Word reversed;
  walk.visit(trie.root(), reversed, p_hat_row(trie, {}));
  EstimatedTree out{std::move(walk.members), {}};
  std::sort(out.contexts.begin(), out.contexts.end(), canonical_less);
  std::ostringstream os;
  os << "delta delta=" << cfg.delta << " k=" << cfg.k << " n=" << trie.sample_length();
  out.provenance = os.str();
  return out;
}

EstimatedTree estimate_tree_delta(const SymbolSequence& sample, const DeltaConfig& cfg) {
  cfg.check();
  if (cfg.k >= sample.size()) throw PreconditionError("Delta estimator needs k < n");
  return estimate_tree_delta(build_counts(sample, cfg.k + 1), cfg);
}

}  // namespace vlmc

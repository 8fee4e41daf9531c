#include "vlmc/counts.hpp"

#include <algorithm>

#include "vlmc/error.hpp"
#include "vlmc/sampler.hpp"

namespace vlmc {

namespace {
constexpr std::size_t kDenseAlphabetLimit = 256;
}

CountTrie::CountTrie(std::size_t alphabet_size, std::size_t max_depth)
    : alphabet_size_(alphabet_size), max_depth_(max_depth), dense_(alphabet_size <= kDenseAlphabetLimit) {
  if (alphabet_size < 1) throw PreconditionError("empty alphabet");
  if (max_depth < 1) throw PreconditionError("count depth must be >= 1");
  nodes_.emplace_back();
}

CountTrie::NodeId CountTrie::child(NodeId node, Symbol older) const {
  if (node == kNone) return kNone;
  if (dense_) {
    const auto block = nodes_[node].block;
    return block == kNone ? kNone : blocks_[block + older];
  }
  auto it = sparse_children_.find((static_cast<std::uint64_t>(node) << 16) | older);
  return it == sparse_children_.end() ? kNone : it->second;
}

CountTrie::NodeId CountTrie::child_or_create(NodeId node, Symbol older) {
  const auto fresh = static_cast<NodeId>(nodes_.size());
  const auto depth = nodes_[node].depth + 1;
  if (dense_) {
    if (nodes_[node].block == kNone) {
      nodes_[node].block = static_cast<std::uint32_t>(blocks_.size());
      blocks_.resize(blocks_.size() + alphabet_size_, kNone);
    }
    NodeId& slot = blocks_[nodes_[node].block + older];
    if (slot != kNone) return slot;
    slot = fresh;
  } else {
    auto [it, inserted] = sparse_children_.try_emplace((static_cast<std::uint64_t>(node) << 16) | older, fresh);
    if (!inserted) return it->second;
  }
  nodes_.push_back(Node{0, depth, kNone});
  return fresh;
}

void CountTrie::append(Symbol x) {
  if (x >= alphabet_size_) throw PreconditionError("symbol outside alphabet");
  sample_.push_back(x);
  ++nodes_[0].count;
  const std::size_t end = sample_.size();
  const std::size_t reach = std::min(max_depth_, end);
  NodeId node = root();
  for (std::size_t j = 1; j <= reach; ++j) {
    node = child_or_create(node, sample_[end - j]);
    ++nodes_[node].count;
  }
}

CountTrie::NodeId CountTrie::find(WordView w) const {
  if (w.size() > max_depth_) throw PreconditionError("depth exceeded");
  NodeId node = root();
  for (auto it = w.rbegin(); it != w.rend() && node != kNone; ++it) node = child(node, *it);
  return node;
}

void CountTrie::for_each_string(const std::function<void(const Word&, NodeId)>& fn) const {
  std::vector<std::vector<std::pair<Symbol, NodeId>>> kids(nodes_.size());
  if (dense_) {
    for (NodeId v = 0; v < nodes_.size(); ++v)
      for (std::size_t y = 0; y < alphabet_size_; ++y)
        if (NodeId c = child(v, static_cast<Symbol>(y)); c != kNone) kids[v].emplace_back(static_cast<Symbol>(y), c);
  } else {
    for (const auto& [key, c] : sparse_children_)
      kids[key >> 16].emplace_back(static_cast<Symbol>(key & 0xFFFF), c);
  }
  std::vector<std::pair<Word, NodeId>> all;
  all.reserve(nodes_.size());
  std::vector<std::pair<NodeId, Word>> stack{{root(), Word{}}};
  while (!stack.empty()) {
    auto [node, reversed] = std::move(stack.back());
    stack.pop_back();
    if (node != root()) all.emplace_back(Word(reversed.rbegin(), reversed.rend()), node);
    for (const auto& [y, c] : kids[node]) {
      Word next = reversed;
      next.push_back(y);
      stack.emplace_back(c, std::move(next));
    }
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [w, node] : all) fn(w, node);
}

CountTrie build_counts(WordView sample, std::size_t alphabet_size, std::size_t d) {
  if (d < 1) throw PreconditionError("count depth must be >= 1");
  if (d > sample.size()) throw PreconditionError("count depth exceeds sample length");
  CountTrie trie(alphabet_size, d);
  for (Symbol x : sample) trie.append(x);
  return trie;
}

CountTrie build_counts(const SymbolSequence& sample, std::size_t d) {
  return build_counts(sample.symbols, sample.alphabet.size(), d);
}

std::uint64_t n_count(const CountTrie& trie, WordView w) {
  if (w.empty()) return trie.sample_length();
  return trie.count(trie.find(w));
}

std::vector<std::uint64_t> transition_counts(const CountTrie& trie, WordView w) {
  if (w.size() + 1 > trie.max_depth()) throw PreconditionError("depth exceeded");
  std::vector<std::uint64_t> out(trie.alphabet_size(), 0);
  for (std::size_t b = 0; b < trie.alphabet_size(); ++b) {
    CountTrie::NodeId node = trie.child(trie.root(), static_cast<Symbol>(b));
    for (auto it = w.rbegin(); it != w.rend() && node != CountTrie::kNone; ++it) node = trie.child(node, *it);
    out[b] = trie.count(node);
  }
  return out;
}

std::vector<double> p_hat_row(const CountTrie& trie, WordView w) {
  const auto counts = transition_counts(trie, w);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::vector<double> row(counts.size());
  if (total == 0) {
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(counts.size()));
    return row;
  }
  for (std::size_t a = 0; a < counts.size(); ++a)
    row[a] = static_cast<double>(counts[a]) / static_cast<double>(total);
  return row;
}

double p_hat(const CountTrie& trie, Symbol a, WordView w) {
  if (a >= trie.alphabet_size()) throw PreconditionError("symbol outside alphabet");
  return p_hat_row(trie, w)[a];
}

}  // namespace vlmc

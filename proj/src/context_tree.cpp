#include "vlmc/context_tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vlmc/error.hpp"

namespace vlmc {

namespace {

// Renewal contexts are 1 0^k in time order.
std::optional<std::size_t> renewal_zero_run(WordView w) {
  if (w.empty() || w.front() != 1) return std::nullopt;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] != 0) return std::nullopt;
  return w.size() - 1;
}

}  // namespace

bool canonical_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

ContextTree::ContextTree(std::vector<Word> contexts) : contexts_(std::move(contexts)) {
  for (const auto& c : contexts_)
    if (c.empty()) throw PreconditionError("contexts must have length >= 1");
  std::sort(contexts_.begin(), contexts_.end(), canonical_less);
  for (const auto& c : contexts_) height_ = std::max(height_, c.size());
  depth_ = height_;
  build_index();
}

ContextTree ContextTree::unbounded_prefix(std::vector<Word> contexts, std::size_t depth) {
  ContextTree t(std::move(contexts));
  if (t.height_ > depth) throw PreconditionError("materialized context longer than depth");
  t.bounded_ = false;
  t.depth_ = depth;
  return t;
}

void ContextTree::build_index() {
  nodes_.assign(1, Node{});
  for (std::size_t i = 0; i < contexts_.size(); ++i) {
    const auto& c = contexts_[i];
    std::uint32_t node = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      auto [pos, inserted] = nodes_[node].children.try_emplace(*it, static_cast<std::uint32_t>(nodes_.size()));
      std::uint32_t next = pos->second;
      if (inserted) nodes_.emplace_back();
      node = next;
    }
    // Keep the first occurrence of duplicated contexts.
    if (nodes_[node].context < 0) nodes_[node].context = static_cast<std::int64_t>(i);
  }
}

std::optional<std::size_t> ContextTree::index_of(WordView w) const {
  if (nodes_.empty()) return std::nullopt;
  std::uint32_t node = 0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    auto child = nodes_[node].children.find(*it);
    if (child == nodes_[node].children.end()) return std::nullopt;
    node = child->second;
  }
  if (nodes_[node].context < 0) return std::nullopt;
  return static_cast<std::size_t>(nodes_[node].context);
}

std::optional<std::size_t> ContextTree::match(WordView past) const {
  if (nodes_.empty()) return std::nullopt;
  std::uint32_t node = 0;
  for (auto it = past.rbegin(); it != past.rend(); ++it) {
    auto child = nodes_[node].children.find(*it);
    if (child == nodes_[node].children.end()) return std::nullopt;
    node = child->second;
    if (nodes_[node].context >= 0) return static_cast<std::size_t>(nodes_[node].context);
  }
  return std::nullopt;
}

ProbabilisticContextTree::ProbabilisticContextTree(Alphabet alphabet,
                                                   std::vector<std::pair<Word, Eigen::VectorXd>> rows)
    : alphabet_(std::move(alphabet)) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  std::vector<Word> contexts;
  contexts.reserve(rows.size());
  for (auto& [w, row] : rows) {
    contexts.push_back(w);
    rows_.push_back(std::move(row));
  }
  tree_ = ContextTree(std::move(contexts));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (static_cast<std::size_t>(rows_[i].size()) != alphabet_.size())
      throw PreconditionError("transition row size differs from alphabet size");
    for (Symbol s : tree_.contexts()[i])
      if (s >= alphabet_.size()) throw PreconditionError("context symbol outside alphabet");
  }
}

ProbabilisticContextTree::ProbabilisticContextTree(Alphabet alphabet, ContextTree tree,
                                                   std::vector<Eigen::VectorXd> rows,
                                                   std::optional<RenewalSpec> family)
    : alphabet_(std::move(alphabet)), tree_(std::move(tree)), rows_(std::move(rows)), family_(std::move(family)) {
  if (rows_.size() != tree_.size()) throw PreconditionError("one transition row per context required");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (static_cast<std::size_t>(rows_[i].size()) != alphabet_.size())
      throw PreconditionError("transition row size differs from alphabet size");
    for (Symbol s : tree_.contexts()[i])
      if (s >= alphabet_.size()) throw PreconditionError("context symbol outside alphabet");
  }
  if (family_ && alphabet_.size() != 2) throw PreconditionError("renewal family needs a binary alphabet");
}

Eigen::VectorXd ProbabilisticContextTree::row_for(WordView context) const {
  if (auto idx = tree_.index_of(context)) return rows_[*idx];
  if (family_) {
    if (auto k = renewal_zero_run(context)) {
      Eigen::VectorXd row(2);
      row << 1.0 - family_->q(*k), family_->q(*k);
      return row;
    }
  }
  throw PreconditionError("'" + alphabet_.format(context) + "' is not a context");
}

std::vector<SuffixViolation> suffix_violations(const ContextTree& tree) {
  std::vector<SuffixViolation> out;
  const auto& cs = tree.contexts();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i > 0 && cs[i] == cs[i - 1]) {
      out.push_back({cs[i], cs[i]});
      continue;
    }
    // Every proper suffix of cs[i] that is itself a context is a violation.
    for (std::size_t len = 1; len < cs[i].size(); ++len) {
      auto suffix = last_symbols(cs[i], len);
      if (tree.contains(suffix)) out.push_back({Word(suffix.begin(), suffix.end()), cs[i]});
    }
  }
  return out;
}

ValidationReport validate_tree(const ProbabilisticContextTree& pct, std::optional<std::size_t> depth) {
  ValidationReport report;
  const ProbabilisticContextTree* subject = &pct;
  ProbabilisticContextTree rematerialized;
  if (pct.family() && depth && *depth != pct.tree().depth()) {
    std::vector<Word> contexts;
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t k = 0; k + 1 <= *depth; ++k) {
      Word w(k + 1, 0);
      w[0] = 1;
      rows.push_back(pct.row_for(w));
      contexts.push_back(std::move(w));
    }
    rematerialized = ProbabilisticContextTree(pct.alphabet(), ContextTree::unbounded_prefix(contexts, *depth),
                                              rows, pct.family());
    subject = &rematerialized;
  }
  report.suffix = suffix_violations(subject->tree());
  const auto& cs = subject->tree().contexts();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto& row = subject->row(i);
    if (!row.allFinite()) {
      report.rows.push_back({cs[i], "non-finite probability"});
      continue;
    }
    if ((row.array() < 0.0).any()) report.rows.push_back({cs[i], "negative probability"});
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > kRowTolerance)
      report.rows.push_back({cs[i], "probabilities sum to " + std::to_string(sum)});
  }
  return report;
}

std::optional<Word> context_of(const ProbabilisticContextTree& pct, WordView past) {
  if (pct.family()) {
    // Renewal: the context ends at the most recent 1.
    for (std::size_t k = 0; k < past.size(); ++k) {
      if (past[past.size() - 1 - k] == 1) {
        Word w(k + 1, 0);
        w[0] = 1;
        return w;
      }
    }
    return std::nullopt;
  }
  if (auto idx = pct.tree().match(past)) return pct.tree().contexts()[*idx];
  return std::nullopt;
}

ContextTree truncate_tree(const ContextTree& tree, std::size_t K) {
  if (K < 1) throw PreconditionError("truncation level K must be >= 1");
  if (!tree.bounded() && tree.depth() <= K)
    throw PreconditionError("unbounded tree must be materialized beyond the truncation level");
  std::set<Word> out;
  for (const auto& c : tree.contexts()) {
    if (c.size() <= K) {
      out.insert(c);
    } else {
      auto stub = last_symbols(c, K);
      out.emplace(stub.begin(), stub.end());
    }
  }
  return ContextTree(std::vector<Word>(out.begin(), out.end()));
}

TreeDiff compare_trees(const ContextTree& candidate, const ContextTree& reference, std::optional<std::size_t> K) {
  const ContextTree a = K ? truncate_tree(candidate, *K) : candidate;
  const ContextTree b = K ? truncate_tree(reference, *K) : reference;
  const std::set<Word> sa(a.contexts().begin(), a.contexts().end());
  const std::set<Word> sb(b.contexts().begin(), b.contexts().end());
  TreeDiff diff;
  std::set_difference(sb.begin(), sb.end(), sa.begin(), sa.end(), std::back_inserter(diff.missing));
  std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(diff.extra));
  auto order = [](std::vector<Word>& v) { std::sort(v.begin(), v.end(), canonical_less); };
  order(diff.missing);
  order(diff.extra);
  diff.equal = diff.missing.empty() && diff.extra.empty();
  return diff;
}

}  // namespace vlmc

#include "vlmc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "vlmc/error.hpp"

namespace vlmc {

namespace {

ProbabilisticContextTree markov_form(const ProbabilisticContextTree& pct) {
  if (pct.family()) return renewal_markov_equivalent(*pct.family());
  if (!pct.bounded()) throw PreconditionError("unsupported unbounded family: no closed form");
  return pct;
}

std::size_t renewal_head(const ProbabilisticContextTree& pct) {
  if (!check_renewal_recurrence(*pct.family()))
    throw PreconditionError("theory quantities need a recurrent renewal family");
  return pct.family()->tail_start();
}

// Contexts with their rows; renewal families are materialized to `depth`.
std::vector<std::pair<Word, Eigen::VectorXd>> enumerate_contexts(const ProbabilisticContextTree& pct,
                                                                 std::size_t depth) {
  std::vector<std::pair<Word, Eigen::VectorXd>> out;
  if (pct.family()) {
    renewal_head(pct);
    for (std::size_t j = 0; j < depth; ++j) {
      Word w(j + 1, 0);
      w[0] = 1;
      out.emplace_back(w, pct.row_for(w));
    }
    return out;
  }
  if (!pct.bounded()) throw PreconditionError("unsupported unbounded family: no closed form");
  for (std::size_t i = 0; i < pct.tree().size(); ++i) out.emplace_back(pct.tree().contexts()[i], pct.row(i));
  return out;
}

// A tree listing every context up to `depth` (bounded trees unchanged).
ContextTree materialized(const ProbabilisticContextTree& pct, std::size_t depth) {
  if (!pct.family()) return pct.tree();
  std::vector<Word> contexts;
  for (auto& [w, row] : enumerate_contexts(pct, depth)) contexts.push_back(w);
  return ContextTree::unbounded_prefix(std::move(contexts), depth);
}

std::map<Word, std::vector<const Eigen::VectorXd*>> group_by_recent(
    const std::vector<std::pair<Word, Eigen::VectorXd>>& contexts, std::size_t n) {
  std::map<Word, std::vector<const Eigen::VectorXd*>> groups;
  for (const auto& [w, row] : contexts) {
    if (w.size() < n) continue;
    auto recent = last_symbols(w, n);
    groups[Word(recent.begin(), recent.end())].push_back(&row);
  }
  return groups;
}

}  // namespace

// ---------------------------------------------------------------------------

CylinderModel::CylinderModel(const ProbabilisticContextTree& pct)
    : markov_(markov_form(pct)), chain_(markov_), law_(stationary_law(markov_)) {}

double CylinderModel::probability(WordView w) const {
  if (w.empty()) return 1.0;
  const std::size_t K = chain_.order();
  const std::size_t A = chain_.alphabet_size();
  for (Symbol s : w)
    if (s >= A) throw PreconditionError("symbol outside alphabet");
  if (w.size() <= K) {
    std::size_t start = chain_.state_of(w);
    std::size_t width = 1;
    for (std::size_t i = w.size(); i < K; ++i) width *= A;
    start *= width;
    return law_.pi.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(width)).sum();
  }
  std::size_t state = chain_.state_of(w.first(K));
  double p = law_.pi[static_cast<Eigen::Index>(state)];
  for (std::size_t i = K; i < w.size() && p > 0.0; ++i) {
    p *= chain_.prob(state, w[i]);
    state = chain_.next(state, w[i]);
  }
  return p;
}

Eigen::VectorXd CylinderModel::conditional(WordView w) const {
  if (!(probability(w) > 0.0))
    throw PreconditionError("zero-probability conditioning string '" + markov_.alphabet().format(w) + "'");
  if (auto idx = markov_.tree().match(w)) return markov_.row(*idx);
  const std::size_t A = chain_.alphabet_size();
  Eigen::VectorXd row(static_cast<Eigen::Index>(A));
  Word extended(w.begin(), w.end());
  extended.push_back(0);
  for (std::size_t a = 0; a < A; ++a) {
    extended.back() = static_cast<Symbol>(a);
    row[static_cast<Eigen::Index>(a)] = probability(extended);
  }
  return row / row.sum();
}

double cylinder_probability(const ProbabilisticContextTree& pct, WordView w) {
  return CylinderModel(pct).probability(w);
}

Eigen::VectorXd conditional_law(const ProbabilisticContextTree& pct, WordView w) {
  return CylinderModel(pct).conditional(w);
}

ProbabilisticContextTree canonical_approximation(const ProbabilisticContextTree& pct, std::size_t k) {
  if (k < 1) throw PreconditionError("approximation order must be >= 1");
  const CylinderModel model(pct);
  const ContextTree full = materialized(pct, k + 1);
  const ContextTree truncated = truncate_tree(full, k);
  std::vector<Eigen::VectorXd> rows;
  for (const auto& x : truncated.contexts()) {
    if (full.contains(x))
      rows.push_back(pct.row_for(x));
    else
      rows.push_back(model.conditional(x));
  }
  return ProbabilisticContextTree(pct.alphabet(), truncated, std::move(rows));
}

double d_m(const ProbabilisticContextTree& pct, std::size_t m) {
  const CylinderModel model(pct);
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& [x, row] : enumerate_contexts(pct, m)) {
    if (x.size() > m) continue;
    // Contexts the chain never visits have no defined shorter conditional.
    if (!(model.probability(x) > 0.0)) continue;
    any = true;
    const Eigen::VectorXd shorter = model.conditional(WordView(x).subspan(1));
    best = std::min(best, (row - shorter).cwiseAbs().maxCoeff());
  }
  if (!any) throw PreconditionError("no context of length <= " + std::to_string(m));
  return best;
}

double epsilon_m(const ProbabilisticContextTree& pct, std::size_t m, EpsilonRange range) {
  if (m < 1) throw PreconditionError("epsilon_m needs m >= 1");
  const CylinderModel model(pct);
  double best = std::numeric_limits<double>::infinity();
  if (range == EpsilonRange::kContextsAndStubs) {
    const ContextTree truncated = truncate_tree(materialized(pct, m + 1), m);
    for (const auto& x : truncated.contexts()) {
      const double p = model.probability(x);
      if (p > 0.0) best = std::min(best, p);
    }
  } else {
    const std::size_t A = pct.alphabet().size();
    std::vector<Word> frontier{Word{}};
    for (std::size_t len = 1; len <= m; ++len) {
      std::vector<Word> next;
      for (const auto& w : frontier) {
        for (std::size_t a = 0; a < A; ++a) {
          Word x = w;
          x.push_back(static_cast<Symbol>(a));
          const double p = model.probability(x);
          if (!(p > 0.0)) continue;
          best = std::min(best, p);
          next.push_back(std::move(x));
        }
      }
      frontier = std::move(next);
    }
  }
  return best;
}

AlphaStats alpha_stats(const ProbabilisticContextTree& pct, std::size_t n_max) {
  // Depth beyond which every alpha_n is 1.
  std::size_t last = 0;
  std::size_t depth = 0;
  if (pct.family()) {
    const std::size_t H = renewal_head(pct);
    last = H + 1;
    depth = std::max(n_max, H) + 2;
  } else {
    last = pct.tree().height();
    depth = last;
  }
  const auto contexts = enumerate_contexts(pct, depth);
  const std::size_t A = pct.alphabet().size();

  AlphaStats out;
  for (std::size_t a = 0; a < A; ++a) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& [w, row] : contexts) inf = std::min(inf, row[static_cast<Eigen::Index>(a)]);
    out.alpha0 += inf;
  }
  auto alpha_at = [&](std::size_t n) {
    if (n > last) return 1.0;
    const auto groups = group_by_recent(contexts, n);
    if (groups.empty()) return 1.0;
    double value = std::numeric_limits<double>::infinity();
    for (const auto& [recent, rows] : groups) {
      double sum = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        double inf = std::numeric_limits<double>::infinity();
        for (const auto* row : rows) inf = std::min(inf, (*row)[static_cast<Eigen::Index>(a)]);
        sum += inf;
      }
      value = std::min(value, sum);
    }
    return value;
  };
  out.alpha = 1.0 - out.alpha0;
  for (std::size_t n = 1; n <= last; ++n) out.alpha += 1.0 - alpha_at(n);
  out.alpha_n.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) out.alpha_n.push_back(alpha_at(n));
  return out;
}

double beta_k(const ProbabilisticContextTree& pct, std::size_t k) {
  std::size_t depth = pct.tree().height();
  if (pct.family()) depth = std::max(k, renewal_head(pct)) + 2;
  const auto contexts = enumerate_contexts(pct, depth);
  double best = 0.0;
  if (k >= 1) {
    for (const auto& [recent, rows] : group_by_recent(contexts, k)) {
      const auto size = rows.front()->size();
      for (Eigen::Index a = 0; a < size; ++a) {
        double lo = 1.0, hi = 0.0;
        for (const auto* row : rows) {
          lo = std::min(lo, (*row)[a]);
          hi = std::max(hi, (*row)[a]);
        }
        best = std::max(best, hi - lo);
      }
    }
    return best;
  }
  for (std::size_t i = 0; i < contexts.size(); ++i)
    for (std::size_t j = i + 1; j < contexts.size(); ++j)
      if (contexts[i].first.back() != contexts[j].first.back())
        best = std::max(best, (contexts[i].second - contexts[j].second).cwiseAbs().maxCoeff());
  return best;
}

std::size_t min_k_condition(const ProbabilisticContextTree& pct, std::size_t K) {
  if (K < 1) throw PreconditionError("truncation level K must be >= 1");
  const ContextTree full = materialized(pct, K + 1);
  const ContextTree truncated = truncate_tree(full, K);
  std::size_t worst = 0;
  for (const auto& x : truncated.contexts()) {
    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    if (full.contains(x)) {
      shortest = x.size();
    } else {
      for (const auto& y : full.contexts())
        if (y.size() > K && is_suffix(x, y)) shortest = std::min(shortest, y.size());
    }
    worst = std::max(worst, shortest);
  }
  return worst + 1;
}

double bound_constant(double alpha0, double alpha) {
  return alpha0 / (8.0 * std::numbers::e * (alpha + alpha0));
}

double deviation_bound(const DeviationInputs& in) {
  const double A = static_cast<double>(in.alphabet_size);
  const double k = static_cast<double>(in.k);
  if (!(in.t > 0.0) || !(in.p_w > 0.0) || !(in.alpha0 > 0.0))
    throw PreconditionError("theorem precondition not met: t, P(w) and alpha0 must be > 0");
  if (!(in.n > (A + 1.0) / (in.t * in.p_w) + k)) throw PreconditionError("theorem precondition not met");
  const double m = in.n - k;
  const double gap = in.t - (A + 1.0) / (m * in.p_w);
  const double C = bound_constant(in.alpha0, in.alpha);
  const double exponent = -m * gap * gap * in.p_w * in.p_w * C / (4.0 * A * A * (k + 1.0));
  return 2.0 * A * std::exp(1.0 / std::numbers::e) * std::exp(exponent);
}

BoundInputs make_bound_inputs(const ProbabilisticContextTree& pct, double n, std::size_t k, std::size_t K,
                              double delta) {
  BoundInputs in;
  in.n = n;
  in.k = k;
  in.K = K;
  in.delta = delta;
  in.alphabet_size = pct.alphabet().size();
  in.d_k = d_m(pct, k);
  in.eps_k = epsilon_m(pct, k);
  const AlphaStats stats = alpha_stats(pct, k);
  in.alpha0 = stats.alpha0;
  in.alpha = stats.alpha;
  in.min_admissible_k = min_k_condition(pct, K);
  return in;
}

double recovery_min_n(const BoundInputs& in) {
  const double A = static_cast<double>(in.alphabet_size);
  return 2.0 * (A + 1.0) / (std::min(in.delta, in.d_k - in.delta) * in.eps_k) + static_cast<double>(in.k);
}

double recovery_bound(const BoundInputs& in) {
  if (in.K < 1) throw PreconditionError("truncation level K must be >= 1");
  if (in.k < in.min_admissible_k)
    throw PreconditionError("k = " + std::to_string(in.k) + " violates the depth condition (need k >= " +
                            std::to_string(in.min_admissible_k) + ")");
  if (!(in.delta > 0.0)) throw PreconditionError("delta must be > 0");
  if (!(in.delta < in.d_k)) throw PreconditionError("delta must be < D_k");
  if (!(in.eps_k > 0.0)) throw PreconditionError("eps_k must be > 0");
  if (!(in.alpha0 > 0.0)) throw PreconditionError("alpha0 must be > 0 (weak non-nullness)");
  if (!(in.n > recovery_min_n(in))) throw PreconditionError("n below the sample-size lower bound");
  const double A = static_cast<double>(in.alphabet_size);
  const double k = static_cast<double>(in.k);
  const double m = in.n - k;
  const double gap = std::min(in.delta / 2.0, (in.d_k - in.delta) / 2.0) - (A + 1.0) / (m * in.eps_k);
  const double C = bound_constant(in.alpha0, in.alpha);
  const double exponent = -m * gap * gap * in.eps_k * in.eps_k * C / (4.0 * A * A * (k + 1.0));
  return 4.0 * std::exp(1.0 / std::numbers::e) * std::pow(A, k + 2.0) * std::exp(exponent);
}

}  // namespace vlmc

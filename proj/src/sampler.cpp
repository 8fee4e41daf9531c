#include "vlmc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vlmc/error.hpp"

namespace vlmc {

// ---------------------------------------------------------------------------
// Renewal family

ProbabilisticContextTree renewal_tree(const RenewalSpec& spec, std::size_t depth) {
  if (depth < 1) throw PreconditionError("renewal materialization depth must be >= 1");
  spec.check();
  std::vector<Word> contexts;
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t k = 0; k < depth; ++k) {
    Word w(k + 1, 0);
    w[0] = 1;
    contexts.push_back(std::move(w));
    Eigen::VectorXd row(2);
    row << 1.0 - spec.q(k), spec.q(k);
    rows.push_back(std::move(row));
  }
  return ProbabilisticContextTree(Alphabet::binary(), ContextTree::unbounded_prefix(std::move(contexts), depth),
                                  std::move(rows), spec);
}

bool check_renewal_recurrence(const RenewalSpec& spec) {
  spec.check();
  switch (spec.tail) {
    case RenewalSpec::Tail::kConstant:
      return spec.c > 0.0;
    case RenewalSpec::Tail::kGeometric:
      // r > 1 with c > 0 is rejected by check(); r < 1 is a convergent series.
      return spec.c > 0.0 && spec.r >= 1.0;
  }
  throw PreconditionError("unsupported renewal tail rule");
}

namespace {

double tail_constant(const RenewalSpec& spec) {
  if (!check_renewal_recurrence(spec)) throw PreconditionError("transient: no stationary regime");
  return spec.c;  // constant tail, or geometric with r == 1
}

}  // namespace

ProbabilisticContextTree renewal_markov_equivalent(const RenewalSpec& spec) {
  const double c = tail_constant(spec);
  const std::size_t H = std::max<std::size_t>(1, spec.head.size());
  std::vector<std::pair<Word, Eigen::VectorXd>> rows;
  for (std::size_t k = 0; k < H; ++k) {
    Word w(k + 1, 0);
    w[0] = 1;
    Eigen::VectorXd row(2);
    row << 1.0 - spec.q(k), spec.q(k);
    rows.emplace_back(std::move(w), std::move(row));
  }
  Eigen::VectorXd tail(2);
  tail << 1.0 - c, c;
  rows.emplace_back(Word(H, 0), std::move(tail));
  return ProbabilisticContextTree(Alphabet::binary(), std::move(rows));
}

double renewal_mean_gap(const RenewalSpec& spec) {
  const double c = tail_constant(spec);
  double survival = 1.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < spec.head.size(); ++k) {
    sum += survival;
    survival *= 1.0 - spec.head[k];
  }
  return sum + survival / c;
}

// ---------------------------------------------------------------------------
// Window chain

WindowChain::WindowChain(const ProbabilisticContextTree& pct)
    : alphabet_size_(pct.alphabet().size()), order_(pct.tree().height()), rows_(pct.rows()) {
  if (!pct.bounded() || pct.family()) throw PreconditionError("window chain needs a bounded tree");
  if (pct.tree().empty()) throw PreconditionError("tree has no contexts");
  num_states_ = 1;
  for (std::size_t i = 0; i < order_; ++i) {
    num_states_ *= alphabet_size_;
    if (num_states_ > kMaxStates) throw PreconditionError("state space |A|^K too large");
  }
  context_of_state_.resize(num_states_);
  for (std::size_t s = 0; s < num_states_; ++s) {
    const Word w = window(s);
    auto idx = pct.tree().match(w);
    if (!idx)
      throw PreconditionError("tree is not complete: past '" + pct.alphabet().format(w) + "' has no context");
    context_of_state_[s] = static_cast<std::uint32_t>(*idx);
  }
}

Word WindowChain::window(std::size_t state) const {
  Word w(order_);
  for (std::size_t i = order_; i-- > 0;) {
    w[i] = static_cast<Symbol>(state % alphabet_size_);
    state /= alphabet_size_;
  }
  return w;
}

std::size_t WindowChain::state_of(WordView window) const {
  std::size_t s = 0;
  for (Symbol a : window) s = s * alphabet_size_ + a;
  return s;
}

double stationary_residual(const WindowChain& chain, const Eigen::VectorXd& pi) {
  Eigen::VectorXd next = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.num_states()));
  for (std::size_t s = 0; s < chain.num_states(); ++s) {
    if (pi[s] == 0.0) continue;
    for (std::size_t a = 0; a < chain.alphabet_size(); ++a)
      next[chain.next(s, static_cast<Symbol>(a))] += pi[s] * chain.prob(s, static_cast<Symbol>(a));
  }
  return (next - pi).lpNorm<1>();
}

namespace {

// Strongly connected components over positive-probability transitions
// (iterative Tarjan). Returns component id per state.
std::vector<std::uint32_t> strong_components(const WindowChain& chain, std::uint32_t& count) {
  const std::size_t n = chain.num_states();
  const std::size_t A = chain.alphabet_size();
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<std::uint32_t> stack;
  std::vector<char> on_stack(n, 0);
  struct Frame {
    std::uint32_t state;
    std::uint32_t next_symbol;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;
  count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({static_cast<std::uint32_t>(root), 0});
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<std::uint32_t>(root));
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const std::uint32_t v = f.state;
      if (f.next_symbol < A) {
        const auto a = static_cast<Symbol>(f.next_symbol++);
        if (chain.prob(v, a) <= 0.0) continue;
        const auto w = static_cast<std::uint32_t>(chain.next(v, a));
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::uint32_t parent = call.back().state;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

std::string describe_class(const WindowChain& chain, const Alphabet& alphabet, const std::vector<std::uint32_t>& states) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < states.size() && i < 8; ++i) {
    if (i) os << ' ';
    os << alphabet.format(chain.window(states[i]));
  }
  if (states.size() > 8) os << " ... (" << states.size() << " windows)";
  os << '}';
  return os.str();
}

std::size_t class_period(const WindowChain& chain, const std::vector<std::uint32_t>& comp, std::uint32_t cls,
                         std::uint32_t start) {
  const std::size_t n = chain.num_states();
  std::vector<std::int64_t> level(n, -1);
  std::vector<std::uint32_t> queue{start};
  level[start] = 0;
  std::size_t period = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t v = queue[head];
    for (std::size_t a = 0; a < chain.alphabet_size(); ++a) {
      if (chain.prob(v, static_cast<Symbol>(a)) <= 0.0) continue;
      const auto w = static_cast<std::uint32_t>(chain.next(v, static_cast<Symbol>(a)));
      if (comp[w] != cls) continue;
      if (level[w] < 0) {
        level[w] = level[v] + 1;
        queue.push_back(w);
      } else {
        const auto diff = static_cast<std::size_t>(std::llabs(level[v] + 1 - level[w]));
        period = std::gcd(period, diff);
      }
    }
  }
  return period;
}

}  // namespace

StationaryLaw stationary_law(const ProbabilisticContextTree& pct) {
  const ValidationReport report = validate_tree(pct);
  if (!report.valid()) throw PreconditionError("stationary law needs a valid tree");
  const WindowChain chain(pct);
  const std::size_t n = chain.num_states();
  const std::size_t A = chain.alphabet_size();

  std::uint32_t ncomp = 0;
  const auto comp = strong_components(chain, ncomp);
  std::vector<char> closed(ncomp, 1);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < A; ++a)
      if (chain.prob(s, static_cast<Symbol>(a)) > 0.0 && comp[chain.next(s, static_cast<Symbol>(a))] != comp[s])
        closed[comp[s]] = 0;
  std::vector<std::vector<std::uint32_t>> classes(ncomp);
  for (std::size_t s = 0; s < n; ++s)
    if (closed[comp[s]]) classes[comp[s]].push_back(static_cast<std::uint32_t>(s));
  std::vector<std::uint32_t> closed_ids;
  for (std::uint32_t c = 0; c < ncomp; ++c)
    if (closed[c]) closed_ids.push_back(c);

  if (closed_ids.size() != 1) {
    std::ostringstream os;
    os << "reducible embedding: " << closed_ids.size() << " closed communicating classes";
    for (auto c : closed_ids) os << ' ' << describe_class(chain, pct.alphabet(), classes[c]);
    throw PreconditionError(os.str());
  }
  const auto& recurrent = classes[closed_ids.front()];
  const std::size_t period = class_period(chain, comp, closed_ids.front(), recurrent.front());
  if (period != 1) {
    throw PreconditionError("periodic embedding: class " + describe_class(chain, pct.alphabet(), recurrent) +
                            " has period " + std::to_string(period));
  }

  StationaryLaw law{chain.order(), A, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
  auto step = [&](const Eigen::VectorXd& pi) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(pi.size());
    for (std::size_t s = 0; s < n; ++s) {
      if (pi[s] == 0.0) continue;
      for (std::size_t a = 0; a < A; ++a)
        next[chain.next(s, static_cast<Symbol>(a))] += pi[s] * chain.prob(s, static_cast<Symbol>(a));
    }
    return next;
  };

  if (n <= kExactSolveLimit) {
    // Balance equations on the closed class; transient windows carry no mass.
    const auto m = static_cast<Eigen::Index>(recurrent.size());
    std::vector<Eigen::Index> pos(n, -1);
    for (Eigen::Index i = 0; i < m; ++i) pos[recurrent[i]] = i;
    Eigen::MatrixXd system = -Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::uint32_t s = recurrent[i];
      for (std::size_t a = 0; a < A; ++a) {
        const double p = chain.prob(s, static_cast<Symbol>(a));
        if (p > 0.0) system(pos[chain.next(s, static_cast<Symbol>(a))], i) += p;
      }
    }
    system.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[m - 1] = 1.0;
    const Eigen::VectorXd solution = system.fullPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) law.pi[recurrent[i]] = std::max(0.0, solution[i]);
    law.pi /= law.pi.sum();
  } else {
    law.pi.setConstant(1.0 / static_cast<double>(n));
    bool converged = false;
    for (int it = 0; it < 200000 && !converged; ++it) {
      Eigen::VectorXd next = step(law.pi);
      converged = (next - law.pi).lpNorm<1>() <= 1e-13;
      law.pi = std::move(next);
    }
    if (!converged) throw PreconditionError("power iteration for the stationary law did not converge");
  }
  for (int it = 0; it < 1000 && stationary_residual(chain, law.pi) > 1e-12; ++it) law.pi = step(law.pi);
  return law;
}

// ---------------------------------------------------------------------------
// Sampling

ChainSampler::ChainSampler(const ProbabilisticContextTree& pct) : alphabet_(pct.alphabet()) {
  if (pct.family()) {
    const RenewalSpec& spec = *pct.family();
    if (!check_renewal_recurrence(spec)) throw PreconditionError("transient: no stationary regime");
    renewal_ = true;
    q_head_ = spec.head;
    q_tail_ = spec.c;
    burn_in_ = static_cast<std::size_t>(std::ceil(std::max(1e4, 100.0 * renewal_mean_gap(spec))));
    return;
  }
  const StationaryLaw law = stationary_law(pct);
  const WindowChain chain(pct);
  order_ = chain.order();
  alphabet_size_ = chain.alphabet_size();
  num_states_ = chain.num_states();
  initial_cdf_.resize(num_states_);
  double acc = 0.0;
  for (std::size_t s = 0; s < num_states_; ++s) initial_cdf_[s] = (acc += law.pi[s]);
  context_of_state_.resize(num_states_);
  for (std::size_t s = 0; s < num_states_; ++s) context_of_state_[s] = static_cast<std::uint32_t>(chain.context_index(s));
  for (const auto& row : pct.rows()) {
    std::vector<double> cdf(alphabet_size_);
    double c = 0.0;
    for (std::size_t a = 0; a < alphabet_size_; ++a) cdf[a] = (c += row[a]);
    row_cdfs_.push_back(std::move(cdf));
  }
}

namespace {

std::size_t draw(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

SymbolSequence ChainSampler::sample(std::size_t n, Philox& rng) const {
  return renewal_ ? sample_renewal(n, rng) : sample_bounded(n, rng);
}

SymbolSequence ChainSampler::sample_bounded(std::size_t n, Philox& rng) const {
  SymbolSequence out{alphabet_, {}};
  out.symbols.reserve(n);
  std::size_t state = draw(initial_cdf_, rng.uniform());
  std::size_t pos = 0;
  {
    std::size_t s = state;
    Word window(order_);
    for (std::size_t i = order_; i-- > 0;) {
      window[i] = static_cast<Symbol>(s % alphabet_size_);
      s /= alphabet_size_;
    }
    for (; pos < n && pos < order_; ++pos) out.symbols.push_back(window[pos]);
  }
  for (; pos < n; ++pos) {
    const auto a = static_cast<Symbol>(draw(row_cdfs_[context_of_state_[state]], rng.uniform()));
    out.symbols.push_back(a);
    state = (state * alphabet_size_ + a) % num_states_;
  }
  return out;
}

SymbolSequence ChainSampler::sample_renewal(std::size_t n, Philox& rng) const {
  SymbolSequence out{alphabet_, {}};
  out.symbols.reserve(n);
  std::size_t zeros = 0;  // started right after a 1
  const std::size_t total = burn_in_ + n;
  for (std::size_t t = 0; t < total; ++t) {
    const double q = zeros < q_head_.size() ? q_head_[zeros] : q_tail_;
    const bool one = rng.uniform() < q;
    zeros = one ? 0 : zeros + 1;
    if (t >= burn_in_) out.symbols.push_back(one ? 1 : 0);
  }
  return out;
}

SymbolSequence sample_path(const ProbabilisticContextTree& pct, std::size_t n, Philox& rng) {
  return ChainSampler(pct).sample(n, rng);
}

SymbolSequence sample_path(const ProbabilisticContextTree& pct, std::size_t n, std::uint64_t seed) {
  Philox rng(seed, 0, 0);
  return sample_path(pct, n, rng);
}

}  // namespace vlmc

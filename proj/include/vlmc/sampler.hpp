#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlmc/alphabet.hpp"
#include "vlmc/context_tree.hpp"
#include "vlmc/renewal_spec.hpp"
#include "vlmc/rng.hpp"

namespace vlmc {

/// A finite sample over an alphabet.
struct SymbolSequence {
  Alphabet alphabet;
  Word symbols;

  std::size_t size() const noexcept { return symbols.size(); }
};

// ---------------------------------------------------------------------------
// Renewal family

/// Contexts 1, 10, ..., 1 0^{depth-1} with p(1 | 1 0^k) = q_k, flagged as the
/// materialized prefix of the unbounded renewal tree.
ProbabilisticContextTree renewal_tree(const RenewalSpec& spec, std::size_t depth);

/// True iff sum_k q_k diverges, i.e. the chain started at a 1 returns to 1
/// almost surely. Decided from the tail rule.
bool check_renewal_recurrence(const RenewalSpec& spec);

/// Bounded tree generating the same stationary chain as a recurrent renewal
/// spec whose tail is constant from index H = max(1, |head|) on: contexts
/// 1 0^k for k < H plus the all-zero string 0^H carrying the tail row.
ProbabilisticContextTree renewal_markov_equivalent(const RenewalSpec& spec);

/// Expected distance between consecutive 1s in the stationary regime,
/// sum_k prod_{j<k} (1 - q_j).
double renewal_mean_gap(const RenewalSpec& spec);

// ---------------------------------------------------------------------------
// Order-K embedding and stationary law

/// The order-K Markov chain on windows A^K induced by a bounded tree. State
/// index encodes the window in base |A| with the oldest symbol most
/// significant.
class WindowChain {
 public:
  /// Throws PreconditionError if the tree is unbounded, if some window has no
  /// context, or if |A|^K exceeds kMaxStates.
  explicit WindowChain(const ProbabilisticContextTree& pct);

  static constexpr std::size_t kMaxStates = std::size_t{1} << 24;

  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t num_states() const noexcept { return num_states_; }

  std::size_t next(std::size_t state, Symbol a) const noexcept {
    return (state * alphabet_size_ + a) % num_states_;
  }
  /// Index into pct.rows() of the context governing `state`.
  std::size_t context_index(std::size_t state) const noexcept { return context_of_state_[state]; }
  double prob(std::size_t state, Symbol a) const noexcept { return rows_[context_of_state_[state]][a]; }

  Word window(std::size_t state) const;
  std::size_t state_of(WordView window) const;

 private:
  std::size_t alphabet_size_ = 0;
  std::size_t order_ = 0;
  std::size_t num_states_ = 0;
  std::vector<std::uint32_t> context_of_state_;
  std::vector<Eigen::VectorXd> rows_;
};

/// Stationary law of the window chain: pi[s] = P(X_0^{K-1} = window(s)).
struct StationaryLaw {
  std::size_t order = 0;
  std::size_t alphabet_size = 0;
  Eigen::VectorXd pi;
};

/// Exact solve when |A|^K <= kExactSolveLimit, power iteration otherwise.
/// Throws PreconditionError naming the closed classes when the embedding has
/// more than one closed class, or naming the class and its period when the
/// unique closed class is periodic.
StationaryLaw stationary_law(const ProbabilisticContextTree& pct);

inline constexpr std::size_t kExactSolveLimit = 4096;

/// ||pi P - pi||_1 for the window chain.
double stationary_residual(const WindowChain& chain, const Eigen::VectorXd& pi);

// ---------------------------------------------------------------------------
// Sampling

/// Reusable sampler: the stationary law (or renewal burn-in) is computed
/// once, after which sample() is a pure function of (n, rng).
class ChainSampler {
 public:
  explicit ChainSampler(const ProbabilisticContextTree& pct);

  SymbolSequence sample(std::size_t n, Philox& rng) const;

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  /// Number of steps discarded before a renewal sample (0 for bounded trees).
  std::size_t burn_in() const noexcept { return burn_in_; }

 private:
  SymbolSequence sample_bounded(std::size_t n, Philox& rng) const;
  SymbolSequence sample_renewal(std::size_t n, Philox& rng) const;

  Alphabet alphabet_;
  bool renewal_ = false;
  // Bounded case.
  std::size_t order_ = 0;
  std::size_t alphabet_size_ = 0;
  std::size_t num_states_ = 0;
  std::vector<double> initial_cdf_;
  std::vector<std::uint32_t> context_of_state_;
  std::vector<std::vector<double>> row_cdfs_;
  // Renewal case.
  std::vector<double> q_head_;
  double q_tail_ = 0.0;
  std::size_t burn_in_ = 0;
};

/// Stationary sample of length n from stream (seed, 0, 0).
SymbolSequence sample_path(const ProbabilisticContextTree& pct, std::size_t n, std::uint64_t seed);
SymbolSequence sample_path(const ProbabilisticContextTree& pct, std::size_t n, Philox& rng);

}  // namespace vlmc

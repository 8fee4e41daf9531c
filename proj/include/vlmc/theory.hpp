#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "vlmc/alphabet.hpp"
#include "vlmc/context_tree.hpp"
#include "vlmc/sampler.hpp"

namespace vlmc {

/// Stationary finite-dimensional laws of the chain compatible with a tree.
///
/// Works for bounded trees and for recurrent renewal families (through their
/// bounded Markov equivalent). Construct once and query many strings.
class CylinderModel {
 public:
  explicit CylinderModel(const ProbabilisticContextTree& pct);

  /// P(X_1^j = w); 1 for the empty string.
  double probability(WordView w) const;

  /// Law of the next symbol given the finite past w. Throws PreconditionError
  /// if P(w) = 0.
  Eigen::VectorXd conditional(WordView w) const;

  const ProbabilisticContextTree& markov_tree() const noexcept { return markov_; }
  const StationaryLaw& law() const noexcept { return law_; }

 private:
  ProbabilisticContextTree markov_;
  WindowChain chain_;
  StationaryLaw law_;
};

double cylinder_probability(const ProbabilisticContextTree& pct, WordView w);
Eigen::VectorXd conditional_law(const ProbabilisticContextTree& pct, WordView w);

/// Order-k canonical Markov approximation: the tree truncated at k, keeping
/// p on contexts of length <= k and using the exact conditional law on the
/// truncation stubs.
ProbabilisticContextTree canonical_approximation(const ProbabilisticContextTree& pct, std::size_t k);

/// D_m = min over contexts x with |x| <= m of
///       max_a | p(a|x) - P(X_0 = a | past = x minus its oldest symbol) |.
double d_m(const ProbabilisticContextTree& pct, std::size_t m);

enum class EpsilonRange {
  kContextsAndStubs,  // elements of tau|_m
  kAllStrings,        // every string of length <= m
};

/// Smallest positive cylinder probability over the chosen strings of length <= m.
double epsilon_m(const ProbabilisticContextTree& pct, std::size_t m,
                 EpsilonRange range = EpsilonRange::kContextsAndStubs);

struct AlphaStats {
  double alpha0 = 0.0;
  std::vector<double> alpha_n;  // alpha_n[i] holds alpha_{i+1}
  double alpha = 0.0;           // sum_{n >= 0} (1 - alpha_n)

  /// Upper bound 1 + 2 alpha / alpha0 on the summed loss-of-memory coefficients.
  double mixing_bound() const { return 1.0 + 2.0 * alpha / alpha0; }
};

/// alpha_0 = sum_a inf_x p(a|x); alpha_n = inf over x of length n of
/// sum_a inf{ p(a|y) : y context, |y| >= n, y agrees with x on n symbols },
/// with alpha_n = 1 when no context is that long. alpha is exact: the tail of
/// the series vanishes beyond the height (or the renewal head).
AlphaStats alpha_stats(const ProbabilisticContextTree& pct, std::size_t n_max);

/// Continuity rate: for k >= 1 the largest |p(a|x) - p(a|y)| over contexts
/// agreeing on their k most recent symbols; for k = 0 over contexts whose most
/// recent symbols differ.
double beta_k(const ProbabilisticContextTree& pct, std::size_t k);

/// Smallest k admissible for the truncated-tree rate bound at level K:
/// 1 + max over x in tau|_K of the shortest context length agreeing with x.
std::size_t min_k_condition(const ProbabilisticContextTree& pct, std::size_t K);

/// C = alpha0 / (8 e (alpha + alpha0)).
double bound_constant(double alpha0, double alpha);

struct DeviationInputs {
  double n = 0.0;
  std::size_t k = 0;  // length of the conditioning string
  double t = 0.0;
  double p_w = 0.0;   // P(w)
  std::size_t alphabet_size = 2;
  double alpha0 = 0.0;
  double alpha = 0.0;
};

/// Exponential bound on P(|p_hat(a|w) - p(a|w)| > t):
///   2|A| e^{1/e} exp[-(n-k) (t - (|A|+1)/((n-k) p_w))^2 p_w^2 C / (4|A|^2 (k+1))]
/// Throws PreconditionError unless n > (|A|+1)/(t p_w) + k.
double deviation_bound(const DeviationInputs& in);

struct BoundInputs {
  double n = 0.0;
  std::size_t k = 0;
  std::size_t K = 0;
  double delta = 0.0;
  std::size_t alphabet_size = 2;
  double d_k = 0.0;
  double eps_k = 0.0;
  double alpha0 = 0.0;
  double alpha = 0.0;
  std::size_t min_admissible_k = 1;
};

/// Fill BoundInputs from a tree (D_k, eps_k, alpha statistics, admissible k).
BoundInputs make_bound_inputs(const ProbabilisticContextTree& pct, double n, std::size_t k, std::size_t K,
                              double delta);

/// Bound on P(truncated Delta estimate != tau|_K):
///   4 e^{1/e} |A|^{k+2} exp[-(n-k) (min(delta, D_k - delta)/2
///       - (|A|+1)/((n-k) eps_k))^2 eps_k^2 C / (4|A|^2 (k+1))]
/// Throws PreconditionError naming the violated hypothesis.
double recovery_bound(const BoundInputs& in);

/// The sample-size hypothesis 2(|A|+1) / (min(delta, D_k - delta) eps_k) + k.
double recovery_min_n(const BoundInputs& in);

}  // namespace vlmc

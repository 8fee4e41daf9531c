#pragma once

#include <cstddef>
#include <vector>

namespace vlmc {

/// Parameters q_k = P(next = 1 | past = ...1 0^k) of the binary renewal chain.
///
/// q_k is taken from `head` for k < head.size() and from the tail rule
/// afterwards: constant (q_k = c) or geometric (q_k = c * r^k, with k the
/// absolute index).
struct RenewalSpec {
  enum class Tail { kConstant, kGeometric };

  std::vector<double> head;
  Tail tail = Tail::kConstant;
  double c = 0.0;
  double r = 1.0;

  static RenewalSpec constant(double c);
  static RenewalSpec geometric(double c, double r);

  double q(std::size_t k) const;

  /// Index from which q_k equals its limiting tail behaviour; for a constant
  /// tail every k >= tail_start() has q_k = c.
  std::size_t tail_start() const noexcept { return head.size(); }

  /// Throws PreconditionError unless every q_k lies in [0, 1].
  void check() const;

  bool operator==(const RenewalSpec&) const = default;
};

}  // namespace vlmc

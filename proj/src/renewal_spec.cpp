#include "vlmc/renewal_spec.hpp"

#include <cmath>
#include <string>

#include "vlmc/error.hpp"

namespace vlmc {

RenewalSpec RenewalSpec::constant(double c) {
  RenewalSpec s;
  s.tail = Tail::kConstant;
  s.c = c;
  return s;
}

RenewalSpec RenewalSpec::geometric(double c, double r) {
  RenewalSpec s;
  s.tail = Tail::kGeometric;
  s.c = c;
  s.r = r;
  return s;
}

double RenewalSpec::q(std::size_t k) const {
  if (k < head.size()) return head[k];
  if (tail == Tail::kConstant) return c;
  return c * std::pow(r, static_cast<double>(k));
}

void RenewalSpec::check() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  for (std::size_t k = 0; k < head.size(); ++k)
    if (!in_unit(head[k])) throw PreconditionError("renewal q_" + std::to_string(k) + " outside [0,1]");
  if (!in_unit(c)) throw PreconditionError("renewal tail constant outside [0,1]");
  if (tail == Tail::kGeometric) {
    if (!std::isfinite(r) || r < 0.0) throw PreconditionError("renewal geometric ratio must be >= 0");
    if (r > 1.0 && c > 0.0) throw PreconditionError("renewal geometric tail exceeds 1 eventually");
    if (!in_unit(q(head.size()))) throw PreconditionError("renewal tail outside [0,1]");
  }
}

}  // namespace vlmc

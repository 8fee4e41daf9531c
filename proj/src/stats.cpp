#include "vlmc/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "vlmc/error.hpp"

namespace vlmc {

double chi_square_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::cdf(boost::math::chi_squared_distribution<double>(dof), x);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw PreconditionError("KS distance needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

GofResult geometric_gof(const std::vector<std::size_t>& gaps, double q) {
  if (gaps.empty()) throw PreconditionError("goodness of fit needs observations");
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("geometric parameter must lie in (0, 1)");
  const double n = static_cast<double>(gaps.size());
  // Cells g = 1..L-1 exact, cell L holds g >= L; L is the last g with
  // expected count n q (1-q)^{g-1} >= 5 in its own cell and in the tail.
  std::size_t last = 1;
  while (n * q * std::pow(1.0 - q, static_cast<double>(last - 1)) >= 5.0 &&
         n * std::pow(1.0 - q, static_cast<double>(last)) >= 5.0)
    ++last;
  if (last < 2) throw PreconditionError("too few observations for a chi-square test");
  std::vector<double> observed(last, 0.0);
  for (std::size_t g : gaps) {
    if (g < 1) throw PreconditionError("geometric observations must be >= 1");
    observed[std::min(g, last) - 1] += 1.0;
  }
  GofResult out;
  for (std::size_t cell = 1; cell <= last; ++cell) {
    const double tail = std::pow(1.0 - q, static_cast<double>(cell - 1));
    const double p = cell < last ? q * tail : tail;
    const double expected = n * p;
    out.statistic += (observed[cell - 1] - expected) * (observed[cell - 1] - expected) / expected;
  }
  out.dof = last - 1;
  const boost::math::chi_squared_distribution<double> law(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(law, out.statistic));
  return out;
}

std::vector<std::size_t> inter_arrival_gaps(WordView symbols, Symbol symbol) {
  std::vector<std::size_t> gaps;
  std::size_t previous = 0;
  bool seen = false;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] != symbol) continue;
    if (seen) gaps.push_back(i - previous);
    previous = i;
    seen = true;
  }
  return gaps;
}

double binomial_se(double p, std::size_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace vlmc

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "vlmc/alphabet.hpp"

namespace vlmc {

double chi_square_cdf(double x, double dof);

/// sup_x |F_n(x) - F(x)| for the empirical law of `samples` against a
/// continuous distribution function.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct GofResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square test of positive integer observations against
/// Geometric(q) on {1, 2, ...}. Consecutive cells are pooled from the right
/// until each expected count is at least 5; the last cell holds the tail.
GofResult geometric_gof(const std::vector<std::size_t>& gaps, double q);

/// Distances between consecutive occurrences of `symbol`.
std::vector<std::size_t> inter_arrival_gaps(WordView symbols, Symbol symbol);

/// sqrt(p (1 - p) / trials).
double binomial_se(double p, std::size_t trials);

}  // namespace vlmc

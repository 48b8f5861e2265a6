#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace freezetree {

struct KsResult {
  double statistic = 0.0;  ///< sup |F1 - F2|
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test. Ties are handled by stepping over
/// equal values together. The p-value uses the asymptotic distribution with
/// the (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) small-sample correction.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
  std::size_t bins = 0;  ///< after pooling
};

/// Goodness of fit of `observed` counts to `probabilities` (which must sum to
/// 1). Adjacent bins are pooled until every expected count is >= min_expected.
/// Bins with zero probability must be empty; otherwise the p-value is 0.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities,
                               double min_expected = 5.0);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
double median(std::vector<double> x);

}  // namespace freezetree

#include "freezetree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace freezetree {

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda series of the CDF: sqrt(2 pi)/lambda sum exp(-(2j-1)^2 pi^2 / (8 lambda^2)).
    const double pi = 3.14159265358979323846;
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    const double cdf = std::sqrt(2.0 * pi) / lambda * (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n1 = a.size();
  r.n2 = b.size();
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities,
                               double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw std::invalid_argument("chi-square needs matching, nonempty observed and probability vectors");
  }
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  ChiSquareResult r;
  std::vector<double> obs;
  std::vector<double> exp;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    if (probabilities[b] == 0.0) {
      if (observed[b] > 0.0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    o_acc += observed[b];
    e_acc += probabilities[b] * total;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  r.bins = exp.size();
  for (std::size_t b = 0; b < exp.size(); ++b) {
    const double diff = obs[b] - exp[b];
    r.statistic += diff * diff / exp[b];
  }
  if (exp.size() < 2) {
    r.dof = 0;
    r.p_value = 1.0;
    return r;
  }
  r.dof = exp.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of an empty sample");
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (x.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(x.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace freezetree

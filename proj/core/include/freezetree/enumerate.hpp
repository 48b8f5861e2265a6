#pragma once

#include <map>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "freezetree/builders.hpp"
#include "freezetree/sequences.hpp"

namespace freezetree {

using Rational = boost::multiprecision::cpp_rational;

/// Exact law of the output tree with all active vertices relabelled "a".
///
/// Keys are canonical encodings: `label[e1:child1,e2:child2,...]` with
/// children sorted by edge label, frozen vertices written as their step index
/// and actives as `a`.
struct ExactDistribution {
  std::map<std::string, Rational> probabilities;

  Rational total() const;
  std::size_t size() const noexcept { return probabilities.size(); }
};

inline constexpr std::size_t kEnumerationMaxSteps = 8;

/// Canonical encoding of a built tree (actives collapsed).
std::string canonical_encoding(const FrozenTree& tree);

/// Expand every uniform choice of the forward construction with exact weights.
/// Throws std::invalid_argument when n > kEnumerationMaxSteps and
/// std::domain_error when the walk hits 0 before the end.
ExactDistribution enumerate_forward(const FreezeSequence& seq);

/// Same for the growth-coalescent construction, with weight 1/(m(m-1)) per
/// ordered pair of the m current trees.
ExactDistribution enumerate_coalescent(const FreezeSequence& seq);

/// Sum over outcomes of |p - q| / 2.
Rational total_variation(const ExactDistribution& p, const ExactDistribution& q);

}  // namespace freezetree

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "freezetree/builders.hpp"
#include "freezetree/sequences.hpp"

namespace freezetree {

struct TestReport {
  std::string name;
  std::string statistic_name;
  double statistic = 0.0;
  double threshold = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::vector<std::size_t> sample_sizes;
  std::uint64_t seed = 0;
  std::string detail;
};

std::string to_json_line(const TestReport& report);
void write_summary_table(std::ostream& out, std::span<const TestReport> reports);
bool all_passed(std::span<const TestReport> reports);

struct VerifyOptions {
  std::uint64_t seed = 7;
  unsigned threads = 1;
  double significance = 0.01;
};

/// P(b(V) < m) for V uniform over the vertices, 1 <= m <= n:
/// (m + 1 - S_m) / (n + 1 + S_n).
double birth_law_cdf(const Walk& w, std::size_t m);

/// P(coal(u, v) = c) for c = 0..min_birth-1, where min_birth = min(b(u), b(v)):
/// 1/C(S_{c+1}, 2) * prod over plus steps i in [c+2, min_birth] of (1 - 1/C(S_i, 2)),
/// and 0 when step c+1 is a minus step.
std::vector<double> coal_time_law(const FreezeSequence& seq, std::size_t min_birth);

/// Id that build_coalescent gives the vertex carrying `label`.
VertexId coalescent_vertex_id(const FreezeSequence& seq, const VertexLabel& label);

/// Theorem-level exact check: forward and coalescent laws coincide for every
/// sequence of length 1..max_n whose walk stays >= 1 on [1, n].
TestReport check_exact_law_equality(std::size_t max_n);

/// Empirical CDF of b(V), V uniform over the vertices of a coalescent build,
/// against birth_law_cdf at every m. Passes when every deviation is within
/// 3 standard errors.
TestReport check_birth_law(const FreezeSequence& seq, std::size_t samples, const VerifyOptions& options);

/// Chi-square of the coal(u, v) histogram against coal_time_law.
TestReport check_coal_density(const FreezeSequence& seq, const VertexLabel& u, const VertexLabel& v,
                              std::size_t samples, const VerifyOptions& options);

struct RegimeConfig {
  double alpha = 0.5;
  double beta = 0.5;
  std::vector<std::size_t> n_list;
  std::size_t k = 2;
  std::size_t replicates = 1000;
  /// Replicates entering the height mean (the first ones); 0 means all.
  std::size_t height_replicates = 0;
  double height_tolerance = 0.05;
};

/// Per n: the height mean against G(1) (subcritical only) and the two-point law:
/// |G(U1) - G(U2)| below 1/2, G(U1) + G(U2) above, and the continuum
/// coalescent with f = t^beta at 1/2, where G(u) = u^{1-beta} / (2 (1 - beta)).
/// KS levels are Bonferroni corrected across the suite.
std::vector<TestReport> regime_suite(const RegimeConfig& config, const VerifyOptions& options);

/// Zig-zag sequences bounded by M: Height / h_plus(1, n) close to 1 and the
/// tallest side subtree (off the longest branch) small compared to n.
TestReport check_bounded_regime(int max_active, std::size_t n, std::size_t replicates,
                                const VerifyOptions& options, double ratio_tolerance = 0.05,
                                double side_fraction = 0.01, double side_quantile = 0.99);

/// Height(T_{2n+1}) / sqrt(2n+1) on excursion sequences against
/// max S / sqrt(2n+1) on independent excursions, two-sample KS.
TestReport check_crt_identity(std::size_t n, std::size_t replicates, const VerifyOptions& options);

/// For each n, replicates of max over `pairs` random pairs of |d - dc| / sqrt(n)
/// on the alpha = 1/2 power(beta) profile. Passes when the medians strictly
/// decrease along n_list.
TestReport check_distance_equivalence(double beta, const std::vector<std::size_t>& n_list,
                                      std::size_t replicates, std::size_t pairs,
                                      const VerifyOptions& options);

/// Height of the longest side subtree: vertices off one longest root-leaf
/// branch, measured from the branch vertex they hang from.
std::int64_t max_side_subtree_height(const FrozenTree& tree);

}  // namespace freezetree

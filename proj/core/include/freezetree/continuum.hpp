#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freezetree/random.hpp"

namespace freezetree {

struct IntegralValue {
  double value = 0.0;
  bool infinite = false;
};

struct FunctionTableOptions {
  int octaves = 64;
  int cells_per_octave = 1024;
};

/// A profile f on [0, 1] with cached integrals of 1/(2f) and 1/f^2.
///
/// The grid is dyadic near 0: octave o covers [2^{-o-1}, 2^{-o}] and is cut
/// into `cells_per_octave` equal cells, so the default 64 x 1024 grid has
/// 2^16 cells. Each cell integral is a Gauss-Kronrod quadrature. Below the
/// smallest node f is treated as c t^p, with p read off f at two points (or
/// given exactly for power profiles); that tail decides whether the
/// integrals reach 0 finitely.
///
/// Requires f > 0 on (0, 1] and a finite integral of 1/f; the constructor
/// throws std::domain_error otherwise.
class FunctionTable {
 public:
  using Options = FunctionTableOptions;

  FunctionTable(std::function<double(double)> f, std::string name, Options options = {},
                std::optional<double> tail_exponent = std::nullopt);

  /// f(t) = t^beta, 0 < beta < 1.
  static FunctionTable power(double beta, Options options = {});
  /// Piecewise linear through values on a uniform grid of [0, 1].
  static FunctionTable from_samples(std::vector<double> values, Options options = {});

  const std::string& name() const noexcept { return name_; }
  double f(double t) const { return f_(t); }
  double tail_exponent() const noexcept { return tail_p_; }
  std::size_t cell_count() const noexcept { return nodes_.size() - 1; }

  /// Integral of 1/(2f) over [a, b].
  double half_inv_f(double a, double b) const;
  /// Integral of 1/f^2 over [a, b]; infinite only when a = 0 and the tail diverges.
  IntegralValue inv_f2(double a, double b) const;
  /// True when the integral of 1/f^2 near 0 is finite, i.e. clusters can
  /// survive to time 0.
  bool inv_f2_finite_at_zero() const noexcept { return !tail_l_infinite_; }

  /// Largest t in [0, t_now) with inv_f2(t, t_now) = mass, or nullopt when
  /// the whole mass down to 0 is smaller than `mass`.
  std::optional<double> solve_inv_f2(double t_now, double mass) const;

 private:
  std::size_t cell_of(double t) const;
  double cell_half_inv_f(double a, double b) const;
  double cell_inv_f2(double a, double b) const;
  double cum_g(double t) const;  // integral of 1/(2f) on [0, t]
  double cum_l(double t) const;  // integral of 1/f^2 on [t0, t], negative below t0

  std::function<double(double)> f_;
  std::string name_;
  std::vector<double> nodes_;
  std::vector<double> cum_g_;
  std::vector<double> cum_l_;
  double tail_p_ = 0.0;
  double tail_c_ = 1.0;
  bool tail_l_infinite_ = false;
};

/// Integral of dt / (2 f(t)) over [a, b], 0 <= a <= b <= 1. Throws
/// std::domain_error when the value exceeds the divergence guard (1e12).
double integral_inv_f(const FunctionTable& table, double a, double b);

/// Integral of dt / f(t)^2 over [a, b] with an explicit infinite flag.
IntegralValue integral_inv_f2(const FunctionTable& table, double a, double b);

/// Binary genealogy forest of the continuum coalescent. Nodes [0, k) are the
/// particles; node k + e is the e-th merge (in decreasing time). The order
/// of the two children of a merge node is uniformly random.
struct CoalescentForest {
  std::size_t k = 0;
  std::vector<double> time;  ///< birth for leaves, merge time for internal nodes
  std::vector<std::int64_t> parent;
  std::vector<std::array<std::int64_t, 2>> children;  ///< per internal node

  std::size_t node_count() const noexcept { return time.size(); }
  std::size_t merge_count() const noexcept { return children.size(); }
  std::vector<std::int64_t> roots() const;
};

struct CoalescentRealization {
  std::size_t k = 0;
  std::vector<double> births;       ///< B_1..B_k by particle
  std::vector<double> merge_times;  ///< increasing
  std::size_t surviving_clusters = 1;
  CoalescentForest forest;
};

/// Births uniform on [0, 1]; going from t = 1 down to 0 every pair of
/// clusters merges at rate 1/f(t)^2.
CoalescentRealization sample_coalescent(const FunctionTable& table, std::size_t k, Rng& rng);

/// Merge time of the clusters holding particles j and l (0 if they never
/// merge); birth time for j = l.
double coalescence_time(const CoalescentRealization& real, std::size_t j, std::size_t l);

/// d(j, l) = int_C^{B_j} 1/(2f) + int_C^{B_l} 1/(2f). Row-major k x k.
std::vector<double> limit_distance_matrix(const CoalescentRealization& real,
                                          const FunctionTable& table);

/// Density of (forest, merge times, births):
///   2^{-(k-1-r)} exp(-int_0^1 C(a(t), 2) / f(t)^2 dt) prod_j 1 / f(c_j)^2
/// where a(t) counts clusters at time t and r + 1 = k - merges.
/// Throws std::invalid_argument for a non-admissible triple. Returns exactly
/// 0 when two or more clusters survive and the integral of 1/f^2 diverges at 0.
double density_g(const CoalescentForest& forest, std::span<const double> births,
                 std::span<const double> merge_times, const FunctionTable& table);

struct RootDegreeStats {
  std::vector<std::size_t> counts;  ///< counts[c] = realizations with c surviving clusters
  std::size_t total = 0;

  double fraction(std::size_t clusters) const;
  double fraction_at_least(std::size_t clusters) const;
  double mean() const;
};

RootDegreeStats root_degree_stat(std::span<const CoalescentRealization> batch);

std::string to_json(const CoalescentRealization& real);
void write_matrix_csv(std::ostream& out, std::span<const double> matrix, std::size_t k,
                      const std::string& comment);

}  // namespace freezetree

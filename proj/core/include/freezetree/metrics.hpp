#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "freezetree/builders.hpp"
#include "freezetree/random.hpp"
#include "freezetree/sequences.hpp"

namespace freezetree {

/// Number of edges on the path between u and v. Throws std::out_of_range on
/// unknown ids.
std::int64_t graph_distance(const FrozenTree& tree, VertexId u, VertexId v);

/// Deepest vertex depth; 0 for a single vertex.
std::int64_t height(const FrozenTree& tree);

/// Lowest common ancestor, found by climbing parent pointers. O(depth).
VertexId lowest_common_ancestor(const FrozenTree& tree, VertexId u, VertexId v);

/// Half harmonic sums from coal(u, v) up to each birth:
///   dc(u, v) = 1/2 sum_{coal<=i<=b(u)} 1/S_i + 1/2 sum_{coal<=i<=b(v)} 1/S_i.
/// The window may start at i = 0 (S_0 = 1). dc(u, u) = 0.
double dc_distance(const Walk& w, const MergeGenealogy& gen, VertexId u, VertexId v);

/// (b(u) + b(v) - 2 coal(u, v)) / 2.
double delta(const MergeGenealogy& gen, VertexId u, VertexId v);

enum class DistanceMode { Graph, Coalescent, Delta };

DistanceMode parse_distance_mode(std::string_view text);
std::string to_string(DistanceMode mode);

struct DistanceSample {
  std::vector<VertexId> vertex_ids;
  std::vector<double> matrix;  ///< k x k, row-major
  DistanceMode mode = DistanceMode::Graph;
  double normalization = 0.0;  ///< entries are raw / n^normalization
  std::size_t n = 0;

  std::size_t k() const noexcept { return vertex_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return matrix.at(i * k() + j); }
};

/// k i.i.d. uniform vertices (with replacement) and their pairwise distances
/// divided by n^gamma. `gen` and `w` may be null in graph mode; the other
/// modes need the genealogy (and the walk for the coalescent distance).
DistanceSample sample_distance_matrix(const FrozenTree& tree, const MergeGenealogy* gen,
                                      const Walk* w, std::size_t k, DistanceMode mode,
                                      double gamma, Rng& rng);

/// Distances for a fixed vertex list, same conventions as above.
DistanceSample distance_matrix(const FrozenTree& tree, const MergeGenealogy* gen, const Walk* w,
                               std::vector<VertexId> vertices, DistanceMode mode, double gamma);

void write_distance_csv(std::ostream& out, const DistanceSample& sample);
std::string to_json(const DistanceSample& sample);

}  // namespace freezetree

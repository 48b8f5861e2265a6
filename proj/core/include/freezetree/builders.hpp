#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "freezetree/random.hpp"
#include "freezetree/sequences.hpp"

namespace freezetree {

using VertexId = std::int64_t;
inline constexpr VertexId kNoVertex = -1;

enum class VertexKind : std::uint8_t { Frozen, Active };

/// Frozen(i): frozen at step i. Active(j): the j-th active vertex, 1..S_n.
struct VertexLabel {
  VertexKind kind = VertexKind::Active;
  std::size_t index = 0;

  friend bool operator==(const VertexLabel&, const VertexLabel&) = default;
};

std::string to_string(const VertexLabel& label);

/// Rooted tree with labelled vertices and edges. Vertex ids are dense,
/// 0..size()-1; edge_label[v] labels the edge from v to its parent (0 at the root).
struct FrozenTree {
  std::size_t n = 0;  ///< length of the driving sequence
  std::vector<VertexId> parent;
  std::vector<VertexLabel> label;
  std::vector<std::size_t> edge_label;
  std::vector<std::size_t> birth;
  std::vector<std::uint32_t> depth;
  VertexId root = 0;

  /// Forward construction only: the walk hit 0 before the last step and the
  /// remaining steps were skipped.
  bool stalled = false;
  std::size_t steps_applied = 0;

  std::size_t size() const noexcept { return parent.size(); }
  bool contains(VertexId v) const noexcept {
    return v >= 0 && static_cast<std::size_t>(v) < parent.size();
  }
};

/// Record of the growth-coalescent run.
///
/// Besides the event list this keeps two views of the genealogy:
///  * the Kruskal merge tree (leaves = vertices, one internal node per merge,
///    carrying the coalescence index of that merge), and
///  * a union-by-rank link forest without path compression, each link
///    stamped with its coalescence index. Paths in it have length O(log N),
///    so coal_time is a short walk rather than an LCA on the (possibly very
///    deep) merge tree.
struct MergeGenealogy {
  struct Event {
    std::size_t step;     ///< i with steps[i] = +1
    VertexId root_a;      ///< root of the first tree, keeps its root
    VertexId root_b;      ///< root of the second tree, becomes a child
    VertexId surviving_root;
  };

  std::size_t n = 0;
  std::vector<Event> events;  ///< in decreasing step order
  std::vector<std::size_t> birth;

  // Kruskal merge tree. Nodes [0, N) are the vertices; node N + e is the
  // merge of events[e]. merge_parent of the final node is -1.
  std::vector<std::int64_t> merge_parent;
  std::vector<std::size_t> merge_time;  ///< only for internal nodes (index N + e)
  std::vector<std::int64_t> cluster_of; ///< vertex -> leaf of the merge tree

  // Link forest.
  std::vector<std::int64_t> link_parent;
  std::vector<std::size_t> link_time;

  std::size_t vertex_count() const noexcept { return birth.size(); }
};

struct ForwardOptions {
  /// Throw std::domain_error instead of returning a stalled tree.
  bool strict = false;
};

/// Forward construction: a -1 step freezes a uniform active vertex, a +1 step
/// attaches a new active vertex to a uniform active vertex.
FrozenTree build_forward(const FreezeSequence& seq, Rng& rng, ForwardOptions options = {});

struct CoalescentBuild {
  FrozenTree tree;
  MergeGenealogy genealogy;
};

/// Time-reversed construction. Requires the walk to stay >= 1 on [1, n-1]
/// (S_n = 0 is allowed); throws std::domain_error otherwise.
///
/// Vertex ids: the S_n actives are 0..S_n-1 (Active(1..S_n)); frozen vertices
/// follow in the order they are created, i.e. by decreasing step.
CoalescentBuild build_coalescent(const FreezeSequence& seq, Rng& rng);

/// Largest i such that u and v lie in one tree of the forest F_i.
/// coal_time(u, u) is birth(u). Throws std::out_of_range on unknown ids.
std::size_t coal_time(const MergeGenealogy& gen, VertexId u, VertexId v);

/// Same value, read off the Kruskal merge tree by an LCA walk. O(depth).
std::size_t coal_time_merge_tree(const MergeGenealogy& gen, VertexId u, VertexId v);

/// Birth index: i - 1 for Frozen(i), n for actives.
std::size_t birth_of(const VertexLabel& label, std::size_t n);

// Exports. Formats are documented in the README.
void write_dot(std::ostream& out, const FrozenTree& tree);
void write_newick(std::ostream& out, const FrozenTree& tree);
void write_tree_csv(std::ostream& out, const FrozenTree& tree);
std::string to_dot(const FrozenTree& tree);
std::string to_newick(const FrozenTree& tree);
std::string to_tree_csv(const FrozenTree& tree);

}  // namespace freezetree

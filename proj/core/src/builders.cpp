#include "freezetree/builders.hpp"

#include <algorithm>
#include <stdexcept>

namespace freezetree {

namespace {

void fill_depths(FrozenTree& tree) {
  const std::size_t count = tree.size();
  // Children in CSR form, then an explicit-stack walk from the root.
  std::vector<std::size_t> offset(count + 1, 0);
  for (std::size_t v = 0; v < count; ++v) {
    if (tree.parent[v] != kNoVertex) ++offset[static_cast<std::size_t>(tree.parent[v]) + 1];
  }
  for (std::size_t v = 0; v < count; ++v) offset[v + 1] += offset[v];
  std::vector<VertexId> child(offset[count]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (std::size_t v = 0; v < count; ++v) {
    if (tree.parent[v] != kNoVertex) {
      child[fill[static_cast<std::size_t>(tree.parent[v])]++] = static_cast<VertexId>(v);
    }
  }
  tree.depth.assign(count, 0);
  std::vector<VertexId> stack{tree.root};
  while (!stack.empty()) {
    const auto v = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    for (std::size_t j = offset[v]; j < offset[v + 1]; ++j) {
      tree.depth[static_cast<std::size_t>(child[j])] = tree.depth[v] + 1;
      stack.push_back(child[j]);
    }
  }
}

void check_vertex(const MergeGenealogy& gen, VertexId v) {
  if (v < 0 || static_cast<std::size_t>(v) >= gen.vertex_count()) {
    throw std::out_of_range("unknown vertex id " + std::to_string(v));
  }
}

}  // namespace

std::string to_string(const VertexLabel& label) {
  return (label.kind == VertexKind::Frozen ? "F" : "A") + std::to_string(label.index);
}

std::size_t birth_of(const VertexLabel& label, std::size_t n) {
  return label.kind == VertexKind::Frozen ? label.index - 1 : n;
}

FrozenTree build_forward(const FreezeSequence& seq, Rng& rng, ForwardOptions options) {
  const std::size_t n = seq.size();
  FrozenTree tree;
  tree.n = n;
  tree.parent.reserve(n + 1);
  tree.label.reserve(n + 1);
  tree.edge_label.reserve(n + 1);
  tree.depth.reserve(n + 1);

  tree.parent.push_back(kNoVertex);
  tree.label.push_back({VertexKind::Active, 0});
  tree.edge_label.push_back(0);
  tree.depth.push_back(0);
  tree.root = 0;

  std::vector<VertexId> active{0};
  const auto steps = seq.steps();
  std::size_t k = 1;
  for (; k <= n; ++k) {
    if (active.empty()) break;
    const std::size_t j = uniform_index(rng, active.size());
    const VertexId picked = active[j];
    if (steps[k - 1] > 0) {
      const auto v = static_cast<VertexId>(tree.parent.size());
      tree.parent.push_back(picked);
      tree.label.push_back({VertexKind::Active, 0});
      tree.edge_label.push_back(k);
      tree.depth.push_back(tree.depth[static_cast<std::size_t>(picked)] + 1);
      active.push_back(v);
    } else {
      tree.label[static_cast<std::size_t>(picked)] = {VertexKind::Frozen, k};
      active[j] = active.back();
      active.pop_back();
    }
  }
  tree.steps_applied = k - 1;
  if (tree.steps_applied < n) {
    if (options.strict) {
      throw std::domain_error("forward construction stalled: no active vertex left at step " +
                              std::to_string(k));
    }
    tree.stalled = true;
  }
  for (std::size_t j = 0; j < active.size(); ++j) {
    tree.label[static_cast<std::size_t>(active[j])] = {VertexKind::Active, j + 1};
  }
  tree.birth.resize(tree.size());
  for (std::size_t v = 0; v < tree.size(); ++v) tree.birth[v] = birth_of(tree.label[v], n);
  return tree;
}

CoalescentBuild build_coalescent(const FreezeSequence& seq, Rng& rng) {
  const std::size_t n = seq.size();
  // Only S_n and the first zero are needed; walk() would also build the harmonic prefixes.
  std::int64_t s = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    s += seq.step(k);
    if (s <= 0 && k < n) {
      throw std::domain_error("growth-coalescent construction needs S_k >= 1 for k < n (walk hits 0 at step " +
                              std::to_string(k) + ")");
    }
  }
  const auto s_n = static_cast<std::size_t>(s);
  const std::size_t vertex_count = (s_n + n + 1) / 2;
  const auto steps = seq.steps();
  const auto plus_count = static_cast<std::size_t>(std::count(steps.begin(), steps.end(), 1));

  CoalescentBuild out;
  FrozenTree& tree = out.tree;
  MergeGenealogy& gen = out.genealogy;
  tree.n = gen.n = n;
  tree.steps_applied = n;
  tree.parent.assign(vertex_count, kNoVertex);
  tree.label.resize(vertex_count);
  tree.edge_label.assign(vertex_count, 0);
  tree.birth.resize(vertex_count);

  gen.events.reserve(plus_count);
  gen.merge_parent.assign(vertex_count + plus_count, -1);
  gen.merge_time.assign(vertex_count + plus_count, 0);
  gen.cluster_of.resize(vertex_count);
  gen.link_parent.assign(vertex_count, -1);
  gen.link_time.assign(vertex_count, 0);
  std::vector<std::uint8_t> rank(vertex_count, 0);

  // Current trees: root vertex, merge-tree node and link-forest root, indexed by position.
  std::vector<VertexId> roots;
  std::vector<std::int64_t> knode;
  std::vector<std::int64_t> lroot;
  roots.reserve(s_n + n);
  knode.reserve(s_n + n);
  lroot.reserve(s_n + n);

  std::size_t next_vertex = 0;
  auto add_singleton = [&](VertexLabel label, std::size_t birth) {
    const std::size_t v = next_vertex++;
    tree.label[v] = label;
    tree.birth[v] = birth;
    gen.merge_time[v] = birth;
    gen.cluster_of[v] = static_cast<std::int64_t>(v);
    roots.push_back(static_cast<VertexId>(v));
    knode.push_back(static_cast<std::int64_t>(v));
    lroot.push_back(static_cast<std::int64_t>(v));
  };

  for (std::size_t j = 1; j <= s_n; ++j) add_singleton({VertexKind::Active, j}, n);

  for (std::size_t i = n; i >= 1; --i) {
    if (steps[i - 1] < 0) {
      add_singleton({VertexKind::Frozen, i}, i - 1);
      continue;
    }
    const std::size_t m = roots.size();
    const std::size_t a = uniform_index(rng, m);
    std::size_t b = uniform_index(rng, m - 1);
    if (b >= a) ++b;
    const VertexId ra = roots[a];
    const VertexId rb = roots[b];
    tree.parent[static_cast<std::size_t>(rb)] = ra;
    tree.edge_label[static_cast<std::size_t>(rb)] = i;
    gen.events.push_back({i, ra, rb, ra});

    const auto node = static_cast<std::int64_t>(vertex_count + gen.events.size() - 1);
    gen.merge_parent[static_cast<std::size_t>(knode[a])] = node;
    gen.merge_parent[static_cast<std::size_t>(knode[b])] = node;
    gen.merge_time[static_cast<std::size_t>(node)] = i - 1;
    knode[a] = node;

    auto x = lroot[a];
    auto y = lroot[b];
    if (rank[static_cast<std::size_t>(x)] < rank[static_cast<std::size_t>(y)]) std::swap(x, y);
    gen.link_parent[static_cast<std::size_t>(y)] = x;
    gen.link_time[static_cast<std::size_t>(y)] = i - 1;
    if (rank[static_cast<std::size_t>(x)] == rank[static_cast<std::size_t>(y)]) ++rank[static_cast<std::size_t>(x)];
    lroot[a] = x;

    roots[b] = roots.back();
    knode[b] = knode.back();
    lroot[b] = lroot.back();
    roots.pop_back();
    knode.pop_back();
    lroot.pop_back();
  }

  tree.root = roots.front();
  gen.birth = tree.birth;
  fill_depths(tree);
  return out;
}

std::size_t coal_time(const MergeGenealogy& gen, VertexId u, VertexId v) {
  check_vertex(gen, u);
  check_vertex(gen, v);
  if (u == v) return gen.birth[static_cast<std::size_t>(u)];

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // Path from u to its link root with the running minimum link time.
  std::vector<std::pair<std::int64_t, std::size_t>> path_u;
  std::size_t running = kNone;
  for (std::int64_t x = u;; x = gen.link_parent[static_cast<std::size_t>(x)]) {
    path_u.emplace_back(x, running);
    if (gen.link_parent[static_cast<std::size_t>(x)] < 0) break;
    running = std::min(running, gen.link_time[static_cast<std::size_t>(x)]);
  }
  running = kNone;
  for (std::int64_t x = v;; x = gen.link_parent[static_cast<std::size_t>(x)]) {
    for (const auto& [node, min_u] : path_u) {
      if (node == x) return std::min(running, min_u);
    }
    if (gen.link_parent[static_cast<std::size_t>(x)] < 0) break;
    running = std::min(running, gen.link_time[static_cast<std::size_t>(x)]);
  }
  throw std::logic_error("vertices are not connected in the genealogy");
}

std::size_t coal_time_merge_tree(const MergeGenealogy& gen, VertexId u, VertexId v) {
  check_vertex(gen, u);
  check_vertex(gen, v);
  auto depth_of = [&](std::int64_t x) {
    std::size_t d = 0;
    for (; gen.merge_parent[static_cast<std::size_t>(x)] >= 0; x = gen.merge_parent[static_cast<std::size_t>(x)]) ++d;
    return d;
  };
  std::int64_t a = gen.cluster_of[static_cast<std::size_t>(u)];
  std::int64_t b = gen.cluster_of[static_cast<std::size_t>(v)];
  std::size_t da = depth_of(a);
  std::size_t db = depth_of(b);
  for (; da > db; --da) a = gen.merge_parent[static_cast<std::size_t>(a)];
  for (; db > da; --db) b = gen.merge_parent[static_cast<std::size_t>(b)];
  while (a != b) {
    a = gen.merge_parent[static_cast<std::size_t>(a)];
    b = gen.merge_parent[static_cast<std::size_t>(b)];
  }
  return gen.merge_time[static_cast<std::size_t>(a)];
}

}  // namespace freezetree

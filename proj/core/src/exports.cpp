#include <algorithm>
#include <ostream>
#include <sstream>
#include <vector>

#include "freezetree/builders.hpp"

namespace freezetree {

namespace {

// Children lists ordered by edge label.
std::vector<std::vector<VertexId>> children_of(const FrozenTree& tree) {
  std::vector<std::vector<VertexId>> children(tree.size());
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (tree.parent[v] != kNoVertex) {
      children[static_cast<std::size_t>(tree.parent[v])].push_back(static_cast<VertexId>(v));
    }
  }
  for (auto& c : children) {
    std::sort(c.begin(), c.end(), [&](VertexId a, VertexId b) {
      return tree.edge_label[static_cast<std::size_t>(a)] < tree.edge_label[static_cast<std::size_t>(b)];
    });
  }
  return children;
}

}  // namespace

void write_dot(std::ostream& out, const FrozenTree& tree) {
  out << "digraph freezetree {\n";
  out << "  node [style=filled, shape=circle];\n";
  for (std::size_t v = 0; v < tree.size(); ++v) {
    const auto& l = tree.label[v];
    const bool frozen = l.kind == VertexKind::Frozen;
    out << "  " << v << " [label=\"" << (frozen ? std::to_string(l.index) : "a" + std::to_string(l.index))
        << "\", fillcolor=\"" << (frozen ? "lightblue" : "palegreen") << "\"];\n";
  }
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (tree.parent[v] == kNoVertex) continue;
    out << "  " << tree.parent[v] << " -> " << v << " [label=\"" << tree.edge_label[v] << "\"];\n";
  }
  out << "}\n";
}

void write_newick(std::ostream& out, const FrozenTree& tree) {
  if (tree.size() == 0) {
    out << ";\n";
    return;
  }
  const auto children = children_of(tree);
  auto emit_label = [&](VertexId v) {
    const auto i = static_cast<std::size_t>(v);
    out << to_string(tree.label[i]);
    if (tree.parent[i] != kNoVertex) out << ":1[&&NHX:edge=" << tree.edge_label[i] << "]";
  };
  // Iterative post-order: (vertex, next child position).
  std::vector<std::pair<VertexId, std::size_t>> stack{{tree.root, 0}};
  while (!stack.empty()) {
    auto& [v, pos] = stack.back();
    const auto& c = children[static_cast<std::size_t>(v)];
    if (pos == 0 && !c.empty()) out << '(';
    if (pos < c.size()) {
      if (pos > 0) out << ',';
      const VertexId next = c[pos++];
      stack.emplace_back(next, 0);
      continue;
    }
    if (!c.empty()) out << ')';
    emit_label(v);
    stack.pop_back();
  }
  out << ";\n";
}

void write_tree_csv(std::ostream& out, const FrozenTree& tree) {
  out << "# freezetree tree v1 n=" << tree.n << (tree.stalled ? " stalled" : "") << "\n";
  out << "vertex_id,parent_id,vertex_label,edge_label,birth\n";
  for (std::size_t v = 0; v < tree.size(); ++v) {
    out << v << ',';
    if (tree.parent[v] != kNoVertex) out << tree.parent[v];
    out << ',' << to_string(tree.label[v]) << ',';
    if (tree.parent[v] != kNoVertex) out << tree.edge_label[v];
    out << ',' << tree.birth[v] << '\n';
  }
}

std::string to_dot(const FrozenTree& tree) {
  std::ostringstream os;
  write_dot(os, tree);
  return os.str();
}

std::string to_newick(const FrozenTree& tree) {
  std::ostringstream os;
  write_newick(os, tree);
  return os.str();
}

std::string to_tree_csv(const FrozenTree& tree) {
  std::ostringstream os;
  write_tree_csv(os, tree);
  return os.str();
}

}  // namespace freezetree

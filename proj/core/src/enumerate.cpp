#include "freezetree/enumerate.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace freezetree {

namespace {

void check_enumerable(const FreezeSequence& seq) {
  if (seq.size() > kEnumerationMaxSteps) {
    throw std::invalid_argument("exact enumeration is limited to n <= " + std::to_string(kEnumerationMaxSteps));
  }
  const Walk w = walk(seq);
  if (w.tau && *w.tau < seq.size()) {
    throw std::domain_error("exact enumeration needs S_k >= 1 for k < n");
  }
}

// A partial tree of the forward construction.
struct PartialTree {
  std::vector<int> parent;
  std::vector<std::size_t> edge;
  std::vector<std::size_t> frozen_at;  // 0 while active
  std::vector<int> active;
};

std::string encode(const std::vector<int>& parent, const std::vector<std::size_t>& edge,
                   const std::vector<std::string>& label, int root) {
  std::vector<std::vector<int>> children(parent.size());
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] >= 0) children[static_cast<std::size_t>(parent[v])].push_back(static_cast<int>(v));
  }
  // Trees here have at most 9 vertices; plain recursion is fine.
  auto rec = [&](auto&& self, int v) -> std::string {
    auto& c = children[static_cast<std::size_t>(v)];
    std::sort(c.begin(), c.end(), [&](int a, int b) {
      return edge[static_cast<std::size_t>(a)] < edge[static_cast<std::size_t>(b)];
    });
    std::string s = label[static_cast<std::size_t>(v)] + "[";
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j > 0) s += ',';
      s += std::to_string(edge[static_cast<std::size_t>(c[j])]) + ":" + self(self, c[j]);
    }
    return s + "]";
  };
  return rec(rec, root);
}

std::string encode(const PartialTree& t) {
  std::vector<std::string> label(t.parent.size());
  for (std::size_t v = 0; v < label.size(); ++v) {
    label[v] = t.frozen_at[v] ? std::to_string(t.frozen_at[v]) : "a";
  }
  return encode(t.parent, t.edge, label, 0);
}

// Joins tree `child` below the root of `host` with an edge label smaller than
// every label already present, so it becomes the first child.
std::string join(const std::string& host, const std::string& child, std::size_t edge) {
  const auto open = host.find('[');
  const bool leaf = host[open + 1] == ']';
  return host.substr(0, open + 1) + std::to_string(edge) + ":" + child + (leaf ? "" : ",") +
         host.substr(open + 1);
}

std::string forest_key(std::vector<std::string> trees) {
  std::sort(trees.begin(), trees.end());
  std::string key;
  for (const auto& t : trees) key += t + "|";
  return key;
}

}  // namespace

Rational ExactDistribution::total() const {
  Rational sum = 0;
  for (const auto& [_, p] : probabilities) sum += p;
  return sum;
}

std::string canonical_encoding(const FrozenTree& tree) {
  std::vector<int> parent(tree.size());
  std::vector<std::string> label(tree.size());
  for (std::size_t v = 0; v < tree.size(); ++v) {
    parent[v] = static_cast<int>(tree.parent[v]);
    label[v] = tree.label[v].kind == VertexKind::Frozen ? std::to_string(tree.label[v].index) : "a";
  }
  return encode(parent, tree.edge_label, label, static_cast<int>(tree.root));
}

ExactDistribution enumerate_forward(const FreezeSequence& seq) {
  check_enumerable(seq);
  PartialTree start;
  start.parent = {-1};
  start.edge = {0};
  start.frozen_at = {0};
  start.active = {0};
  std::map<std::string, std::pair<PartialTree, Rational>> states;
  states.emplace(encode(start), std::make_pair(start, Rational(1)));

  for (std::size_t k = 1; k <= seq.size(); ++k) {
    std::map<std::string, std::pair<PartialTree, Rational>> next;
    for (const auto& [_, entry] : states) {
      const auto& [tree, prob] = entry;
      const Rational w = prob / static_cast<long>(tree.active.size());
      for (std::size_t j = 0; j < tree.active.size(); ++j) {
        PartialTree t = tree;
        const int picked = t.active[j];
        if (seq.step(k) > 0) {
          t.parent.push_back(picked);
          t.edge.push_back(k);
          t.frozen_at.push_back(0);
          t.active.push_back(static_cast<int>(t.parent.size() - 1));
        } else {
          t.frozen_at[static_cast<std::size_t>(picked)] = k;
          t.active.erase(t.active.begin() + static_cast<std::ptrdiff_t>(j));
        }
        auto key = encode(t);
        auto it = next.find(key);
        if (it == next.end()) {
          next.emplace(std::move(key), std::make_pair(std::move(t), w));
        } else {
          it->second.second += w;
        }
      }
    }
    states = std::move(next);
  }

  ExactDistribution out;
  for (const auto& [key, entry] : states) out.probabilities[key] += entry.second;
  return out;
}

ExactDistribution enumerate_coalescent(const FreezeSequence& seq) {
  check_enumerable(seq);
  const std::size_t n = seq.size();
  const auto s_n = static_cast<std::size_t>(walk(seq).values[n]);
  std::map<std::string, std::pair<std::vector<std::string>, Rational>> states;
  std::vector<std::string> initial(s_n, "a[]");
  states.emplace(forest_key(initial), std::make_pair(initial, Rational(1)));

  for (std::size_t i = n; i >= 1; --i) {
    std::map<std::string, std::pair<std::vector<std::string>, Rational>> next;
    auto add = [&](std::vector<std::string> forest, const Rational& w) {
      auto key = forest_key(forest);
      auto it = next.find(key);
      if (it == next.end()) {
        next.emplace(std::move(key), std::make_pair(std::move(forest), w));
      } else {
        it->second.second += w;
      }
    };
    for (const auto& [_, entry] : states) {
      const auto& [forest, prob] = entry;
      if (seq.step(i) < 0) {
        auto f = forest;
        f.push_back(std::to_string(i) + "[]");
        add(std::move(f), prob);
        continue;
      }
      const long m = static_cast<long>(forest.size());
      const Rational w = prob / (m * (m - 1));
      for (std::size_t a = 0; a < forest.size(); ++a) {
        for (std::size_t b = 0; b < forest.size(); ++b) {
          if (a == b) continue;
          std::vector<std::string> f;
          f.reserve(forest.size() - 1);
          for (std::size_t c = 0; c < forest.size(); ++c) {
            if (c == a) {
              f.push_back(join(forest[a], forest[b], i));
            } else if (c != b) {
              f.push_back(forest[c]);
            }
          }
          add(std::move(f), w);
        }
      }
    }
    states = std::move(next);
  }

  ExactDistribution out;
  for (const auto& [_, entry] : states) {
    if (entry.first.size() != 1) throw std::logic_error("coalescent enumeration did not end with one tree");
    out.probabilities[entry.first.front()] += entry.second;
  }
  return out;
}

Rational total_variation(const ExactDistribution& p, const ExactDistribution& q) {
  Rational sum = 0;
  for (const auto& [key, pv] : p.probabilities) {
    const auto it = q.probabilities.find(key);
    const Rational qv = it == q.probabilities.end() ? Rational(0) : it->second;
    sum += abs(pv - qv);
  }
  for (const auto& [key, qv] : q.probabilities) {
    if (!p.probabilities.count(key)) sum += abs(qv);
  }
  return sum / 2;
}

}  // namespace freezetree

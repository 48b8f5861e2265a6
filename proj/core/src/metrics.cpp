#include "freezetree/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace freezetree {

namespace {

void check_vertex(const FrozenTree& tree, VertexId v) {
  if (!tree.contains(v)) throw std::out_of_range("unknown vertex id " + std::to_string(v));
}

std::size_t at(VertexId v) { return static_cast<std::size_t>(v); }

}  // namespace

VertexId lowest_common_ancestor(const FrozenTree& tree, VertexId u, VertexId v) {
  check_vertex(tree, u);
  check_vertex(tree, v);
  while (tree.depth[at(u)] > tree.depth[at(v)]) u = tree.parent[at(u)];
  while (tree.depth[at(v)] > tree.depth[at(u)]) v = tree.parent[at(v)];
  while (u != v) {
    u = tree.parent[at(u)];
    v = tree.parent[at(v)];
  }
  return u;
}

std::int64_t graph_distance(const FrozenTree& tree, VertexId u, VertexId v) {
  const VertexId l = lowest_common_ancestor(tree, u, v);
  return static_cast<std::int64_t>(tree.depth[at(u)]) + tree.depth[at(v)] - 2 * static_cast<std::int64_t>(tree.depth[at(l)]);
}

std::int64_t height(const FrozenTree& tree) {
  if (tree.depth.empty()) return 0;
  return *std::max_element(tree.depth.begin(), tree.depth.end());
}

double dc_distance(const Walk& w, const MergeGenealogy& gen, VertexId u, VertexId v) {
  if (u == v) {
    coal_time(gen, u, v);  // id check
    return 0.0;
  }
  if (w.n() != gen.n) throw std::invalid_argument("walk length does not match the genealogy");
  const std::size_t c = coal_time(gen, u, v);
  const std::size_t bu = gen.birth[at(u)];
  const std::size_t bv = gen.birth[at(v)];
  const auto& p = w.inv_prefix;
  const double sum = (p[bu + 1] - p[c]) + (p[bv + 1] - p[c]);
  if (!std::isfinite(sum)) throw std::domain_error("harmonic window reaches a zero of the walk");
  return 0.5 * sum;
}

double delta(const MergeGenealogy& gen, VertexId u, VertexId v) {
  const std::size_t c = coal_time(gen, u, v);
  return 0.5 * (static_cast<double>(gen.birth[at(u)]) + static_cast<double>(gen.birth[at(v)]) -
                2.0 * static_cast<double>(c));
}

DistanceMode parse_distance_mode(std::string_view text) {
  if (text == "graph") return DistanceMode::Graph;
  if (text == "coalescent" || text == "dc") return DistanceMode::Coalescent;
  if (text == "delta") return DistanceMode::Delta;
  throw std::invalid_argument("unknown distance mode '" + std::string(text) +
                              "' (expected graph, coalescent or delta)");
}

std::string to_string(DistanceMode mode) {
  switch (mode) {
    case DistanceMode::Graph: return "graph";
    case DistanceMode::Coalescent: return "coalescent";
    case DistanceMode::Delta: return "delta";
  }
  return "unknown";
}

DistanceSample distance_matrix(const FrozenTree& tree, const MergeGenealogy* gen, const Walk* w,
                               std::vector<VertexId> vertices, DistanceMode mode, double gamma) {
  if (mode != DistanceMode::Graph && gen == nullptr) {
    throw std::invalid_argument(to_string(mode) + " distances need the merge genealogy");
  }
  if (mode == DistanceMode::Coalescent && w == nullptr) {
    throw std::invalid_argument("coalescent distances need the walk");
  }
  for (auto v : vertices) check_vertex(tree, v);

  DistanceSample out;
  out.mode = mode;
  out.normalization = gamma;
  out.n = tree.n;
  out.vertex_ids = std::move(vertices);
  const std::size_t k = out.vertex_ids.size();
  out.matrix.assign(k * k, 0.0);
  const double scale = std::pow(static_cast<double>(std::max<std::size_t>(tree.n, 1)), gamma);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const VertexId a = out.vertex_ids[i];
      const VertexId b = out.vertex_ids[j];
      double raw = 0.0;
      switch (mode) {
        case DistanceMode::Graph: raw = static_cast<double>(graph_distance(tree, a, b)); break;
        case DistanceMode::Coalescent: raw = dc_distance(*w, *gen, a, b); break;
        case DistanceMode::Delta: raw = delta(*gen, a, b); break;
      }
      out.matrix[i * k + j] = out.matrix[j * k + i] = raw / scale;
    }
  }
  return out;
}

DistanceSample sample_distance_matrix(const FrozenTree& tree, const MergeGenealogy* gen,
                                      const Walk* w, std::size_t k, DistanceMode mode,
                                      double gamma, Rng& rng) {
  if (k < 2) throw std::invalid_argument("distance sample needs k >= 2");
  if (tree.size() == 0) throw std::invalid_argument("cannot sample vertices of an empty tree");
  std::vector<VertexId> vertices(k);
  for (auto& v : vertices) v = static_cast<VertexId>(uniform_index(rng, tree.size()));
  return distance_matrix(tree, gen, w, std::move(vertices), mode, gamma);
}

void write_distance_csv(std::ostream& out, const DistanceSample& s) {
  const auto old_precision = out.precision(17);
  out << "# freezetree distance v1 mode=" << to_string(s.mode) << " n=" << s.n
      << " normalization=" << s.normalization << "\n";
  out << "vertex_id";
  for (auto v : s.vertex_ids) out << ',' << v;
  out << '\n';
  for (std::size_t i = 0; i < s.k(); ++i) {
    out << s.vertex_ids[i];
    for (std::size_t j = 0; j < s.k(); ++j) out << ',' << s.at(i, j);
    out << '\n';
  }
  out.precision(old_precision);
}

std::string to_json(const DistanceSample& s) {
  nlohmann::json j;
  j["mode"] = to_string(s.mode);
  j["n"] = s.n;
  j["normalization"] = s.normalization;
  j["vertex_ids"] = s.vertex_ids;
  auto& rows = j["matrix"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.k(); ++i) {
    rows.push_back(std::vector<double>(s.matrix.begin() + static_cast<std::ptrdiff_t>(i * s.k()),
                                       s.matrix.begin() + static_cast<std::ptrdiff_t>((i + 1) * s.k())));
  }
  return j.dump();
}

}  // namespace freezetree

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bidding/errors.hpp"

namespace bidding {

using VertexId = int;

struct Vertex {
  VertexId id = 0;
  double weight = 0.0;
  std::optional<int> parity;  // only parity games carry labels
};

struct RawGraph {
  std::vector<Vertex> vertices;
  std::vector<std::pair<VertexId, VertexId>> edges;
};

/// Directed weighted arena. Construct through validate_graph; instances are
/// immutable afterwards and safe to share across threads.
class GameGraph {
 public:
  int size() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(VertexId v) const { return vertices_[static_cast<size_t>(v)]; }
  double weight(VertexId v) const { return vertices_[static_cast<size_t>(v)].weight; }
  const std::vector<VertexId>& successors(VertexId v) const { return succ_[static_cast<size_t>(v)]; }
  bool has_edge(VertexId u, VertexId v) const {
    for (VertexId w : successors(u))
      if (w == v) return true;
    return false;
  }
  double max_abs_weight() const {
    double m = 0.0;
    for (const auto& v : vertices_) m = std::max(m, std::abs(v.weight));
    return m;
  }
  bool fully_labeled() const {
    for (const auto& v : vertices_)
      if (!v.parity) return false;
    return true;
  }

  /// Same arena with every weight negated; used for playing Min as a Max
  /// strategy on the mirrored game.
  GameGraph negated() const {
    GameGraph g(*this);
    for (auto& v : g.vertices_) v.weight = -v.weight;
    return g;
  }

  friend GameGraph validate_graph(const RawGraph& raw);

 private:
  GameGraph() = default;
  std::vector<Vertex> vertices_;
  std::vector<std::vector<VertexId>> succ_;
};

namespace detail {

// Iterative Tarjan; returns the number of strongly connected components.
inline int count_sccs(const std::vector<std::vector<VertexId>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
  std::vector<int> stack, call_v, call_i;
  int next_index = 0, sccs = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call_v.assign(1, root);
    call_i.assign(1, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call_v.empty()) {
      int v = call_v.back();
      int& i = call_i.back();
      if (i < static_cast<int>(succ[v].size())) {
        int u = succ[v][i++];
        if (index[u] == -1) {
          index[u] = low[u] = next_index++;
          stack.push_back(u);
          on_stack[u] = 1;
          call_v.push_back(u);
          call_i.push_back(0);
        } else if (on_stack[u]) {
          low[v] = std::min(low[v], index[u]);
        }
      } else {
        if (low[v] == index[v]) {
          ++sccs;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            if (w == v) break;
          }
        }
        call_v.pop_back();
        call_i.pop_back();
        if (!call_v.empty()) low[call_v.back()] = std::min(low[call_v.back()], low[v]);
      }
    }
  }
  return sccs;
}

}  // namespace detail

/// Checks ids are dense 0..n-1, weights finite, every vertex has a successor,
/// and the successor relation is one SCC covering all vertices.
inline GameGraph validate_graph(const RawGraph& raw) {
  const int n = static_cast<int>(raw.vertices.size());
  if (n == 0) throw Error(Errc::BadInput, "graph has no vertices");
  std::vector<Vertex> verts(static_cast<size_t>(n));
  std::vector<int> seen(static_cast<size_t>(n), 0);
  for (const auto& v : raw.vertices) {
    if (v.id < 0 || v.id >= n || seen[static_cast<size_t>(v.id)])
      throw Error(Errc::BadInput, "vertex ids must be dense 0..n-1 without repeats");
    seen[static_cast<size_t>(v.id)] = 1;
    if (!std::isfinite(v.weight))
      throw Error(Errc::NonFiniteWeight, "non-finite weight at vertex " + std::to_string(v.id));
    verts[static_cast<size_t>(v.id)] = v;
  }
  std::vector<std::vector<VertexId>> succ(static_cast<size_t>(n));
  for (const auto& [u, v] : raw.edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) throw Error(Errc::BadInput, "edge endpoint out of range");
    succ[static_cast<size_t>(u)].push_back(v);
  }
  for (int v = 0; v < n; ++v) {
    if (succ[static_cast<size_t>(v)].empty())
      throw Error(Errc::NoSuccessor, "vertex " + std::to_string(v) + " has no successor");
  }
  if (detail::count_sccs(succ) != 1)
    throw Error(Errc::NotStronglyConnected, "graph is not strongly connected");

  GameGraph g;
  g.vertices_ = std::move(verts);
  g.succ_ = std::move(succ);
  return g;
}

/// Two-vertex arena with all four edges; vertex 0 has weight 1, vertex 1 has
/// weight 0. The smallest game where the mover choice matters every turn.
inline GameGraph make_bowtie() {
  RawGraph raw;
  raw.vertices = {{0, 1.0, std::nullopt}, {1, 0.0, std::nullopt}};
  raw.edges = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  return validate_graph(raw);
}

}  // namespace bidding

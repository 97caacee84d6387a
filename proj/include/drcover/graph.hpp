#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drcover {

using Vertex = std::uint32_t;

inline constexpr Vertex kNoVertex = static_cast<Vertex>(-1);
inline constexpr int kUnreachable = -1;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  auto operator<=>(const Edge&) const = default;
};

struct Triangle {
  Vertex x = 0;
  Vertex y = 0;
  Vertex z = 0;
  auto operator<=>(const Triangle&) const = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square bit matrix, one row of 64-bit words per vertex.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::size_t words() const noexcept { return words_; }

  bool test(Vertex r, Vertex c) const noexcept {
    return (bits_[r * words_ + (c >> 6)] >> (c & 63)) & 1U;
  }
  void set(Vertex r, Vertex c) noexcept { bits_[r * words_ + (c >> 6)] |= bit(c); }
  void reset(Vertex r, Vertex c) noexcept { bits_[r * words_ + (c >> 6)] &= ~bit(c); }
  void flip(Vertex r, Vertex c) noexcept { bits_[r * words_ + (c >> 6)] ^= bit(c); }

  std::span<const std::uint64_t> row(Vertex r) const noexcept {
    return {bits_.data() + r * words_, words_};
  }
  std::span<std::uint64_t> row(Vertex r) noexcept { return {bits_.data() + r * words_, words_}; }

  bool operator==(const BitMatrix&) const = default;

 private:
  static constexpr std::uint64_t bit(Vertex c) noexcept { return std::uint64_t{1} << (c & 63); }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Undirected simple graph on vertices 0..n-1. Immutable after construction;
/// keeps both sorted neighbor lists and a bit-matrix view of the adjacency.
class Graph {
 public:
  Graph() = default;

  std::size_t order() const noexcept { return bits_.size(); }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(Vertex u, Vertex v) const noexcept { return bits_.test(u, v); }
  const BitMatrix& adjacency() const noexcept { return bits_; }

  /// Position of w in neighbors(v), or kNoVertex.
  std::size_t neighbor_index(Vertex v, Vertex w) const noexcept;

  /// Edges {u,v} with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  bool operator==(const Graph& other) const { return bits_ == other.bits_; }

  friend Graph build_graph(std::size_t n, std::span<const Edge> edges);
  friend Graph graph_from_adjacency(const BitMatrix& bits);

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> targets_;
  BitMatrix bits_;
};

/// Builds a graph from an edge list, dropping duplicate edges.
/// Throws GraphError on loops or out-of-range endpoints.
Graph build_graph(std::size_t n, std::span<const Edge> edges);

/// Builds a graph from a symmetric loop-free bit matrix.
Graph graph_from_adjacency(const BitMatrix& bits);

/// Breadth-first distances from v; kUnreachable for vertices in other components.
std::vector<int> distances_from(const Graph& g, Vertex v);

bool is_connected(const Graph& g);

/// All 3-cliques, each sorted ascending, listed in lexicographic order.
std::vector<Triangle> triangles(const Graph& g);

class SpanningTree {
 public:
  SpanningTree() = default;

  /// Checks that `edges` form a spanning tree of g and roots it at `root`.
  static SpanningTree from_edges(const Graph& g, std::span<const Edge> edges, Vertex root);

  Vertex root() const noexcept { return root_; }
  /// Parent of v, kNoVertex for the root.
  Vertex parent(Vertex v) const noexcept { return parent_[v]; }
  std::size_t order() const noexcept { return parent_.size(); }
  bool contains(Vertex u, Vertex v) const noexcept {
    return parent_[u] == v || parent_[v] == u;
  }
  /// Tree edges {u,v}, u < v, lexicographic.
  std::vector<Edge> edges() const;

  bool operator==(const SpanningTree&) const = default;

 private:
  friend SpanningTree spanning_tree(const Graph& g, Vertex root);

  Vertex root_ = 0;
  std::vector<Vertex> parent_;
};

/// Deterministic BFS tree: vertices dequeued in discovery order, neighbors
/// scanned ascending. Throws GraphError if g is disconnected.
SpanningTree spanning_tree(const Graph& g, Vertex root = 0);

struct SrgParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t lambda = 0;
  std::size_t mu = 0;

  bool feasible() const noexcept { return k * (k - lambda - 1) == (n - k - 1) * mu; }
  auto operator<=>(const SrgParams&) const = default;
  std::string to_string() const;
};

/// Strongly regular parameters, or nullopt when the counts vary.
/// Complete and edgeless graphs are rejected with GraphError.
std::optional<SrgParams> srg_params(const Graph& g);

struct IntersectionArray {
  std::vector<std::size_t> b;  // b_0 .. b_{d-1}
  std::vector<std::size_t> c;  // c_1 .. c_d

  std::size_t diameter() const noexcept { return b.size(); }
  /// k_i, the number of vertices at distance i from any vertex.
  std::vector<std::size_t> distance_sizes() const;
  std::string to_string() const;
  bool operator==(const IntersectionArray&) const = default;

  static IntersectionArray parse(const std::string& text);
};

struct DrOptions {
  /// Abort at the first inconsistent count instead of finishing the scan.
  bool early_exit = true;
};

struct DrResult {
  std::optional<IntersectionArray> array;
  std::size_t violations = 0;
  std::size_t sources_checked = 0;
};

DrResult check_distance_regular(const BitMatrix& adjacency, DrOptions options = {});

/// The intersection array of g, or nullopt if g is not distance-regular.
std::optional<IntersectionArray> intersection_array(const Graph& g, DrOptions options = {});

/// True iff distinct vertices share a part exactly when at maximum distance.
/// Throws GraphError if `parts` does not partition the vertex set.
bool is_antipodal_partition(const Graph& g, const std::vector<std::vector<Vertex>>& parts);

}  // namespace drcover

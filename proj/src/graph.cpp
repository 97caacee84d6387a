#include "drcover/graph.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <sstream>

namespace drcover {

BitMatrix::BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

std::size_t Graph::neighbor_index(Vertex v, Vertex w) const noexcept {
  auto nbrs = neighbors(v);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), w);
  if (it == nbrs.end() || *it != w) return kNoVertex;
  return static_cast<std::size_t>(it - nbrs.begin());
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < order(); ++u)
    for (Vertex w : neighbors(u))
      if (u < w) out.push_back({u, w});
  return out;
}

Graph graph_from_adjacency(const BitMatrix& bits) {
  Graph g;
  const std::size_t n = bits.size();
  g.bits_ = bits;
  g.offsets_.assign(n + 1, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (bits.test(v, v)) throw GraphError("loop at vertex " + std::to_string(v));
    std::size_t deg = 0;
    for (auto word : bits.row(v)) deg += static_cast<std::size_t>(std::popcount(word));
    g.offsets_[v + 1] = g.offsets_[v] + deg;
  }
  g.targets_.resize(g.offsets_[n]);
  for (Vertex v = 0; v < n; ++v) {
    std::size_t at = g.offsets_[v];
    auto row = bits.row(v);
    for (std::size_t w = 0; w < row.size(); ++w) {
      for (auto word = row[w]; word != 0; word &= word - 1) {
        auto u = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
        if (!bits.test(u, v)) throw GraphError("asymmetric adjacency");
        g.targets_[at++] = u;
      }
    }
  }
  return g;
}

Graph build_graph(std::size_t n, std::span<const Edge> edges) {
  BitMatrix bits(n);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n)
      throw GraphError("vertex out of range in edge (" + std::to_string(e.u) + "," +
                       std::to_string(e.v) + ")");
    if (e.u == e.v) throw GraphError("loop at vertex " + std::to_string(e.u));
    bits.set(e.u, e.v);
    bits.set(e.v, e.u);
  }
  return graph_from_adjacency(bits);
}

std::vector<int> distances_from(const Graph& g, Vertex v) {
  std::vector<int> dist(g.order(), kUnreachable);
  std::deque<Vertex> queue{v};
  dist[v] = 0;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

bool is_connected(const Graph& g) {
  if (g.order() == 0) return true;
  auto dist = distances_from(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d == kUnreachable; });
}

std::vector<Triangle> triangles(const Graph& g) {
  std::vector<Triangle> out;
  for (Vertex x = 0; x < g.order(); ++x) {
    for (Vertex y : g.neighbors(x)) {
      if (y <= x) continue;
      for (Vertex z : g.neighbors(y)) {
        if (z > y && g.adjacent(x, z)) out.push_back({x, y, z});
      }
    }
  }
  return out;
}

SpanningTree spanning_tree(const Graph& g, Vertex root) {
  if (root >= g.order()) throw GraphError("root out of range");
  SpanningTree t;
  t.root_ = root;
  t.parent_.assign(g.order(), kNoVertex);
  std::vector<bool> seen(g.order(), false);
  std::deque<Vertex> queue{root};
  seen[root] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : g.neighbors(u)) {
      if (!seen[w]) {
        seen[w] = true;
        t.parent_[w] = u;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  if (reached != g.order()) throw GraphError("graph is disconnected; no spanning tree");
  return t;
}

SpanningTree SpanningTree::from_edges(const Graph& g, std::span<const Edge> edges, Vertex root) {
  const std::size_t n = g.order();
  if (root >= n) throw GraphError("root out of range");
  if (edges.size() + 1 != n) throw GraphError("a spanning tree needs exactly n-1 edges");
  std::vector<Edge> sorted;
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n || !g.adjacent(e.u, e.v))
      throw GraphError("tree edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") is not a graph edge");
    sorted.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  BitMatrix bits(n);
  for (const auto& e : sorted) {
    bits.set(e.u, e.v);
    bits.set(e.v, e.u);
  }
  Graph tree_graph = graph_from_adjacency(bits);
  if (tree_graph.edge_count() + 1 != n) throw GraphError("duplicate tree edges");
  SpanningTree t = spanning_tree(tree_graph, root);  // throws when not spanning
  return t;
}

std::vector<Edge> SpanningTree::edges() const {
  std::vector<Edge> out;
  for (Vertex v = 0; v < parent_.size(); ++v)
    if (parent_[v] != kNoVertex) out.push_back({std::min(v, parent_[v]), std::max(v, parent_[v])});
  std::sort(out.begin(), out.end());
  return out;
}

std::string SrgParams::to_string() const {
  std::ostringstream os;
  os << "(" << n << "," << k << "," << lambda << "," << mu << ")";
  return os.str();
}

namespace {

std::size_t common_count(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    total += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return total;
}

}  // namespace

std::optional<SrgParams> srg_params(const Graph& g) {
  const std::size_t n = g.order();
  if (n == 0) throw GraphError("empty graph has no strongly regular parameters");
  if (g.edge_count() == 0) throw GraphError("edgeless graph rejected: parameters are degenerate");
  if (g.edge_count() == n * (n - 1) / 2)
    throw GraphError("complete graph rejected: mu is vacuous");
  SrgParams p;
  p.n = n;
  p.k = g.degree(0);
  std::optional<std::size_t> lambda, mu;
  const auto& bits = g.adjacency();
  for (Vertex u = 0; u < n; ++u) {
    if (g.degree(u) != p.k) return std::nullopt;
    for (Vertex v = u + 1; v < n; ++v) {
      std::size_t c = common_count(bits.row(u), bits.row(v));
      auto& slot = g.adjacent(u, v) ? lambda : mu;
      if (!slot) slot = c;
      else if (*slot != c) return std::nullopt;
    }
  }
  p.lambda = lambda.value_or(0);
  p.mu = mu.value_or(0);
  return p;
}

std::vector<std::size_t> IntersectionArray::distance_sizes() const {
  std::vector<std::size_t> k{1};
  for (std::size_t i = 0; i < b.size(); ++i) k.push_back(k.back() * b[i] / c[i]);
  return k;
}

std::string IntersectionArray::to_string() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < b.size(); ++i) os << (i ? "," : "") << b[i];
  os << ";";
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << "}";
  return os.str();
}

IntersectionArray IntersectionArray::parse(const std::string& text) {
  IntersectionArray a;
  std::string body = text;
  body.erase(std::remove_if(body.begin(), body.end(),
                            [](char ch) { return ch == '{' || ch == '}' || ch == ' '; }),
             body.end());
  auto semi = body.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("intersection array needs ';'");
  auto split = [](const std::string& s) {
    std::vector<std::size_t> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoul(tok));
    return out;
  };
  a.b = split(body.substr(0, semi));
  a.c = split(body.substr(semi + 1));
  if (a.b.size() != a.c.size()) throw std::invalid_argument("b and c lengths differ");
  return a;
}

DrResult check_distance_regular(const BitMatrix& adj, DrOptions options) {
  DrResult result;
  const std::size_t n = adj.size();
  if (n == 0) return result;
  const std::size_t words = adj.words();

  std::vector<std::size_t> ref_b, ref_c;  // indexed by distance
  std::size_t ref_diameter = 0;
  bool have_ref = false;

  std::vector<std::uint64_t> visited(words), frontier(words), next(words);
  std::vector<std::vector<std::uint64_t>> layers;
  std::vector<std::size_t> order;

  auto record = [&](std::vector<std::size_t>& ref, std::size_t i, std::size_t value) {
    if (ref[i] == kNoVertex) {
      ref[i] = value;
      return true;
    }
    return ref[i] == value;
  };

  for (Vertex source = 0; source < n; ++source) {
    ++result.sources_checked;
    // Layered BFS on bit rows.
    layers.clear();
    std::fill(visited.begin(), visited.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    frontier[source >> 6] |= std::uint64_t{1} << (source & 63);
    visited = frontier;
    layers.push_back(frontier);
    std::size_t reached = 1;
    while (true) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t w = 0; w < words; ++w) {
        for (auto word = frontier[w]; word != 0; word &= word - 1) {
          auto v = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
          auto row = adj.row(v);
          for (std::size_t j = 0; j < words; ++j) next[j] |= row[j];
        }
      }
      std::size_t added = 0;
      for (std::size_t j = 0; j < words; ++j) {
        next[j] &= ~visited[j];
        visited[j] |= next[j];
        added += static_cast<std::size_t>(std::popcount(next[j]));
      }
      if (added == 0) break;
      reached += added;
      layers.push_back(next);
      frontier = next;
    }
    if (reached != n) {
      result.violations = 1;
      return result;
    }
    const std::size_t d = layers.size() - 1;
    if (!have_ref) {
      have_ref = true;
      ref_diameter = d;
      ref_b.assign(d + 1, kNoVertex);
      ref_c.assign(d + 1, kNoVertex);
    } else if (d != ref_diameter) {
      ++result.violations;
      if (options.early_exit) return result;
      continue;
    }
    // Layer 2 first: c_2 is where non-distance-regular covers usually fail.
    order.clear();
    if (d >= 2) order.push_back(2);
    for (std::size_t i = 0; i <= d; ++i)
      if (i != 2) order.push_back(i);
    for (std::size_t i : order) {
      const auto& layer = layers[i];
      for (std::size_t w = 0; w < words; ++w) {
        for (auto word = layer[w]; word != 0; word &= word - 1) {
          auto v = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
          auto row = adj.row(v);
          std::size_t c = i > 0 ? common_count(row, layers[i - 1]) : 0;
          std::size_t b = i < d ? common_count(row, layers[i + 1]) : 0;
          bool ok = record(ref_c, i, c) && record(ref_b, i, b);
          if (!ok) {
            ++result.violations;
            if (options.early_exit) return result;
          }
        }
      }
    }
  }
  if (result.violations != 0) return result;
  IntersectionArray a;
  for (std::size_t i = 0; i < ref_diameter; ++i) a.b.push_back(ref_b[i]);
  for (std::size_t i = 1; i <= ref_diameter; ++i) a.c.push_back(ref_c[i]);
  result.array = std::move(a);
  return result;
}

std::optional<IntersectionArray> intersection_array(const Graph& g, DrOptions options) {
  return check_distance_regular(g.adjacency(), options).array;
}

bool is_antipodal_partition(const Graph& g, const std::vector<std::vector<Vertex>>& parts) {
  const std::size_t n = g.order();
  std::vector<std::size_t> part_of(n, kNoVertex);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (Vertex v : parts[p]) {
      if (v >= n) throw GraphError("partition names a vertex out of range");
      if (part_of[v] != kNoVertex) throw GraphError("partition parts overlap");
      part_of[v] = p;
    }
  }
  if (std::find(part_of.begin(), part_of.end(), kNoVertex) != part_of.end())
    throw GraphError("partition does not cover the vertex set");

  std::vector<std::vector<int>> dist(n);
  int diameter = 0;
  for (Vertex v = 0; v < n; ++v) {
    dist[v] = distances_from(g, v);
    for (int d : dist[v]) {
      if (d == kUnreachable) return false;
      diameter = std::max(diameter, d);
    }
  }
  if (diameter < 2) throw GraphError("antipodality needs diameter at least 2");
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if ((part_of[u] == part_of[v]) != (dist[u][v] == diameter)) return false;
  return true;
}

}  // namespace drcover

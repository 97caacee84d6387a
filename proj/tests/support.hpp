#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "drcover/canon.hpp"
#include "drcover/graph.hpp"
#include "drcover/homotopy.hpp"
#include "drcover/voltage.hpp"

namespace testing {

using namespace drcover;

inline Graph cycle(std::size_t k) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < k; ++i) e.push_back({i, static_cast<Vertex>((i + 1) % k)});
  return build_graph(k, e);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.push_back({i, j});
  return build_graph(n, e);
}

inline Graph k33() {
  std::vector<Edge> e;
  for (Vertex i = 0; i < 3; ++i)
    for (Vertex j = 3; j < 6; ++j) e.push_back({i, j});
  return build_graph(6, e);
}

inline Graph petersen() {
  std::vector<Edge> e;
  for (Vertex i = 0; i < 5; ++i) {
    e.push_back({i, static_cast<Vertex>((i + 1) % 5)});
    e.push_back({i, static_cast<Vertex>(i + 5)});
    e.push_back({static_cast<Vertex>(i + 5), static_cast<Vertex>((i + 2) % 5 + 5)});
  }
  return build_graph(10, e);
}

inline Graph octahedron() {
  std::vector<Edge> e;
  for (Vertex i = 0; i < 6; ++i)
    for (Vertex j = i + 1; j < 6; ++j)
      if (j != i + 3) e.push_back({i, j});
  return build_graph(6, e);
}

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      if (coin(rng)) e.push_back({i, j});
  return build_graph(n, e);
}

/// Vertex v of g becomes perm[v].
inline Graph relabel(const Graph& g, const std::vector<Vertex>& perm) {
  std::vector<Edge> e;
  for (const Edge& x : g.edges()) e.push_back({perm[x.u], perm[x.v]});
  return build_graph(g.order(), e);
}

inline std::vector<Vertex> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<Vertex> p(n);
  std::iota(p.begin(), p.end(), Vertex{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Backtracking colour-preserving isomorphism test. Vertices of a are placed
/// in BFS order so each new vertex has a placed neighbour whose image limits
/// the candidates.
inline bool brute_isomorphic(const Graph& a, const std::vector<std::uint8_t>& ca, const Graph& b,
                             const std::vector<std::uint8_t>& cb) {
  const std::size_t n = a.order();
  if (n != b.order() || a.edge_count() != b.edge_count()) return false;
  std::vector<Vertex> order, anchor(n, kNoVertex);
  std::vector<char> seen(n, 0);
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    std::queue<Vertex> q;
    q.push(s);
    while (!q.empty()) {
      Vertex v = q.front();
      q.pop();
      order.push_back(v);
      for (Vertex w : a.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          anchor[w] = v;
          q.push(w);
        }
    }
  }
  std::vector<Vertex> f(n, kNoVertex);
  std::vector<char> used(n, 0);
  auto fits = [&](Vertex v, Vertex x) {
    if (used[x] || ca[v] != cb[x] || a.degree(v) != b.degree(x)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      const Vertex w = order[i];
      if (f[w] == kNoVertex) break;
      if (a.adjacent(v, w) != b.adjacent(x, f[w])) return false;
    }
    return true;
  };
  auto go = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == n) return true;
    const Vertex v = order[depth];
    std::vector<Vertex> cand;
    if (anchor[v] != kNoVertex) {
      auto nb = b.neighbors(f[anchor[v]]);
      cand.assign(nb.begin(), nb.end());
    } else {
      cand.resize(n);
      std::iota(cand.begin(), cand.end(), Vertex{0});
    }
    for (Vertex x : cand) {
      if (!fits(v, x)) continue;
      f[v] = x;
      used[x] = 1;
      if (self(self, depth + 1)) return true;
      f[v] = kNoVertex;
      used[x] = 0;
    }
    return false;
  };
  return go(go, 0);
}

inline std::shared_ptr<const Presentation> present(const Graph& g, Vertex root = 0) {
  auto shared = std::make_shared<const Graph>(g);
  return std::make_shared<const Presentation>(presentation(shared, spanning_tree(*shared, root)));
}

/// All connected cyclic covers of prime degree p, one per index-p normal
/// subgroup, in projective_coefficients order.
inline std::vector<CoverGraph> cyclic_covers(const std::shared_ptr<const Presentation>& pres, std::uint32_t p) {
  const auto basis = hom_basis_mod_p(*pres, p);
  std::vector<CoverGraph> out;
  for (const auto& c : projective_coefficients(basis.size(), p))
    out.push_back(cover_from_voltage(Voltage::cyclic(pres, p, combine_homs(basis, c, p))));
  return out;
}

}  // namespace testing

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "drcover/graph.hpp"
#include "drcover/linalg.hpp"

namespace drcover {

/// Generator reference: 0 is the identity, +(k+1) is generator k and
/// -(k+1) its inverse.
using SignedGen = std::int32_t;

inline constexpr std::size_t generator_of(SignedGen s) {
  return static_cast<std::size_t>(s > 0 ? s - 1 : -s - 1);
}

struct Relator {
  std::array<SignedGen, 3> letters{};
  std::uint8_t length = 0;
};

/// Presentation of the fundamental group of a graph's clique 2-complex
/// (vertices, edges, triangles) relative to a spanning tree. Generators are
/// the non-tree edges {u,v}, u < v, in lexicographic order; generator k is
/// the arc (u,v), the reverse arc is its inverse, tree arcs are trivial.
/// Relator i is the triangle word g(x,y) g(y,z) g(z,x) of triangles()[i].
class Presentation {
 public:
  Presentation(std::shared_ptr<const Graph> base, SpanningTree tree);

  const Graph& base() const noexcept { return *base_; }
  const std::shared_ptr<const Graph>& base_ptr() const noexcept { return base_; }
  const SpanningTree& tree() const noexcept { return tree_; }

  std::size_t generator_count() const noexcept { return generator_edges_.size(); }
  const std::vector<Edge>& generator_edges() const noexcept { return generator_edges_; }

  /// Label of the arc (v,w); throws GraphError if {v,w} is not an edge.
  SignedGen arc_label(Vertex v, Vertex w) const;

  const std::vector<Relator>& relators() const noexcept { return relators_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

  /// Relators x generators matrix of exponent sums.
  SparseMatrix relator_matrix() const;

 private:
  std::shared_ptr<const Graph> base_;
  SpanningTree tree_;
  std::vector<Edge> generator_edges_;
  std::vector<SignedGen> arc_labels_;  // parallel to the base's neighbor lists
  std::vector<std::size_t> arc_offsets_;
  std::vector<Triangle> triangles_;
  std::vector<Relator> relators_;
};

/// Throws GraphError if the tree is not a spanning tree of g.
Presentation presentation(std::shared_ptr<const Graph> g, const SpanningTree& tree);

/// Abelianisation of the presented group.
InvariantFactors abelian_invariants(const Presentation& p);

/// Basis of Hom(G, C_p), each homomorphism given by its exponent (mod p)
/// on every generator.
std::vector<std::vector<std::uint32_t>> hom_basis_mod_p(const Presentation& p, std::uint32_t prime);

/// sum_j coeffs[j] * basis[j] mod prime.
std::vector<std::uint32_t> combine_homs(const std::vector<std::vector<std::uint32_t>>& basis,
                                        const std::vector<std::uint32_t>& coeffs, std::uint32_t prime);

/// One coefficient vector per line of GF(prime)^d, namely the vectors whose
/// first nonzero entry is 1, in lexicographic order. Nonzero homomorphisms
/// onto C_prime up to automorphism, hence index-prime normal subgroups.
std::vector<std::vector<std::uint32_t>> projective_coefficients(std::size_t d, std::uint32_t prime);

}  // namespace drcover

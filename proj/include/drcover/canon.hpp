#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drcover/graph.hpp"
#include "drcover/voltage.hpp"

namespace drcover {

enum class VertexColor : std::uint8_t { red = 0, blue = 1 };

/// Cover vertices (red, 0..N-1 with the cover's own labels) plus one blue
/// vertex per fiber (N + v for base vertex v) joined to that fiber's red
/// vertices. Colour-preserving isomorphisms of augmented graphs are exactly
/// the isomorphisms of covers.
struct AugmentedGraph {
  Graph graph;
  std::vector<std::uint8_t> colors;
  std::size_t red_count = 0;
};

AugmentedGraph augment(const CoverGraph& c);

/// Exact canonical form of a vertex-coloured graph: colours and adjacency
/// rows relabelled by the canonical labeling. Equal bytes iff the coloured
/// graphs are isomorphic.
struct CanonicalCertificate {
  std::vector<std::uint8_t> bytes;
  /// labeling[i] is the input vertex placed at canonical position i.
  std::vector<Vertex> labeling;

  std::string hex() const;
  /// 64-bit FNV-1a of the bytes; for bucketing only, never for equality.
  std::uint64_t digest() const;
  bool operator==(const CanonicalCertificate& other) const { return bytes == other.bytes; }
};

struct CanonStats {
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t automorphisms = 0;
};

/// Individualisation-refinement canonical labeling. Colour classes seed the
/// partition (ascending colour value), the target cell is the first smallest
/// non-singleton cell, and the canonical leaf minimises (refinement trace,
/// relabelled adjacency). Automorphisms found along the way prune the first
/// path by orbits and cut subtrees equivalent to explored ones.
CanonicalCertificate canonical_form(const Graph& g, std::span<const std::uint8_t> colors,
                                    CanonStats* stats = nullptr);

CanonicalCertificate canonical_certificate(const AugmentedGraph& a, CanonStats* stats = nullptr);

}  // namespace drcover

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "drcover/graph.hpp"
#include "drcover/homotopy.hpp"
#include "drcover/perm.hpp"

namespace drcover {

class VoltageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Permutation voltage of degree r on a presented graph: one permutation per
/// generator (non-tree edge, oriented u < v). Tree arcs carry the identity
/// and reverse arcs carry inverses. A voltage satisfying the lift condition
/// on every triangle is a representation of the fundamental group.
class Voltage {
 public:
  Voltage(std::shared_ptr<const Presentation> presentation, std::size_t degree,
          std::vector<Perm> generator_perms);

  static Voltage identity(std::shared_ptr<const Presentation> presentation, std::size_t degree);
  /// Cyclic voltage of prime degree p: generator k acts as i -> i + exponents[k].
  static Voltage cyclic(std::shared_ptr<const Presentation> presentation, std::uint32_t p,
                        std::span<const std::uint32_t> exponents);

  const Presentation& presentation() const noexcept { return *presentation_; }
  const std::shared_ptr<const Presentation>& presentation_ptr() const noexcept {
    return presentation_;
  }
  std::size_t degree() const noexcept { return degree_; }
  const std::vector<Perm>& generator_perms() const noexcept { return perms_; }

  Perm arc_perm(Vertex v, Vertex w) const;

  /// First triangle whose arc product is not the identity.
  std::optional<Triangle> lift_violation() const;

 private:
  std::shared_ptr<const Presentation> presentation_;
  std::size_t degree_;
  std::vector<Perm> perms_;
};

/// An r-cover of a base graph. Cover vertex v*r + i is the pair (v, i).
struct CoverGraph {
  std::shared_ptr<const Graph> base;
  std::size_t degree = 0;
  Graph graph;

  Vertex project(Vertex x) const noexcept { return static_cast<Vertex>(x / degree); }
  Vertex lift(Vertex v, std::size_t sheet) const noexcept {
    return static_cast<Vertex>(v * degree + sheet);
  }
  std::size_t sheet(Vertex x) const noexcept { return x % degree; }
  std::vector<std::vector<Vertex>> fibers() const;
};

/// (u,i) ~ (w,j) iff {u,w} is a base edge and j = i * rho(u,w).
/// Throws VoltageError naming the offending triangle if the lift condition fails.
CoverGraph cover_from_voltage(const Voltage& v);

/// Human-readable violations of the four cover axioms (fibers are cocliques,
/// non-edges lift to nothing, edges lift to perfect matchings, triangles lift
/// to disjoint triangles). Empty for a valid cover.
std::vector<std::string> cover_axiom_violations(const CoverGraph& c);

/// Group generated by the generator permutations.
PermGroup monodromy_image(const Voltage& v,
                          std::size_t element_bound = PermGroup::kDefaultElementBound);

/// Collapses each part {(v,i) : i in B} to one vertex, giving an m-cover of
/// the same base. Throws VoltageError if the sheet partition is trivial or
/// not respected by the cover's edges.
CoverGraph quotient_cover(const CoverGraph& c, const BlockSystem& blocks);

/// Voltage of degree [image : H] given by the right-multiplication action of
/// the monodromy image on the right cosets of H. The coset of H is point 0.
/// Throws VoltageError if H is not a subgroup of the image.
Voltage coset_action_voltage(const Voltage& v, std::span<const Perm> subgroup_generators);

/// Spanning tree of the cover containing every lift of the base tree's
/// edges, completed by the lexicographically first connecting cover edges.
SpanningTree lifted_spanning_tree(const CoverGraph& c, const SpanningTree& base_tree);

/// Given an r1-voltage `inner` on a base and an r2-voltage `outer` on the
/// cover built from it (presented relative to a tree containing the lifted
/// base tree), returns the r1*r2-voltage on the base describing the composite
/// cover. Sheet (i,j) is numbered i*r2 + j, so blocks {i*r2 .. i*r2+r2-1}
/// form a block system of the result.
Voltage compose_to_base(const Voltage& inner, const Voltage& outer);

/// Text format: one line "u v : image-list" per generator with a non-trivial
/// permutation (1-based images); unlisted generators are the identity.
Voltage read_voltage(std::istream& in, std::shared_ptr<const Presentation> presentation);
void write_voltage(std::ostream& out, const Voltage& v);

}  // namespace drcover

#include "drcover/homotopy.hpp"

#include <algorithm>
#include <stdexcept>

namespace drcover {

Presentation::Presentation(std::shared_ptr<const Graph> base, SpanningTree tree)
    : base_(std::move(base)), tree_(std::move(tree)) {
  const Graph& g = *base_;
  if (tree_.order() != g.order()) throw GraphError("spanning tree has the wrong vertex count");
  for (const auto& e : tree_.edges())
    if (!g.adjacent(e.u, e.v)) throw GraphError("tree edge is not an edge of the graph");

  arc_offsets_.assign(g.order() + 1, 0);
  for (Vertex v = 0; v < g.order(); ++v) arc_offsets_[v + 1] = arc_offsets_[v] + g.degree(v);
  arc_labels_.assign(arc_offsets_.back(), 0);

  for (const auto& e : g.edges()) {
    if (tree_.contains(e.u, e.v)) continue;
    auto k = static_cast<SignedGen>(generator_edges_.size());
    generator_edges_.push_back(e);
    arc_labels_[arc_offsets_[e.u] + g.neighbor_index(e.u, e.v)] = k + 1;
    arc_labels_[arc_offsets_[e.v] + g.neighbor_index(e.v, e.u)] = -(k + 1);
  }

  triangles_ = drcover::triangles(g);
  relators_.reserve(triangles_.size());
  for (const auto& t : triangles_) {
    Relator r;
    for (SignedGen s : {arc_label(t.x, t.y), arc_label(t.y, t.z), arc_label(t.z, t.x)}) {
      if (s == 0) continue;
      // Free reduction against the previous letter.
      if (r.length > 0 && r.letters[r.length - 1] == -s) {
        --r.length;
        continue;
      }
      r.letters[r.length++] = s;
    }
    relators_.push_back(r);
  }
}

SignedGen Presentation::arc_label(Vertex v, Vertex w) const {
  std::size_t idx = base_->neighbor_index(v, w);
  if (idx == kNoVertex)
    throw GraphError("(" + std::to_string(v) + "," + std::to_string(w) + ") is not an arc");
  return arc_labels_[arc_offsets_[v] + idx];
}

SparseMatrix Presentation::relator_matrix() const {
  SparseMatrix m;
  m.cols = generator_count();
  m.rows.reserve(relators_.size());
  for (const auto& r : relators_) {
    SparseRow row;
    for (std::uint8_t i = 0; i < r.length; ++i) {
      auto col = static_cast<std::uint32_t>(generator_of(r.letters[i]));
      std::int64_t sign = r.letters[i] > 0 ? 1 : -1;
      auto it = std::find_if(row.begin(), row.end(), [col](const auto& e) { return e.col == col; });
      if (it == row.end()) row.push_back({col, sign});
      else it->value += sign;
    }
    std::erase_if(row, [](const SparseEntry& e) { return e.value == 0; });
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.col < b.col; });
    m.rows.push_back(std::move(row));
  }
  return m;
}

Presentation presentation(std::shared_ptr<const Graph> g, const SpanningTree& tree) {
  return Presentation(std::move(g), tree);
}

InvariantFactors abelian_invariants(const Presentation& p) {
  return cokernel_invariants(p.relator_matrix());
}

std::vector<std::vector<std::uint32_t>> hom_basis_mod_p(const Presentation& p, std::uint32_t prime) {
  return nullspace_mod_p(p.relator_matrix(), prime);
}

std::vector<std::uint32_t> combine_homs(const std::vector<std::vector<std::uint32_t>>& basis,
                                        const std::vector<std::uint32_t>& coeffs, std::uint32_t prime) {
  if (coeffs.size() != basis.size()) throw std::invalid_argument("coefficient count differs from basis size");
  std::vector<std::uint32_t> out(basis.empty() ? 0 : basis[0].size(), 0);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const std::uint64_t c = coeffs[j] % prime;
    if (c == 0) continue;
    for (std::size_t g = 0; g < out.size(); ++g)
      out[g] = static_cast<std::uint32_t>((out[g] + c * basis[j][g]) % prime);
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> projective_coefficients(std::size_t d, std::uint32_t prime) {
  if (prime < 2) throw std::invalid_argument("prime must be at least 2");
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> x(d, 0);
  // Odometer over GF(prime)^d, last coordinate fastest.
  while (true) {
    auto lead = std::find_if(x.begin(), x.end(), [](std::uint32_t v) { return v != 0; });
    if (lead != x.end() && *lead == 1) out.push_back(x);
    std::size_t j = d;
    while (j > 0 && x[j - 1] == prime - 1) x[--j] = 0;
    if (j == 0) break;
    ++x[j - 1];
  }
  return out;
}

}  // namespace drcover

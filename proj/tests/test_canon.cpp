#include <doctest.h>

#include <set>

#include "drcover/classify.hpp"
#include "drcover/delta.hpp"
#include "support.hpp"

using namespace drcover;
using namespace testing;

namespace {

// Moves (v, i) to (pi(v), tau_v(i)): fibres permuted with the base, sheets
// permuted inside each fibre.
CoverGraph scramble(const CoverGraph& c, std::mt19937_64& rng) {
  const std::size_t n = c.base->order(), r = c.degree;
  auto pi = random_permutation(n, rng);
  std::vector<Vertex> map(n * r);
  for (Vertex v = 0; v < n; ++v) {
    auto tau = random_permutation(r, rng);
    for (std::size_t i = 0; i < r; ++i) map[c.lift(v, i)] = static_cast<Vertex>(pi[v] * r + tau[i]);
  }
  CoverGraph out;
  out.base = std::make_shared<const Graph>(relabel(*c.base, pi));
  out.degree = r;
  out.graph = relabel(c.graph, map);
  return out;
}

std::vector<CoverGraph> double_covers(const Graph& g) { return cyclic_covers(present(g), 2); }

void check_against_brute(const std::vector<CoverGraph>& covers) {
  std::vector<AugmentedGraph> aug;
  std::vector<CanonicalCertificate> certs;
  for (const auto& c : covers) {
    aug.push_back(augment(c));
    certs.push_back(canonical_certificate(aug.back()));
  }
  std::size_t pairs = 0, iso = 0;
  for (std::size_t i = 0; i < covers.size(); ++i)
    for (std::size_t j = i + 1; j < covers.size(); ++j) {
      const bool b = brute_isomorphic(aug[i].graph, aug[i].colors, aug[j].graph, aug[j].colors);
      CHECK(b == (certs[i] == certs[j]));
      ++pairs;
      iso += b;
    }
  Classification cls = classify(covers);
  // Class count from the oracle: members isomorphic to no earlier member.
  std::size_t oracle_classes = 0;
  for (std::size_t i = 0; i < covers.size(); ++i) {
    bool fresh = true;
    for (std::size_t j = 0; j < i && fresh; ++j)
      fresh = !brute_isomorphic(aug[i].graph, aug[i].colors, aug[j].graph, aug[j].colors);
    oracle_classes += fresh;
  }
  CHECK(cls.classes.size() == oracle_classes);
  for (std::size_t i = 0; i < covers.size(); ++i)
    for (std::size_t j = 0; j < covers.size(); ++j)
      CHECK((cls.class_of[i] == cls.class_of[j]) == (certs[i] == certs[j]));
  MESSAGE(covers.size(), " covers, ", pairs, " pairs, ", iso, " isomorphic, ", oracle_classes, " classes");
}

}  // namespace

TEST_CASE("augmented graphs") {
  auto c5 = present(cycle(5));
  AugmentedGraph a = augment(cover_from_voltage(Voltage(c5, 2, {Perm::shift(2, 1)})));
  CHECK(a.graph.order() == 15);
  CHECK(a.red_count == 10);
  for (Vertex b = 10; b < 15; ++b) {
    CHECK(a.colors[b] == static_cast<std::uint8_t>(VertexColor::blue));
    CHECK(a.graph.degree(b) == 2);
    for (Vertex w : a.graph.neighbors(b)) CHECK(a.colors[w] == static_cast<std::uint8_t>(VertexColor::red));
  }
  for (Vertex v = 0; v < 10; ++v) {
    std::size_t blue = 0;
    for (Vertex w : a.graph.neighbors(v)) blue += a.colors[w];
    CHECK(blue == 1);
  }
  AugmentedGraph t = augment(cover_from_voltage(Voltage::identity(c5, 1)));
  for (Vertex b = 5; b < 10; ++b) CHECK(t.graph.degree(b) == 1);
}

TEST_CASE("canonical forms of plain graphs agree with brute force") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 60; ++t) {
    Graph g = random_graph(9, 0.45, rng);
    auto perm = random_permutation(9, rng);
    Graph h = t % 2 ? relabel(g, perm) : random_graph(9, 0.45, rng);
    std::vector<std::uint8_t> col(9, 0), col_h(9, 0);
    if (t % 3 == 0) {
      col[0] = 1;
      col_h[t % 2 ? perm[0] : 0] = 1;
    }
    const bool iso = brute_isomorphic(g, col, h, col_h);
    CHECK(iso == (canonical_form(g, col) == canonical_form(h, col_h)));
  }
  for (const Graph& g : {petersen(), k33(), octahedron(), build_delta().graph}) {
    const std::vector<std::uint8_t> col(g.order(), 0);
    auto c = canonical_form(g, col);
    std::set<Vertex> lab(c.labeling.begin(), c.labeling.end());
    CHECK(lab.size() == g.order());
    for (int t = 0; t < 10; ++t) CHECK(canonical_form(relabel(g, random_permutation(g.order(), rng)), col) == c);
  }
}

TEST_CASE("certificates are invariant under fibre relabelings") {
  std::mt19937_64 rng(21);
  auto base = present(build_delta().graph);
  auto h2 = hom_basis_mod_p(*base, 2);
  std::vector<std::uint32_t> coeff(h2.size(), 0);
  coeff[0] = coeff[3] = coeff[7] = 1;
  CoverGraph c = cover_from_voltage(Voltage::cyclic(base, 2, combine_homs(h2, coeff, 2)));
  const auto cert = canonical_certificate(augment(c));
  CHECK(cert.hex().size() == 2 * cert.bytes.size());
  for (int t = 0; t < 100; ++t) CHECK(canonical_certificate(augment(scramble(c, rng))) == cert);

  auto h3 = hom_basis_mod_p(*base, 3);
  CoverGraph tri = cover_from_voltage(Voltage::cyclic(base, 3, h3[0]));
  const auto tcert = canonical_certificate(augment(tri));
  for (int t = 0; t < 20; ++t) CHECK(canonical_certificate(augment(scramble(tri, rng))) == tcert);
}

TEST_CASE("triple covers of the flag graph: two certificates") {
  auto covers = cyclic_covers(present(build_delta().graph), 3);
  REQUIRE(covers.size() == 4);
  std::set<std::vector<std::uint8_t>> distinct;
  std::size_t dr = 0;
  for (const auto& c : covers) {
    distinct.insert(canonical_certificate(augment(c)).bytes);
    dr += intersection_array(c.graph).has_value();
  }
  CHECK(distinct.size() == 2);
  CHECK(dr == 3);
}

TEST_CASE("double covers of small graphs: classify against brute force") {
  SUBCASE("K3,3") {
    auto covers = double_covers(k33());
    CHECK(covers.size() == 15);
    check_against_brute(covers);
  }
  SUBCASE("C6") {
    auto covers = double_covers(cycle(6));
    CHECK(covers.size() == 1);
    check_against_brute(covers);
  }
  SUBCASE("Petersen") {
    auto covers = double_covers(petersen());
    CHECK(covers.size() == 63);
    check_against_brute(covers);
  }
}

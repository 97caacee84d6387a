#include <doctest.h>

#include <numeric>

#include "drcover/delta.hpp"
#include "drcover/linalg.hpp"
#include "support.hpp"

using namespace drcover;
using namespace testing;

namespace {

using Dense = std::vector<std::vector<std::int64_t>>;

SparseMatrix to_sparse(const Dense& d, std::size_t cols) {
  SparseMatrix m;
  m.cols = cols;
  for (const auto& row : d) {
    SparseRow r;
    for (std::size_t c = 0; c < cols; ++c)
      if (row[c] != 0) r.push_back({static_cast<std::uint32_t>(c), row[c]});
    m.rows.push_back(r);
  }
  return m;
}

std::int64_t det(Dense a) {
  // Bareiss fraction-free elimination.
  const std::size_t n = a.size();
  std::int64_t prev = 1, sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && a[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(a[k], a[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// Invariant factors from gcds of k x k minors.
InvariantFactors determinantal(const Dense& m, std::size_t cols) {
  const std::size_t rows = m.size();
  std::vector<std::int64_t> d{1};
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    std::int64_t g = 0;
    std::vector<std::size_t> rsel(k), csel(k);
    std::vector<bool> rmask(rows, false), cmask(cols, false);
    std::fill(rmask.begin(), rmask.begin() + static_cast<long>(k), true);
    do {
      std::fill(cmask.begin(), cmask.end(), false);
      std::fill(cmask.begin(), cmask.begin() + static_cast<long>(k), true);
      do {
        Dense sub;
        for (std::size_t i = 0; i < rows; ++i) {
          if (!rmask[i]) continue;
          std::vector<std::int64_t> row;
          for (std::size_t j = 0; j < cols; ++j)
            if (cmask[j]) row.push_back(m[i][j]);
          sub.push_back(row);
        }
        g = std::gcd(g, det(sub));
      } while (std::prev_permutation(cmask.begin(), cmask.end()));
    } while (std::prev_permutation(rmask.begin(), rmask.end()));
    if (g == 0) break;
    d.push_back(g);
  }
  InvariantFactors f;
  f.free_rank = cols - (d.size() - 1);
  for (std::size_t k = 1; k < d.size(); ++k) {
    std::int64_t s = d[k] / d[k - 1];
    for (std::int64_t p = 2; s > 1; ++p) {
      std::int64_t q = 1;
      while (s % p == 0) {
        s /= p;
        q *= p;
      }
      if (q > 1) f.torsion.push_back(static_cast<std::uint64_t>(q));
    }
  }
  std::sort(f.torsion.begin(), f.torsion.end());
  return f;
}

// Dense rank over GF(2) or GF(3), one-hot bit slices per value.
std::size_t dense_rank(const SparseMatrix& m, std::uint32_t p) {
  const std::size_t words = (m.cols + 63) / 64;
  struct Row {
    std::vector<std::uint64_t> one, two;
  };
  std::vector<Row> rows;
  for (const auto& r : m.rows) {
    Row x{std::vector<std::uint64_t>(words), std::vector<std::uint64_t>(words)};
    for (const auto& e : r) {
      const std::int64_t v = ((e.value % p) + p) % p;
      if (v == 1) x.one[e.col / 64] |= 1ULL << (e.col % 64);
      if (v == 2) x.two[e.col / 64] |= 1ULL << (e.col % 64);
    }
    rows.push_back(std::move(x));
  }
  auto value = [](const Row& r, std::size_t c) -> int {
    if ((r.one[c / 64] >> (c % 64)) & 1U) return 1;
    if ((r.two[c / 64] >> (c % 64)) & 1U) return 2;
    return 0;
  };
  // y += x over GF(3); GF(2) only ever uses the `one` slice.
  auto add = [&](Row& y, const Row& x) {
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t x1 = x.one[w], x2 = x.two[w], y1 = y.one[w], y2 = y.two[w];
      if (p == 2) {
        y.one[w] = x1 ^ y1;
        continue;
      }
      const std::uint64_t x0 = ~(x1 | x2), y0 = ~(y1 | y2);
      y.one[w] = (x0 & y1) | (x1 & y0) | (x2 & y2);
      y.two[w] = (x0 & y2) | (x2 & y0) | (x1 & y1);
    }
  };
  auto negate = [](Row r) {
    std::swap(r.one, r.two);
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && value(rows[piv], c) == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    if (value(rows[rank], c) == 2) rows[rank] = negate(rows[rank]);
    const Row neg = negate(rows[rank]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      const int v = value(rows[i], c);
      if (v == 1) add(rows[i], p == 2 ? rows[rank] : neg);
      if (v == 2) add(rows[i], rows[rank]);
    }
    ++rank;
  }
  return rank;
}

bool annihilates(const SparseMatrix& m, const std::vector<std::uint32_t>& x, std::uint32_t p) {
  for (const auto& r : m.rows) {
    std::int64_t s = 0;
    for (const auto& e : r) s += e.value * static_cast<std::int64_t>(x[e.col]);
    if (((s % p) + p) % p != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cokernel against determinantal divisors") {
  CHECK(cokernel_invariants(to_sparse({{2, 4}, {6, 8}}, 2)).to_string() == "Z^0 x C2^1 x C4^1");
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> entry(-4, 4), dim(1, 4);
  for (int t = 0; t < 300; ++t) {
    const std::size_t rows = static_cast<std::size_t>(dim(rng)), cols = static_cast<std::size_t>(dim(rng));
    Dense d(rows, std::vector<std::int64_t>(cols));
    for (auto& row : d)
      for (auto& x : row) x = entry(rng);
    CHECK(cokernel_invariants(to_sparse(d, cols)) == determinantal(d, cols));
  }
}

TEST_CASE("ranks mod p against dense elimination") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> entry(-2, 2);
  for (int t = 0; t < 100; ++t) {
    Dense d(12, std::vector<std::int64_t>(9));
    for (auto& row : d)
      for (auto& x : row) x = rng() % 3 == 0 ? entry(rng) : 0;
    SparseMatrix m = to_sparse(d, 9);
    for (std::uint32_t p : {2U, 3U}) {
      CHECK(rank_mod_p(m, p) == dense_rank(m, p));
      auto basis = nullspace_mod_p(m, p);
      CHECK(basis.size() == 9 - dense_rank(m, p));
      for (const auto& x : basis) CHECK(annihilates(m, x, p));
    }
  }
}

TEST_CASE("small complexes") {
  auto k4 = present(complete(4));
  CHECK(k4->generator_count() == 3);
  CHECK(k4->relators().size() == 4);
  CHECK(abelian_invariants(*k4).to_string() == "Z^0");
  CHECK(abelian_invariants(*present(octahedron())).to_string() == "Z^0");
  CHECK(abelian_invariants(*present(cycle(5))).to_string() == "Z^1");
  for (std::size_t p : {2, 3, 5}) {
    CHECK(hom_basis_mod_p(*k4, static_cast<std::uint32_t>(p)).empty());
    CHECK(hom_basis_mod_p(*present(octahedron()), static_cast<std::uint32_t>(p)).empty());
  }
}

TEST_CASE("triangle-free graphs: free rank is E - V + 1") {
  for (const Graph& g : {petersen(), k33(), cycle(7)}) {
    auto inv = abelian_invariants(*present(g));
    CHECK(inv.free_rank == g.edge_count() - g.order() + 1);
    CHECK(inv.torsion.empty());
  }
}

TEST_CASE("invariants do not depend on the tree root") {
  for (const Graph& g : {petersen(), k33(), octahedron(), build_delta().graph}) {
    CHECK(abelian_invariants(*present(g, 0)) == abelian_invariants(*present(g, 1)));
  }
}

TEST_CASE("p-ranks match hom dimensions on random clique complexes") {
  std::mt19937_64 rng(31);
  std::size_t torsion_seen = 0;
  for (int t = 0; t < 80; ++t) {
    Graph g = random_graph(8 + t % 5, 0.35 + 0.05 * (t % 6), rng);
    if (!is_connected(g)) continue;
    auto p = present(g);
    CHECK(p->relators().size() == triangles(g).size());
    const InvariantFactors inv = abelian_invariants(*p);
    torsion_seen += !inv.torsion.empty();
    for (std::uint32_t q : {2U, 3U, 5U}) CHECK(hom_basis_mod_p(*p, q).size() == inv.p_rank(q) + inv.free_rank);
  }
  for (const auto& c : cyclic_covers(present(build_delta().graph), 3)) {
    auto p = present(c.graph);
    const InvariantFactors inv = abelian_invariants(*p);
    for (std::uint32_t q : {2U, 3U}) CHECK(hom_basis_mod_p(*p, q).size() == inv.p_rank(q) + inv.free_rank);
  }
  MESSAGE(torsion_seen, " random complexes with torsion");
}

TEST_CASE("relator words") {
  auto p = present(octahedron());
  for (std::size_t i = 0; i < p->relators().size(); ++i) {
    const Triangle& t = p->triangles()[i];
    const Relator& r = p->relators()[i];
    // Word g(x,y) g(y,z) g(z,x) with identities dropped.
    std::vector<SignedGen> w;
    for (auto [a, b] : {std::pair{t.x, t.y}, std::pair{t.y, t.z}, std::pair{t.z, t.x}})
      if (p->arc_label(a, b) != 0) w.push_back(p->arc_label(a, b));
    CHECK(std::vector<SignedGen>(r.letters.begin(), r.letters.begin() + r.length) == w);
  }
  CHECK_THROWS_AS(p->arc_label(0, 3), GraphError);
  CHECK(p->arc_label(1, 2) == -p->arc_label(2, 1));
}

TEST_CASE("fundamental group of the flag graph") {
  auto p = present(build_delta().graph);
  CHECK(p->generator_count() == 1680 - 104);
  CHECK(p->relators().size() == 2240);
  InvariantFactors inv = abelian_invariants(*p);
  CHECK(inv.to_string() == "Z^0 x C2^16 x C3^2");
  CHECK(inv.p_rank(2) == 16);
  CHECK(inv.p_rank(3) == 2);

  const SparseMatrix m = p->relator_matrix();
  for (std::uint32_t q : {2U, 3U}) {
    auto basis = hom_basis_mod_p(*p, q);
    CHECK(basis.size() == m.cols - dense_rank(m, q));
    for (const auto& x : basis) CHECK(annihilates(m, x, q));
    SparseMatrix b;
    b.cols = m.cols;
    for (const auto& x : basis) {
      SparseRow r;
      for (std::uint32_t c = 0; c < x.size(); ++c)
        if (x[c]) r.push_back({c, x[c]});
      b.rows.push_back(r);
    }
    CHECK(dense_rank(b, q) == basis.size());
  }
  CHECK(rank_mod_p(m, 5) == m.cols);
}

TEST_CASE("projective coefficient lists") {
  CHECK(projective_coefficients(2, 3) ==
        std::vector<std::vector<std::uint32_t>>{{0, 1}, {1, 0}, {1, 1}, {1, 2}});
  CHECK(projective_coefficients(16, 2).size() == 65535);
  CHECK(projective_coefficients(3, 5).size() == 31);
  CHECK(projective_coefficients(0, 3).empty());
  const std::vector<std::vector<std::uint32_t>> basis{{1, 0, 2}, {0, 1, 1}};
  CHECK(combine_homs(basis, {2, 1}, 3) == std::vector<std::uint32_t>{2, 1, 2});
}

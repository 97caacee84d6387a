#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "drcover/delta.hpp"
#include "drcover/sweep.hpp"
#include "support.hpp"

using namespace drcover;
using namespace testing;

namespace {

struct Tower {
  std::shared_ptr<const Presentation> base;
  Voltage inner;
  CoverGraph mid;
  std::shared_ptr<const Presentation> outer;
  std::vector<std::vector<std::uint32_t>> basis;

  DoubleCoverSweep sweep() const { return DoubleCoverSweep(inner, outer, basis); }
};

Tower tower(const Graph& g, std::uint32_t r, std::size_t hom_index = 0) {
  auto base = present(g);
  Voltage inner = r == 1 ? Voltage::identity(base, 1)
                         : Voltage::cyclic(base, r, hom_basis_mod_p(*base, r).at(hom_index));
  CoverGraph mid = cover_from_voltage(inner);
  auto mid_graph = std::make_shared<const Graph>(mid.graph);
  auto outer = std::make_shared<const Presentation>(
      presentation(mid_graph, lifted_spanning_tree(mid, base->tree())));
  auto basis = hom_basis_mod_p(*outer, 2);
  return {base, inner, mid, outer, basis};
}

std::vector<std::uint64_t> all_masks(std::uint64_t n) {
  std::vector<std::uint64_t> m(n);
  std::iota(m.begin(), m.end(), std::uint64_t{1});
  return m;
}

}  // namespace

TEST_CASE("gray code") {
  for (std::uint64_t i = 1; i < 5000; ++i) {
    const auto d = DoubleCoverSweep::gray(i) ^ DoubleCoverSweep::gray(i - 1);
    CHECK(std::popcount(d) == 1);
    CHECK(d == (std::uint64_t{1} << std::countr_zero(i)));
  }
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1024; ++i) seen.insert(DoubleCoverSweep::gray(i));
  CHECK(seen.size() == 1024);
  CHECK(*seen.rbegin() == 1023);
}

TEST_CASE("distance-regular double covers of the Petersen graph") {
  Tower t = tower(petersen(), 1);
  DoubleCoverSweep s = t.sweep();
  REQUIRE(s.dimension() == 6);
  REQUIRE(s.class_count() == 63);
  SweepResult walked = s.run_range(1, 64);
  SweepResult direct = s.check(all_masks(63));
  CHECK(walked.classes_checked == 63);
  CHECK(walked.dr_hits == direct.dr_hits);
  CHECK(walked.a4_hits.empty());

  // Oracle: build each cover and compute its intersection array outright.
  std::vector<std::uint64_t> oracle;
  std::set<std::string> arrays;
  for (std::uint64_t mask = 1; mask <= 63; ++mask) {
    CoverGraph c = cover_from_voltage(Voltage::cyclic(t.outer, 2, s.exponents(mask)));
    if (auto a = intersection_array(c.graph)) {
      oracle.push_back(mask);
      arrays.insert(a->to_string());
    }
  }
  CHECK(walked.dr_hits == oracle);
  // Dodecahedron and Desargues graph.
  CHECK(arrays == std::set<std::string>{"{3,2,1,1,1;1,1,1,2,3}", "{3,2,2,1,1;1,1,2,2,3}"});
}

TEST_CASE("A4 detection agrees with the generic composite route") {
  // K2,3 has free fundamental group of rank 2, so A4 quotients exist.
  std::vector<Edge> e;
  for (Vertex i = 0; i < 2; ++i)
    for (Vertex j = 2; j < 5; ++j) e.push_back({i, j});
  const Graph k23 = build_graph(5, e);
  for (std::size_t h = 0; h < 2; ++h) {
    Tower t = tower(k23, 3, h);
    DoubleCoverSweep s = t.sweep();
    REQUIRE(s.dimension() == 4);
    SweepResult walked = s.run_range(1, s.class_count() + 1);
    std::vector<std::uint64_t> oracle_a4, oracle_dr;
    for (std::uint64_t mask = 1; mask <= s.class_count(); ++mask) {
      Voltage outer = Voltage::cyclic(t.outer, 2, s.exponents(mask));
      Voltage comp = compose_to_base(t.inner, outer);
      CHECK(comp.generator_perms() == s.composite_perms(mask));
      PermGroup img = monodromy_image(comp);
      if (is_transitive(img) && is_a4(img)) oracle_a4.push_back(mask);
      if (intersection_array(cover_from_voltage(outer).graph)) oracle_dr.push_back(mask);
    }
    CHECK(walked.a4_hits == oracle_a4);
    CHECK(walked.dr_hits == oracle_dr);
    CHECK(!oracle_a4.empty());
  }
}

TEST_CASE("walked and direct checks agree on Petersen triple covers") {
  Tower t = tower(petersen(), 3);
  DoubleCoverSweep s = t.sweep();
  REQUIRE(s.dimension() == 16);
  std::mt19937_64 rng(5);
  const std::uint64_t lo = 1 + rng() % 60000, hi = lo + 2000;
  SweepResult walked = s.run_range(lo, hi);
  std::vector<std::uint64_t> masks;
  for (std::uint64_t i = lo; i < hi; ++i) masks.push_back(DoubleCoverSweep::gray(i));
  SweepResult direct = s.check(masks);
  CHECK(walked.classes_checked == direct.classes_checked);
  CHECK(walked.dr_hits == direct.dr_hits);
  CHECK(walked.a4_hits == direct.a4_hits);
  std::uniform_int_distribution<std::uint64_t> pick(1, s.class_count());
  for (int k = 0; k < 40; ++k) {
    const auto mask = pick(rng);
    Voltage comp = compose_to_base(t.inner, Voltage::cyclic(t.outer, 2, s.exponents(mask)));
    CHECK(comp.generator_perms() == s.composite_perms(mask));
    PermGroup img = monodromy_image(comp);
    const bool a4 = is_transitive(img) && is_a4(img);
    const SweepResult one = s.check(std::vector<std::uint64_t>{mask});
    CHECK(a4 == !one.a4_hits.empty());
  }
}

TEST_CASE("exponents are sums of basis vectors") {
  Tower t = tower(petersen(), 3);
  DoubleCoverSweep s = t.sweep();
  const auto a = s.exponents(0b101), b = s.exponents(0b011), c = s.exponents(0b110);
  for (std::size_t g = 0; g < a.size(); ++g) {
    CHECK((a[g] ^ b[g]) == c[g]);
    CHECK(a[g] == ((t.basis[0][g] + t.basis[2][g]) & 1U));
  }
  CHECK_THROWS_AS(s.check(std::vector<std::uint64_t>{0}), VoltageError);
  CHECK_THROWS_AS(s.check(std::vector<std::uint64_t>{s.class_count() + 1}), VoltageError);
}

TEST_CASE("sweep construction validates its inputs") {
  Tower t = tower(petersen(), 3);
  // Outer tree rooted elsewhere does not contain the lifted base tree.
  auto mid_graph = std::make_shared<const Graph>(t.mid.graph);
  auto plain = std::make_shared<const Presentation>(presentation(mid_graph, spanning_tree(*mid_graph, 17)));
  bool contains_all = true;
  for (const Edge& e : t.base->tree().edges())
    for (std::size_t i = 0; i < 3; ++i)
      contains_all = contains_all && plain->tree().contains(t.mid.lift(e.u, i), t.mid.lift(e.v, i));
  REQUIRE(!contains_all);
  CHECK_THROWS_AS(DoubleCoverSweep(t.inner, plain, hom_basis_mod_p(*plain, 2)), VoltageError);
  Tower other = tower(petersen(), 3, 1);
  CHECK_THROWS_AS(DoubleCoverSweep(other.inner, t.outer, t.basis), VoltageError);
  auto bad = t.basis;
  bad[0].pop_back();
  CHECK_THROWS_AS(DoubleCoverSweep(t.inner, t.outer, bad), VoltageError);
  Voltage non_cyclic(t.base, 3, std::vector<Perm>(t.base->generator_count(), Perm::parse("2 1 3")));
  CHECK_THROWS_AS(DoubleCoverSweep(non_cyclic, t.outer, t.basis), VoltageError);
}

TEST_CASE("checkpointed sweeps resume to the same result") {
  Tower t = tower(petersen(), 3);
  DoubleCoverSweep s = t.sweep();
  CHECK(s.fingerprint() == t.sweep().fingerprint());
  CHECK(s.fingerprint() != tower(petersen(), 3, 1).sweep().fingerprint());

  const auto dir = std::filesystem::temp_directory_path() / "drcover_sweep_test";
  std::filesystem::remove_all(dir);
  const auto ckpt = dir / "sweep.checkpoint.json";

  SweepProgress straight = run_sweep(s, 2, 4096, {});
  CHECK(straight.complete());
  CHECK(straight.result.classes_checked == 65535);
  SweepResult whole = s.run_range(1, 65536);
  CHECK(straight.result.dr_hits == whole.dr_hits);
  CHECK(straight.result.a4_hits == whole.a4_hits);

  SweepProgress first = run_sweep(s, 2, 4096, ckpt, 5);
  CHECK(!first.complete());
  CHECK(first.next_block == 5);
  CHECK(std::filesystem::exists(ckpt));
  SweepProgress second = run_sweep(s, 3, 4096, ckpt);
  CHECK(second.resumed_from_block == 5);
  CHECK(second.complete());
  CHECK(!std::filesystem::exists(ckpt));
  CHECK(second.result.classes_checked == straight.result.classes_checked);
  CHECK(second.result.dr_hits == straight.result.dr_hits);
  CHECK(second.result.a4_hits == straight.result.a4_hits);
  CHECK(second.result.dr_sources_checked == straight.result.dr_sources_checked);

  // A checkpoint for another block size or a corrupt one is ignored.
  run_sweep(s, 1, 4096, ckpt, 2);
  SweepProgress other_block = run_sweep(s, 1, 1000, ckpt, 1);
  CHECK(other_block.resumed_from_block == 0);
  std::ofstream(ckpt) << "{ not json";
  SweepProgress corrupt = run_sweep(s, 1, 4096, ckpt, 1);
  CHECK(corrupt.resumed_from_block == 0);
  CHECK_THROWS_AS(run_sweep(s, 1, 0, {}), VoltageError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("double covers of the flag graph through the sweep") {
  Tower t = tower(build_delta().graph, 1);
  DoubleCoverSweep s = t.sweep();
  REQUIRE(s.dimension() == 16);
  SweepProgress p = run_sweep(s, 2, 8192, {});
  CHECK(p.result.classes_checked == 65535);
  CHECK(p.result.dr_hits.empty());
  CHECK(p.result.a4_hits.empty());
}

#include <doctest.h>

#include <atomic>

#include "drcover/classify.hpp"
#include "drcover/delta.hpp"
#include "support.hpp"

using namespace drcover;
using namespace testing;

TEST_CASE("screening never separates isomorphic covers") {
  std::mt19937_64 rng(3);
  auto covers = cyclic_covers(present(petersen()), 2);
  const ScreenSelector all;
  for (const auto& c : covers) {
    CoverGraph d;
    d.base = c.base;
    d.degree = c.degree;
    std::vector<Vertex> map(c.graph.order());
    for (Vertex v = 0; v < c.base->order(); ++v) {
      const bool swap = rng() & 1;
      map[c.lift(v, 0)] = c.lift(v, swap);
      map[c.lift(v, 1)] = c.lift(v, !swap);
    }
    d.graph = relabel(c.graph, map);
    CHECK(screen_key(c, all) == screen_key(d, all));
  }
}

TEST_CASE("screen choices do not change the classes") {
  auto covers = cyclic_covers(present(petersen()), 2);
  Classification ref = classify(covers);
  for (ScreenSelector s : {ScreenSelector{true, false, false}, ScreenSelector{false, true, false},
                           ScreenSelector{false, false, true}, ScreenSelector{false, false, false}}) {
    Classification c = classify(covers, s);
    CHECK(c.class_of == ref.class_of);
  }
  Classification none = classify(covers, ScreenSelector{false, false, false});
  CHECK(none.buckets == 1);
  CHECK(none.certificates_computed == covers.size());
  CHECK(ref.certificates_computed <= covers.size());
}

TEST_CASE("thread count does not change the result") {
  auto covers = cyclic_covers(present(k33()), 2);
  Classification a = classify(covers, {}, 1);
  for (unsigned jobs : {2u, 3u, 8u}) {
    Classification b = classify(covers, {}, jobs);
    CHECK(b.class_of == a.class_of);
    REQUIRE(b.classes.size() == a.classes.size());
    for (std::size_t k = 0; k < a.classes.size(); ++k) {
      CHECK(b.classes[k].members == a.classes[k].members);
      CHECK(b.classes[k].representative == a.classes[k].representative);
    }
  }
}

TEST_CASE("classes are ordered by representative and partition the input") {
  auto covers = cyclic_covers(present(petersen()), 2);
  Classification c = classify(covers);
  std::vector<int> hit(covers.size(), 0);
  std::size_t last = 0;
  for (std::size_t k = 0; k < c.classes.size(); ++k) {
    const auto& cl = c.classes[k];
    CHECK(cl.representative == cl.members.front());
    if (k) CHECK(cl.representative > last);
    last = cl.representative;
    for (std::size_t m : cl.members) {
      ++hit[m];
      CHECK(c.class_of[m] == k);
    }
  }
  for (int h : hit) CHECK(h == 1);
}

TEST_CASE("mixed bases are rejected") {
  std::vector<CoverGraph> covers = cyclic_covers(present(k33()), 2);
  // Equal base graphs from separate presentations are accepted.
  covers.push_back(cyclic_covers(present(k33(), 4), 2).front());
  CHECK(classify(covers).classes.size() == classify(cyclic_covers(present(k33()), 2)).classes.size());
  covers.push_back(cyclic_covers(present(relabel(k33(), {0, 3, 1, 4, 2, 5})), 2).front());
  CHECK_THROWS_AS(classify(covers), ClassifyError);
  CHECK_THROWS_AS(classify(covers, {}, 3), ClassifyError);
  CHECK(classify(std::vector<CoverGraph>{}).classes.empty());
}

TEST_CASE("parallel_for visits every index once") {
  for (unsigned jobs : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> seen(103);
    parallel_for(seen.size(), jobs, [&](std::size_t i) { seen[i]++; });
    for (auto& s : seen) CHECK(s.load() == 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("called"); });
}

TEST_CASE("triple covers of the flag graph fall into two classes") {
  auto pres = present(build_delta().graph);
  auto covers = cyclic_covers(pres, 3);
  Classification c = classify(covers, {}, 2);
  REQUIRE(c.classes.size() == 2);
  std::vector<std::size_t> sizes{c.classes[0].size(), c.classes[1].size()};
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 3});
}

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "drcover/delta.hpp"
#include "drcover/graph_io.hpp"
#include "support.hpp"

using namespace drcover;
using namespace testing;

TEST_CASE("flag graph parameters from the adjacency matrix") {
  Graph g = build_delta().graph;
  const std::size_t n = g.order();
  REQUIRE(n == 105);
  // A^2 = k I + lambda A + mu (J - I - A), entry by entry.
  std::vector<int> a(n * n, 0);
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j : g.neighbors(i)) a[i * n + j] = 1;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      int s = 0;
      for (std::size_t k = 0; k < n; ++k) s += a[i * n + k] * a[k * n + j];
      const int want = i == j ? 32 : (a[i * n + j] ? 4 : 12);
      bad += s != want;
    }
  CHECK(bad == 0);
  // Edges n k / 2 and triangles n k lambda / 6.
  CHECK(g.edge_count() == 105 * 32 / 2);
  CHECK(triangles(g).size() == 105 * 32 * 4 / 6);
}

TEST_CASE("certification") {
  const auto t0 = std::chrono::steady_clock::now();
  DeltaCertificate c = build_delta();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  CHECK(c.params == kDeltaParams);
  CHECK(c.edge_count == kDeltaEdges);
  CHECK(c.triangle_count == kDeltaTriangles);
  CHECK(intersection_array(c.graph)->to_string() == "{32,27;1,12}");
  CHECK(build_delta().graph == c.graph);

  std::vector<Edge> edges = c.graph.edges();
  edges.pop_back();
  CHECK_THROWS_AS(certify_delta(build_graph(105, edges)), CertificationError);
  CHECK_THROWS_AS(certify_delta(petersen()), CertificationError);
}

TEST_CASE("data file") {
  const auto file = default_data_dir() / "delta.g6";
  REQUIRE(std::filesystem::exists(file));
  CHECK(load_delta(file).graph == build_delta().graph);

  const auto dir = std::filesystem::temp_directory_path() / "drcover_delta_test";
  std::filesystem::create_directories(dir);
  std::string text = to_graph6(build_delta().graph);
  text[10] = static_cast<char>(text[10] == '?' ? '@' : '?');
  std::ofstream(dir / "bad.g6") << text << "\n";
  CHECK_THROWS_AS(load_delta(dir / "bad.g6"), CertificationError);
  std::ofstream(dir / "junk.g6") << "not a graph\n";
  CHECK_THROWS_AS(load_delta(dir / "junk.g6"), CertificationError);
  CHECK_THROWS_AS(load_delta(dir / "absent.g6"), CertificationError);
  std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "drcover/graph_io.hpp"
#include "support.hpp"

using namespace drcover;
using namespace testing;

TEST_CASE("graph6 known strings") {
  CHECK(to_graph6(complete(4)) == "C~");
  CHECK(to_graph6(petersen()) == "IheA@GUAo");
  CHECK(parse_graph6(">>graph6<<C~") == complete(4));
  CHECK(parse_graph6("IheA@GUAo") == petersen());
}

TEST_CASE("graph6 and edge-list round trips") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1, 2, 7, 62, 63, 64, 100, 300}) {
    Graph g = random_graph(n, 0.3, rng);
    CHECK(parse_graph6(to_graph6(g)) == g);
    std::stringstream s;
    write_edge_list(s, g);
    CHECK(read_edge_list(s) == g);
  }
}

TEST_CASE("edge-list errors name the line") {
  std::istringstream short_list("3 2\n0 1\n");
  CHECK_THROWS_AS(read_edge_list(short_list), ParseError);
  std::istringstream dup("3 2\n0 1\n1 0\n");
  CHECK_THROWS_AS(read_edge_list(dup), ParseError);
  std::istringstream loop("3 1\n2 2\n");
  CHECK_THROWS_AS(read_edge_list(loop), ParseError);
  std::istringstream range("3 1\n0 3\n");
  try {
    read_edge_list(range);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS(parse_graph6("C"));
}

TEST_CASE("load and save by extension") {
  const auto dir = std::filesystem::temp_directory_path() / "drcover_io_test";
  std::filesystem::create_directories(dir);
  Graph g = petersen();
  save_graph(dir / "p.g6", g);
  save_graph(dir / "p.txt", g);
  CHECK(load_graph(dir / "p.g6") == g);
  CHECK(load_graph(dir / "p.txt") == g);
  std::ifstream in(dir / "p.g6");
  std::string line;
  std::getline(in, line);
  CHECK(line == "IheA@GUAo");
  CHECK_THROWS(load_graph(dir / "missing.g6"));
  std::filesystem::remove_all(dir);
}

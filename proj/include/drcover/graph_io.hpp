#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "drcover/graph.hpp"

namespace drcover {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Edge-list text: a header "n m", then m lines "u v" (0-based, u < v).
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

// graph6 interchange format (optionally prefixed by ">>graph6<<").
Graph parse_graph6(std::string_view text);
std::string to_graph6(const Graph& g);

/// Reads either format; graph6 is recognised by a first line that is not a
/// pair of integers.
Graph load_graph(const std::filesystem::path& path);

/// Writes graph6 for ".g6" paths, the edge-list format otherwise.
void save_graph(const std::filesystem::path& path, const Graph& g);

}  // namespace drcover

#include "drcover/graph_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace drcover {

namespace {

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

bool parse_pair(const std::string& line, long long& a, long long& b) {
  std::istringstream is(line);
  std::string rest;
  if (!(is >> a >> b)) return false;
  return !(is >> rest);
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long long n = -1, m = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '#') continue;
    if (!parse_pair(line, n, m) || n < 0 || m < 0)
      throw ParseError("expected header \"n m\"", line_no);
    break;
  }
  if (n < 0) throw ParseError("missing header", line_no);
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '#') continue;
    long long u = 0, v = 0;
    if (!parse_pair(line, u, v)) throw ParseError("expected \"u v\"", line_no);
    if (u < 0 || v < 0 || u >= n || v >= n) throw ParseError("vertex out of range", line_no);
    if (u == v) throw ParseError("loop edge", line_no);
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  if (static_cast<long long>(edges.size()) != m)
    throw ParseError("header declares " + std::to_string(m) + " edges but " +
                         std::to_string(edges.size()) + " were read",
                     line_no);
  Graph g = build_graph(static_cast<std::size_t>(n), edges);
  if (static_cast<long long>(g.edge_count()) != m)
    throw ParseError("duplicate edges in edge list", line_no);
  return g;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph parse_graph6(std::string_view text) {
  constexpr std::string_view header = ">>graph6<<";
  if (text.substr(0, header.size()) == header) text.remove_prefix(header.size());
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
    text.remove_suffix(1);
  std::size_t pos = 0;
  auto next = [&]() -> unsigned {
    if (pos >= text.size()) throw ParseError("graph6 string truncated", 1);
    auto ch = static_cast<unsigned char>(text[pos++]);
    if (ch < 63 || ch > 126) throw ParseError("invalid graph6 character", 1);
    return ch - 63U;
  };
  std::size_t n = next();
  if (n == 63) {
    n = 0;
    for (int i = 0; i < 3; ++i) n = (n << 6) | next();
    if (n >= 258048) throw ParseError("graph6 graphs beyond 258047 vertices unsupported", 1);
  }
  std::vector<Edge> edges;
  unsigned chunk = 0;
  int bits_left = 0;
  for (Vertex j = 1; j < n; ++j) {
    for (Vertex i = 0; i < j; ++i) {
      if (bits_left == 0) {
        chunk = next();
        bits_left = 6;
      }
      --bits_left;
      if ((chunk >> bits_left) & 1U) edges.push_back({i, j});
    }
  }
  if (pos != text.size()) throw ParseError("trailing data after graph6 string", 1);
  return build_graph(n, edges);
}

std::string to_graph6(const Graph& g) {
  std::string out;
  const std::size_t n = g.order();
  if (n < 63) {
    out.push_back(static_cast<char>(n + 63));
  } else {
    out.push_back(static_cast<char>(126));
    for (int shift = 12; shift >= 0; shift -= 6)
      out.push_back(static_cast<char>(((n >> shift) & 63U) + 63));
  }
  unsigned chunk = 0;
  int filled = 0;
  for (Vertex j = 1; j < n; ++j) {
    for (Vertex i = 0; i < j; ++i) {
      chunk = (chunk << 1) | (g.adjacent(i, j) ? 1U : 0U);
      if (++filled == 6) {
        out.push_back(static_cast<char>(chunk + 63));
        chunk = 0;
        filled = 0;
      }
    }
  }
  if (filled != 0) out.push_back(static_cast<char>((chunk << (6 - filled)) + 63));
  return out;
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  std::istringstream probe(content);
  std::string first;
  while (std::getline(probe, first))
    if (!blank(first) && first[0] != '#') break;
  long long a = 0, b = 0;
  if (parse_pair(first, a, b)) {
    std::istringstream is(content);
    return read_edge_list(is);
  }
  return parse_graph6(first);
}

void save_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (path.extension() == ".g6") {
    out << to_graph6(g) << '\n';
  } else {
    write_edge_list(out, g);
  }
}

}  // namespace drcover

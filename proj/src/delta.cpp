#include "drcover/delta.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "drcover/graph_io.hpp"

namespace drcover {

namespace {

// GF(4) with elements 0,1,w,w^2 encoded as 0..3; addition is xor.
constexpr std::array<std::uint8_t, 3> kExp{1, 2, 3};
constexpr std::array<std::uint8_t, 4> kLog{0, 0, 1, 2};

std::uint8_t gf4_mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return kExp[(kLog[a] + kLog[b]) % 3];
}

std::uint8_t gf4_inv(std::uint8_t a) { return kExp[(3 - kLog[a]) % 3]; }

using Coords = std::array<std::uint8_t, 3>;

/// Projective points of PG(2,4), each normalised to first nonzero entry 1,
/// in lexicographic order.
std::vector<Coords> projective_points() {
  std::vector<Coords> pts;
  for (std::uint8_t a = 0; a < 4; ++a)
    for (std::uint8_t b = 0; b < 4; ++b)
      for (std::uint8_t c = 0; c < 4; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        std::uint8_t lead = a ? a : (b ? b : c);
        std::uint8_t inv = gf4_inv(lead);
        Coords normal{gf4_mul(inv, a), gf4_mul(inv, b), gf4_mul(inv, c)};
        if (std::find(pts.begin(), pts.end(), normal) == pts.end()) pts.push_back(normal);
      }
  std::sort(pts.begin(), pts.end());
  return pts;
}

bool incident(const Coords& point, const Coords& line) {
  std::uint8_t s = 0;
  for (int i = 0; i < 3; ++i) s ^= gf4_mul(point[i], line[i]);
  return s == 0;
}

}  // namespace

DeltaCertificate build_delta() {
  const auto points = projective_points();
  const auto& lines = points;  // lines carry dual coordinates
  struct Flag {
    std::size_t point, line;
  };
  std::vector<Flag> flags;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (std::size_t l = 0; l < lines.size(); ++l)
      if (incident(points[p], lines[l])) flags.push_back({p, l});

  std::vector<Edge> edges;
  for (Vertex a = 0; a < flags.size(); ++a) {
    for (Vertex b = a + 1; b < flags.size(); ++b) {
      const auto& f = flags[a];
      const auto& g = flags[b];
      if (f.point == g.point || f.line == g.line) continue;
      if (incident(points[f.point], lines[g.line]) || incident(points[g.point], lines[f.line]))
        edges.push_back({a, b});
    }
  }
  return certify_delta(build_graph(flags.size(), edges));
}

DeltaCertificate certify_delta(Graph g) {
  if (g.order() != kDeltaParams.n)
    throw CertificationError("expected 105 vertices, found " + std::to_string(g.order()));
  std::optional<SrgParams> params;
  try {
    params = srg_params(g);
  } catch (const GraphError& e) {
    throw CertificationError(e.what());
  }
  if (!params) throw CertificationError("graph is not strongly regular");
  if (*params != kDeltaParams)
    throw CertificationError("strongly regular with parameters " + params->to_string() +
                             ", expected " + kDeltaParams.to_string());
  DeltaCertificate cert;
  cert.params = *params;
  cert.edge_count = g.edge_count();
  cert.triangle_count = triangles(g).size();
  cert.graph = std::move(g);
  if (cert.edge_count != kDeltaEdges || cert.triangle_count != kDeltaTriangles)
    throw CertificationError("edge or triangle count mismatch");
  return cert;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("DRCOVER_DATA"); env != nullptr && *env != '\0') return env;
#ifdef DRCOVER_DEFAULT_DATA_DIR
  return DRCOVER_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

DeltaCertificate load_delta(const std::filesystem::path& path) {
  Graph g;
  try {
    g = load_graph(path);
  } catch (const std::exception& e) {
    throw CertificationError(path.string() + ": " + e.what());
  }
  return certify_delta(std::move(g));
}

}  // namespace drcover

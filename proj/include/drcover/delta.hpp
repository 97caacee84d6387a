#pragma once

#include <filesystem>
#include <stdexcept>

#include "drcover/graph.hpp"

namespace drcover {

inline constexpr SrgParams kDeltaParams{105, 32, 4, 12};
inline constexpr std::size_t kDeltaEdges = 1680;
inline constexpr std::size_t kDeltaTriangles = 2240;

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A graph proven to be the strongly regular graph with parameters
/// (105,32,4,12). That graph is unique up to isomorphism, so the parameter
/// check is a complete certificate.
struct DeltaCertificate {
  Graph graph;
  SrgParams params;
  std::size_t edge_count = 0;
  std::size_t triangle_count = 0;
};

/// Flag graph of the projective plane PG(2,4): vertices are the 105
/// incident point-line pairs, and (p,L) ~ (q,M) when p != q, L != M and
/// p lies on M or q lies on L. Certified before it is returned.
DeltaCertificate build_delta();

/// Throws CertificationError unless g has the expected parameters.
DeltaCertificate certify_delta(Graph g);

/// Default location of delta.g6: $DRCOVER_DATA if set, else the build-time
/// data directory.
std::filesystem::path default_data_dir();

DeltaCertificate load_delta(const std::filesystem::path& path);

}  // namespace drcover

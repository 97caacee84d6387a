#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "drcover/canon.hpp"
#include "drcover/voltage.hpp"

namespace drcover {

class ClassifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which cheap isomorphism invariants bucket covers before canonical forms
/// are computed.
struct ScreenSelector {
  bool vertex_count = true;
  /// Per-vertex distance histograms, sorted.
  bool distance_profile = true;
  /// Histogram of triangles through each vertex.
  bool triangle_profile = true;
};

using ScreenKey = std::vector<std::uint64_t>;

ScreenKey screen_key(const CoverGraph& c, const ScreenSelector& screen);

struct CoverClass {
  std::size_t representative = 0;  // index of the first member
  std::vector<std::size_t> members;
  /// Absent when the class was alone in its screening bucket.
  std::optional<CanonicalCertificate> certificate;

  std::size_t size() const noexcept { return members.size(); }
};

struct Classification {
  std::vector<CoverClass> classes;     // ordered by representative
  std::vector<std::uint32_t> class_of; // per input index
  std::size_t buckets = 0;
  std::size_t certificates_computed = 0;
};

/// Produces cover number i of the stream. Must be callable concurrently.
using CoverSource = std::function<CoverGraph(std::size_t)>;

/// Partitions `count` covers of one base into cover-isomorphism classes.
/// Pass one buckets by screen key; pass two computes certificates only inside
/// buckets with more than one member. Work is spread over `jobs` threads;
/// the result does not depend on `jobs`.
Classification classify(std::size_t count, const CoverSource& source, const ScreenSelector& screen = {},
                        unsigned jobs = 1);

/// Convenience overload for materialised covers.
Classification classify(const std::vector<CoverGraph>& covers, const ScreenSelector& screen = {},
                        unsigned jobs = 1);

/// Runs fn(i) for i in [0, count) over `jobs` threads, indices sharded in
/// contiguous ranges.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace drcover

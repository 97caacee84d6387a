#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace drcover {

struct SparseEntry {
  std::uint32_t col = 0;
  std::int64_t value = 0;
  bool operator==(const SparseEntry&) const = default;
};

/// Entries sorted by column, no zeros.
using SparseRow = std::vector<SparseEntry>;

struct SparseMatrix {
  std::size_t cols = 0;
  std::vector<SparseRow> rows;
};

class ArithmeticOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Abelian group Z^free_rank x (product of cyclic groups of prime-power order).
struct InvariantFactors {
  std::size_t free_rank = 0;
  std::vector<std::uint64_t> torsion;  // prime powers > 1, ascending

  /// Number of torsion factors whose order is a power of p.
  std::size_t p_rank(std::uint64_t p) const;
  /// prime -> exponent of the torsion subgroup order.
  std::map<std::uint64_t, std::size_t> torsion_order() const;
  /// Stable text form, e.g. "Z^0 x C2^16 x C3^2".
  std::string to_string() const;

  bool operator==(const InvariantFactors&) const = default;
};

/// Primary decomposition of Z^cols / rowspace(m), computed exactly:
/// sparse elimination on +-1 pivots followed by a dense Smith diagonalisation
/// of whatever remains.
InvariantFactors cokernel_invariants(const SparseMatrix& m);

/// Rank of m reduced modulo the prime p.
std::size_t rank_mod_p(const SparseMatrix& m, std::uint32_t p);

/// Basis of { x in GF(p)^cols : m x = 0 }, one vector of residues per basis
/// element.
std::vector<std::vector<std::uint32_t>> nullspace_mod_p(const SparseMatrix& m, std::uint32_t p);

}  // namespace drcover

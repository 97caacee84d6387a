#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "drcover/graph.hpp"
#include "drcover/homotopy.hpp"
#include "drcover/voltage.hpp"

namespace drcover {

struct SweepResult {
  std::size_t classes_checked = 0;
  /// Coefficient masks (bit j = basis vector j) of distance-regular covers.
  std::vector<std::uint64_t> dr_hits;
  /// Coefficient masks whose composite monodromy over the base is A4.
  std::vector<std::uint64_t> a4_hits;
  std::size_t dr_sources_checked = 0;

  void merge(const SweepResult& other);
};

/// Walks the double covers of a cyclic cover C of a base B. `inner` is the
/// cyclic voltage on B that builds C; `outer` presents C relative to a tree
/// containing the lifts of B's tree, and `basis` spans Hom(pi1(C), C2).
///
/// For every class the double cover is checked for distance-regularity and
/// the composite monodromy over B, a subgroup of the wreath product
/// C2 wr C_r, is tested for being A4. Consecutive classes are visited in
/// Gray-code order so each step touches only the support of one basis vector.
class DoubleCoverSweep {
 public:
  DoubleCoverSweep(const Voltage& inner, std::shared_ptr<const Presentation> outer,
                   std::vector<std::vector<std::uint32_t>> basis);

  std::size_t dimension() const noexcept { return basis_.size(); }
  std::uint64_t class_count() const noexcept { return (std::uint64_t{1} << basis_.size()) - 1; }

  static std::uint64_t gray(std::uint64_t i) noexcept { return i ^ (i >> 1); }

  /// Visits the classes gray(i) for i in [lo, hi), lo >= 1.
  SweepResult run_range(std::uint64_t lo, std::uint64_t hi) const;
  /// Checks the listed coefficient masks independently of one another.
  SweepResult check(std::span<const std::uint64_t> masks) const;

  /// Sum of the basis vectors selected by mask, as a C2 exponent per generator.
  std::vector<std::uint32_t> exponents(std::uint64_t mask) const;
  /// Hash of the basis and the cover edges; identifies checkpoints.
  std::uint64_t fingerprint() const;

  /// Composite permutation of each base generator for the class `mask`,
  /// computed by the sweep's own bookkeeping.
  std::vector<Perm> composite_perms(std::uint64_t mask) const;

 private:
  struct State;
  State initial_state(std::uint64_t mask) const;
  void flip(State& s, std::size_t j) const;
  void examine(State& s, std::uint64_t mask, SweepResult& out) const;

  std::size_t inner_degree_;
  std::size_t element_count_;
  std::shared_ptr<const Presentation> outer_;
  std::vector<std::vector<std::uint32_t>> basis_;
  std::vector<std::vector<std::uint32_t>> support_;  // per basis vector, outer generators
  std::vector<std::uint32_t> shift_of_base_;         // per base generator
  struct Slot {
    std::uint32_t base_gen;
    std::uint32_t sheet;
  };
  std::vector<Slot> slot_of_outer_;  // per outer generator
  std::vector<Edge> outer_edges_;    // cover edges, with generator index or none
  std::vector<std::uint32_t> outer_gen_of_edge_;
  std::vector<std::uint16_t> mul_;  // element products
  std::vector<std::uint8_t> element_order_;
};

struct SweepProgress {
  SweepResult result;
  std::uint64_t blocks = 0;
  std::uint64_t next_block = 0;
  std::uint64_t resumed_from_block = 0;
  bool complete() const noexcept { return next_block >= blocks; }
};

/// Visits every class in blocks of `block` consecutive Gray indices, `jobs`
/// blocks at a time. When `checkpoint` is non-empty, progress is written there
/// after each batch, an existing checkpoint with a matching fingerprint is
/// resumed, and the file is removed once the sweep completes. At most
/// `max_blocks` blocks are processed by this call.
SweepProgress run_sweep(const DoubleCoverSweep& sweep, unsigned jobs, std::uint64_t block,
                        const std::filesystem::path& checkpoint,
                        std::uint64_t max_blocks = std::numeric_limits<std::uint64_t>::max());

}  // namespace drcover

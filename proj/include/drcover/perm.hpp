#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drcover {

class PermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Permutation of {0..r-1} acting on the right: i*(a*b) = (i*a)*b.
/// Text forms use the 1-based image list.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::vector<std::uint8_t> images);

  static Perm identity(std::size_t degree);
  /// i -> i + k mod degree.
  static Perm shift(std::size_t degree, std::size_t k);
  /// Parses a 1-based image list such as "2 3 1".
  static Perm parse(const std::string& text);

  std::size_t degree() const noexcept { return images_.size(); }
  std::size_t operator()(std::size_t i) const noexcept { return images_[i]; }
  std::span<const std::uint8_t> images() const noexcept { return images_; }

  Perm operator*(const Perm& other) const;
  Perm inverse() const;
  bool is_identity() const noexcept;
  std::size_t order() const;
  std::string to_string() const;

  auto operator<=>(const Perm&) const = default;

 private:
  std::vector<std::uint8_t> images_;
};

/// Small permutation group with its element set materialised by closure.
/// Intended for degree <= 8.
class PermGroup {
 public:
  static constexpr std::size_t kDefaultElementBound = 40320;

  /// Throws PermError when the closure exceeds element_bound.
  PermGroup(std::size_t degree, std::vector<Perm> generators,
            std::size_t element_bound = kDefaultElementBound);

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<Perm>& generators() const noexcept { return generators_; }
  /// Sorted element list.
  const std::vector<Perm>& elements() const noexcept { return elements_; }
  std::size_t order() const noexcept { return elements_.size(); }
  bool contains(const Perm& p) const;
  std::size_t max_element_order() const;
  std::vector<std::vector<std::size_t>> orbits() const;

 private:
  std::size_t degree_;
  std::vector<Perm> generators_;
  std::vector<Perm> elements_;
};

bool is_transitive(const PermGroup& g);

/// Order 12 with no element of order greater than 3. Among transitive
/// groups of degree at most 6 of order 12 this singles out A4.
bool is_a4(const PermGroup& g);

/// Partition of the points into blocks of equal size, each block sorted and
/// blocks ordered by their least point.
struct BlockSystem {
  std::vector<std::vector<std::size_t>> blocks;

  std::size_t block_count() const noexcept { return blocks.size(); }
  std::size_t block_size() const noexcept { return blocks.empty() ? 0 : blocks[0].size(); }
  /// Index of the block holding point i.
  std::vector<std::size_t> block_index(std::size_t degree) const;
  bool operator==(const BlockSystem&) const = default;
};

bool preserves(const PermGroup& g, const BlockSystem& bs);

/// All minimal nontrivial block systems of a transitive group; empty iff the
/// group is primitive. Throws PermError for intransitive input.
std::vector<BlockSystem> block_systems(const PermGroup& g);

}  // namespace drcover

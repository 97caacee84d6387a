#include "drcover/perm.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace drcover {

Perm::Perm(std::vector<std::uint8_t> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (auto x : images_) {
    if (x >= images_.size() || seen[x]) throw PermError("image list is not a bijection");
    seen[x] = true;
  }
}

Perm Perm::identity(std::size_t degree) {
  std::vector<std::uint8_t> im(degree);
  std::iota(im.begin(), im.end(), std::uint8_t{0});
  return Perm(std::move(im));
}

Perm Perm::shift(std::size_t degree, std::size_t k) {
  std::vector<std::uint8_t> im(degree);
  for (std::size_t i = 0; i < degree; ++i) im[i] = static_cast<std::uint8_t>((i + k) % degree);
  return Perm(std::move(im));
}

Perm Perm::parse(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::uint8_t> im;
  long long x = 0;
  while (is >> x) {
    if (x < 1 || x > 255) throw PermError("image out of range: " + std::to_string(x));
    im.push_back(static_cast<std::uint8_t>(x - 1));
  }
  if (!is.eof()) throw PermError("malformed image list: " + text);
  return Perm(std::move(im));
}

Perm Perm::operator*(const Perm& other) const {
  if (other.degree() != degree()) throw PermError("degree mismatch in product");
  Perm out;
  out.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out.images_[i] = other.images_[images_[i]];
  return out;
}

Perm Perm::inverse() const {
  Perm out;
  out.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i)
    out.images_[images_[i]] = static_cast<std::uint8_t>(i);
  return out;
}

bool Perm::is_identity() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

std::size_t Perm::order() const {
  std::size_t result = 1;
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = images_[j]) {
      seen[j] = true;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return result;
}

std::string Perm::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < images_.size(); ++i) os << (i ? " " : "") << images_[i] + 1;
  return os.str();
}

PermGroup::PermGroup(std::size_t degree, std::vector<Perm> generators, std::size_t element_bound)
    : degree_(degree), generators_(std::move(generators)) {
  for (const auto& g : generators_)
    if (g.degree() != degree_) throw PermError("generator degree mismatch");
  std::set<Perm> seen{Perm::identity(degree_)};
  std::deque<Perm> queue{Perm::identity(degree_)};
  while (!queue.empty()) {
    Perm x = std::move(queue.front());
    queue.pop_front();
    for (const auto& g : generators_) {
      Perm y = x * g;
      if (seen.insert(y).second) {
        if (seen.size() > element_bound)
          throw PermError("group closure exceeds " + std::to_string(element_bound) + " elements");
        queue.push_back(std::move(y));
      }
    }
  }
  elements_.assign(seen.begin(), seen.end());
}

bool PermGroup::contains(const Perm& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

std::size_t PermGroup::max_element_order() const {
  std::size_t best = 1;
  for (const auto& e : elements_) best = std::max(best, e.order());
  return best;
}

std::vector<std::vector<std::size_t>> PermGroup::orbits() const {
  std::vector<std::size_t> orbit_of(degree_, degree_);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < degree_; ++start) {
    if (orbit_of[start] != degree_) continue;
    std::vector<std::size_t> orbit{start};
    orbit_of[start] = out.size();
    for (std::size_t at = 0; at < orbit.size(); ++at)
      for (const auto& g : generators_) {
        std::size_t y = g(orbit[at]);
        if (orbit_of[y] == degree_) {
          orbit_of[y] = out.size();
          orbit.push_back(y);
        }
      }
    std::sort(orbit.begin(), orbit.end());
    out.push_back(std::move(orbit));
  }
  return out;
}

bool is_transitive(const PermGroup& g) { return g.degree() > 0 && g.orbits().size() == 1; }

bool is_a4(const PermGroup& g) { return g.order() == 12 && g.max_element_order() == 3; }

std::vector<std::size_t> BlockSystem::block_index(std::size_t degree) const {
  std::vector<std::size_t> idx(degree, degree);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (auto x : blocks[b]) idx[x] = b;
  return idx;
}

bool preserves(const PermGroup& g, const BlockSystem& bs) {
  auto idx = bs.block_index(g.degree());
  for (auto i : idx)
    if (i == g.degree()) return false;
  for (const auto& gen : g.generators())
    for (const auto& block : bs.blocks)
      for (auto x : block)
        if (idx[gen(x)] != idx[gen(block.front())]) return false;
  return true;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

/// Finest block system in which 0 and b share a block (Atkinson).
BlockSystem minimal_block_system(const PermGroup& g, std::size_t b) {
  UnionFind uf(g.degree());
  std::deque<std::pair<std::size_t, std::size_t>> queue;
  uf.unite(0, b);
  queue.emplace_back(0, b);
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    for (const auto& gen : g.generators()) {
      std::size_t gx = gen(x), gy = gen(y);
      if (uf.unite(gx, gy)) queue.emplace_back(gx, gy);
    }
  }
  std::vector<std::vector<std::size_t>> by_root(g.degree());
  for (std::size_t x = 0; x < g.degree(); ++x) by_root[uf.find(x)].push_back(x);
  BlockSystem bs;
  for (auto& block : by_root)
    if (!block.empty()) bs.blocks.push_back(std::move(block));
  std::sort(bs.blocks.begin(), bs.blocks.end());
  return bs;
}

bool refines(const BlockSystem& fine, const BlockSystem& coarse, std::size_t degree) {
  auto idx = coarse.block_index(degree);
  for (const auto& block : fine.blocks)
    for (auto x : block)
      if (idx[x] != idx[block.front()]) return false;
  return true;
}

}  // namespace

std::vector<BlockSystem> block_systems(const PermGroup& g) {
  if (!is_transitive(g)) throw PermError("block systems need a transitive group");
  std::vector<BlockSystem> found;
  for (std::size_t b = 1; b < g.degree(); ++b) {
    BlockSystem bs = minimal_block_system(g, b);
    if (bs.block_count() == 1) continue;
    if (std::find(found.begin(), found.end(), bs) == found.end()) found.push_back(std::move(bs));
  }
  std::vector<BlockSystem> minimal;
  for (const auto& bs : found) {
    bool has_finer = std::any_of(found.begin(), found.end(), [&](const BlockSystem& other) {
      return !(other == bs) && refines(other, bs, g.degree());
    });
    if (!has_finer) minimal.push_back(bs);
  }
  return minimal;
}

}  // namespace drcover

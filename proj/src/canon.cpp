#include "drcover/canon.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace drcover {

AugmentedGraph augment(const CoverGraph& c) {
  const std::size_t red = c.graph.order();
  const std::size_t blue = c.base->order();
  BitMatrix bits(red + blue);
  for (Vertex a = 0; a < red; ++a) {
    for (Vertex b : c.graph.neighbors(a)) bits.set(a, b);
    auto f = static_cast<Vertex>(red + c.project(a));
    bits.set(a, f);
    bits.set(f, a);
  }
  AugmentedGraph out;
  out.graph = graph_from_adjacency(bits);
  out.colors.assign(red + blue, static_cast<std::uint8_t>(VertexColor::red));
  std::fill(out.colors.begin() + static_cast<std::ptrdiff_t>(red), out.colors.end(),
            static_cast<std::uint8_t>(VertexColor::blue));
  out.red_count = red;
  return out;
}

std::string CanonicalCertificate::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::uint64_t CanonicalCertificate::digest() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return h ^ x;
}

/// Ordered partition: cells are contiguous ranges of `lab`.
struct Partition {
  std::vector<Vertex> lab;
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> cell_of;   // vertex -> start of its cell
  std::vector<std::uint32_t> cell_end;  // start -> end (exclusive)
  std::uint32_t cells = 0;

  bool discrete() const { return cells == lab.size(); }
};

class Canonizer {
 public:
  Canonizer(const Graph& g, std::span<const std::uint8_t> colors, CanonStats* stats)
      : g_(g), n_(static_cast<std::uint32_t>(g.order())), stats_(stats) {
    counts_.assign(n_, 0);
    cell_mark_.assign(n_, 0);
    in_queue_.assign(n_, 0);
    init_colors_.assign(colors.begin(), colors.end());
  }

  CanonicalCertificate run() {
    CanonicalCertificate cert;
    if (n_ == 0) {
      cert.bytes = encode({});
      return cert;
    }
    Partition root = initial_partition();
    std::vector<std::uint32_t> all_cells;
    for (std::uint32_t s = 0; s < n_; s = root.cell_end[s]) all_cells.push_back(s);
    std::uint64_t inv = refine(root, all_cells);

    // First descent: establishes the first path, which is also the first best.
    std::vector<Partition> first_nodes{root};
    first_inv_.push_back(inv);
    while (!first_nodes.back().discrete()) {
      Partition child = first_nodes.back();
      std::uint32_t s = target_cell(child);
      Vertex w = smallest_in_cell(child, s);
      first_path_.push_back(w);
      first_inv_.push_back(individualize_and_refine(child, w, s));
      first_nodes.push_back(std::move(child));
    }
    count_node(first_nodes.size());
    first_lab_ = first_nodes.back().lab;
    best_inv_ = first_inv_;
    best_path_ = first_path_;
    best_lab_ = first_lab_;
    best_rows_ = rows_for(first_lab_);
    if (stats_) ++stats_->leaves;

    const std::size_t depth = first_path_.size();
    for (std::size_t level = depth; level-- > 0;) {
      const Partition& node = first_nodes[level];
      std::uint32_t s = target_cell(node);
      std::vector<Vertex> candidates(node.lab.begin() + s, node.lab.begin() + node.cell_end[s]);
      std::sort(candidates.begin(), candidates.end());
      std::vector<Vertex> explored{first_path_[level]};
      std::vector<Vertex> prefix(first_path_.begin(), first_path_.begin() + static_cast<std::ptrdiff_t>(level));
      for (Vertex w : candidates) {
        if (w == first_path_[level]) continue;
        if (equivalent_to_explored(prefix, explored, w)) continue;
        explored.push_back(w);
        Partition child = node;
        path_ = prefix;
        path_.push_back(w);
        invs_.assign(first_inv_.begin(), first_inv_.begin() + static_cast<std::ptrdiff_t>(level) + 1);
        invs_.push_back(individualize_and_refine(child, w, s));
        count_node(1);
        if (!viable()) continue;
        explore(child, level + 1);
      }
    }

    cert.labeling = best_lab_;
    cert.bytes = encode(best_rows_);
    return cert;
  }

 private:
  enum class Cmp { less, equal, greater };

  void count_node(std::size_t k) {
    if (stats_) stats_->nodes += k;
  }

  Partition initial_partition() const {
    Partition p;
    p.lab.resize(n_);
    std::iota(p.lab.begin(), p.lab.end(), 0);
    std::stable_sort(p.lab.begin(), p.lab.end(),
                     [&](Vertex a, Vertex b) { return init_colors_[a] < init_colors_[b]; });
    p.pos.resize(n_);
    p.cell_of.resize(n_);
    p.cell_end.assign(n_, 0);
    std::uint32_t start = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      p.pos[p.lab[i]] = i;
      if (i > 0 && init_colors_[p.lab[i]] != init_colors_[p.lab[i - 1]]) {
        p.cell_end[start] = i;
        ++p.cells;
        start = i;
      }
      p.cell_of[p.lab[i]] = start;
    }
    p.cell_end[start] = n_;
    ++p.cells;
    return p;
  }

  std::uint32_t target_cell(const Partition& p) const {
    std::uint32_t best = n_, best_size = n_ + 1;
    for (std::uint32_t s = 0; s < n_; s = p.cell_end[s]) {
      std::uint32_t size = p.cell_end[s] - s;
      if (size > 1 && size < best_size) {
        best = s;
        best_size = size;
      }
    }
    return best;
  }

  static Vertex smallest_in_cell(const Partition& p, std::uint32_t s) {
    return *std::min_element(p.lab.begin() + s, p.lab.begin() + p.cell_end[s]);
  }

  std::uint64_t individualize_and_refine(Partition& p, Vertex w, std::uint32_t s) {
    std::uint32_t e = p.cell_end[s];
    std::uint32_t at = p.pos[w];
    std::swap(p.lab[s], p.lab[at]);
    p.pos[p.lab[at]] = at;
    p.pos[w] = s;
    p.cell_end[s] = s + 1;
    p.cell_end[s + 1] = e;
    for (std::uint32_t i = s + 1; i < e; ++i) p.cell_of[p.lab[i]] = s + 1;
    ++p.cells;
    std::uint64_t h = mix(0x1234, s);
    return mix(h, refine(p, {s}));
  }

  /// Equitable refinement driven by the given splitter cells. Returns a hash
  /// of the refinement trace, which is invariant under isomorphism.
  std::uint64_t refine(Partition& p, const std::vector<std::uint32_t>& splitters) {
    std::uint64_t trace = 0;
    queue_.clear();
    std::size_t head = 0;
    for (auto s : splitters) {
      queue_.push_back(s);
      in_queue_[s] = 1;
    }
    std::vector<Vertex> touched;
    std::vector<std::uint32_t> touched_cells;
    std::vector<std::uint32_t> fragment_starts;
    while (head < queue_.size() && !p.discrete()) {
      std::uint32_t s = queue_[head++];
      in_queue_[s] = 0;
      std::uint32_t e = p.cell_end[s];
      trace = mix(trace, (std::uint64_t{s} << 32) | (e - s));

      touched.clear();
      for (std::uint32_t i = s; i < e; ++i) {
        for (Vertex x : g_.neighbors(p.lab[i])) {
          if (counts_[x]++ == 0) touched.push_back(x);
        }
      }
      touched_cells.clear();
      for (Vertex x : touched) {
        std::uint32_t c = p.cell_of[x];
        if (!cell_mark_[c]) {
          cell_mark_[c] = 1;
          touched_cells.push_back(c);
        }
      }
      std::sort(touched_cells.begin(), touched_cells.end());

      for (std::uint32_t c : touched_cells) {
        cell_mark_[c] = 0;
        std::uint32_t ce = p.cell_end[c];
        auto first = p.lab.begin() + c, last = p.lab.begin() + ce;
        std::sort(first, last, [&](Vertex a, Vertex b) {
          return counts_[a] != counts_[b] ? counts_[a] < counts_[b] : a < b;
        });
        if (counts_[p.lab[c]] == counts_[p.lab[ce - 1]]) {
          for (std::uint32_t i = c; i < ce; ++i) p.pos[p.lab[i]] = i;
          trace = mix(trace, (std::uint64_t{c} << 32) | counts_[p.lab[c]]);
          continue;
        }
        fragment_starts.clear();
        fragment_starts.push_back(c);
        for (std::uint32_t i = c; i < ce; ++i) {
          p.pos[p.lab[i]] = i;
          if (i > c && counts_[p.lab[i]] != counts_[p.lab[i - 1]]) fragment_starts.push_back(i);
        }
        fragment_starts.push_back(ce);
        const std::size_t frags = fragment_starts.size() - 1;
        std::uint32_t largest = 0, largest_size = 0;
        trace = mix(trace, (std::uint64_t{c} << 32) | frags);
        for (std::size_t f = 0; f < frags; ++f) {
          std::uint32_t fs = fragment_starts[f], fe = fragment_starts[f + 1];
          p.cell_end[fs] = fe;
          for (std::uint32_t i = fs; i < fe; ++i) p.cell_of[p.lab[i]] = fs;
          trace = mix(trace, (std::uint64_t{counts_[p.lab[fs]]} << 32) | (fe - fs));
          if (fe - fs > largest_size) {
            largest_size = fe - fs;
            largest = fs;
          }
        }
        p.cells += static_cast<std::uint32_t>(frags - 1);
        const bool was_queued = in_queue_[c] != 0;
        for (std::size_t f = 0; f < frags; ++f) {
          std::uint32_t fs = fragment_starts[f];
          if (in_queue_[fs]) continue;
          if (!was_queued && fs == largest) continue;
          in_queue_[fs] = 1;
          queue_.push_back(fs);
        }
      }
      for (Vertex x : touched) counts_[x] = 0;
    }
    for (std::size_t i = head; i < queue_.size(); ++i) in_queue_[queue_[i]] = 0;
    return mix(trace, p.cells);
  }

  static Cmp compare_prefix(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::size_t len = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] < b[i]) return Cmp::less;
      if (a[i] > b[i]) return Cmp::greater;
    }
    return Cmp::equal;
  }

  bool matches_first() const {
    return invs_.size() <= first_inv_.size() && compare_prefix(invs_, first_inv_) == Cmp::equal;
  }

  /// A node stays in the search if it can still produce the best leaf or an
  /// automorphism against the first leaf.
  bool viable() const {
    return compare_prefix(invs_, best_inv_) != Cmp::greater || matches_first();
  }

  std::vector<std::uint64_t> rows_for(const std::vector<Vertex>& lab) const {
    const std::size_t words = (n_ + 63) / 64;
    std::vector<std::uint64_t> rows(n_ * words + n_, 0);
    std::vector<std::uint32_t> pos(n_);
    for (std::uint32_t i = 0; i < n_; ++i) pos[lab[i]] = i;
    // Colours lead so that they dominate the ordering.
    for (std::uint32_t i = 0; i < n_; ++i) rows[i] = init_colors_[lab[i]];
    for (std::uint32_t i = 0; i < n_; ++i)
      for (Vertex x : g_.neighbors(lab[i])) {
        std::uint32_t j = pos[x];
        rows[n_ + i * words + (j >> 6)] |= std::uint64_t{1} << (j & 63);
      }
    return rows;
  }

  std::vector<std::uint8_t> encode(const std::vector<std::uint64_t>& rows) const {
    std::vector<std::uint8_t> out;
    out.reserve(4 + n_ + (rows.size() - n_) * 8);
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(n_ >> (8 * k)));
    for (std::uint32_t i = 0; i < n_; ++i) out.push_back(static_cast<std::uint8_t>(rows[i]));
    for (std::size_t i = n_; i < rows.size(); ++i)
      for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(rows[i] >> (8 * k)));
    return out;
  }

  bool is_automorphism(const std::vector<Vertex>& gamma) const {
    for (Vertex u = 0; u < n_; ++u) {
      if (init_colors_[u] != init_colors_[gamma[u]]) return false;
      for (Vertex x : g_.neighbors(u))
        if (!g_.adjacent(gamma[u], gamma[x])) return false;
    }
    return true;
  }

  void record_automorphism(const std::vector<Vertex>& from, const std::vector<Vertex>& to) {
    std::vector<Vertex> gamma(n_);
    for (std::uint32_t i = 0; i < n_; ++i) gamma[from[i]] = to[i];
    automorphisms_.push_back(std::move(gamma));
    if (stats_) ++stats_->automorphisms;
  }

  static std::size_t common_prefix(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
    return k;
  }

  bool equivalent_to_explored(const std::vector<Vertex>& prefix, const std::vector<Vertex>& explored,
                              Vertex w) {
    std::vector<Vertex> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Vertex x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool any = false;
    for (const auto& gamma : automorphisms_) {
      bool fixes = std::all_of(prefix.begin(), prefix.end(), [&](Vertex v) { return gamma[v] == v; });
      if (!fixes) continue;
      any = true;
      for (Vertex x = 0; x < n_; ++x) {
        Vertex a = find(x), b = find(gamma[x]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    if (!any) return false;
    Vertex rw = find(w);
    return std::any_of(explored.begin(), explored.end(), [&](Vertex x) { return find(x) == rw; });
  }

  /// Returns the depth at which the search resumes.
  std::size_t explore(const Partition& node, std::size_t depth) {
    if (node.discrete()) return leaf(node, depth);
    std::uint32_t s = target_cell(node);
    std::vector<Vertex> candidates(node.lab.begin() + s, node.lab.begin() + node.cell_end[s]);
    std::sort(candidates.begin(), candidates.end());
    for (Vertex w : candidates) {
      Partition child = node;
      path_.push_back(w);
      invs_.push_back(individualize_and_refine(child, w, s));
      count_node(1);
      std::size_t resume = depth;
      if (viable()) resume = explore(child, depth + 1);
      path_.pop_back();
      invs_.pop_back();
      if (resume < depth) return resume;
    }
    return depth - 1;
  }

  std::size_t leaf(const Partition& node, std::size_t depth) {
    if (stats_) ++stats_->leaves;
    if (matches_first()) {
      std::vector<Vertex> gamma(n_);
      for (std::uint32_t i = 0; i < n_; ++i) gamma[first_lab_[i]] = node.lab[i];
      if (is_automorphism(gamma)) {
        automorphisms_.push_back(std::move(gamma));
        if (stats_) ++stats_->automorphisms;
        return common_prefix(path_, first_path_);
      }
    }
    Cmp cmp = compare_prefix(invs_, best_inv_);
    if (cmp == Cmp::greater) return depth - 1;
    auto rows = rows_for(node.lab);
    if (cmp == Cmp::equal) {
      if (rows == best_rows_) {
        record_automorphism(best_lab_, node.lab);
        return common_prefix(path_, best_path_);
      }
      if (!(rows < best_rows_)) return depth - 1;
    }
    best_rows_ = std::move(rows);
    best_lab_ = node.lab;
    best_inv_ = invs_;
    best_path_ = path_;
    return depth - 1;
  }

  const Graph& g_;
  std::uint32_t n_;
  CanonStats* stats_;
  std::vector<std::uint8_t> init_colors_;

  std::vector<std::uint32_t> counts_;
  std::vector<char> cell_mark_;
  std::vector<char> in_queue_;
  std::vector<std::uint32_t> queue_;

  std::vector<Vertex> first_path_;
  std::vector<std::uint64_t> first_inv_;
  std::vector<Vertex> first_lab_;

  std::vector<Vertex> best_path_;
  std::vector<std::uint64_t> best_inv_;
  std::vector<Vertex> best_lab_;
  std::vector<std::uint64_t> best_rows_;

  std::vector<Vertex> path_;
  std::vector<std::uint64_t> invs_;
  std::vector<std::vector<Vertex>> automorphisms_;
};

}  // namespace

CanonicalCertificate canonical_form(const Graph& g, std::span<const std::uint8_t> colors,
                                    CanonStats* stats) {
  if (colors.size() != g.order()) throw GraphError("one colour per vertex required");
  return Canonizer(g, colors, stats).run();
}

CanonicalCertificate canonical_certificate(const AugmentedGraph& a, CanonStats* stats) {
  return canonical_form(a.graph, a.colors, stats);
}

}  // namespace drcover

#include "drcover/sweep.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drcover/classify.hpp"

namespace drcover {

namespace {
constexpr std::uint32_t kNoGenerator = 0xffffffffU;

std::uint64_t fnv(std::uint64_t h, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) {
    h ^= (x >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << x;
  return os.str();
}
}  // namespace

struct DoubleCoverSweep::State {
  BitMatrix adj;
  std::vector<std::uint8_t> value;     // per outer generator
  std::vector<std::uint16_t> element;  // per base generator
  std::vector<std::uint32_t> count;    // per wreath element
  std::vector<std::uint16_t> queue;
  std::vector<std::uint8_t> seen;
};

void SweepResult::merge(const SweepResult& other) {
  classes_checked += other.classes_checked;
  dr_sources_checked += other.dr_sources_checked;
  dr_hits.insert(dr_hits.end(), other.dr_hits.begin(), other.dr_hits.end());
  a4_hits.insert(a4_hits.end(), other.a4_hits.begin(), other.a4_hits.end());
  std::sort(dr_hits.begin(), dr_hits.end());
  std::sort(a4_hits.begin(), a4_hits.end());
}

DoubleCoverSweep::DoubleCoverSweep(const Voltage& inner, std::shared_ptr<const Presentation> outer,
                                   std::vector<std::vector<std::uint32_t>> basis)
    : inner_degree_(inner.degree()), outer_(std::move(outer)), basis_(std::move(basis)) {
  const std::size_t r = inner_degree_;
  if (r < 1 || r > 6) throw VoltageError("sweep supports inner degree 1..6");
  if (basis_.size() >= 63) throw VoltageError("sweep basis too large");
  element_count_ = r << r;

  const Presentation& base = inner.presentation();
  for (const Perm& p : inner.generator_perms()) {
    for (std::size_t i = 0; i < r; ++i)
      if (p(i) != (i + p(0)) % r) throw VoltageError("sweep needs a cyclic inner voltage");
    shift_of_base_.push_back(static_cast<std::uint32_t>(p(0)));
  }
  CoverGraph cover = cover_from_voltage(inner);
  if (!(cover.graph == outer_->base())) throw VoltageError("outer presentation is not over the inner cover");
  const SpanningTree& outer_tree = outer_->tree();
  for (const Edge& e : base.tree().edges())
    for (std::size_t i = 0; i < r; ++i)
      if (!outer_tree.contains(cover.lift(e.u, i), cover.lift(e.v, i)))
        throw VoltageError("outer tree does not contain the lifted base tree");

  const std::size_t gens = outer_->generator_count();
  for (const auto& b : basis_)
    if (b.size() != gens) throw VoltageError("basis vector has the wrong length");
  slot_of_outer_.resize(gens);
  for (std::size_t g = 0; g < gens; ++g) {
    const Edge& e = outer_->generator_edges()[g];
    const Vertex u = cover.project(e.u), v = cover.project(e.v);
    const SignedGen label = base.arc_label(u, v);
    if (label <= 0) throw VoltageError("outer generator lies over a base tree edge");
    const auto k = static_cast<std::uint32_t>(generator_of(label));
    const auto i = static_cast<std::uint32_t>(cover.sheet(e.u));
    if (cover.sheet(e.v) != (i + shift_of_base_[k]) % r) throw VoltageError("cover edge disagrees with inner voltage");
    slot_of_outer_[g] = {k, i};
  }
  support_.resize(basis_.size());
  for (std::size_t j = 0; j < basis_.size(); ++j)
    for (std::size_t g = 0; g < gens; ++g)
      if (basis_[j][g] & 1U) support_[j].push_back(static_cast<std::uint32_t>(g));

  outer_edges_ = outer_->base().edges();
  outer_gen_of_edge_.assign(outer_edges_.size(), kNoGenerator);
  for (std::size_t ei = 0; ei < outer_edges_.size(); ++ei) {
    const SignedGen label = outer_->arc_label(outer_edges_[ei].u, outer_edges_[ei].v);
    if (label != 0) outer_gen_of_edge_[ei] = static_cast<std::uint32_t>(generator_of(label));
  }

  // Element c * 2^r + bits acts by (i, s) -> (i + c, s ^ bit_i).
  const std::size_t m = element_count_;
  const std::uint32_t all = (1U << r) - 1;
  mul_.resize(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t ca = a >> r, cb = b >> r;
      const std::uint32_t ba = static_cast<std::uint32_t>(a) & all, bb = static_cast<std::uint32_t>(b) & all;
      std::uint32_t bits = 0;
      for (std::size_t i = 0; i < r; ++i) {
        const std::uint32_t bit = ((ba >> i) ^ (bb >> ((i + ca) % r))) & 1U;
        bits |= bit << i;
      }
      mul_[a * m + b] = static_cast<std::uint16_t>((((ca + cb) % r) << r) | bits);
    }
  element_order_.resize(m);
  for (std::size_t a = 0; a < m; ++a) {
    std::size_t x = a, k = 1;
    while (x != 0) {
      x = mul_[x * m + a];
      ++k;
    }
    element_order_[a] = static_cast<std::uint8_t>(a == 0 ? 1 : k);
  }
}

std::vector<std::uint32_t> DoubleCoverSweep::exponents(std::uint64_t mask) const {
  std::vector<std::uint32_t> e(outer_->generator_count(), 0);
  for (std::size_t j = 0; j < basis_.size(); ++j)
    if ((mask >> j) & 1U)
      for (auto g : support_[j]) e[g] ^= 1U;
  return e;
}

DoubleCoverSweep::State DoubleCoverSweep::initial_state(std::uint64_t mask) const {
  State s;
  auto e = exponents(mask);
  s.value.assign(e.begin(), e.end());
  const std::size_t n = outer_->base().order();
  s.adj = BitMatrix(2 * n);
  for (std::size_t ei = 0; ei < outer_edges_.size(); ++ei) {
    const Edge& edge = outer_edges_[ei];
    const std::uint32_t g = outer_gen_of_edge_[ei];
    const std::uint32_t v = g == kNoGenerator ? 0 : s.value[g];
    for (std::uint32_t t = 0; t < 2; ++t) {
      const Vertex a = 2 * edge.u + t, b = 2 * edge.v + (t ^ v);
      s.adj.set(a, b);
      s.adj.set(b, a);
    }
  }
  s.element.resize(shift_of_base_.size());
  for (std::size_t k = 0; k < shift_of_base_.size(); ++k)
    s.element[k] = static_cast<std::uint16_t>(shift_of_base_[k] << inner_degree_);
  for (std::size_t g = 0; g < s.value.size(); ++g)
    if (s.value[g]) s.element[slot_of_outer_[g].base_gen] ^= static_cast<std::uint16_t>(1U << slot_of_outer_[g].sheet);
  s.count.assign(element_count_, 0);
  for (auto x : s.element) ++s.count[x];
  s.seen.assign(element_count_, 0);
  return s;
}

void DoubleCoverSweep::flip(State& s, std::size_t j) const {
  for (auto g : support_[j]) {
    const Edge& edge = outer_->generator_edges()[g];
    const std::uint32_t old = s.value[g], now = old ^ 1U;
    for (std::uint32_t t = 0; t < 2; ++t) {
      const Vertex a = 2 * edge.u + t;
      const Vertex b_old = 2 * edge.v + (t ^ old), b_new = 2 * edge.v + (t ^ now);
      s.adj.flip(a, b_old);
      s.adj.flip(b_old, a);
      s.adj.flip(a, b_new);
      s.adj.flip(b_new, a);
    }
    s.value[g] = static_cast<std::uint8_t>(now);
    const Slot slot = slot_of_outer_[g];
    std::uint16_t& x = s.element[slot.base_gen];
    --s.count[x];
    x ^= static_cast<std::uint16_t>(1U << slot.sheet);
    ++s.count[x];
  }
}

void DoubleCoverSweep::examine(State& s, std::uint64_t mask, SweepResult& out) const {
  ++out.classes_checked;
  DrResult dr = check_distance_regular(s.adj, DrOptions{true});
  out.dr_sources_checked += dr.sources_checked;
  if (dr.array) out.dr_hits.push_back(mask);

  const std::size_t m = element_count_;
  std::fill(s.seen.begin(), s.seen.end(), 0);
  s.queue.clear();
  s.queue.push_back(0);
  s.seen[0] = 1;
  std::size_t max_order = 1;
  for (std::size_t head = 0; head < s.queue.size(); ++head) {
    const std::size_t x = s.queue[head];
    max_order = std::max<std::size_t>(max_order, element_order_[x]);
    for (std::size_t g = 1; g < m; ++g) {
      if (s.count[g] == 0) continue;
      const std::uint16_t y = mul_[x * m + g];
      if (!s.seen[y]) {
        s.seen[y] = 1;
        s.queue.push_back(y);
      }
    }
  }
  if (s.queue.size() == 12 && max_order == 3) out.a4_hits.push_back(mask);
}

SweepResult DoubleCoverSweep::run_range(std::uint64_t lo, std::uint64_t hi) const {
  SweepResult out;
  lo = std::max<std::uint64_t>(lo, 1);
  hi = std::min<std::uint64_t>(hi, class_count() + 1);
  if (lo >= hi) return out;
  State s = initial_state(gray(lo));
  examine(s, gray(lo), out);
  for (std::uint64_t i = lo + 1; i < hi; ++i) {
    flip(s, static_cast<std::size_t>(std::countr_zero(i)));
    examine(s, gray(i), out);
  }
  std::sort(out.dr_hits.begin(), out.dr_hits.end());
  std::sort(out.a4_hits.begin(), out.a4_hits.end());
  return out;
}

SweepResult DoubleCoverSweep::check(std::span<const std::uint64_t> masks) const {
  SweepResult out;
  for (auto mask : masks) {
    if (mask == 0 || mask > class_count()) throw VoltageError("class mask out of range");
    State s = initial_state(mask);
    examine(s, mask, out);
  }
  std::sort(out.dr_hits.begin(), out.dr_hits.end());
  std::sort(out.a4_hits.begin(), out.a4_hits.end());
  return out;
}

std::vector<Perm> DoubleCoverSweep::composite_perms(std::uint64_t mask) const {
  State s = initial_state(mask);
  const std::size_t r = inner_degree_;
  std::vector<Perm> out;
  out.reserve(s.element.size());
  for (auto x : s.element) {
    const std::size_t c = x >> r;
    std::vector<std::uint8_t> images(2 * r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t t = 0; t < 2; ++t)
        images[2 * i + t] = static_cast<std::uint8_t>(2 * ((i + c) % r) + (t ^ ((x >> i) & 1U)));
    out.emplace_back(std::move(images));
  }
  return out;
}

std::uint64_t DoubleCoverSweep::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv(h, inner_degree_);
  for (const auto& b : basis_)
    for (auto v : b) h = fnv(h, v);
  for (const auto& e : outer_edges_) h = fnv(h, (std::uint64_t{e.u} << 32) | e.v);
  return h;
}

SweepProgress run_sweep(const DoubleCoverSweep& sweep, unsigned jobs, std::uint64_t block,
                        const std::filesystem::path& checkpoint, std::uint64_t max_blocks) {
  using nlohmann::json;
  if (block == 0) throw VoltageError("sweep block size must be positive");
  jobs = std::max(1U, jobs);
  SweepProgress prog;
  const std::uint64_t total = sweep.class_count();
  prog.blocks = (total + block - 1) / block;
  const std::string fp = hex64(sweep.fingerprint()) + "/" + std::to_string(block);

  if (!checkpoint.empty()) {
    std::ifstream in(checkpoint);
    if (in) {
      try {
        json j = json::parse(in);
        if (j.at("fingerprint") == fp) {
          prog.next_block = j.at("next_block").get<std::uint64_t>();
          prog.result.classes_checked = j.at("classes_checked").get<std::size_t>();
          prog.result.dr_sources_checked = j.at("dr_sources_checked").get<std::size_t>();
          prog.result.dr_hits = j.at("dr_hits").get<std::vector<std::uint64_t>>();
          prog.result.a4_hits = j.at("a4_hits").get<std::vector<std::uint64_t>>();
        }
      } catch (const std::exception&) {
        prog = SweepProgress{{}, prog.blocks, 0, 0};
      }
    }
  }
  prog.resumed_from_block = prog.next_block;

  std::uint64_t done = 0;
  while (!prog.complete() && done < max_blocks) {
    const std::uint64_t batch = std::min<std::uint64_t>({jobs, prog.blocks - prog.next_block, max_blocks - done});
    std::vector<SweepResult> parts(batch);
    const std::uint64_t first = prog.next_block;
    parallel_for(batch, jobs, [&](std::size_t k) {
      const std::uint64_t b = first + k;
      parts[k] = sweep.run_range(1 + b * block, 1 + (b + 1) * block);
    });
    for (const auto& p : parts) prog.result.merge(p);
    prog.next_block += batch;
    done += batch;
    if (!checkpoint.empty() && !prog.complete()) {
      json j;
      j["fingerprint"] = fp;
      j["next_block"] = prog.next_block;
      j["classes_checked"] = prog.result.classes_checked;
      j["dr_sources_checked"] = prog.result.dr_sources_checked;
      j["dr_hits"] = prog.result.dr_hits;
      j["a4_hits"] = prog.result.a4_hits;
      if (checkpoint.has_parent_path()) std::filesystem::create_directories(checkpoint.parent_path());
      const std::filesystem::path tmp = checkpoint.string() + ".tmp";
      std::ofstream(tmp) << j.dump() << "\n";
      std::filesystem::rename(tmp, checkpoint);
    }
  }
  if (!checkpoint.empty() && prog.complete()) std::filesystem::remove(checkpoint);
  return prog;
}

}  // namespace drcover

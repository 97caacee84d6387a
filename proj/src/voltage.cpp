#include "drcover/voltage.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace drcover {

namespace {

std::string triangle_text(const Triangle& t) {
  return "{" + std::to_string(t.x) + "," + std::to_string(t.y) + "," + std::to_string(t.z) + "}";
}

}  // namespace

Voltage::Voltage(std::shared_ptr<const Presentation> presentation, std::size_t degree,
                 std::vector<Perm> generator_perms)
    : presentation_(std::move(presentation)), degree_(degree), perms_(std::move(generator_perms)) {
  if (degree_ == 0) throw VoltageError("voltage degree must be positive");
  if (perms_.size() != presentation_->generator_count())
    throw VoltageError("voltage needs one permutation per non-tree edge");
  for (const auto& p : perms_)
    if (p.degree() != degree_) throw VoltageError("voltage permutation has the wrong degree");
}

Voltage Voltage::identity(std::shared_ptr<const Presentation> presentation, std::size_t degree) {
  std::vector<Perm> perms(presentation->generator_count(), Perm::identity(degree));
  return Voltage(std::move(presentation), degree, std::move(perms));
}

Voltage Voltage::cyclic(std::shared_ptr<const Presentation> presentation, std::uint32_t p,
                        std::span<const std::uint32_t> exponents) {
  if (exponents.size() != presentation->generator_count())
    throw VoltageError("one exponent per generator expected");
  std::vector<Perm> table;
  for (std::uint32_t k = 0; k < p; ++k) table.push_back(Perm::shift(p, k));
  std::vector<Perm> perms;
  perms.reserve(exponents.size());
  for (auto e : exponents) perms.push_back(table[e % p]);
  return Voltage(std::move(presentation), p, std::move(perms));
}

Perm Voltage::arc_perm(Vertex v, Vertex w) const {
  SignedGen s = presentation_->arc_label(v, w);
  if (s == 0) return Perm::identity(degree_);
  const Perm& p = perms_[generator_of(s)];
  return s > 0 ? p : p.inverse();
}

std::optional<Triangle> Voltage::lift_violation() const {
  for (const auto& t : presentation_->triangles()) {
    Perm prod = arc_perm(t.x, t.y) * arc_perm(t.y, t.z) * arc_perm(t.z, t.x);
    if (!prod.is_identity()) return t;
  }
  return std::nullopt;
}

std::vector<std::vector<Vertex>> CoverGraph::fibers() const {
  std::vector<std::vector<Vertex>> out(base->order());
  for (Vertex v = 0; v < base->order(); ++v)
    for (std::size_t i = 0; i < degree; ++i) out[v].push_back(lift(v, i));
  return out;
}

CoverGraph cover_from_voltage(const Voltage& v) {
  if (auto bad = v.lift_violation())
    throw VoltageError("triangle " + triangle_text(*bad) + " does not lift: arc product is not the identity");
  const Graph& base = v.presentation().base();
  const std::size_t r = v.degree();
  CoverGraph c;
  c.base = v.presentation().base_ptr();
  c.degree = r;
  BitMatrix bits(base.order() * r);
  for (const auto& e : base.edges()) {
    Perm p = v.arc_perm(e.u, e.v);
    for (std::size_t i = 0; i < r; ++i) {
      Vertex a = c.lift(e.u, i), b = c.lift(e.v, p(i));
      bits.set(a, b);
      bits.set(b, a);
    }
  }
  c.graph = graph_from_adjacency(bits);
  return c;
}

std::vector<std::string> cover_axiom_violations(const CoverGraph& c) {
  std::vector<std::string> out;
  const Graph& base = *c.base;
  const Graph& g = c.graph;
  if (g.order() != base.order() * c.degree) {
    out.push_back("cover order is not degree times base order");
    return out;
  }
  for (Vertex a = 0; a < g.order(); ++a) {
    for (Vertex b : g.neighbors(a)) {
      Vertex pa = c.project(a), pb = c.project(b);
      if (pa == pb) out.push_back("fiber of " + std::to_string(pa) + " is not a coclique");
      else if (!base.adjacent(pa, pb))
        out.push_back("edge over base non-edge {" + std::to_string(pa) + "," + std::to_string(pb) + "}");
    }
    // Each base neighbor's fiber holds exactly one neighbor of a.
    std::map<Vertex, std::size_t> per_fiber;
    for (Vertex b : g.neighbors(a)) ++per_fiber[c.project(b)];
    for (Vertex w : base.neighbors(c.project(a))) {
      auto it = per_fiber.find(w);
      if (it == per_fiber.end() || it->second != 1)
        out.push_back("edge {" + std::to_string(c.project(a)) + "," + std::to_string(w) +
                      "} does not lift to a perfect matching");
    }
  }
  if (!out.empty()) return out;
  auto step = [&](Vertex a, Vertex target) {
    for (Vertex b : g.neighbors(a))
      if (c.project(b) == target) return b;
    return kNoVertex;
  };
  for (const auto& t : triangles(base)) {
    for (std::size_t i = 0; i < c.degree; ++i) {
      Vertex a = c.lift(t.x, i);
      Vertex back = step(step(step(a, t.y), t.z), t.x);
      if (back != a) out.push_back("triangle " + triangle_text(t) + " does not lift to triangles");
    }
  }
  return out;
}

PermGroup monodromy_image(const Voltage& v, std::size_t element_bound) {
  std::vector<Perm> gens;
  for (const auto& p : v.generator_perms())
    if (!p.is_identity()) gens.push_back(p);
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  return PermGroup(v.degree(), std::move(gens), element_bound);
}

CoverGraph quotient_cover(const CoverGraph& c, const BlockSystem& blocks) {
  const std::size_t r = c.degree;
  auto idx = blocks.block_index(r);
  if (std::find(idx.begin(), idx.end(), r) != idx.end())
    throw VoltageError("block system does not partition the sheets");
  const std::size_t m = blocks.block_count();
  if (m <= 1 || m == r) throw VoltageError("trivial block system rejected");
  for (const auto& b : blocks.blocks)
    if (b.size() != r / m) throw VoltageError("blocks must have equal size");

  CoverGraph q;
  q.base = c.base;
  q.degree = m;
  BitMatrix bits(c.base->order() * m);
  for (Vertex a = 0; a < c.graph.order(); ++a) {
    for (Vertex b : c.graph.neighbors(a)) {
      Vertex qa = q.lift(c.project(a), idx[c.sheet(a)]);
      Vertex qb = q.lift(c.project(b), idx[c.sheet(b)]);
      bits.set(qa, qb);
    }
  }
  // Equitable: every block part meets exactly one block part per base neighbor.
  for (Vertex v = 0; v < c.base->order(); ++v) {
    for (std::size_t b = 0; b < m; ++b) {
      Vertex qa = q.lift(v, b);
      std::size_t count = 0;
      for (auto word : bits.row(qa)) count += static_cast<std::size_t>(__builtin_popcountll(word));
      if (count != c.base->degree(v))
        throw VoltageError("block system is not invariant under the cover's monodromy");
    }
  }
  q.graph = graph_from_adjacency(bits);
  return q;
}

Voltage coset_action_voltage(const Voltage& v, std::span<const Perm> subgroup_generators) {
  PermGroup image = monodromy_image(v);
  PermGroup sub(v.degree(), std::vector<Perm>(subgroup_generators.begin(), subgroup_generators.end()));
  for (const auto& h : sub.elements())
    if (!image.contains(h)) throw VoltageError("subgroup is not contained in the monodromy image");

  std::map<Perm, std::size_t> coset_of;
  std::vector<Perm> representatives;
  for (const auto& x : image.elements()) {
    if (coset_of.count(x)) continue;
    for (const auto& h : sub.elements()) coset_of[h * x] = representatives.size();
    representatives.push_back(x);
  }
  const std::size_t index = representatives.size();
  std::vector<Perm> perms;
  perms.reserve(v.generator_perms().size());
  for (const auto& p : v.generator_perms()) {
    std::vector<std::uint8_t> im(index);
    for (std::size_t k = 0; k < index; ++k)
      im[k] = static_cast<std::uint8_t>(coset_of.at(representatives[k] * p));
    perms.emplace_back(std::move(im));
  }
  return Voltage(v.presentation_ptr(), index, std::move(perms));
}

SpanningTree lifted_spanning_tree(const CoverGraph& c, const SpanningTree& base_tree) {
  const Graph& g = c.graph;
  std::vector<std::size_t> parent(g.order());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Edge> edges;
  auto add = [&](Vertex a, Vertex b) {
    auto ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[std::max(ra, rb)] = std::min(ra, rb);
    edges.push_back({std::min(a, b), std::max(a, b)});
    return true;
  };
  for (const auto& e : base_tree.edges()) {
    for (std::size_t i = 0; i < c.degree; ++i) {
      Vertex a = c.lift(e.u, i);
      for (Vertex b : g.neighbors(a))
        if (c.project(b) == e.v && !add(a, b)) throw VoltageError("lifted base tree contains a cycle");
    }
  }
  for (const auto& e : g.edges()) add(e.u, e.v);
  return SpanningTree::from_edges(g, edges, 0);
}

Voltage compose_to_base(const Voltage& inner, const Voltage& outer) {
  const std::size_t r1 = inner.degree(), r2 = outer.degree();
  CoverGraph mid = cover_from_voltage(inner);
  if (!(outer.presentation().base() == mid.graph))
    throw VoltageError("outer voltage is not defined on the inner cover");
  const auto& t1 = outer.presentation().tree();
  for (const auto& e : inner.presentation().tree().edges())
    for (std::size_t i = 0; i < r1; ++i)
      if (!t1.contains(mid.lift(e.u, i), mid.lift(e.v, i)))
        throw VoltageError("cover spanning tree does not contain the lifted base tree");

  std::vector<Perm> perms;
  for (std::size_t k = 0; k < inner.generator_perms().size(); ++k) {
    const Edge& e = inner.presentation().generator_edges()[k];
    const Perm& rho = inner.generator_perms()[k];
    std::vector<std::uint8_t> im(r1 * r2);
    for (std::size_t i = 0; i < r1; ++i) {
      std::size_t i2 = rho(i);
      Perm sigma = outer.arc_perm(mid.lift(e.u, i), mid.lift(e.v, i2));
      for (std::size_t j = 0; j < r2; ++j) im[i * r2 + j] = static_cast<std::uint8_t>(i2 * r2 + sigma(j));
    }
    perms.emplace_back(std::move(im));
  }
  return Voltage(inner.presentation_ptr(), r1 * r2, std::move(perms));
}

Voltage read_voltage(std::istream& in, std::shared_ptr<const Presentation> presentation) {
  const auto& gens = presentation->generator_edges();
  std::vector<std::optional<Perm>> perms(gens.size());
  std::size_t degree = 0;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw VoltageError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) fail("expected \"u v : image-list\"");
    std::istringstream head(line.substr(0, colon));
    long long u = -1, w = -1;
    std::string extra;
    if (!(head >> u >> w) || (head >> extra)) fail("expected two vertices before ':'");
    if (u < 0 || w < 0 || u >= static_cast<long long>(presentation->base().order()) ||
        w >= static_cast<long long>(presentation->base().order()))
      fail("vertex out of range");
    Perm p;
    try {
      p = Perm::parse(line.substr(colon + 1));
    } catch (const PermError& e) {
      fail(e.what());
    }
    if (degree == 0) degree = p.degree();
    if (p.degree() != degree || degree == 0) fail("inconsistent permutation degree");
    SignedGen s = 0;
    try {
      s = presentation->arc_label(static_cast<Vertex>(u), static_cast<Vertex>(w));
    } catch (const GraphError& e) {
      fail(e.what());
    }
    if (s == 0) {
      if (!p.is_identity()) fail("tree edge must carry the identity");
      continue;
    }
    perms[generator_of(s)] = s > 0 ? p : p.inverse();
  }
  if (degree == 0) throw VoltageError("voltage file lists no permutations");
  std::vector<Perm> out;
  out.reserve(perms.size());
  for (auto& p : perms) out.push_back(p ? *p : Perm::identity(degree));
  return Voltage(std::move(presentation), degree, std::move(out));
}

void write_voltage(std::ostream& out, const Voltage& v) {
  const auto& gens = v.presentation().generator_edges();
  for (std::size_t k = 0; k < gens.size(); ++k)
    out << gens[k].u << ' ' << gens[k].v << " : " << v.generator_perms()[k].to_string() << '\n';
}

}  // namespace drcover

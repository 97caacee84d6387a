#include "drcover/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "drcover/canon.hpp"
#include "drcover/classify.hpp"
#include "drcover/delta.hpp"
#include "drcover/perm.hpp"
#include "drcover/sweep.hpp"

namespace drcover {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

namespace expected {
constexpr std::size_t kGenerators = kDeltaEdges - (kDeltaParams.n - 1);
const char* const kDeltaArray = "{32,27;1,12}";
const char* const kDeltaAbelian = "Z^0 x C2^16 x C3^2";
constexpr std::size_t kHomDim2 = 16;
constexpr std::size_t kHomDim3 = 2;
constexpr std::size_t kDoubleClasses = 13;
const char* const kDoubleAbelian = "Z^0 x C2^15 x C3^2";
constexpr std::size_t kTripleCovers = 4;
constexpr std::size_t kTripleClasses = 2;
const char* const kHatArray = "{32,27,8,1;1,4,27,32}";
const char* const kStarAbelian = "Z^0 x C2^16 x C3^2";
const char* const kHatAbelian = "Z^0 x C2^18 x C3^2";
constexpr std::size_t kHatOrder = 315;
constexpr std::size_t kHatHomDim2 = 18;
constexpr std::size_t kA4Classes = 3;
constexpr std::size_t kSigmaClasses = 1;
constexpr std::size_t kSigmaOrder = 420;
}  // namespace expected

std::string qualified(const std::string& theorem, const std::string& name) { return theorem + "." + name; }

void expect_fact(TheoremReport& r, const std::string& name, const Json& want) {
  const Json& got = r.facts.contains(name) ? r.facts.at(name) : Json(nullptr);
  if (got != want) r.mismatches.push_back(name + ": expected " + want.dump() + ", got " + got.dump());
}

void add(TheoremReport& r, std::string id, Conclusion::Kind kind, std::string statement,
         std::vector<std::string> deps, bool holds) {
  r.conclusions.push_back({std::move(id), kind, std::move(statement), std::move(deps), holds});
  if (!holds) r.mismatches.push_back("conclusion " + r.conclusions.back().id + " does not hold");
}

Json invariants_json(const InvariantFactors& f) {
  Json j;
  j["text"] = f.to_string();
  j["free_rank"] = f.free_rank;
  Json orders = Json::object();
  for (const auto& [p, e] : f.torsion_order()) orders[std::to_string(p)] = e;
  j["order_exponents"] = orders;
  return j;
}

InvariantFactors cover_invariants(const CoverGraph& c) {
  auto g = std::make_shared<const Graph>(c.graph);
  return abelian_invariants(presentation(g, spanning_tree(*g)));
}

std::vector<std::uint32_t> mask_coeffs(std::uint64_t mask, std::size_t d) {
  std::vector<std::uint32_t> c(d);
  for (std::size_t j = 0; j < d; ++j) c[j] = static_cast<std::uint32_t>((mask >> j) & 1U);
  return c;
}

Json arrays_json(const std::map<std::size_t, IntersectionArray>& table) {
  Json j = Json::object();
  for (const auto& [r, a] : table) j[std::to_string(r)] = a.to_string();
  return j;
}

/// Order of the torsion subgroup from an invariants_json object; refuses on
/// free rank or overflow.
std::uint64_t finite_order(const Json& inv, const std::string& what) {
  if (!inv.is_object() || !inv.contains("free_rank") || !inv.contains("order_exponents"))
    throw DerivationRefused(what + ": malformed abelian invariants");
  if (inv.at("free_rank").get<std::size_t>() != 0) throw DerivationRefused(what + ": group is infinite");
  std::uint64_t order = 1;
  for (const auto& [p, e] : inv.at("order_exponents").items()) {
    const std::uint64_t prime = std::stoull(p);
    for (std::size_t k = 0; k < e.get<std::size_t>(); ++k) {
      if (order > (std::uint64_t{1} << 56) / prime) throw DerivationRefused(what + ": order too large");
      order *= prime;
    }
  }
  return order;
}

}  // namespace

Json TheoremReport::to_json(bool with_timing) const {
  Json j;
  j["theorem"] = theorem;
  j["status"] = reproduced() ? "reproduced" : "mismatch";
  j["facts"] = facts;
  Json cs = Json::array();
  for (const auto& c : conclusions) {
    Json x;
    x["id"] = c.id;
    x["kind"] = c.kind == Conclusion::Kind::derived ? "derived" : "computed";
    x["statement"] = c.statement;
    x["depends_on"] = c.depends_on;
    x["holds"] = c.holds;
    cs.push_back(std::move(x));
  }
  j["conclusions"] = cs;
  j["mismatches"] = mismatches;
  j["work"] = work;
  if (with_timing) j["timing"] = timing;
  return j;
}

void FactStore::record(const TheoremReport& report) {
  for (const auto& [name, value] : report.facts.items()) facts_[qualified(report.theorem, name)] = value;
  for (const auto& c : report.conclusions) {
    const std::string key = qualified(report.theorem, c.id);
    if (report.facts.contains(c.id)) throw PipelineError("conclusion id clashes with a fact: " + key);
    facts_[key] = c.holds;
  }
}

const Json& FactStore::at(const std::string& key) const {
  auto it = facts_.find(key);
  if (it == facts_.end()) throw DerivationRefused("missing fact " + key);
  return it->second;
}

std::map<std::size_t, IntersectionArray> target_arrays() {
  std::map<std::size_t, IntersectionArray> out;
  for (std::size_t r : {2, 3, 4, 6}) {
    if ((12 * (r - 1)) % r != 0 || 12 % r != 0) throw PipelineError("array family has a fractional entry");
    out[r] = IntersectionArray{{32, 27, 12 * (r - 1) / r, 1}, {1, 12 / r, 27, 32}};
  }
  return out;
}

SweepMode SweepMode::parse(const std::string& text) {
  SweepMode m;
  if (text == "full") return m;
  const std::string prefix = "sample:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string n = text.substr(prefix.size());
    if (!n.empty() && std::all_of(n.begin(), n.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      m.full = false;
      m.samples = std::stoull(n);
      if (m.samples > 0) return m;
    }
  }
  throw PipelineError("mode must be full or sample:K with K > 0, got '" + text + "'");
}

std::string SweepMode::to_string() const { return full ? "full" : "sample:" + std::to_string(samples); }

Pipeline::Pipeline(Graph delta, PipelineOptions options) : options_(std::move(options)) {
  if (options_.jobs == 0) options_.jobs = 1;
  if (options_.checkpoint_block == 0) throw PipelineError("checkpoint block must be positive");
  delta_ = std::make_shared<const Graph>(std::move(delta));
  delta_pres_ = std::make_shared<const Presentation>(presentation(delta_, spanning_tree(*delta_)));
}

const TheoremReport& Pipeline::store(TheoremReport report) {
  const std::string id = report.theorem;
  facts_.record(report);
  order_.push_back(id);
  return reports_[id] = std::move(report);
}

std::vector<const TheoremReport*> Pipeline::reports() const {
  std::vector<const TheoremReport*> out;
  for (const auto& id : order_) out.push_back(&reports_.at(id));
  return out;
}

const CoverGraph& Pipeline::hat() const {
  if (!hat_) throw PipelineError("no distance-regular triple cover available");
  return *hat_;
}

const Voltage& Pipeline::hat_voltage() const {
  if (!hat_voltage_) throw PipelineError("no distance-regular triple cover available");
  return *hat_voltage_;
}

const TheoremReport& Pipeline::run_fund() {
  if (auto it = reports_.find("fund"); it != reports_.end()) return it->second;
  const auto t0 = Clock::now();
  TheoremReport r;
  r.theorem = "fund";

  auto srg = srg_params(*delta_);
  r.facts["delta_srg"] = srg ? Json::array({srg->n, srg->k, srg->lambda, srg->mu}) : Json(nullptr);
  r.facts["delta_vertices"] = delta_->order();
  r.facts["delta_edges"] = delta_->edge_count();
  r.facts["delta_triangles"] = delta_pres_->triangles().size();
  auto array = intersection_array(*delta_);
  r.facts["delta_array"] = array ? Json(array->to_string()) : Json(nullptr);
  r.facts["generators"] = delta_pres_->generator_count();
  r.facts["relators"] = delta_pres_->relators().size();
  r.facts["target_arrays"] = arrays_json(target_arrays());

  const auto t1 = Clock::now();
  const InvariantFactors inv = abelian_invariants(*delta_pres_);
  r.timing["abelianisation_seconds"] = seconds_since(t1);
  r.facts["abelian"] = invariants_json(inv);

  const auto t2 = Clock::now();
  hom2_ = hom_basis_mod_p(*delta_pres_, 2);
  hom3_ = hom_basis_mod_p(*delta_pres_, 3);
  r.timing["hom_basis_seconds"] = seconds_since(t2);
  r.facts["hom_dim_2"] = hom2_.size();
  r.facts["hom_dim_3"] = hom3_.size();

  expect_fact(r, "delta_srg", Json::array({kDeltaParams.n, kDeltaParams.k, kDeltaParams.lambda, kDeltaParams.mu}));
  expect_fact(r, "delta_edges", kDeltaEdges);
  expect_fact(r, "delta_triangles", kDeltaTriangles);
  expect_fact(r, "delta_array", expected::kDeltaArray);
  expect_fact(r, "generators", expected::kGenerators);
  expect_fact(r, "relators", kDeltaTriangles);
  if (inv.to_string() != expected::kDeltaAbelian)
    r.mismatches.push_back(std::string("abelian: expected ") + expected::kDeltaAbelian + ", got " + inv.to_string());
  expect_fact(r, "hom_dim_2", expected::kHomDim2);
  expect_fact(r, "hom_dim_3", expected::kHomDim3);

  add(r, "abelianisation", Conclusion::Kind::computed,
      "the abelianised fundamental group of the base is " + inv.to_string(), {"fund.abelian"},
      inv.to_string() == expected::kDeltaAbelian);
  add(r, "hom_dims_match_p_ranks", Conclusion::Kind::computed,
      "dim Hom(D, C_p) from the GF(p) null space equals the p-rank of the Smith form, p = 2, 3",
      {"fund.abelian", "fund.hom_dim_2", "fund.hom_dim_3"},
      hom2_.size() == inv.p_rank(2) && hom3_.size() == inv.p_rank(3));
  r.timing["seconds"] = seconds_since(t0);
  return store(std::move(r));
}

const TheoremReport& Pipeline::run_double_covers() {
  if (auto it = reports_.find("double"); it != reports_.end()) return it->second;
  run_fund();
  const auto t0 = Clock::now();
  TheoremReport r;
  r.theorem = "double";

  const std::size_t d = hom2_.size();
  if (d >= 40) throw PipelineError("too many double covers to enumerate");
  const std::size_t count = (std::size_t{1} << d) - 1;
  auto pres = delta_pres_;
  const auto& basis = hom2_;
  CoverSource source = [&](std::size_t i) {
    return cover_from_voltage(Voltage::cyclic(pres, 2, combine_homs(basis, mask_coeffs(i + 1, d), 2)));
  };
  Classification cls = classify(count, source, ScreenSelector{}, options_.jobs);
  r.timing["classify_seconds"] = seconds_since(t0);
  r.work["screen_buckets"] = cls.buckets;
  r.work["certificates_computed"] = cls.certificates_computed;

  const std::size_t k = cls.classes.size();
  std::vector<InvariantFactors> invs(k);
  std::vector<std::optional<IntersectionArray>> arrays(k);
  std::vector<char> connected(k);
  std::vector<std::size_t> sources(k);
  const auto t1 = Clock::now();
  parallel_for(k, options_.jobs, [&](std::size_t c) {
    CoverGraph cover = source(cls.classes[c].representative);
    connected[c] = is_connected(cover.graph);
    DrResult dr = check_distance_regular(cover.graph.adjacency());
    arrays[c] = dr.array;
    sources[c] = dr.sources_checked;
    invs[c] = cover_invariants(cover);
  });
  r.timing["class_invariants_seconds"] = seconds_since(t1);

  Json sizes = Json::array(), reps = Json::array(), abel = Json::array(), dr_arrays = Json::array();
  std::size_t dr_count = 0, connected_count = 0, total = 0, dr_sources = 0;
  const auto table = target_arrays();
  for (std::size_t c = 0; c < k; ++c) {
    sizes.push_back(cls.classes[c].size());
    reps.push_back(cls.classes[c].representative + 1);
    abel.push_back(invariants_json(invs[c]));
    total += cls.classes[c].size();
    connected_count += connected[c] ? 1 : 0;
    dr_sources += sources[c];
    if (arrays[c]) {
      ++dr_count;
      dr_arrays.push_back(arrays[c]->to_string());
      if (!(*arrays[c] == table.at(2))) r.mismatches.push_back("distance-regular hit outside the target table");
    }
  }
  r.work["dr_sources_checked"] = dr_sources;
  r.facts["hom_classes"] = count;
  r.facts["class_count"] = k;
  r.facts["class_sizes"] = sizes;
  r.facts["class_representatives"] = reps;
  r.facts["connected_count"] = connected_count;
  r.facts["dr_count"] = dr_count;
  r.facts["dr_arrays"] = dr_arrays;
  r.facts["class_abelian"] = abel;

  expect_fact(r, "hom_classes", (std::size_t{1} << expected::kHomDim2) - 1);
  expect_fact(r, "class_count", expected::kDoubleClasses);
  expect_fact(r, "dr_count", 0);
  expect_fact(r, "connected_count", k);
  if (total != count) r.mismatches.push_back("class sizes do not sum to the number of covers");
  for (std::size_t c = 0; c < k; ++c)
    if (invs[c].to_string() != expected::kDoubleAbelian)
      r.mismatches.push_back("class_abelian[" + std::to_string(c) + "]: expected " + expected::kDoubleAbelian +
                             ", got " + invs[c].to_string());

  add(r, "class_count_is_exact", Conclusion::Kind::computed,
      "the connected double covers fall into " + std::to_string(k) + " cover-isomorphism classes",
      {"double.hom_classes", "double.class_count", "double.class_sizes"}, total == count);
  add(r, "no_dr_double_cover", Conclusion::Kind::computed, "no connected double cover is distance-regular",
      {"double.dr_count", "double.class_count"}, dr_count == 0);
  add(r, "no_dr_array_r2", Conclusion::Kind::derived,
      "no distance-regular graph has intersection array " + table.at(2).to_string() +
          ": it would be an antipodal double cover of the base, and all of those were checked",
      {"fund.target_arrays", "fund.hom_dim_2", "double.hom_classes", "double.dr_count"},
      dr_count == 0 && count == (std::size_t{1} << d) - 1);
  r.timing["seconds"] = seconds_since(t0);
  return store(std::move(r));
}

TheoremReport derive_no_s3(const FactStore& facts) {
  TheoremReport r;
  r.theorem = "no-s3";
  const std::uint64_t index_dd = finite_order(facts.at("fund.abelian"), "fund.abelian");
  const Json& classes = facts.at("double.class_abelian");
  const Json& class_count = facts.at("double.class_count");
  facts.at("double.hom_classes");
  if (!classes.is_array() || classes.empty()) throw DerivationRefused("double.class_abelian is empty");
  if (!class_count.is_number_integer() || class_count.get<std::int64_t>() < 0 ||
      class_count.get<std::size_t>() != classes.size())
    throw DerivationRefused("double.class_count disagrees with double.class_abelian");

  Json index_nn = Json::array();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::uint64_t order = finite_order(classes[c], "double.class_abelian[" + std::to_string(c) + "]");
    const std::uint64_t index = 2 * order;  // [D:N] [N:[N,N]]
    if (index != index_dd)
      throw DerivationRefused("class " + std::to_string(c) + ": [D:[N,N]] = " + std::to_string(index) +
                              " differs from [D:[D,D]] = " + std::to_string(index_dd));
    index_nn.push_back(index);
  }
  r.facts["index_commutator_D"] = index_dd;
  r.facts["index_commutator_N"] = index_nn;
  r.facts["classes_checked"] = classes.size();
  const std::vector<std::string> deps = {"fund.abelian", "double.class_count", "double.class_abelian",
                                         "no-s3.index_commutator_D", "no-s3.index_commutator_N"};
  add(r, "commutators_coincide", Conclusion::Kind::derived,
      "[N,N] = [D,D] for every index-2 subgroup N: [N,N] lies in [D,D] and both have index " +
          std::to_string(index_dd) + " in D",
      deps, true);
  auto deps2 = deps;
  deps2.push_back("no-s3.commutators_coincide");
  add(r, "no_s3_quotient", Conclusion::Kind::derived,
      "D has no quotient isomorphic to S3: for N the preimage of A3, [N,N] maps to 1 while [D,D] maps onto A3",
      deps2, true);
  return r;
}

const TheoremReport& Pipeline::run_no_s3() {
  if (auto it = reports_.find("no-s3"); it != reports_.end()) return it->second;
  run_double_covers();
  const auto t0 = Clock::now();
  TheoremReport r;
  try {
    r = derive_no_s3(facts_);
    expect_fact(r, "index_commutator_D", std::uint64_t{589824});
  } catch (const DerivationRefused& e) {
    r = TheoremReport{};
    r.theorem = "no-s3";
    r.mismatches.push_back(std::string("derivation refused: ") + e.what());
  }
  r.timing["seconds"] = seconds_since(t0);
  return store(std::move(r));
}

const TheoremReport& Pipeline::run_triple_covers() {
  if (auto it = reports_.find("triple"); it != reports_.end()) return it->second;
  run_fund();
  const auto t0 = Clock::now();
  TheoremReport r;
  r.theorem = "triple";

  const auto coeffs = projective_coefficients(hom3_.size(), 3);
  std::vector<Voltage> voltages;
  std::vector<CoverGraph> covers;
  for (const auto& c : coeffs) {
    voltages.push_back(Voltage::cyclic(delta_pres_, 3, combine_homs(hom3_, c, 3)));
    covers.push_back(cover_from_voltage(voltages.back()));
  }
  Classification cls = classify(covers, ScreenSelector{}, options_.jobs);
  r.work["screen_buckets"] = cls.buckets;
  r.work["certificates_computed"] = cls.certificates_computed;

  const std::size_t k = cls.classes.size();
  std::vector<InvariantFactors> invs(k);
  std::vector<std::optional<IntersectionArray>> arrays(k);
  std::vector<char> antipodal(k), connected(k);
  parallel_for(k, options_.jobs, [&](std::size_t c) {
    const CoverGraph& cover = covers[cls.classes[c].representative];
    connected[c] = is_connected(cover.graph);
    arrays[c] = intersection_array(cover.graph);
    if (arrays[c]) antipodal[c] = is_antipodal_partition(cover.graph, cover.fibers());
    invs[c] = cover_invariants(cover);
  });

  const auto table = target_arrays();
  Json sizes = Json::array(), reps = Json::array(), abel = Json::array(), cls_arrays = Json::array();
  std::size_t dr_classes = 0, connected_count = 0;
  std::optional<std::size_t> hat_class, star_class;
  for (std::size_t c = 0; c < k; ++c) {
    sizes.push_back(cls.classes[c].size());
    reps.push_back(coeffs[cls.classes[c].representative]);
    abel.push_back(invariants_json(invs[c]));
    cls_arrays.push_back(arrays[c] ? Json(arrays[c]->to_string()) : Json(nullptr));
    connected_count += connected[c] ? 1 : 0;
    if (arrays[c]) {
      ++dr_classes;
      if (!hat_class) hat_class = c;
      if (!(*arrays[c] == table.at(3))) r.mismatches.push_back("distance-regular hit outside the target table");
    } else if (!star_class) {
      star_class = c;
    }
  }
  r.facts["cover_count"] = covers.size();
  r.facts["class_count"] = k;
  r.facts["class_sizes"] = sizes;
  r.facts["class_coefficients"] = reps;
  r.facts["class_arrays"] = cls_arrays;
  r.facts["class_abelian"] = abel;
  r.facts["connected_count"] = connected_count;
  r.facts["dr_class_count"] = dr_classes;
  if (hat_class) {
    const std::size_t rep = cls.classes[*hat_class].representative;
    hat_voltage_ = voltages[rep];
    hat_ = covers[rep];
    r.facts["hat_coefficients"] = coeffs[rep];
    r.facts["hat_vertex_count"] = hat_->graph.order();
    r.facts["hat_array"] = arrays[*hat_class]->to_string();
    r.facts["hat_antipodal"] = static_cast<bool>(antipodal[*hat_class]);
    r.facts["hat_abelian"] = invariants_json(invs[*hat_class]);
  }
  if (star_class) {
    r.facts["star_abelian"] = invariants_json(invs[*star_class]);
    r.facts["star_distance_regular"] = false;
  }

  expect_fact(r, "cover_count", expected::kTripleCovers);
  expect_fact(r, "class_count", expected::kTripleClasses);
  expect_fact(r, "connected_count", k);
  expect_fact(r, "dr_class_count", 1);
  expect_fact(r, "hat_array", expected::kHatArray);
  expect_fact(r, "hat_antipodal", true);
  expect_fact(r, "hat_vertex_count", expected::kHatOrder);
  if (!hat_class || invs[*hat_class].to_string() != expected::kHatAbelian)
    r.mismatches.push_back(std::string("hat_abelian: expected ") + expected::kHatAbelian);
  if (!star_class || invs[*star_class].to_string() != expected::kStarAbelian)
    r.mismatches.push_back(std::string("star_abelian: expected ") + expected::kStarAbelian);

  add(r, "two_triple_classes", Conclusion::Kind::computed,
      "the cyclic triple covers fall into " + std::to_string(k) + " cover-isomorphism classes",
      {"triple.cover_count", "triple.class_count"}, k == expected::kTripleClasses);
  add(r, "one_dr_triple_class", Conclusion::Kind::computed,
      "exactly one triple-cover class is distance-regular, with antipodal fibres",
      {"triple.dr_class_count", "triple.hat_array", "triple.hat_antipodal"},
      dr_classes == 1 && hat_class && antipodal[*hat_class]);
  if (facts_.contains("no-s3.no_s3_quotient") && facts_.at("no-s3.no_s3_quotient") == true) {
    add(r, "triple_covers_cyclic", Conclusion::Kind::derived,
        "every connected triple cover has monodromy C3, since the transitive subgroups of S3 are C3 and S3",
        {"no-s3.no_s3_quotient", "fund.hom_dim_3", "triple.cover_count"}, true);
    add(r, "unique_dr_array_r3", Conclusion::Kind::derived,
        "up to isomorphism exactly one distance-regular graph has intersection array " +
            table.at(3).to_string(),
        {"fund.target_arrays", "triple.triple_covers_cyclic", "triple.class_count", "triple.dr_class_count",
         "triple.hat_array", "triple.hat_antipodal"},
        dr_classes == 1 && hat_class && arrays[*hat_class] == table.at(3));
  }
  r.timing["seconds"] = seconds_since(t0);
  return store(std::move(r));
}

const TheoremReport& Pipeline::run_hat_sweep() {
  if (auto it = reports_.find("hat-sweep"); it != reports_.end()) return it->second;
  const SweepMode mode = options_.sweep;
  if (mode.full) run_no_s3();
  run_triple_covers();
  const auto t0 = Clock::now();
  TheoremReport r;
  r.theorem = "hat-sweep";
  r.facts["mode"] = mode.to_string();
  if (!hat_) {
    r.mismatches.push_back("no distance-regular triple cover to sweep over");
    return store(std::move(r));
  }

  auto hat_graph = std::make_shared<const Graph>(hat_->graph);
  SpanningTree tree = lifted_spanning_tree(*hat_, delta_pres_->tree());
  auto pres = std::make_shared<const Presentation>(presentation(hat_graph, tree));
  auto basis = hom_basis_mod_p(*pres, 2);
  r.facts["hat_generators"] = pres->generator_count();
  r.facts["hat_relators"] = pres->relators().size();
  r.facts["hom_dim_2"] = basis.size();
  const DoubleCoverSweep sweep(*hat_voltage_, pres, basis);
  r.timing["setup_seconds"] = seconds_since(t0);

  const auto t1 = Clock::now();
  SweepResult result;
  if (mode.full) {
    const std::filesystem::path ckpt =
        options_.checkpoint_dir.empty() ? std::filesystem::path{} : options_.checkpoint_dir / "hat-sweep.checkpoint.json";
    SweepProgress prog = run_sweep(sweep, options_.jobs, options_.checkpoint_block, ckpt);
    r.timing["resumed_from_block"] = prog.resumed_from_block;
    result = std::move(prog.result);
  } else {
    const std::uint64_t total = sweep.class_count();
    if (mode.samples > total) throw PipelineError("more samples requested than classes exist");
    std::mt19937_64 rng(mode.seed);
    std::uniform_int_distribution<std::uint64_t> pick(1, total);
    std::set<std::uint64_t> chosen;
    while (chosen.size() < mode.samples) chosen.insert(pick(rng));
    const std::vector<std::uint64_t> masks(chosen.begin(), chosen.end());
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (masks.size() + kChunk - 1) / kChunk;
    std::vector<SweepResult> parts(chunks);
    parallel_for(chunks, options_.jobs, [&](std::size_t c) {
      const std::size_t lo = c * kChunk, hi = std::min(masks.size(), lo + kChunk);
      parts[c] = sweep.check(std::span<const std::uint64_t>(masks).subspan(lo, hi - lo));
    });
    for (const auto& p : parts) result.merge(p);
    r.facts["sample_seed"] = mode.seed;
  }
  r.timing["sweep_seconds"] = seconds_since(t1);
  r.work["dr_sources_checked"] = result.dr_sources_checked;
  r.facts["classes_checked"] = result.classes_checked;
  r.facts["dr_count"] = result.dr_hits.size();
  r.facts["dr_hits"] = result.dr_hits;
  expect_fact(r, "dr_count", 0);
  expect_fact(r, "hom_dim_2", expected::kHatHomDim2);
  if (facts_.contains("triple.hat_abelian")) {
    const Json& hab = facts_.at("triple.hat_abelian").at("order_exponents");
    const std::size_t rank2 = hab.contains("2") ? hab.at("2").get<std::size_t>() : 0;
    add(r, "hom_dim_matches_hat_abelian", Conclusion::Kind::computed,
        "dim Hom(pi1(hat), C2) equals the 2-rank of the abelianisation of the distance-regular triple cover",
        {"hat-sweep.hom_dim_2", "triple.hat_abelian"}, rank2 == basis.size());
  }

  if (!mode.full) {
    expect_fact(r, "classes_checked", mode.samples);
    add(r, "no_dr_in_sample", Conclusion::Kind::computed, "no sampled double cover of the triple cover is distance-regular",
        {"hat-sweep.dr_count", "hat-sweep.classes_checked"}, result.dr_hits.empty());
    r.timing["seconds"] = seconds_since(t0);
    return store(std::move(r));
  }

  expect_fact(r, "classes_checked", sweep.class_count());
  r.facts["a4_class_count"] = result.a4_hits.size();
  r.facts["a4_classes"] = result.a4_hits;
  expect_fact(r, "a4_class_count", expected::kA4Classes);

  // A4 classes, through the general composite-voltage route.
  const auto t2 = Clock::now();
  const CanonicalCertificate hat_cert = canonical_certificate(augment(*hat_));
  bool routes_agree = true, generic_a4 = true, quotients_hat = true, sigma_connected = true, sigma_dr = false;
  Json systems = Json::array();
  std::vector<CoverGraph> sigmas;
  for (auto mask : result.a4_hits) {
    Voltage outer = Voltage::cyclic(pres, 2, sweep.exponents(mask));
    Voltage composite = compose_to_base(*hat_voltage_, outer);
    routes_agree = routes_agree && composite.generator_perms() == sweep.composite_perms(mask);
    PermGroup image = monodromy_image(composite);
    generic_a4 = generic_a4 && is_transitive(image) && is_a4(image);
    CoverGraph six = cover_from_voltage(composite);
    Json sys = Json::array();
    bool found_pairs = false;
    if (is_transitive(image)) {
      for (const auto& bs : block_systems(image)) {
        sys.push_back(Json::array({bs.block_count(), bs.block_size()}));
        if (bs.block_size() == 2 && bs.block_count() == 3) {
          found_pairs = true;
          quotients_hat = quotients_hat && canonical_certificate(augment(quotient_cover(six, bs))) == hat_cert;
        }
      }
    }
    quotients_hat = quotients_hat && found_pairs;
    systems.push_back(sys);

    std::optional<Perm> h;
    for (const auto& g : image.elements())
      if (g.order() == 3) {
        h = g;
        break;
      }
    if (!h) {
      sigma_connected = false;
      continue;
    }
    const std::vector<Perm> sylow{*h};
    Voltage sigma = coset_action_voltage(composite, sylow);
    sigmas.push_back(cover_from_voltage(sigma));
    sigma_connected = sigma_connected && is_connected(sigmas.back().graph);
    sigma_dr = sigma_dr || intersection_array(sigmas.back().graph).has_value();
  }
  Classification sigma_cls = classify(sigmas, ScreenSelector{}, options_.jobs);
  r.timing["a4_analysis_seconds"] = seconds_since(t2);
  r.facts["a4_composite_routes_agree"] = routes_agree;
  r.facts["a4_generic_confirmed"] = generic_a4;
  r.facts["a4_block_systems"] = systems;
  r.facts["a4_quotients_are_hat"] = quotients_hat;
  r.facts["sigma_vertex_count"] = sigmas.empty() ? 0 : sigmas.front().graph.order();
  r.facts["sigma_connected"] = sigma_connected;
  r.facts["sigma_distance_regular"] = sigma_dr;
  r.facts["sigma_class_count"] = sigma_cls.classes.size();
  r.facts["primitive_degree_6"] = "not examined";
  expect_fact(r, "a4_composite_routes_agree", true);
  expect_fact(r, "a4_generic_confirmed", true);
  expect_fact(r, "a4_quotients_are_hat", true);
  expect_fact(r, "sigma_vertex_count", expected::kSigmaOrder);
  expect_fact(r, "sigma_connected", true);
  expect_fact(r, "sigma_distance_regular", false);
  expect_fact(r, "sigma_class_count", expected::kSigmaClasses);

  const auto table = target_arrays();
  add(r, "no_dr_double_cover_of_hat", Conclusion::Kind::computed,
      "no connected double cover of the distance-regular triple cover is distance-regular",
      {"hat-sweep.dr_count", "hat-sweep.classes_checked", "hat-sweep.hom_dim_2"}, result.dr_hits.empty());
  add(r, "no_dr_six_cover_doubling_hat", Conclusion::Kind::derived,
      "no distance-regular antipodal 6-cover of the base is a double cover of the distance-regular triple cover",
      {"hat-sweep.dr_count", "hat-sweep.classes_checked", "hat-sweep.hom_dim_2"}, result.dr_hits.empty());

  // An A4 quotient through the non-DR triple cover: [N,N] would have index
  // 3 |ab(N)| in D, which must be 3 [D:[D,D]].
  bool star_excluded = false;
  try {
    const std::uint64_t d_index = finite_order(facts_.at("fund.abelian"), "fund.abelian");
    const std::uint64_t star = finite_order(facts_.at("triple.star_abelian"), "triple.star_abelian");
    const std::uint64_t nn_index = 3 * star;
    star_excluded = nn_index % d_index == 0 && nn_index / d_index == 3;
  } catch (const DerivationRefused& e) {
    r.mismatches.push_back(std::string("derivation refused: ") + e.what());
  }
  add(r, "a4_not_over_star", Conclusion::Kind::derived,
      "an A4 quotient of D cannot arise over the non-distance-regular triple cover: [N,N] would be a normal "
      "subgroup of index 3 in [D,D] inside the kernel, so the quotient would be abelian or have a normal subgroup "
      "of order 3",
      {"fund.abelian", "triple.star_abelian"}, star_excluded);
  add(r, "no_dr_array_r4", Conclusion::Kind::derived,
      "no distance-regular graph has intersection array " + table.at(4).to_string() +
          ": imprimitive monodromy needs a distance-regular double cover, S4 needs an S3 quotient, and the unique A4 "
          "cover is not distance-regular",
      {"fund.target_arrays", "double.dr_count", "no-s3.no_s3_quotient", "hat-sweep.a4_not_over_star",
       "hat-sweep.a4_class_count", "hat-sweep.a4_quotients_are_hat", "hat-sweep.sigma_class_count",
       "hat-sweep.sigma_distance_regular"},
      star_excluded && facts_.contains("no-s3.no_s3_quotient") && facts_.at("no-s3.no_s3_quotient") == true &&
          facts_.at("double.dr_count") == 0 && !sigma_dr && sigma_cls.classes.size() == 1 && quotients_hat);
  r.timing["seconds"] = seconds_since(t0);
  return store(std::move(r));
}

std::vector<std::string> missing_dependencies(const std::vector<const TheoremReport*>& reports,
                                              const FactStore& facts) {
  std::vector<std::string> out;
  for (const auto* r : reports)
    for (const auto& c : r->conclusions)
      for (const auto& key : c.depends_on)
        if (!facts.contains(key)) out.push_back(r->theorem + "/" + c.id + " -> " + key);
  return out;
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

RunAllResult run_all(const std::filesystem::path& delta_file, const std::filesystem::path& out_dir,
                     const PipelineOptions& options, const std::vector<std::string>& theorems) {
  static const std::vector<std::string> kOrder = {"fund", "double", "no-s3", "triple", "hat-sweep"};
  const auto t0 = Clock::now();
  RunAllResult res;
  std::vector<std::string> wanted = theorems.empty() ? kOrder : theorems;
  for (const auto& t : wanted)
    if (std::find(kOrder.begin(), kOrder.end(), t) == kOrder.end()) throw PipelineError("unknown theorem " + t);
  std::filesystem::create_directories(out_dir);

  Json summary;
  summary["requested"] = wanted;
  summary["feasibility_table"] = arrays_json(target_arrays());
  auto finish = [&](int code) {
    res.exit_code = code;
    summary["exit_code"] = code;
    summary["first_failure"] = res.first_failure ? Json(*res.first_failure) : Json(nullptr);
    summary["timing"] = {{"seconds", seconds_since(t0)}};
    std::ofstream(out_dir / "summary.json") << dump_report(summary);
    res.summary = summary;
    return res;
  };

  std::optional<DeltaCertificate> cert;
  try {
    cert = load_delta(delta_file);
    summary["delta"] = {{"status", "certified"},
                        {"srg", cert->params.to_string()},
                        {"edges", cert->edge_count},
                        {"triangles", cert->triangle_count}};
  } catch (const std::exception& e) {
    summary["delta"] = {{"status", "failed"}, {"error", e.what()}};
    res.first_failure = "delta";
    return finish(1);
  }

  PipelineOptions opts = options;
  if (opts.checkpoint_dir.empty()) opts.checkpoint_dir = out_dir;
  Pipeline pipe(cert->graph, opts);
  Json status = Json::object();
  for (const auto& t : kOrder) {
    if (std::find(wanted.begin(), wanted.end(), t) == wanted.end()) continue;
    try {
      if (t == "fund") pipe.run_fund();
      if (t == "double") pipe.run_double_covers();
      if (t == "no-s3") pipe.run_no_s3();
      if (t == "triple") pipe.run_triple_covers();
      if (t == "hat-sweep") pipe.run_hat_sweep();
      for (const auto* done : pipe.reports())
        if (!done->reproduced() && !res.first_failure) res.first_failure = done->theorem;
    } catch (const std::exception& e) {
      status[t] = std::string("error: ") + e.what();
      if (!res.first_failure) res.first_failure = t;
    }
    if (res.first_failure) break;
  }
  for (const auto* r : pipe.reports()) {
    std::ofstream(out_dir / (r->theorem + ".json")) << dump_report(r->to_json(true));
    if (!status.contains(r->theorem)) status[r->theorem] = r->reproduced() ? "reproduced" : "mismatch";
  }
  summary["reports"] = status;
  const auto missing = missing_dependencies(pipe.reports(), pipe.facts());
  summary["missing_dependencies"] = missing;
  if (!missing.empty() && !res.first_failure) res.first_failure = "dependencies";
  return finish(res.first_failure ? 1 : 0);
}

}  // namespace drcover

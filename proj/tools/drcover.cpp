#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "drcover/canon.hpp"
#include "drcover/classify.hpp"
#include "drcover/delta.hpp"
#include "drcover/graph_io.hpp"
#include "drcover/homotopy.hpp"
#include "drcover/pipeline.hpp"
#include "drcover/voltage.hpp"

using namespace drcover;

namespace {

constexpr int kReproduced = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_prime(std::size_t r) {
  if (r < 2) return false;
  for (std::size_t q = 2; q * q <= r; ++q)
    if (r % q == 0) return false;
  return true;
}

std::string coeff_text(const std::vector<std::uint32_t>& c) {
  std::string s = "(";
  for (std::size_t j = 0; j < c.size(); ++j) s += (j ? "," : "") + std::to_string(c[j]);
  return s + ")";
}

int delta_build(const std::string& out) {
  DeltaCertificate cert = build_delta();
  save_graph(out, cert.graph);
  std::cout << "wrote " << out << ": SRG" << cert.params.to_string() << ", " << cert.edge_count << " edges, "
            << cert.triangle_count << " triangles\n";
  return kReproduced;
}

int delta_verify(const std::string& file) {
  try {
    DeltaCertificate cert = load_delta(file);
    std::cout << "certified SRG" << cert.params.to_string() << ", " << cert.edge_count << " edges, "
              << cert.triangle_count << " triangles\n";
    return kReproduced;
  } catch (const CertificationError& e) {
    std::cerr << "not certified: " << e.what() << "\n";
    return kMismatch;
  }
}

int pi1_abelian(const std::string& file, Vertex root) {
  auto g = std::make_shared<const Graph>(load_graph(file));
  if (root >= g->order()) throw UsageError("--root is not a vertex");
  std::cout << abelian_invariants(presentation(g, spanning_tree(*g, root))).to_string() << "\n";
  return kReproduced;
}

int cover_build(const std::string& graph_file, const std::string& voltage_file, const std::string& out) {
  auto g = std::make_shared<const Graph>(load_graph(graph_file));
  auto pres = std::make_shared<const Presentation>(presentation(g, spanning_tree(*g)));
  std::ifstream in(voltage_file);
  if (!in) throw std::runtime_error("cannot open " + voltage_file);
  Voltage v = read_voltage(in, pres);
  CoverGraph c = cover_from_voltage(v);
  auto array = intersection_array(c.graph);
  std::cout << "degree " << c.degree << " cover: " << c.graph.order() << " vertices, " << c.graph.edge_count()
            << " edges, " << (is_connected(c.graph) ? "connected" : "disconnected") << ", "
            << (array ? "distance-regular " + array->to_string() : std::string("not distance-regular")) << "\n";
  if (!out.empty()) save_graph(out, c.graph);
  return kReproduced;
}

int covers_classify(const std::string& base_file, std::size_t degree, bool drg, bool abelian, unsigned jobs) {
  if (!is_prime(degree)) throw UsageError("--degree must be prime (covers from index-R normal subgroups)");
  auto g = std::make_shared<const Graph>(load_graph(base_file));
  auto pres = std::make_shared<const Presentation>(presentation(g, spanning_tree(*g)));
  const auto p = static_cast<std::uint32_t>(degree);
  const auto basis = hom_basis_mod_p(*pres, p);
  const auto coeffs = projective_coefficients(basis.size(), p);
  CoverSource source = [&](std::size_t i) {
    return cover_from_voltage(Voltage::cyclic(pres, p, combine_homs(basis, coeffs[i], p)));
  };
  Classification cls = classify(coeffs.size(), source, ScreenSelector{}, jobs);
  std::cout << coeffs.size() << " connected " << degree << "-covers, " << cls.classes.size() << " classes\n";
  for (std::size_t k = 0; k < cls.classes.size(); ++k) {
    const auto& c = cls.classes[k];
    std::cout << "class " << k << ": size " << c.size() << ", representative " << coeff_text(coeffs[c.representative]);
    if (drg || abelian) {
      CoverGraph cover = source(c.representative);
      if (drg) {
        auto array = intersection_array(cover.graph);
        std::cout << ", " << (array ? "distance-regular " + array->to_string() : std::string("not distance-regular"));
      }
      if (abelian) {
        auto cg = std::make_shared<const Graph>(cover.graph);
        std::cout << ", " << abelian_invariants(presentation(cg, spanning_tree(*cg))).to_string();
      }
    }
    if (c.certificate) std::cout << ", certificate " << std::hex << c.certificate->digest() << std::dec;
    std::cout << "\n";
  }
  return kReproduced;
}

int reproduce(const std::string& what, const std::string& mode, unsigned jobs, const std::string& out,
              const std::string& delta_file) {
  PipelineOptions options;
  try {
    options.sweep = SweepMode::parse(mode);
  } catch (const PipelineError& e) {
    throw UsageError(e.what());
  }
  options.jobs = jobs;
  std::vector<std::string> theorems;
  if (what != "all") theorems.push_back(what);
  const std::filesystem::path delta = delta_file.empty() ? default_data_dir() / "delta.g6" : std::filesystem::path(delta_file);
  RunAllResult res = run_all(delta, out, options, theorems);
  const Json& reports = res.summary.contains("reports") ? res.summary.at("reports") : Json::object();
  std::cout << "delta: " << res.summary.at("delta").at("status").get<std::string>() << "\n";
  for (const auto& [id, status] : reports.items()) std::cout << id << ": " << status.get<std::string>() << "\n";
  if (res.first_failure) std::cout << "first failure: " << *res.first_failure << "\n";
  std::cout << "reports in " << out << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covers of graphs as triangle 2-complexes"};
  app.require_subcommand(1);

  auto* delta = app.add_subcommand("delta", "Build or verify the SRG(105,32,4,12) data file");
  delta->require_subcommand(1);
  std::string delta_out, delta_in;
  auto* delta_build_cmd = delta->add_subcommand("build", "Write the flag graph of PG(2,4)");
  delta_build_cmd->add_option("--out", delta_out, "Output file (.g6 or edge list)")->required();
  auto* delta_verify_cmd = delta->add_subcommand("verify", "Certify a graph file");
  delta_verify_cmd->add_option("file", delta_in, "Graph file")->required();

  auto* pi1 = app.add_subcommand("pi1", "Fundamental group of the clique 2-complex");
  pi1->require_subcommand(1);
  std::string pi1_graph;
  Vertex root = 0;
  auto* pi1_abelian_cmd = pi1->add_subcommand("abelian", "Print the abelian invariants");
  pi1_abelian_cmd->add_option("--graph", pi1_graph, "Graph file")->required();
  pi1_abelian_cmd->add_option("--root", root, "Spanning tree root");

  auto* cover = app.add_subcommand("cover", "Covers from permutation voltages");
  cover->require_subcommand(1);
  std::string cover_graph, cover_voltage, cover_out;
  auto* cover_build_cmd = cover->add_subcommand("build", "Build the cover of a voltage file");
  cover_build_cmd->add_option("--graph", cover_graph, "Base graph file")->required();
  cover_build_cmd->add_option("--voltage", cover_voltage, "Voltage file, lines 'u v : images'")->required();
  cover_build_cmd->add_option("--out", cover_out, "Write the cover graph here");

  auto* covers = app.add_subcommand("covers", "Enumerate and classify covers");
  covers->require_subcommand(1);
  std::string classify_base;
  std::size_t classify_degree = 2;
  bool classify_drg = false, classify_abelian = false;
  unsigned classify_jobs = 1;
  auto* classify_cmd = covers->add_subcommand("classify", "Classify the connected cyclic covers of prime degree");
  classify_cmd->add_option("--base", classify_base, "Base graph file")->required();
  classify_cmd->add_option("--degree", classify_degree, "Prime cover degree")->required();
  classify_cmd->add_flag("--drg", classify_drg, "Test class representatives for distance-regularity");
  classify_cmd->add_flag("--abelian", classify_abelian, "Abelianise class representatives");
  classify_cmd->add_option("--jobs", classify_jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("reproduce", "Reproduce the classification results");
  std::string what = "all", mode = "full", out = "reports", delta_file;
  unsigned jobs = 1;
  repro->add_option("what", what, "all|fund|double|triple|no-s3|hat-sweep")
      ->check(CLI::IsMember({"all", "fund", "double", "triple", "no-s3", "hat-sweep"}));
  repro->add_option("--mode", mode, "Sweep mode: full or sample:K");
  repro->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  repro->add_option("--out", out, "Report directory");
  repro->add_option("--delta", delta_file, "delta.g6 (default: $DRCOVER_DATA/delta.g6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (delta_build_cmd->parsed()) return delta_build(delta_out);
    if (delta_verify_cmd->parsed()) return delta_verify(delta_in);
    if (pi1_abelian_cmd->parsed()) return pi1_abelian(pi1_graph, root);
    if (cover_build_cmd->parsed()) return cover_build(cover_graph, cover_voltage, cover_out);
    if (classify_cmd->parsed())
      return covers_classify(classify_base, classify_degree, classify_drg, classify_abelian, classify_jobs);
    if (repro->parsed()) return reproduce(what, mode, jobs, out, delta_file);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  }
  return kUsage;
}

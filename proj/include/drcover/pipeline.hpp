#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "drcover/graph.hpp"
#include "drcover/homotopy.hpp"
#include "drcover/voltage.hpp"

namespace drcover {

using Json = nlohmann::json;

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a derivation's premises are absent or do not support it.
class DerivationRefused : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

struct Conclusion {
  enum class Kind { computed, derived };
  std::string id;
  Kind kind = Kind::computed;
  std::string statement;
  /// Fully qualified fact keys ("theorem.fact").
  std::vector<std::string> depends_on;
  bool holds = true;
};

struct TheoremReport {
  std::string theorem;
  Json facts = Json::object();
  std::vector<Conclusion> conclusions;
  /// Expected values that were not reproduced; empty iff the theorem holds.
  std::vector<std::string> mismatches;
  Json work = Json::object();
  /// Wall clock and other run-dependent values. Excluded from comparisons.
  Json timing = Json::object();

  bool reproduced() const noexcept { return mismatches.empty(); }
  Json to_json(bool with_timing = true) const;
};

/// Computed facts of all reports so far, keyed "theorem.fact".
class FactStore {
 public:
  void record(const TheoremReport& report);
  bool contains(const std::string& key) const { return facts_.count(key) != 0; }
  /// Throws DerivationRefused if absent.
  const Json& at(const std::string& key) const;
  void set(const std::string& key, Json value) { facts_[key] = std::move(value); }
  void erase(const std::string& key) { facts_.erase(key); }
  const std::map<std::string, Json>& all() const noexcept { return facts_; }

 private:
  std::map<std::string, Json> facts_;
};

/// The antipodal r-cover arrays {32,27,12(r-1)/r,1;1,12/r,27,32}.
std::map<std::size_t, IntersectionArray> target_arrays();

struct SweepMode {
  bool full = true;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  /// "full" or "sample:K".
  static SweepMode parse(const std::string& text);
  std::string to_string() const;
};

struct PipelineOptions {
  unsigned jobs = 1;
  SweepMode sweep;
  /// Where sweep checkpoints live; empty disables checkpointing.
  std::filesystem::path checkpoint_dir;
  std::size_t checkpoint_block = std::size_t{1} << 12;
};

/// Theorem-by-theorem reproduction over a certified base graph. Each run_*
/// first runs whatever it depends on, records its facts and returns the
/// report.
class Pipeline {
 public:
  explicit Pipeline(Graph delta, PipelineOptions options = {});

  const TheoremReport& run_fund();
  const TheoremReport& run_double_covers();
  const TheoremReport& run_triple_covers();
  const TheoremReport& run_no_s3();
  const TheoremReport& run_hat_sweep();

  /// Reports produced so far, in the order they were run.
  std::vector<const TheoremReport*> reports() const;
  FactStore& facts() noexcept { return facts_; }
  const Presentation& delta_presentation() const { return *delta_pres_; }

  /// Δ̂ and the mod-3 voltage that builds it; available after run_triple_covers.
  const CoverGraph& hat() const;
  const Voltage& hat_voltage() const;

 private:
  const TheoremReport& store(TheoremReport report);

  PipelineOptions options_;
  std::shared_ptr<const Graph> delta_;
  std::shared_ptr<const Presentation> delta_pres_;
  FactStore facts_;
  std::map<std::string, TheoremReport> reports_;
  std::vector<std::string> order_;
  std::vector<std::vector<std::uint32_t>> hom2_, hom3_;
  std::optional<Voltage> hat_voltage_;
  std::optional<CoverGraph> hat_;
};

/// Builds the no-S3 report from facts alone. Throws DerivationRefused when
/// the premises are missing or inconsistent.
TheoremReport derive_no_s3(const FactStore& facts);

/// Checks that every derived conclusion cites only facts present in `facts`.
/// Returns the offending dependency keys.
std::vector<std::string> missing_dependencies(const std::vector<const TheoremReport*>& reports,
                                              const FactStore& facts);

struct RunAllResult {
  int exit_code = 0;
  std::optional<std::string> first_failure;
  Json summary;
};

/// Loads and certifies delta.g6, runs every theorem in dependency order and
/// writes <theorem>.json plus summary.json into out_dir. Stops at the first
/// theorem that is not reproduced.
RunAllResult run_all(const std::filesystem::path& delta_file, const std::filesystem::path& out_dir,
                     const PipelineOptions& options, const std::vector<std::string>& theorems = {});

/// Report file contents: sorted keys, two-space indent, trailing newline.
std::string dump_report(const Json& j);

}  // namespace drcover

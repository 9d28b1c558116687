#pragma once

// End-to-end detection: corpus loading, configuration, the phase sequence
// and the corpus statistics commands.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "simion/clones.hpp"
#include "simion/compare.hpp"
#include "simion/exec.hpp"
#include "simion/inputgen.hpp"
#include "simion/post.hpp"

namespace simion {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filters that can be switched off: type15, variants, permutation,
/// identity, equality, subsumption, type3.
const std::set<std::string>& filter_names();

/// The switchable stages that add chunks rather than remove them.
const std::set<std::string>& expansion_stages();

struct PipelineConfig {
  Strategy strategy = Strategy::method;
  std::size_t min_window = 5;
  std::uint64_t seed = 0;
  std::size_t max_inputs = 100;
  std::size_t max_permutations = 25;
  std::size_t batch_size = 20;
  std::uint64_t step_budget = 100000;
  std::size_t min_valid_outputs = 3;
  std::size_t type3_threshold = 5;
  std::set<std::string> disabled_filters;
  std::string report_format = "json";
  std::string fingerprint_mode = "per_output";  // or "tuple"
  int recursion_depth_limit = 4;
  std::vector<std::size_t> array_sizes{0, 1, 3, 7};
  std::vector<std::int64_t> int_pool = GenPolicy::default_int_pool();
  std::vector<double> float_pool = GenPolicy::default_float_pool();
  std::vector<bool> bool_pool{false, true};
  std::vector<std::string> string_pool = GenPolicy::default_string_pool();
  std::size_t workers = 0;  // 0 = hardware concurrency; not part of the report

  bool enabled(const std::string& filter) const { return disabled_filters.count(filter) == 0; }
  GenPolicy gen_policy() const;
  ExecPolicy exec_policy() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Applies one `key = value` setting; throws ConfigError.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` lines, `#` comments. Throws ConfigError.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& file, PipelineConfig base = {});
void validate_config(const PipelineConfig& config);

struct Corpus {
  std::vector<ModulePtr> modules;  // sorted by corpus-relative path
  std::size_t sloc = 0;
};

/// Every `.mlg` file under `dir`. Throws CorpusError listing every file
/// that cannot be read, parsed or checked.
Corpus load_corpus(const std::filesystem::path& dir);

/// Builds a corpus from in-memory sources (path -> text).
Corpus corpus_from_sources(const std::map<std::string, std::string>& sources);

/// Chunks that reached the comparison phase, with their runs.
struct ComparedChunk {
  ChunkPtr chunk;
  ExecutionRecord record;
};

struct PipelineTrace {
  std::vector<ComparedChunk> compared;
};

DetectionResult run_pipeline(const Corpus& corpus, const PipelineConfig& config,
                             PipelineTrace* trace = nullptr);

/// Throws InvariantViolation when the result breaks a structural rule.
void check_invariants(const DetectionResult& result, const PipelineConfig& config);

struct StrategyStats {
  Strategy strategy = Strategy::method;
  std::size_t chunks = 0;
  std::size_t sloc = 0;
  double per_sloc = 0.0;        // two decimals
  std::size_t no_input = 0;     // no generator for some input
  std::size_t project_types = 0;
  std::map<std::string, std::size_t> extern_calls;  // per category
  std::size_t validated = 0;
  // Rounded whole percentages of `chunks`.
  int no_input_pct = 0;
  int project_types_pct = 0;
  std::map<std::string, int> extern_pct;
  int validated_pct = 0;

  friend bool operator==(const StrategyStats&, const StrategyStats&) = default;
};

StrategyStats compute_stats(const Corpus& corpus, Strategy strategy, const PipelineConfig& config);

struct ChunkCount {
  std::size_t total = 0;
  double per_sloc = 0.0;
};

ChunkCount count_chunks(const Corpus& corpus, Strategy strategy, std::size_t min_window);

/// round(100 * part / whole); 0 when whole is 0.
int whole_percent(std::size_t part, std::size_t whole);

}  // namespace simion

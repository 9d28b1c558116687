#include "simion/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace simion {

const std::set<std::string>& filter_names() {
  static const std::set<std::string> kNames{"type15",   "variants",    "permutation", "identity",
                                            "equality", "subsumption", "type3"};
  return kNames;
}

const std::set<std::string>& expansion_stages() {
  static const std::set<std::string> kNames{"variants", "permutation"};
  return kNames;
}

GenPolicy PipelineConfig::gen_policy() const {
  GenPolicy p;
  p.seed = seed;
  p.max_inputs = max_inputs;
  p.array_sizes = array_sizes;
  p.recursion_depth_limit = recursion_depth_limit;
  p.int_pool = int_pool;
  p.float_pool = float_pool;
  p.bool_pool = bool_pool;
  p.string_pool = string_pool;
  return p;
}

ExecPolicy PipelineConfig::exec_policy() const {
  ExecPolicy p;
  p.step_budget = step_budget;
  p.batch_size = batch_size;
  p.workers = workers;
  return p;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim_copy(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

nlohmann::json parse_json_array(const std::string& key, const std::string& value) {
  nlohmann::json j = nlohmann::json::parse(value, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw ConfigError("'" + key + "' expects a JSON array");
  if (j.empty()) throw ConfigError("'" + key + "' must not be empty");
  return j;
}

}  // namespace

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim_copy(raw);
  try {
    if (key == "strategy") {
      auto s = parse_strategy(value);
      if (!s) throw ConfigError("unknown strategy '" + value + "'");
      c.strategy = *s;
    } else if (key == "min_window") {
      c.min_window = parse_unsigned<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "max_inputs") {
      c.max_inputs = parse_unsigned<std::size_t>(key, value);
    } else if (key == "max_permutations") {
      c.max_permutations = parse_unsigned<std::size_t>(key, value);
    } else if (key == "batch_size") {
      c.batch_size = parse_unsigned<std::size_t>(key, value);
    } else if (key == "step_budget") {
      c.step_budget = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "min_valid_outputs") {
      c.min_valid_outputs = parse_unsigned<std::size_t>(key, value);
    } else if (key == "type3_threshold") {
      c.type3_threshold = parse_unsigned<std::size_t>(key, value);
    } else if (key == "recursion_depth_limit") {
      c.recursion_depth_limit = static_cast<int>(parse_unsigned<unsigned>(key, value));
    } else if (key == "workers") {
      c.workers = parse_unsigned<std::size_t>(key, value);
    } else if (key == "report_format") {
      if (value != "json" && value != "table") throw ConfigError("report_format must be json or table");
      c.report_format = value;
    } else if (key == "fingerprint_mode") {
      if (value != "per_output" && value != "tuple") {
        throw ConfigError("fingerprint_mode must be per_output or tuple");
      }
      c.fingerprint_mode = value;
    } else if (key == "disabled_filters") {
      c.disabled_filters.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim_copy(item);
        if (item.empty()) continue;
        if (filter_names().count(item) == 0) throw ConfigError("unknown filter '" + item + "'");
        c.disabled_filters.insert(item);
      }
    } else if (key == "array_sizes") {
      c.array_sizes = parse_json_array(key, value).get<std::vector<std::size_t>>();
    } else if (key == "int_pool") {
      c.int_pool = parse_json_array(key, value).get<std::vector<std::int64_t>>();
    } else if (key == "float_pool") {
      c.float_pool.clear();
      for (const auto& v : parse_json_array(key, value)) {
        if (v.is_string() && v.get<std::string>() == "nan") {
          c.float_pool.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
          c.float_pool.push_back(v.get<double>());
        }
      }
    } else if (key == "bool_pool") {
      c.bool_pool = parse_json_array(key, value).get<std::vector<bool>>();
    } else if (key == "string_pool") {
      c.string_pool = parse_json_array(key, value).get<std::vector<std::string>>();
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("bad value for '" + key + "': " + ex.what());
  }
}

void validate_config(const PipelineConfig& c) {
  auto at_least_one = [](const char* name, std::uint64_t v) {
    if (v < 1) throw ConfigError(std::string(name) + " must be at least 1");
  };
  at_least_one("min_window", c.min_window);
  at_least_one("max_inputs", c.max_inputs);
  at_least_one("batch_size", c.batch_size);
  at_least_one("step_budget", c.step_budget);
  at_least_one("min_valid_outputs", c.min_valid_outputs);
  at_least_one("recursion_depth_limit", static_cast<std::uint64_t>(c.recursion_depth_limit));
  if (c.int_pool.empty() || c.float_pool.empty() || c.bool_pool.empty() || c.string_pool.empty()) {
    throw ConfigError("value pools must not be empty");
  }
  for (const auto& f : c.disabled_filters) {
    if (filter_names().count(f) == 0) throw ConfigError("unknown filter '" + f + "'");
  }
}

namespace {

// Drops a `#` comment; a `#` inside a double-quoted string is kept.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (quoted && line[i] == '\\') {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (!quoted && line[i] == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string t = trim_copy(strip_comment(line));
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    apply_setting(base, trim_copy(t.substr(0, eq)), t.substr(eq + 1));
  }
  validate_config(base);
  return base;
}

PipelineConfig load_config(const std::filesystem::path& file, PipelineConfig base) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// Corpus

Corpus corpus_from_sources(const std::map<std::string, std::string>& sources) {
  Corpus corpus;
  std::vector<std::string> problems;
  for (const auto& [path, text] : sources) {
    try {
      SourceFile file = SourceFile::from_text(path, text);
      auto module = std::make_shared<Module>(parse(file));
      check_module(*module);
      corpus.sloc += sloc(file);
      corpus.modules.push_back(std::move(module));
    } catch (const ParseError& e) {
      problems.push_back(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                         ": " + e.what());
    } catch (const SemanticError& e) {
      problems.push_back(path + ":" + std::to_string(e.span().line) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "corpus has " + std::to_string(problems.size()) + " invalid file(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CorpusError(msg);
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw CorpusError("not a directory: " + dir.string());
  std::map<std::string, std::string> sources;
  std::vector<std::string> unreadable;
  for (fs::recursive_directory_iterator it(dir, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file() || it->path().extension() != ".mlg") continue;
    std::string rel = fs::relative(it->path(), dir).generic_string();
    std::ifstream in(it->path(), std::ios::binary);
    if (!in) {
      unreadable.push_back(rel);
      continue;
    }
    sources[rel].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (in.bad()) unreadable.push_back(rel);
  }
  if (ec) throw CorpusError("cannot walk " + dir.string() + ": " + ec.message());
  if (!unreadable.empty()) {
    std::string msg = "unreadable corpus file(s):";
    for (const auto& p : unreadable) msg += "\n  " + p;
    throw CorpusError(msg);
  }
  return corpus_from_sources(sources);
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct SeriesEntry {
  bool ok = false;
  std::vector<InputVector> series;
};

}  // namespace

DetectionResult run_pipeline(const Corpus& corpus, const PipelineConfig& config,
                             PipelineTrace* trace) {
  validate_config(config);
  if (corpus.modules.empty()) throw CorpusError("corpus contains no .mlg files");
  std::array<std::size_t, kPhaseCount> counts{};
  auto count = [&](Phase p, std::size_t n) { counts[static_cast<std::size_t>(p)] = n; };
  std::vector<CloneClass> classes;

  // Chunk extraction.
  std::vector<ChunkPtr> chunks;
  for (const auto& m : corpus.modules) {
    for (auto& c : extract_chunks(m, config.strategy, config.min_window)) {
      chunks.push_back(std::make_shared<Chunk>(std::move(c)));
    }
  }
  count(Phase::ChunkExtraction, chunks.size());

  // Type-1.5 clones.
  if (config.enabled("type15")) {
    Type15Result r = filter_type15(chunks);
    chunks = std::move(r.survivors);
    classes = std::move(r.classes);
  }
  count(Phase::Type15Clone, chunks.size());

  // Signature variants, then parameter permutations.
  {
    std::vector<ChunkPtr> expanded;
    for (const auto& c : chunks) {
      std::vector<Chunk> variants =
          config.enabled("variants") ? expand_variants(*c) : std::vector<Chunk>{*c};
      for (auto& v : variants) {
        std::vector<Chunk> perms;
        if (config.enabled("permutation")) perms = permute_signatures(v, config.max_permutations);
        expanded.push_back(std::make_shared<Chunk>(std::move(v)));
        for (auto& p : perms) expanded.push_back(std::make_shared<Chunk>(std::move(p)));
      }
    }
    chunks = std::move(expanded);
  }
  count(Phase::Permutation, chunks.size());

  // Input generation, one series per structural signature.
  const GenPolicy gen = config.gen_policy();
  std::map<std::string, SeriesEntry> series;
  std::vector<ExecJob> jobs;
  {
    std::vector<ChunkPtr> kept;
    for (const auto& c : chunks) {
      ChunkSignature sig = signature_of(*c);
      std::string key = sig.key(config.recursion_depth_limit);
      auto it = series.find(key);
      if (it == series.end()) {
        SeriesEntry e;
        try {
          e.series = gen_input_series(sig, gen);
          e.ok = true;
        } catch (const NoGenerator&) {
        }
        it = series.emplace(key, std::move(e)).first;
      }
      if (it->second.ok) kept.push_back(c);
    }
    chunks = std::move(kept);
  }
  count(Phase::InputGen, chunks.size());

  // Closure validation.
  chunks.erase(std::remove_if(chunks.begin(), chunks.end(),
                              [](const ChunkPtr& c) { return validate_chunk(*c).has_value(); }),
               chunks.end());
  count(Phase::Validation, chunks.size());

  // Execution.
  for (const auto& c : chunks) {
    jobs.push_back({c, &series.at(signature_of(*c).key(config.recursion_depth_limit)).series});
  }
  std::vector<ExecutionRecord> records = run_batch(jobs, config.exec_policy());
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (valid_count(records[i]) >= config.min_valid_outputs) alive.push_back(i);
  }
  count(Phase::Execution, alive.size());

  auto keep_if = [&](auto pred) {
    std::vector<std::size_t> next;
    for (std::size_t i : alive) {
      if (pred(i)) next.push_back(i);
    }
    alive = std::move(next);
  };
  if (config.enabled("identity")) {
    keep_if([&](std::size_t i) { return !is_identity(records[i], *jobs[i].chunk, *jobs[i].inputs); });
  }
  count(Phase::Identity, alive.size());
  if (config.enabled("equality")) {
    keep_if([&](std::size_t i) { return !is_constant(records[i]); });
  }
  count(Phase::Equality, alive.size());

  // Comparison.
  std::vector<Fingerprint> fps;
  for (std::size_t i : alive) {
    const ChunkPtr& c = jobs[i].chunk;
    if (config.fingerprint_mode == "tuple") {
      fps.push_back(tuple_fingerprint(records[i], c));
    } else {
      for (const auto& o : c->outputs) fps.push_back(fingerprint(records[i], c, o.name));
    }
    if (trace) trace->compared.push_back({c, records[i]});
  }
  std::vector<SimionGroup> groups = group_by_fingerprint(fps);
  count(Phase::Comparison, distinct_chunks(groups));

  if (config.enabled("subsumption")) groups = subsume(groups);
  count(Phase::Subsumption, distinct_chunks(groups));

  if (config.enabled("type3")) {
    Type3Result r = filter_type3(groups, config.type3_threshold);
    groups = std::move(r.groups);
    classes.insert(classes.end(), r.classes.begin(), r.classes.end());
  }
  count(Phase::Type3Clone, distinct_chunks(groups));

  DetectionResult result = assemble_result(std::move(groups), std::move(classes), counts);
  check_invariants(result, config);
  return result;
}

void check_invariants(const DetectionResult& result, const PipelineConfig& config) {
  const auto& rows = result.phase_stats.rows;
  if (rows.size() != kPhaseCount) throw InvariantViolation("phase table is incomplete");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (i == static_cast<std::size_t>(Phase::Permutation)) continue;
    if (rows[i].abs > rows[i - 1].abs) {
      throw InvariantViolation("phase " + rows[i].name + " increased the chunk count");
    }
  }
  for (const auto& row : rows) {
    if (row.rel != percent_of(row.abs, rows[0].abs)) {
      throw InvariantViolation("phase " + row.name + " percentage does not match its count");
    }
  }
  for (const auto& g : result.groups) {
    if (g.members.size() < 2) throw InvariantViolation("group with fewer than two members");
    const std::string key = signature_of(*g.members[0].chunk).key();
    for (const auto& m : g.members) {
      if (signature_of(*m.chunk).key() != key) {
        throw InvariantViolation("group mixes input signatures");
      }
    }
  }
  if (config.enabled("subsumption") && subsume(result.groups).size() != result.groups.size()) {
    throw InvariantViolation("a reported group is subsumed by another");
  }
  if (config.enabled("type3")) {
    for (const auto& g : result.groups) {
      for (std::size_t a = 0; a < g.members.size(); ++a) {
        for (std::size_t b = a + 1; b < g.members.size(); ++b) {
          if (stmt_edit_distance(*g.members[a].chunk, *g.members[b].chunk) <= config.type3_threshold) {
            throw InvariantViolation("group keeps a type-3 clone pair");
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Statistics

int whole_percent(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0;
  return static_cast<int>(std::lround(100.0 * static_cast<double>(part) / static_cast<double>(whole)));
}

StrategyStats compute_stats(const Corpus& corpus, Strategy strategy, const PipelineConfig& config) {
  StrategyStats s;
  s.strategy = strategy;
  s.sloc = corpus.sloc;
  for (ExternCategory c : {ExternCategory::io, ExternCategory::net, ExternCategory::db, ExternCategory::ui}) {
    s.extern_calls[std::string(category_name(c))] = 0;
  }
  for (const auto& m : corpus.modules) {
    for (const auto& c : extract_chunks(m, strategy, config.min_window)) {
      ++s.chunks;
      if (!has_generator(signature_of(c), config.recursion_depth_limit)) ++s.no_input;
      if (c.references_project_types) ++s.project_types;
      for (ExternCategory cat : c.calls_extern) ++s.extern_calls[std::string(category_name(cat))];
      if (!validate_chunk(c)) ++s.validated;
    }
  }
  s.per_sloc = s.sloc == 0 ? 0.0 : std::round(100.0 * static_cast<double>(s.chunks) / static_cast<double>(s.sloc)) / 100.0;
  s.no_input_pct = whole_percent(s.no_input, s.chunks);
  s.project_types_pct = whole_percent(s.project_types, s.chunks);
  for (const auto& [cat, n] : s.extern_calls) s.extern_pct[cat] = whole_percent(n, s.chunks);
  s.validated_pct = whole_percent(s.validated, s.chunks);
  return s;
}

ChunkCount count_chunks(const Corpus& corpus, Strategy strategy, std::size_t min_window) {
  ChunkCount c;
  for (const auto& m : corpus.modules) c.total += extract_chunks(m, strategy, min_window).size();
  c.per_sloc = corpus.sloc == 0
                   ? 0.0
                   : std::round(100.0 * static_cast<double>(c.total) / static_cast<double>(corpus.sloc)) / 100.0;
  return c;
}

}  // namespace simion

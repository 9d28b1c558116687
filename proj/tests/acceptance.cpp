// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "simion/cli.hpp"
#include "simion/lang.hpp"
#include "simion/pipeline.hpp"
#include "simion/report.hpp"

using namespace simion;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SIMION_FIXTURES;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the command-line front end in-process.
int cli(std::vector<std::string> args, std::string& out) {
  args.insert(args.begin(), "simion");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  int rc = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  if (rc != 0) out += e.str();
  return rc;
}

std::vector<std::size_t> row_counts(const DetectionResult& r) {
  std::vector<std::size_t> out;
  for (const auto& row : r.phase_stats.rows) out.push_back(row.abs);
  return out;
}

std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::size_t row_index(const std::string& name) {
  for (std::size_t i = 0; i < kPhaseCount; ++i) {
    if (phase_name(static_cast<Phase>(i)) == name) return i;
  }
  return kPhaseCount;
}

std::map<std::string, std::string> sources_in(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".mlg") out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

// ---------------------------------------------------------------------------

Verdict recall_on_known_simions() {
  Verdict v;
  const fs::path dir = kFixtures / "info1";
  nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));

  auto start = std::chrono::steady_clock::now();
  std::string out;
  int rc = cli({"detect", dir.string(), "--strategy", "method"}, out);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(rc == 0, "detect exited with " + std::to_string(rc));
  if (rc != 0) return v;
  Report report = report_from_json(out);

  std::size_t pairs = 0;
  std::size_t found = 0;
  std::size_t covering = 0;
  for (const auto& g : manifest.at("groups")) {
    std::vector<std::pair<std::string, std::string>> expected;
    for (const auto& m : g.at("members")) {
      expected.emplace_back(m.at("file").get<std::string>(), m.at("function").get<std::string>());
    }
    auto in_group = [](const ReportGroup& rg, const std::pair<std::string, std::string>& m) {
      return std::any_of(rg.members.begin(), rg.members.end(), [&](const ReportMember& x) {
        return x.file == m.first && x.function == m.second;
      });
    };
    for (const auto& rg : report.groups) {
      if (std::all_of(expected.begin(), expected.end(), [&](const auto& m) { return in_group(rg, m); })) {
        ++covering;
      }
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      for (std::size_t j = i + 1; j < expected.size(); ++j) {
        ++pairs;
        bool together = std::any_of(report.groups.begin(), report.groups.end(), [&](const ReportGroup& rg) {
          return in_group(rg, expected[i]) && in_group(rg, expected[j]);
        });
        if (together) ++found;
      }
    }
    v.require(expected.size() == 12, "manifest group has " + std::to_string(expected.size()) + " members");
  }
  v.require(covering >= 1, "no group covers every implementation");
  v.require(pairs > 0 && found == pairs,
            "pairs found " + std::to_string(found) + "/" + std::to_string(pairs));
  v.require(seconds < 60.0, "runtime " + two_decimals(seconds) + " s");
  v.detail = (v.pass ? "" : v.detail + " | ") + "covering groups " + std::to_string(covering) +
             ", pairs " + std::to_string(found) + "/" + std::to_string(pairs) + ", " +
             two_decimals(seconds) + " s";
  return v;
}

Verdict strategy_ordering() {
  Verdict v;
  Corpus c = load_corpus(kFixtures / "mixed");
  std::size_t sliding = count_chunks(c, Strategy::sliding, 5).total;
  std::size_t intent = count_chunks(c, Strategy::intent, 5).total;
  std::size_t method = count_chunks(c, Strategy::method, 5).total;
  double ratio = method ? static_cast<double>(sliding) / static_cast<double>(method) : 0.0;
  v.require(c.sloc >= 1000, "corpus has only " + std::to_string(c.sloc) + " SLOC");
  v.require(sliding > intent && intent > method, "ordering violated");
  v.require(ratio >= 5.0, "sliding/method ratio below 5");
  v.detail = (v.pass ? "" : v.detail + " | ") + "SLOC " + std::to_string(c.sloc) + ", sliding " +
             std::to_string(sliding) + " > intent " + std::to_string(intent) + " > method " +
             std::to_string(method) + ", ratio " + two_decimals(ratio);
  return v;
}

Verdict sliding_count_exactness() {
  Verdict v;
  const int n = 20;
  const int w = 10;
  std::string src = "fn straight(x: int) -> void {\n";
  for (int i = 0; i < n; ++i) src += "  x = x + " + std::to_string(i + 1) + ";\n";
  src += "}\n";
  Corpus c = corpus_from_sources({{"straight.mlg", src}});
  std::size_t got = count_chunks(c, Strategy::sliding, w).total;
  // Windows of length k start at n - k + 1 positions.
  std::size_t expected = 0;
  for (int k = w; k <= n; ++k) expected += static_cast<std::size_t>(n - k + 1);
  v.require(got == expected, "got " + std::to_string(got));
  v.detail = (v.pass ? "" : v.detail + " | ") + std::to_string(got) + " chunks, closed form " +
             std::to_string(expected);
  return v;
}

Verdict planted_filters() {
  Verdict v;
  const fs::path dir = kFixtures / "planted";
  const auto baseline = sources_in(dir / "baseline");

  struct Case {
    std::string file;
    std::string phase;
    std::set<std::string> disabled;
  };
  // The swap's permuted variant is a projection as well; switching the
  // permutation stage off keeps the experiment to a single chunk.
  const std::vector<Case> cases = {
      {"identity.mlg", "Identity", {}},
      {"swap.mlg", "Identity", {"permutation"}},
      {"constant.mlg", "Equality", {}},
      {"infinite_loop.mlg", "Execution", {}},
  };
  std::string summary;
  for (const auto& c : cases) {
    PipelineConfig cfg;
    cfg.disabled_filters = c.disabled;
    auto base_rows = row_counts(run_pipeline(corpus_from_sources(baseline), cfg));
    auto sources = baseline;
    sources[c.file] = read_file(dir / c.file);
    auto rows = row_counts(run_pipeline(corpus_from_sources(sources), cfg));
    const std::size_t removed_at = row_index(c.phase);
    bool ok = rows.size() == base_rows.size();
    for (std::size_t i = 0; ok && i < rows.size(); ++i) {
      const std::size_t want = base_rows[i] + (i < removed_at ? 1 : 0);
      ok = rows[i] == want;
    }
    v.require(ok, c.file + " not removed exactly at " + c.phase);
    summary += (summary.empty() ? "" : ", ") + c.file + "->" + c.phase;
  }
  v.detail = (v.pass ? "" : v.detail + " | ") + summary;
  return v;
}

// Edit distance over trimmed body lines; each statement in these fixtures
// sits on its own line.
std::size_t line_distance(const std::string& a, const std::string& b) {
  auto lines = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      auto first = line.find_first_not_of(' ');
      if (first == std::string::npos) continue;
      line = line.substr(first);
      if (line.rfind("fn ", 0) == 0) continue;  // headers differ by name only
      out.push_back(line);
    }
    return out;
  };
  auto x = lines(a);
  auto y = lines(b);
  std::vector<std::size_t> prev(y.size() + 1);
  std::vector<std::size_t> cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

Verdict clone_filters() {
  Verdict v;
  PipelineConfig cfg;
  v.require(cfg.type3_threshold == 5, "threshold is not 5");

  const fs::path t15 = kFixtures / "clones" / "type15";
  DetectionResult r = run_pipeline(load_corpus(t15), cfg);
  auto rows = row_counts(r);
  const std::size_t extraction = rows[row_index("ChunkExtraction")];
  const std::size_t after = rows[row_index("Type15Clone")];
  const std::size_t inputgen = rows[row_index("InputGen")];
  std::size_t copies = 0;
  for (const auto& cls : r.clone_classes) {
    if (cls.kind == CloneKind::type15) copies = std::max(copies, cls.members.size());
  }
  v.require(extraction == 4 && after == 2 && inputgen == 2,
            "type-1.5 rows " + std::to_string(extraction) + "->" + std::to_string(after));
  v.require(copies == 3, "type-1.5 class has " + std::to_string(copies) + " members");

  std::string detail = "3 copies -> 1 survivor";
  for (const auto& [name, distance, survives] :
       std::vector<std::tuple<std::string, std::size_t, bool>>{{"d4", 4, false}, {"d6", 6, true}}) {
    const fs::path dir = kFixtures / "clones" / name;
    std::size_t measured = line_distance(read_file(dir / "original.mlg"), read_file(dir / "edited.mlg"));
    v.require(measured == distance, name + " fixture distance is " + std::to_string(measured));
    DetectionResult d = run_pipeline(load_corpus(dir), cfg);
    auto drows = row_counts(d);
    const bool simion_pair = drows[row_index("Subsumption")] == 2;
    v.require(simion_pair, name + " pair is not a simion before the type-3 filter");
    v.require(d.groups.size() == (survives ? 1u : 0u), name + " pair " + (survives ? "removed" : "kept"));
    detail += ", distance " + std::to_string(measured) + (d.groups.empty() ? " removed" : " kept");
  }
  v.detail = (v.pass ? "" : v.detail + " | ") + detail;
  return v;
}

// Raw equality used by the brute-force oracle: structural, NaN equals NaN,
// signed zeros equal, record type names ignored.
bool raw_equal(const Value& a, const Value& b) {
  if (a.is_int() || b.is_int()) return a.is_int() && b.is_int() && a.as_int() == b.as_int();
  if (a.is_float() || b.is_float()) {
    if (!a.is_float() || !b.is_float()) return false;
    double x = a.as_float();
    double y = b.as_float();
    return (std::isnan(x) && std::isnan(y)) || x == y;
  }
  if (a.is_bool() || b.is_bool()) return a.is_bool() && b.is_bool() && a.as_bool() == b.as_bool();
  if (a.is_string() || b.is_string()) return a.is_string() && b.is_string() && a.as_string() == b.as_string();
  if (a.is_array() || b.is_array()) {
    if (!a.is_array() || !b.is_array()) return false;
    const auto& x = a.as_array().items;
    const auto& y = b.as_array().items;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!raw_equal(x[i], y[i])) return false;
    }
    return true;
  }
  if (a.is_record() && b.is_record()) {
    const auto& x = a.as_record().fields;
    const auto& y = b.as_record().fields;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!raw_equal(x[i], y[i])) return false;
    }
    return true;
  }
  return a.is_unset() && b.is_unset();
}

struct Item {
  const ComparedChunk* compared;
  std::size_t slot;
};

bool same_behaviour(const Item& a, const Item& b) {
  if (signature_of(*a.compared->chunk).key() != signature_of(*b.compared->chunk).key()) return false;
  const auto& ra = a.compared->record.runs;
  const auto& rb = b.compared->record.runs;
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].input_index != rb[i].input_index) return false;
    const bool oka = ra[i].outcome.ok();
    if (oka != rb[i].outcome.ok()) return false;
    if (oka && !raw_equal(ra[i].outcome.outputs[a.slot], rb[i].outcome.outputs[b.slot])) return false;
  }
  return true;
}

// Number of disagreements between digest grouping and pairwise comparison.
std::size_t oracle_discrepancies(const Corpus& corpus, PipelineConfig cfg, std::size_t& surviving) {
  cfg.disabled_filters.insert("subsumption");
  cfg.disabled_filters.insert("type3");
  PipelineTrace trace;
  DetectionResult r = run_pipeline(corpus, cfg, &trace);
  surviving = trace.compared.size();

  std::vector<Item> items;
  for (const auto& c : trace.compared) {
    for (std::size_t s = 0; s < c.chunk->outputs.size(); ++s) items.push_back({&c, s});
  }
  // Brute-force classes.
  std::vector<int> cls(items.size(), -1);
  int classes = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = classes;
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (cls[j] < 0 && same_behaviour(items[i], items[j])) cls[j] = classes;
    }
    ++classes;
  }
  std::vector<std::set<ChunkOrigin>> expected(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < items.size(); ++i) {
    expected[static_cast<std::size_t>(cls[i])].insert(items[i].compared->chunk->origin);
  }
  std::set<std::set<ChunkOrigin>> want;
  for (auto& e : expected) {
    if (e.size() >= 2) want.insert(e);
  }

  std::size_t bad = 0;
  std::set<std::set<ChunkOrigin>> got;
  for (const auto& g : r.groups) {
    std::set<ChunkOrigin> origins;
    for (const auto& m : g.members) origins.insert(m.chunk->origin);
    got.insert(origins);
    // Members must behave identically pairwise.
    for (std::size_t i = 1; i < g.members.size(); ++i) {
      auto find_item = [&](const GroupMember& m) {
        for (const auto& it : items) {
          if (it.compared->chunk == m.chunk && it.compared->chunk->outputs[it.slot].name == m.output_var) {
            return it;
          }
        }
        return Item{nullptr, 0};
      };
      Item a = find_item(g.members[0]);
      Item b = find_item(g.members[i]);
      if (!a.compared || !b.compared || !same_behaviour(a, b)) ++bad;
    }
  }
  for (const auto& w : want) bad += got.count(w) ? 0 : 1;
  for (const auto& g : got) bad += want.count(g) ? 0 : 1;
  return bad;
}

Verdict oracle_equivalence() {
  Verdict v;
  std::vector<std::pair<std::string, Corpus>> corpora;
  corpora.emplace_back("info1", load_corpus(kFixtures / "info1"));
  corpora.emplace_back("mixed", load_corpus(kFixtures / "mixed"));
  corpora.emplace_back("planted", load_corpus(kFixtures / "planted"));
  corpora.emplace_back("clones", load_corpus(kFixtures / "clones"));
  std::size_t total_bad = 0;
  std::size_t runs = 0;
  for (const auto& [name, corpus] : corpora) {
    for (std::uint64_t seed : {0u, 1u}) {
      for (Strategy s : {Strategy::method, Strategy::intent}) {
        PipelineConfig cfg;
        cfg.seed = seed;
        cfg.strategy = s;
        std::size_t surviving = 0;
        std::size_t bad = oracle_discrepancies(corpus, cfg, surviving);
        if (surviving > 200) continue;
        ++runs;
        total_bad += bad;
        v.require(bad == 0, name + "/" + std::string(strategy_name(s)) + " seed " + std::to_string(seed) +
                                ": " + std::to_string(bad) + " discrepancies");
      }
    }
  }
  v.require(runs >= 6, "only " + std::to_string(runs) + " corpora within 200 chunks");
  v.detail = (v.pass ? "" : v.detail + " | ") + std::to_string(runs) + " runs, " +
             std::to_string(total_bad) + " discrepancies";
  return v;
}

Verdict determinism() {
  Verdict v;
  const std::string mixed = (kFixtures / "mixed").string();
  std::string first;
  std::string second;
  v.require(cli({"detect", mixed, "--seed", "5"}, first) == 0, "first run failed");
  v.require(cli({"detect", mixed, "--seed", "5"}, second) == 0, "second run failed");
  v.require(!first.empty() && first == second, "reports differ");
  // A configuration whose report carries groups.
  std::string with_groups;
  std::string again;
  cli({"detect", mixed, "--disable-filter", "type3"}, with_groups);
  cli({"detect", mixed, "--disable-filter", "type3"}, again);
  const std::size_t groups = report_from_json(with_groups).groups.size();
  v.require(groups > 0 && with_groups == again, "reports with groups differ");

  Corpus corpus = load_corpus(kFixtures / "mixed");
  std::size_t checked = 0;
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    for (Strategy s : {Strategy::method, Strategy::intent}) {
      PipelineConfig cfg;
      cfg.seed = seed;
      cfg.strategy = s;
      try {
        check_invariants(run_pipeline(corpus, cfg), cfg);
        ++checked;
      } catch (const InvariantViolation& e) {
        v.require(false, "seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  }
  v.detail = (v.pass ? "" : v.detail + " | ") + "identical " + std::to_string(first.size()) +
             "-byte reports (and " + std::to_string(groups) + "-group reports), invariants hold for " + std::to_string(checked) + " seeded runs";
  return v;
}

Verdict phase_stats_structure() {
  Verdict v;
  std::vector<std::pair<std::string, DetectionResult>> results;
  for (const char* dir : {"info1", "mixed", "planted", "clones"}) {
    Corpus c = load_corpus(kFixtures / dir);
    for (Strategy s : {Strategy::method, Strategy::intent}) {
      PipelineConfig cfg;
      cfg.strategy = s;
      results.emplace_back(std::string(dir) + "/" + std::string(strategy_name(s)), run_pipeline(c, cfg));
    }
  }
  const std::size_t perm = row_index("Permutation");
  double max_perm = 0.0;
  for (const auto& [name, r] : results) {
    const auto& rows = r.phase_stats.rows;
    v.require(rows.size() == kPhaseCount, name + ": wrong row count");
    const double base = static_cast<double>(rows.front().abs);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && i != perm && rows[i].abs > rows[i - 1].abs) {
        v.require(false, name + ": " + rows[i].name + " increases");
      }
      const double expected = base == 0.0 ? 0.0 : std::round(static_cast<double>(rows[i].abs) * 10000.0 / base) / 100.0;
      if (two_decimals(expected) != two_decimals(rows[i].rel)) {
        v.require(false, name + ": " + rows[i].name + " rel " + two_decimals(rows[i].rel));
      }
    }
    max_perm = std::max(max_perm, rows[perm].rel);
  }
  v.require(max_perm > 100.0, "no run shows permutation growth");
  v.detail = (v.pass ? "" : v.detail + " | ") + std::to_string(results.size()) +
             " runs, largest Permutation row " + two_decimals(max_perm) + "%";
  return v;
}

Verdict stats_shape() {
  Verdict v;
  const fs::path dir = kFixtures / "stats";
  nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  std::string out;
  int rc = cli({"stats", dir.string(), "--strategy", manifest.at("strategy").get<std::string>()}, out);
  v.require(rc == 0, "stats exited with " + std::to_string(rc));
  if (rc != 0) return v;
  nlohmann::json row = nlohmann::json::parse(out).at(0);
  const double n = manifest.at("chunks").get<double>();
  auto pct = [&](double part) { return static_cast<int>(std::lround(100.0 * part / n)); };

  const double k = manifest.at("opaque_input_chunks").get<double>();
  v.require(row.at("chunks").get<double>() == n, "chunk total " + row.at("chunks").dump());
  v.require(row.at("no_input_pct").get<int>() == pct(k), "no-input " + row.at("no_input_pct").dump() + "%");
  std::string detail = "N=" + std::to_string(static_cast<int>(n)) + " no-input " + std::to_string(pct(k)) + "%";
  for (const auto& [cat, m] : manifest.at("extern_chunks").items()) {
    const int want = pct(m.get<double>());
    const int got = row.at("extern_pct").at(cat).get<int>();
    v.require(got == want, cat + " " + std::to_string(got) + "% (expected " + std::to_string(want) + "%)");
    detail += ", " + cat + " " + std::to_string(got) + "%";
  }
  v.detail = (v.pass ? "" : v.detail + " | ") + detail;
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"recall on known simions", recall_on_known_simions},
      {"strategy ordering", strategy_ordering},
      {"sliding-window count exactness", sliding_count_exactness},
      {"filter correctness on planted chunks", planted_filters},
      {"clone filters", clone_filters},
      {"oracle equivalence", oracle_equivalence},
      {"determinism", determinism},
      {"phase statistics structure", phase_stats_structure},
      {"stats shape", stats_shape},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

#include "simion/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simion/pipeline.hpp"
#include "simion/report.hpp"

namespace simion {

namespace {

struct Options {
  std::string corpus;
  std::optional<std::string> strategy;
  std::optional<std::size_t> min_window;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config_file;
  std::optional<std::string> format;
  std::vector<std::string> disabled;
  std::optional<std::string> out_path;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("corpus", o.corpus, "Directory of .mlg files")->required();
  cmd->add_option("--strategy", o.strategy, "sliding, intent or method")
      ->check(CLI::IsMember({"sliding", "intent", "method"}));
  cmd->add_option("--min-window", o.min_window, "Sliding-window minimum length");
  cmd->add_option("--config", o.config_file, "key = value configuration file");
  cmd->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--out", o.out_path, "Write the report here instead of stdout");
}

PipelineConfig build_config(const Options& o) {
  PipelineConfig c = o.config_file ? load_config(*o.config_file) : PipelineConfig{};
  if (o.strategy) apply_setting(c, "strategy", *o.strategy);
  if (o.min_window) c.min_window = *o.min_window;
  if (o.seed) c.seed = *o.seed;
  if (o.format) c.report_format = *o.format;
  for (const auto& f : o.disabled) {
    if (filter_names().count(f) == 0) throw ConfigError("unknown filter '" + f + "'");
    c.disabled_filters.insert(f);
  }
  validate_config(c);
  return c;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (!o.out_path) {
    out << text;
    return;
  }
  std::ofstream f(*o.out_path, std::ios::binary);
  if (!f || !(f << text)) throw ConfigError("cannot write " + *o.out_path);
}

std::vector<Strategy> chosen_strategies(const Options& o, const PipelineConfig& c) {
  if (o.strategy) return {c.strategy};
  return {Strategy::sliding, Strategy::intent, Strategy::method};
}

std::string count_report(const Corpus& corpus, const std::vector<Strategy>& strategies,
                         const PipelineConfig& c) {
  std::vector<std::pair<Strategy, ChunkCount>> rows;
  for (Strategy s : strategies) rows.emplace_back(s, count_chunks(corpus, s, c.min_window));
  if (c.report_format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& [s, n] : rows) {
      j.push_back({{"strategy", std::string(strategy_name(s))},
                   {"total", n.total},
                   {"sloc", corpus.sloc},
                   {"per_sloc", n.per_sloc}});
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  char line[96];
  std::snprintf(line, sizeof(line), "%-8s %8s %8s\n", "Strategy", "Chunks", "Per SLOC");
  os << line;
  for (const auto& [s, n] : rows) {
    std::snprintf(line, sizeof(line), "%-8s %8zu %8.2f\n", std::string(strategy_name(s)).c_str(),
                  n.total, n.per_sloc);
    os << line;
  }
  return os.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"simion: detects functionally similar MiniLang code"};
  app.require_subcommand(1);
  Options o;

  auto* detect = app.add_subcommand("detect", "Run the detection pipeline");
  add_common(detect, o);
  detect->add_option("--seed", o.seed, "Input generation seed");
  detect->add_option("--disable-filter", o.disabled, "Switch off a filter (repeatable)");

  auto* stats = app.add_subcommand("stats", "Chunk statistics per strategy");
  add_common(stats, o);

  auto* count = app.add_subcommand("count", "Chunk totals per strategy");
  add_common(count, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    PipelineConfig config = build_config(o);
    Corpus corpus = load_corpus(o.corpus);
    const bool json = config.report_format == "json";
    if (detect->parsed()) {
      DetectionResult result = run_pipeline(corpus, config);
      check_invariants(result, config);
      Report report = make_report(result, config, corpus);
      emit(o, json ? to_json(report) : to_table(report), out);
    } else if (stats->parsed()) {
      std::vector<StrategyStats> rows;
      for (Strategy s : chosen_strategies(o, config)) rows.push_back(compute_stats(corpus, s, config));
      emit(o, json ? stats_to_json(rows) : stats_to_table(rows), out);
    } else {
      emit(o, count_report(corpus, chosen_strategies(o, config), config), out);
    }
    return 0;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const CorpusError& e) {
    err << "corpus error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace simion

#include "simion/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace simion {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

Report make_report(const DetectionResult& result, const PipelineConfig& config, const Corpus& corpus) {
  Report r;
  r.config = config;
  r.config.workers = 0;
  r.phase_stats = result.phase_stats.rows;
  for (const auto& g : result.groups) {
    ReportGroup rg{g.digest.hex(), {}};
    for (const auto& m : g.members) {
      const Chunk& c = *m.chunk;
      rg.members.push_back(ReportMember{c.id, c.origin.file, c.origin.function, c.origin.start_line,
                                        c.origin.end_line, m.output_var, c.variant.str()});
    }
    r.groups.push_back(std::move(rg));
  }
  for (const auto& c : result.clone_classes) {
    r.clone_classes.push_back(
        ReportCloneClass{std::string(clone_kind_name(c.kind)), c.representative, c.members});
  }
  r.stats["files"] = static_cast<double>(corpus.modules.size());
  r.stats["sloc"] = static_cast<double>(corpus.sloc);
  r.stats["groups"] = static_cast<double>(r.groups.size());
  r.stats["simion_chunks"] = static_cast<double>(result.phase_stats.rows.back().abs);
  r.stats["clone_classes"] = static_cast<double>(r.clone_classes.size());
  return r;
}

namespace {

ordered float_pool_json(const std::vector<double>& pool) {
  ordered out = ordered::array();
  for (double d : pool) {
    if (std::isnan(d)) {
      out.push_back("nan");
    } else {
      out.push_back(d);
    }
  }
  return out;
}

ordered config_json(const PipelineConfig& c) {
  ordered j;
  j["strategy"] = std::string(strategy_name(c.strategy));
  j["min_window"] = c.min_window;
  j["seed"] = c.seed;
  j["max_inputs"] = c.max_inputs;
  j["max_permutations"] = c.max_permutations;
  j["batch_size"] = c.batch_size;
  j["step_budget"] = c.step_budget;
  j["min_valid_outputs"] = c.min_valid_outputs;
  j["type3_threshold"] = c.type3_threshold;
  j["disabled_filters"] = c.disabled_filters;
  j["report_format"] = c.report_format;
  j["fingerprint_mode"] = c.fingerprint_mode;
  j["recursion_depth_limit"] = c.recursion_depth_limit;
  j["array_sizes"] = c.array_sizes;
  j["int_pool"] = c.int_pool;
  j["float_pool"] = float_pool_json(c.float_pool);
  j["bool_pool"] = c.bool_pool;
  j["string_pool"] = c.string_pool;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  auto strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (!strategy) throw std::runtime_error("bad strategy in report");
  c.strategy = *strategy;
  c.min_window = j.at("min_window").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_inputs = j.at("max_inputs").get<std::size_t>();
  c.max_permutations = j.at("max_permutations").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.step_budget = j.at("step_budget").get<std::uint64_t>();
  c.min_valid_outputs = j.at("min_valid_outputs").get<std::size_t>();
  c.type3_threshold = j.at("type3_threshold").get<std::size_t>();
  c.disabled_filters = j.at("disabled_filters").get<std::set<std::string>>();
  c.report_format = j.at("report_format").get<std::string>();
  c.fingerprint_mode = j.at("fingerprint_mode").get<std::string>();
  c.recursion_depth_limit = j.at("recursion_depth_limit").get<int>();
  c.array_sizes = j.at("array_sizes").get<std::vector<std::size_t>>();
  c.int_pool = j.at("int_pool").get<std::vector<std::int64_t>>();
  c.float_pool.clear();
  for (const auto& v : j.at("float_pool")) {
    c.float_pool.push_back(v.is_string() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
  }
  c.bool_pool = j.at("bool_pool").get<std::vector<bool>>();
  c.string_pool = j.at("string_pool").get<std::vector<std::string>>();
  return c;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string to_json(const Report& r) {
  ordered j;
  j["config"] = config_json(r.config);
  j["phase_stats"] = ordered::array();
  for (const auto& row : r.phase_stats) {
    j["phase_stats"].push_back(ordered{{"name", row.name}, {"abs", row.abs}, {"rel", row.rel}});
  }
  j["groups"] = ordered::array();
  for (const auto& g : r.groups) {
    ordered members = ordered::array();
    for (const auto& m : g.members) {
      members.push_back(ordered{{"chunk", m.chunk},
                                {"file", m.file},
                                {"function", m.function},
                                {"start_line", m.start_line},
                                {"end_line", m.end_line},
                                {"output_var", m.output_var},
                                {"variant", m.variant}});
    }
    j["groups"].push_back(ordered{{"digest", g.digest}, {"members", members}});
  }
  j["clone_classes"] = ordered::array();
  for (const auto& c : r.clone_classes) {
    j["clone_classes"].push_back(
        ordered{{"kind", c.kind}, {"representative", c.representative}, {"members", c.members}});
  }
  j["stats"] = ordered::object();
  for (const auto& [k, v] : r.stats) j["stats"][k] = v;
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  json j = json::parse(text);
  Report r;
  r.config = config_from_json(j.at("config"));
  for (const auto& row : j.at("phase_stats")) {
    r.phase_stats.push_back(PhaseRow{row.at("name").get<std::string>(), row.at("abs").get<std::size_t>(),
                                     row.at("rel").get<double>()});
  }
  for (const auto& g : j.at("groups")) {
    ReportGroup rg{g.at("digest").get<std::string>(), {}};
    for (const auto& m : g.at("members")) {
      rg.members.push_back(ReportMember{
          m.at("chunk").get<std::string>(), m.at("file").get<std::string>(),
          m.at("function").get<std::string>(), m.at("start_line").get<int>(),
          m.at("end_line").get<int>(), m.at("output_var").get<std::string>(),
          m.at("variant").get<std::string>()});
    }
    r.groups.push_back(std::move(rg));
  }
  for (const auto& c : j.at("clone_classes")) {
    r.clone_classes.push_back(ReportCloneClass{c.at("kind").get<std::string>(),
                                               c.at("representative").get<std::string>(),
                                               c.at("members").get<std::vector<std::string>>()});
  }
  for (const auto& [k, v] : j.at("stats").items()) r.stats[k] = v.get<double>();
  return r;
}

std::string to_table(const Report& r) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof(line), "%-18s %10s %10s\n", "Phase", "Abs", "Rel");
  os << line;
  for (const auto& row : r.phase_stats) {
    std::snprintf(line, sizeof(line), "%-18s %10zu %10s\n", row.name.c_str(), row.abs,
                  fixed2(row.rel).c_str());
    os << line;
  }
  os << "\n" << r.groups.size() << " simion group(s), strategy "
     << strategy_name(r.config.strategy) << "\n";
  for (std::size_t i = 0; i < r.groups.size(); ++i) {
    const auto& g = r.groups[i];
    os << "\n#" << (i + 1) << " " << g.digest << " (" << g.members.size() << " members)\n";
    for (const auto& m : g.members) {
      os << "  " << m.file << ":" << m.start_line << "-" << m.end_line << "  " << m.function
         << "  -> " << m.output_var;
      if (m.variant != "base") os << "  [" << m.variant << "]";
      os << "\n";
    }
  }
  return os.str();
}

std::string stats_to_json(const std::vector<StrategyStats>& stats) {
  ordered out = ordered::array();
  for (const auto& s : stats) {
    ordered j;
    j["strategy"] = std::string(strategy_name(s.strategy));
    j["chunks"] = s.chunks;
    j["sloc"] = s.sloc;
    j["chunks_per_sloc"] = s.per_sloc;
    j["no_input"] = s.no_input;
    j["no_input_pct"] = s.no_input_pct;
    j["project_types"] = s.project_types;
    j["project_types_pct"] = s.project_types_pct;
    j["extern_calls"] = s.extern_calls;
    j["extern_pct"] = s.extern_pct;
    j["validated"] = s.validated;
    j["validated_pct"] = s.validated_pct;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string stats_to_table(const std::vector<StrategyStats>& stats) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %8s %9s %9s %9s %5s %5s %5s %5s %10s\n", "Strategy",
                "Chunks", "Per SLOC", "No input", "Proj.type", "io", "net", "db", "ui", "Validated");
  os << line;
  for (const auto& s : stats) {
    auto pct = [](int v) { return std::to_string(v) + "%"; };
    std::snprintf(line, sizeof(line), "%-8s %8zu %9s %9s %9s %5s %5s %5s %5s %10s\n",
                  std::string(strategy_name(s.strategy)).c_str(), s.chunks, fixed2(s.per_sloc).c_str(),
                  pct(s.no_input_pct).c_str(), pct(s.project_types_pct).c_str(),
                  pct(s.extern_pct.at("io")).c_str(), pct(s.extern_pct.at("net")).c_str(),
                  pct(s.extern_pct.at("db")).c_str(), pct(s.extern_pct.at("ui")).c_str(),
                  pct(s.validated_pct).c_str());
    os << line;
  }
  return os.str();
}

}  // namespace simion

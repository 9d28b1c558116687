#pragma once

// Serializable detection report: JSON (round-trips exactly) and a text
// table laid out like a phase-survival table.

#include <map>
#include <string>
#include <vector>

#include "simion/pipeline.hpp"

namespace simion {

struct ReportMember {
  std::string chunk;
  std::string file;
  std::string function;
  int start_line = 0;
  int end_line = 0;
  std::string output_var;
  std::string variant;

  friend bool operator==(const ReportMember&, const ReportMember&) = default;
};

struct ReportGroup {
  std::string digest;
  std::vector<ReportMember> members;

  friend bool operator==(const ReportGroup&, const ReportGroup&) = default;
};

struct ReportCloneClass {
  std::string kind;
  std::string representative;
  std::vector<std::string> members;

  friend bool operator==(const ReportCloneClass&, const ReportCloneClass&) = default;
};

struct Report {
  PipelineConfig config;
  std::vector<PhaseRow> phase_stats;
  std::vector<ReportGroup> groups;
  std::vector<ReportCloneClass> clone_classes;
  std::map<std::string, double> stats;

  friend bool operator==(const Report&, const Report&) = default;
};

Report make_report(const DetectionResult& result, const PipelineConfig& config, const Corpus& corpus);

std::string to_json(const Report& report);
/// Throws std::runtime_error on malformed input.
Report report_from_json(const std::string& text);
std::string to_table(const Report& report);

std::string stats_to_json(const std::vector<StrategyStats>& stats);
std::string stats_to_table(const std::vector<StrategyStats>& stats);

}  // namespace simion

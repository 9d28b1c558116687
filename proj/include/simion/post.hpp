#pragma once

// Post-processing of simion groups and the per-phase survival table.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "simion/group.hpp"

namespace simion {

/// True if every instance of `inner` maps to a distinct instance of
/// `outer` whose span contains it.
bool covers(const SimionGroup& outer, const SimionGroup& inner);

/// Drops every group covered by another group with more members; equal
/// sizes are decided by mutual coverage, then by the smaller digest.
/// All decisions are taken against the input set, so the result is
/// independent of input order and subsume(subsume(x)) == subsume(x).
std::vector<SimionGroup> subsume(const std::vector<SimionGroup>& groups);

enum class Phase {
  ChunkExtraction,
  Type15Clone,
  Permutation,
  InputGen,
  Validation,
  Execution,
  Identity,
  Equality,
  Comparison,
  Subsumption,
  Type3Clone,
};

inline constexpr std::size_t kPhaseCount = 11;

std::string_view phase_name(Phase p);

struct PhaseRow {
  std::string name;
  std::size_t abs = 0;
  double rel = 0.0;  // percent of ChunkExtraction, two decimals

  friend bool operator==(const PhaseRow&, const PhaseRow&) = default;
};

struct PhaseStats {
  std::vector<PhaseRow> rows;  // pipeline order
};

/// round(100 * abs / base, 2); 0 when base is 0.
double percent_of(std::size_t abs, std::size_t base);

PhaseStats make_phase_stats(const std::array<std::size_t, kPhaseCount>& counts);

struct DetectionResult {
  std::vector<SimionGroup> groups;
  std::vector<CloneClass> clone_classes;
  PhaseStats phase_stats;
};

DetectionResult assemble_result(std::vector<SimionGroup> groups,
                                std::vector<CloneClass> clone_classes,
                                const std::array<std::size_t, kPhaseCount>& counts);

/// Number of distinct chunks across the groups.
std::size_t distinct_chunks(const std::vector<SimionGroup>& groups);

}  // namespace simion

#include "simion/post.hpp"

#include <cmath>
#include <functional>
#include <set>

namespace simion {

std::string_view phase_name(Phase p) {
  static constexpr std::array<std::string_view, kPhaseCount> kNames{
      "ChunkExtraction", "Type15Clone", "Permutation", "InputGen",   "Validation", "Execution",
      "Identity",        "Equality",    "Comparison",  "Subsumption", "Type3Clone"};
  return kNames[static_cast<std::size_t>(p)];
}

bool covers(const SimionGroup& outer, const SimionGroup& inner) {
  const auto& gs = inner.members;
  const auto& hs = outer.members;
  if (gs.size() > hs.size()) return false;
  // Bipartite matching by augmenting paths; groups are small.
  std::vector<int> owner(hs.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t g,
                                                                     std::vector<bool>& seen) {
    for (std::size_t h = 0; h < hs.size(); ++h) {
      if (seen[h] || !hs[h].chunk->origin.contains(gs[g].chunk->origin)) continue;
      seen[h] = true;
      if (owner[h] < 0 || augment(static_cast<std::size_t>(owner[h]), seen)) {
        owner[h] = static_cast<int>(g);
        return true;
      }
    }
    return false;
  };
  for (std::size_t g = 0; g < gs.size(); ++g) {
    std::vector<bool> seen(hs.size(), false);
    if (!augment(g, seen)) return false;
  }
  return true;
}

std::vector<SimionGroup> subsume(const std::vector<SimionGroup>& groups) {
  std::vector<SimionGroup> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const SimionGroup& G = groups[g];
    bool removed = false;
    for (std::size_t h = 0; h < groups.size() && !removed; ++h) {
      if (h == g) continue;
      const SimionGroup& H = groups[h];
      if (H.members.size() < G.members.size() || !covers(H, G)) continue;
      if (H.members.size() > G.members.size()) {
        removed = true;
      } else if (!covers(G, H)) {
        removed = true;
      } else {
        removed = H.digest < G.digest;
      }
    }
    if (!removed) out.push_back(G);
  }
  return out;
}

double percent_of(std::size_t abs, std::size_t base) {
  if (base == 0) return 0.0;
  return std::round(10000.0 * static_cast<double>(abs) / static_cast<double>(base)) / 100.0;
}

PhaseStats make_phase_stats(const std::array<std::size_t, kPhaseCount>& counts) {
  PhaseStats stats;
  for (std::size_t i = 0; i < kPhaseCount; ++i) {
    stats.rows.push_back(PhaseRow{std::string(phase_name(static_cast<Phase>(i))), counts[i],
                                  percent_of(counts[i], counts[0])});
  }
  return stats;
}

DetectionResult assemble_result(std::vector<SimionGroup> groups,
                                std::vector<CloneClass> clone_classes,
                                const std::array<std::size_t, kPhaseCount>& counts) {
  DetectionResult r;
  r.groups = std::move(groups);
  r.clone_classes = std::move(clone_classes);
  r.phase_stats = make_phase_stats(counts);
  return r;
}

std::size_t distinct_chunks(const std::vector<SimionGroup>& groups) {
  std::set<std::string> ids;
  for (const auto& g : groups) {
    for (const auto& m : g.members) ids.insert(m.chunk->id);
  }
  return ids.size();
}

}  // namespace simion

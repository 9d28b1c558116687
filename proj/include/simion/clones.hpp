#pragma once

// Syntactic clone filters: type-1.5 (identical up to consistent variable
// renaming) before the dynamic phases, type-3 (small statement edit
// distance) on the final groups.

#include <string>
#include <vector>

#include "simion/group.hpp"

namespace simion {

std::string type15_key(const Chunk& chunk);

struct Type15Result {
  std::vector<ChunkPtr> survivors;  // input order preserved
  std::vector<CloneClass> classes;
};

/// Keeps one representative per key: the lowest (file, start line).
Type15Result filter_type15(const std::vector<ChunkPtr>& chunks);

/// Levenshtein distance over per-statement normalized token strings.
std::size_t stmt_edit_distance(const Chunk& a, const Chunk& b);
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct Type3Result {
  std::vector<SimionGroup> groups;
  std::vector<CloneClass> classes;
};

/// Collapses members within `threshold` statement edits of each other
/// (transitively) to one representative; drops groups left with one member.
Type3Result filter_type3(const std::vector<SimionGroup>& groups, std::size_t threshold = 5);

}  // namespace simion

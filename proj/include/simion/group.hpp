#pragma once

#include <memory>
#include <string>
#include <vector>

#include "simion/chunking.hpp"
#include "simion/digest.hpp"

namespace simion {

using ChunkPtr = std::shared_ptr<const Chunk>;

/// One chunk projected to one of its output variables.
struct GroupMember {
  ChunkPtr chunk;
  std::string output_var;
};

/// Chunks whose output sequences share a fingerprint.
struct SimionGroup {
  Digest digest;
  std::vector<GroupMember> members;  // sorted by origin, one per origin
};

enum class CloneKind { type15, type3 };

struct CloneClass {
  CloneKind kind = CloneKind::type15;
  std::vector<std::string> members;  // chunk ids
  std::string representative;
};

std::string_view clone_kind_name(CloneKind k);

}  // namespace simion

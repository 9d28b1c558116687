#pragma once

// Dynamic comparison: discard chunks with too few valid runs, identity
// projections and constant outputs, then fingerprint each output variable
// and bucket chunks by fingerprint.

#include <string>
#include <vector>

#include "simion/exec.hpp"
#include "simion/group.hpp"

namespace simion {

std::size_t valid_count(const ExecutionRecord& record);

/// Every output equals one fixed input (per output) on all valid runs.
/// `inputs` is the series the record was produced from.
bool is_identity(const ExecutionRecord& record, const Chunk& chunk,
                 const std::vector<InputVector>& inputs);

/// All valid runs produce the same output tuple.
bool is_constant(const ExecutionRecord& record);

struct Fingerprint {
  Digest digest;
  std::string output_var;  // "*" for whole-tuple fingerprints
  ChunkPtr chunk;
};

/// MD5 over the signature key and `<input index>=<canonical value>;` for
/// every run; failed runs contribute the token `error`.
Fingerprint fingerprint(const ExecutionRecord& record, const ChunkPtr& chunk,
                        const std::string& output_var);
Fingerprint tuple_fingerprint(const ExecutionRecord& record, const ChunkPtr& chunk);

/// One group per digest shared by at least two distinct origins. Members
/// are sorted by origin and deduplicated per origin, so variants of one
/// chunk and several outputs of one chunk never pair with themselves.
std::vector<SimionGroup> group_by_fingerprint(const std::vector<Fingerprint>& fingerprints);

}  // namespace simion

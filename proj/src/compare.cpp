#include "simion/compare.hpp"

#include <algorithm>
#include <map>

namespace simion {

std::size_t valid_count(const ExecutionRecord& record) {
  return static_cast<std::size_t>(std::count_if(record.runs.begin(), record.runs.end(),
                                                [](const Run& r) { return r.outcome.ok(); }));
}

bool is_identity(const ExecutionRecord& record, const Chunk& chunk,
                 const std::vector<InputVector>& inputs) {
  std::map<std::size_t, const InputVector*> by_index;
  for (const auto& in : inputs) by_index[in.index] = &in;
  for (std::size_t out = 0; out < chunk.outputs.size(); ++out) {
    bool mapped = false;
    for (std::size_t in = 0; in < chunk.inputs.size() && !mapped; ++in) {
      if (!(chunk.inputs[in].type == chunk.outputs[out].type)) continue;
      bool all = true;
      for (const auto& run : record.runs) {
        if (!run.outcome.ok()) continue;
        auto it = by_index.find(run.input_index);
        if (it == by_index.end() ||
            !values_equal(run.outcome.outputs[out], it->second->values[in])) {
          all = false;
          break;
        }
      }
      mapped = all;
    }
    if (!mapped) return false;
  }
  return !chunk.outputs.empty();
}

bool is_constant(const ExecutionRecord& record) {
  const std::vector<Value>* first = nullptr;
  for (const auto& run : record.runs) {
    if (!run.outcome.ok()) continue;
    if (!first) {
      first = &run.outcome.outputs;
      continue;
    }
    if (first->size() != run.outcome.outputs.size()) return false;
    for (std::size_t i = 0; i < first->size(); ++i) {
      if (canonical((*first)[i]) != canonical(run.outcome.outputs[i])) return false;
    }
  }
  return true;
}

namespace {

template <typename Serialize>
Digest digest_runs(const ExecutionRecord& record, const Chunk& chunk, Serialize serialize) {
  Md5 h;
  h.update(signature_of(chunk).key());
  h.update("|");
  std::string buf;
  for (const auto& run : record.runs) {
    buf = std::to_string(run.input_index);
    buf += '=';
    if (run.outcome.ok()) {
      serialize(buf, run.outcome.outputs);
    } else {
      buf += "error";
    }
    buf += ';';
    h.update(buf);
  }
  return h.finish();
}

}  // namespace

Fingerprint fingerprint(const ExecutionRecord& record, const ChunkPtr& chunk,
                        const std::string& output_var) {
  std::size_t slot = 0;
  while (slot < chunk->outputs.size() && chunk->outputs[slot].name != output_var) ++slot;
  Digest d = digest_runs(record, *chunk, [&](std::string& buf, const std::vector<Value>& outs) {
    append_canonical(buf, outs.at(slot));
  });
  return Fingerprint{d, output_var, chunk};
}

Fingerprint tuple_fingerprint(const ExecutionRecord& record, const ChunkPtr& chunk) {
  Digest d = digest_runs(record, *chunk, [](std::string& buf, const std::vector<Value>& outs) {
    buf += '(';
    for (std::size_t i = 0; i < outs.size(); ++i) {
      if (i > 0) buf += ',';
      append_canonical(buf, outs[i]);
    }
    buf += ')';
  });
  return Fingerprint{d, "*", chunk};
}

std::vector<SimionGroup> group_by_fingerprint(const std::vector<Fingerprint>& fingerprints) {
  std::map<Digest, std::vector<const Fingerprint*>> buckets;
  for (const auto& fp : fingerprints) buckets[fp.digest].push_back(&fp);

  auto member_less = [](const Fingerprint* a, const Fingerprint* b) {
    if (auto c = a->chunk->origin <=> b->chunk->origin; c != 0) return c < 0;
    if (a->chunk->variant.exploded != b->chunk->variant.exploded) return !a->chunk->variant.exploded;
    if (a->chunk->variant.permutation != b->chunk->variant.permutation) {
      return a->chunk->variant.permutation < b->chunk->variant.permutation;
    }
    if (a->chunk->id != b->chunk->id) return a->chunk->id < b->chunk->id;
    return a->output_var < b->output_var;
  };

  std::vector<SimionGroup> groups;
  for (auto& [digest, fps] : buckets) {
    std::sort(fps.begin(), fps.end(), member_less);
    SimionGroup g{digest, {}};
    for (const Fingerprint* fp : fps) {
      if (!g.members.empty() && g.members.back().chunk->origin == fp->chunk->origin) continue;
      g.members.push_back({fp->chunk, fp->output_var});
    }
    if (g.members.size() >= 2) groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(), [](const SimionGroup& a, const SimionGroup& b) {
    if (auto c = a.members.front().chunk->origin <=> b.members.front().chunk->origin; c != 0) {
      return c < 0;
    }
    return a.digest < b.digest;
  });
  return groups;
}

}  // namespace simion

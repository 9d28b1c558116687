#pragma once

// Tree-walking interpreter for chunk closures: fresh state per input, a
// deterministic step budget instead of wall-clock timeouts, and no effects
// (every extern call is denied).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simion/group.hpp"
#include "simion/inputgen.hpp"
#include "simion/value.hpp"

namespace simion {

struct ExecPolicy {
  std::uint64_t step_budget = 100000;
  std::size_t batch_size = 20;
  int max_call_depth = 256;
  std::size_t max_length = std::size_t{1} << 20;  // strings and arrays
  std::size_t workers = 0;                        // 0 = hardware concurrency
};

enum class RunError { runtime, timeout, effect_denied };

std::string_view run_error_name(RunError e);

struct Outcome {
  std::vector<Value> outputs;  // parallel to chunk.outputs when ok
  std::optional<RunError> error;
  std::string message;  // diagnostic only, never fingerprinted

  bool ok() const { return !error.has_value(); }
};

struct Run {
  std::size_t input_index = 0;
  Outcome outcome;
};

struct ExecutionRecord {
  std::string chunk_id;
  std::vector<Run> runs;  // ordered by input index
};

/// Executes `chunk` once on `inputs` (positional, matching chunk.inputs).
Outcome execute(const Chunk& chunk, const std::vector<Value>& inputs, const ExecPolicy& policy);

/// Calls module function `name` directly; used by tests and fixtures.
Outcome call_function(const Module& module, std::string_view name,
                      const std::vector<Value>& args, const ExecPolicy& policy);

ExecutionRecord run_chunk(const Chunk& chunk, const std::vector<InputVector>& inputs,
                          const ExecPolicy& policy);

struct ExecJob {
  ChunkPtr chunk;
  const std::vector<InputVector>* inputs = nullptr;
};

/// [begin, end) index ranges of consecutive batches.
std::vector<std::pair<std::size_t, std::size_t>> partition_batches(std::size_t count,
                                                                   std::size_t batch_size);

/// Runs every job; batches go to a bounded worker pool, records come back
/// in job order. A failure inside one batch only affects that batch.
std::vector<ExecutionRecord> run_batch(const std::vector<ExecJob>& jobs, const ExecPolicy& policy);

}  // namespace simion

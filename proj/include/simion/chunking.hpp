#pragma once

// Chunk extraction: cutting statement sequences out of functions and turning
// each into a closed, independently executable unit with typed inputs and
// outputs.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "simion/ast.hpp"
#include "simion/lang.hpp"

namespace simion {

/// Name of the synthetic output that receives returned values.
inline constexpr std::string_view kReturnSlot = "__ret";

enum class ParamOrigin {
  parameter,
  outer_local,
  declared_local,  // declared in the chunk and live after it
  global_as_local,
  return_slot,
  exploded_field,
};

struct Param {
  std::string name;
  TypeRef type;
  ParamOrigin origin = ParamOrigin::parameter;
};

enum class Strategy { sliding, intent, method };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct ChunkVariant {
  bool exploded = false;
  int permutation = 0;  // 0 = identity ordering

  bool is_base() const { return !exploded && permutation == 0; }
  /// "base", "exploded", "perm3", "exploded+perm3".
  std::string str() const;
};

struct ChunkOrigin {
  std::string file;
  std::string function;
  int start_line = 0;
  int end_line = 0;

  bool contains(const ChunkOrigin& other) const {
    return file == other.file && start_line <= other.start_line && other.end_line <= end_line;
  }
  friend bool operator==(const ChunkOrigin&, const ChunkOrigin&) = default;
  friend auto operator<=>(const ChunkOrigin& a, const ChunkOrigin& b) {
    if (auto c = a.file <=> b.file; c != 0) return c;
    if (auto c = a.start_line <=> b.start_line; c != 0) return c;
    if (auto c = a.end_line <=> b.end_line; c != 0) return c;
    return a.function <=> b.function;
  }
};

struct Chunk {
  std::string id;
  ChunkOrigin origin;
  StmtList statements;  // return statements already rewritten
  std::vector<Param> inputs;
  std::vector<Param> outputs;
  Strategy strategy = Strategy::method;
  ChunkVariant variant;
  std::set<ExternCategory> calls_extern;
  bool references_project_types = false;
  std::vector<std::string> globals;  // referenced globals, re-initialized per run
  ModulePtr module;
};

/// Ordered input types; record types resolve through `module`.
struct ChunkSignature {
  std::vector<TypeRef> slots;
  ModulePtr module;

  /// Structural description with record names erased, e.g.
  /// `(int,{int,int},[string])`. Equal keys mean the same generated inputs.
  std::string key(int depth_limit = 4) const;
};

ChunkSignature signature_of(const Chunk& chunk);

struct StatementRange {
  const StmtList* block = nullptr;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct DerivedSignature {
  std::vector<Param> inputs;
  std::vector<Param> outputs;
  std::vector<std::string> globals;
  bool has_value_return = false;
};

/// Input/output parameters of a statement range:
///  - function parameters are inputs and outputs,
///  - globals are neither (they are re-initialized locals of the chunk),
///  - locals scoped inside the range are neither,
///  - locals declared before the range are inputs when read and outputs when
///    assigned,
///  - locals declared in the range and used after it are outputs.
/// A parameter or outer local whose first reference is an unconditional
/// overwrite is not an input. A range containing `return <expr>` has the
/// return slot as its only output.
DerivedSignature derive_signature(const StatementRange& range, const SymbolTable& table,
                                  const Module& module);

/// Builds a chunk for `range`, or nothing if it has no outputs.
/// `method_outputs` applies the whole-function rule: non-void functions
/// output only the return slot.
std::optional<Chunk> make_chunk(const ModulePtr& module, const SymbolTable& table,
                                const StatementRange& range, Strategy strategy,
                                bool method_outputs = false);

std::vector<Chunk> extract_method(const ModulePtr& module);
std::vector<Chunk> extract_intent(const ModulePtr& module);
std::vector<Chunk> extract_sliding(const ModulePtr& module, std::size_t min_len);
std::vector<Chunk> extract_chunks(const ModulePtr& module, Strategy strategy,
                                  std::size_t min_len);

/// `return e;` becomes `__ret = e; exit;`, `return;` becomes `exit;`.
StmtList rewrite_returns(const StmtList& stmts);
Chunk rewrite_returns(Chunk chunk);

/// Base chunk plus, when exactly one input is a record only read through
/// its fields, a variant taking one input per referenced field.
std::vector<Chunk> expand_variants(const Chunk& chunk);

enum class RejectReason { DanglingBranch, UnclosableReference };

std::string_view reject_reason_name(RejectReason r);

std::optional<RejectReason> validate_chunk(const Chunk& chunk);

/// Stable content hash of a chunk (16 hex digits).
std::string compute_chunk_id(const Chunk& chunk);

}  // namespace simion

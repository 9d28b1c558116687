#include "simion/chunking.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "simion/digest.hpp"

namespace simion {

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::sliding: return "sliding";
    case Strategy::intent: return "intent";
    case Strategy::method: return "method";
  }
  return "method";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "sliding") return Strategy::sliding;
  if (s == "intent") return Strategy::intent;
  if (s == "method") return Strategy::method;
  return std::nullopt;
}

std::string ChunkVariant::str() const {
  std::string out;
  if (exploded) out = "exploded";
  if (permutation > 0) {
    if (!out.empty()) out += "+";
    out += "perm" + std::to_string(permutation);
  }
  return out.empty() ? "base" : out;
}

std::string_view reject_reason_name(RejectReason r) {
  return r == RejectReason::DanglingBranch ? "DanglingBranch" : "UnclosableReference";
}

// ---------------------------------------------------------------------------
// Signatures

namespace {

void append_type_key(std::string& out, const TypeRef& t, const Module* module, int depth,
                     int limit) {
  switch (t.kind()) {
    case TypeRef::Kind::Array:
      out += '[';
      append_type_key(out, t.element(), module, depth, limit);
      out += ']';
      return;
    case TypeRef::Kind::Record: {
      const RecordDecl* rec = module ? module->find_record(t.name()) : nullptr;
      if (!rec || depth >= limit) {
        out += "{!}";
        return;
      }
      out += '{';
      for (std::size_t i = 0; i < rec->fields.size(); ++i) {
        if (i > 0) out += ',';
        append_type_key(out, rec->fields[i].type, module, depth + 1, limit);
      }
      out += '}';
      return;
    }
    case TypeRef::Kind::Opaque:
      out += "opaque";
      return;
    default:
      out += t.str();
  }
}

}  // namespace

std::string ChunkSignature::key(int depth_limit) const {
  std::string out = "(";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i > 0) out += ',';
    append_type_key(out, slots[i], module.get(), 0, depth_limit + 1);
  }
  return out + ")";
}

ChunkSignature signature_of(const Chunk& chunk) {
  ChunkSignature sig;
  sig.module = chunk.module;
  for (const auto& p : chunk.inputs) sig.slots.push_back(p.type);
  return sig;
}

DerivedSignature derive_signature(const StatementRange& range, const SymbolTable& table,
                                  const Module& module) {
  (void)module;
  DerivedSignature sig;
  RangeInfo info = table.classify(*range.block, range.begin, range.end);
  for (const auto& ref : info.references) {
    switch (ref.var_class) {
      case VarClass::Parameter:
        if (ref.needs_input) sig.inputs.push_back({ref.name, ref.type, ParamOrigin::parameter});
        sig.outputs.push_back({ref.name, ref.type, ParamOrigin::parameter});
        break;
      case VarClass::OuterLocal:
        if (ref.needs_input) sig.inputs.push_back({ref.name, ref.type, ParamOrigin::outer_local});
        if (ref.assigned) sig.outputs.push_back({ref.name, ref.type, ParamOrigin::outer_local});
        break;
      case VarClass::EscapingLocal:
        sig.outputs.push_back({ref.name, ref.type, ParamOrigin::declared_local});
        break;
      case VarClass::NestedLocal:
        break;
      case VarClass::Global:
        sig.globals.push_back(ref.name);
        break;
    }
  }
  sig.has_value_return = info.has_value_return;
  if (info.has_value_return) {
    sig.outputs = {Param{std::string(kReturnSlot), table.function->return_type,
                         ParamOrigin::return_slot}};
  }
  return sig;
}

// ---------------------------------------------------------------------------
// Return rewriting

namespace {

bool contains_return(const StmtList& stmts) {
  bool found = false;
  for_each_stmt(stmts, [&](const Stmt& s) { found = found || s.kind == StmtKind::Return; });
  return found;
}

}  // namespace

StmtList rewrite_returns(const StmtList& stmts) {
  StmtList out;
  out.reserve(stmts.size());
  for (const auto& s : stmts) {
    if (s->kind == StmtKind::Return) {
      auto exit = std::make_shared<Stmt>();
      exit->kind = StmtKind::Exit;
      exit->span = s->span;
      if (s->value) {
        auto slot = std::make_shared<Expr>();
        slot->kind = ExprKind::Var;
        slot->text = std::string(kReturnSlot);
        slot->span = s->span;
        auto assign = std::make_shared<Stmt>();
        assign->kind = StmtKind::Assign;
        assign->span = s->span;
        assign->separated_before = s->separated_before;
        assign->target = slot;
        assign->value = s->value;
        out.push_back(assign);
      } else {
        exit->separated_before = s->separated_before;
      }
      out.push_back(exit);
      continue;
    }
    if (!contains_return(s->body) && !contains_return(s->else_body)) {
      out.push_back(s);
      continue;
    }
    auto copy = std::make_shared<Stmt>(*s);
    copy->body = rewrite_returns(s->body);
    copy->else_body = rewrite_returns(s->else_body);
    out.push_back(copy);
  }
  return out;
}

Chunk rewrite_returns(Chunk chunk) {
  chunk.statements = rewrite_returns(chunk.statements);
  return chunk;
}

// ---------------------------------------------------------------------------
// Chunk construction

std::string compute_chunk_id(const Chunk& chunk) {
  Md5 h;
  auto field = [&](std::string_view s) {
    h.update(s);
    h.update(std::string_view("\0", 1));
  };
  field(chunk.origin.file);
  field(chunk.origin.function);
  field(std::to_string(chunk.origin.start_line));
  field(std::to_string(chunk.origin.end_line));
  field(strategy_name(chunk.strategy));
  field(chunk.variant.str());
  for (const auto& p : chunk.inputs) field(p.name + ":" + p.type.str());
  field("->");
  for (const auto& p : chunk.outputs) field(p.name + ":" + p.type.str());
  for (const auto& t : normalize_tokens(chunk.statements, TokenMode::LayoutOnly)) field(t);
  return h.finish().hex().substr(0, 16);
}

std::optional<Chunk> make_chunk(const ModulePtr& module, const SymbolTable& table,
                                const StatementRange& range, Strategy strategy,
                                bool method_outputs) {
  if (range.begin >= range.end || range.end > range.block->size()) return std::nullopt;
  DerivedSignature sig = derive_signature(range, table, *module);
  const FunctionDecl& fn = *table.function;
  if (method_outputs && !fn.return_type.is_void()) {
    sig.outputs = {Param{std::string(kReturnSlot), fn.return_type, ParamOrigin::return_slot}};
  }
  if (sig.outputs.empty()) return std::nullopt;

  Chunk c;
  const StmtList& block = *range.block;
  c.origin.file = module->path;
  c.origin.function = fn.name;
  c.origin.start_line = block[range.begin]->span.line;
  c.origin.end_line = block[range.end - 1]->span.end_line;
  StmtList stmts(block.begin() + static_cast<std::ptrdiff_t>(range.begin),
                 block.begin() + static_cast<std::ptrdiff_t>(range.end));
  c.statements = rewrite_returns(stmts);
  c.inputs = std::move(sig.inputs);
  c.outputs = std::move(sig.outputs);
  c.globals = std::move(sig.globals);
  c.strategy = strategy;
  c.module = module;
  for_each_stmt(stmts, [&](const Stmt& s) {
    for_each_expr(s, [&](const Expr& e) {
      if (e.kind != ExprKind::Call) return;
      const Binding* b = table.binding(&e);
      if (b && b->kind == BindingKind::Extern) {
        c.calls_extern.insert(module->externs[static_cast<std::size_t>(b->index)].category);
      }
    });
  });
  c.references_project_types = std::any_of(c.inputs.begin(), c.inputs.end(), [](const Param& p) {
    return p.type.mentions_named_type();
  });
  c.id = compute_chunk_id(c);
  return c;
}

namespace {

// Keeps the first chunk per (span, input signature).
void push_unique(std::vector<Chunk>& out, std::set<std::string>& seen, Chunk c) {
  std::string key = c.origin.file + ":" + std::to_string(c.origin.start_line) + "-" +
                    std::to_string(c.origin.end_line) + ":" + signature_of(c).key();
  for (const auto& p : c.inputs) key += "," + p.name;
  if (!seen.insert(key).second) return;
  out.push_back(std::move(c));
}

void collect_blocks(const StmtList& stmts, std::vector<const StmtList*>& out) {
  out.push_back(&stmts);
  for (const auto& s : stmts) {
    if (!s->body.empty()) collect_blocks(s->body, out);
    if (!s->else_body.empty()) collect_blocks(s->else_body, out);
  }
}

}  // namespace

std::vector<Chunk> extract_method(const ModulePtr& module) {
  std::vector<Chunk> out;
  for (const auto& fn : module->functions) {
    if (fn.body.empty()) continue;
    SymbolTable table = analyze_scopes(fn, *module);
    if (auto c = make_chunk(module, table, {&fn.body, 0, fn.body.size()}, Strategy::method, true)) {
      out.push_back(std::move(*c));
    }
  }
  return out;
}

std::vector<Chunk> extract_intent(const ModulePtr& module) {
  std::vector<Chunk> out;
  for (const auto& fn : module->functions) {
    if (fn.body.empty()) continue;
    SymbolTable table = analyze_scopes(fn, *module);
    std::set<std::string> seen;
    const StmtList& body = fn.body;
    if (auto c = make_chunk(module, table, {&body, 0, body.size()}, Strategy::intent)) {
      push_unique(out, seen, std::move(*c));
    }
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 1; i < body.size(); ++i) {
      if (body[i]->separated_before) starts.push_back(i);
    }
    if (starts.size() < 2) continue;
    starts.push_back(body.size());
    for (std::size_t r = 0; r + 1 < starts.size(); ++r) {
      if (auto c = make_chunk(module, table, {&body, starts[r], starts[r + 1]}, Strategy::intent)) {
        push_unique(out, seen, std::move(*c));
      }
    }
  }
  return out;
}

std::vector<Chunk> extract_sliding(const ModulePtr& module, std::size_t min_len) {
  if (min_len == 0) min_len = 1;
  std::vector<Chunk> out;
  for (const auto& fn : module->functions) {
    SymbolTable table = analyze_scopes(fn, *module);
    std::vector<const StmtList*> blocks;
    collect_blocks(fn.body, blocks);
    std::set<std::string> seen;
    for (const StmtList* block : blocks) {
      const std::size_t n = block->size();
      for (std::size_t len = min_len; len <= n; ++len) {
        for (std::size_t begin = 0; begin + len <= n; ++begin) {
          if (auto c = make_chunk(module, table, {block, begin, begin + len}, Strategy::sliding)) {
            push_unique(out, seen, std::move(*c));
          }
        }
      }
    }
  }
  return out;
}

std::vector<Chunk> extract_chunks(const ModulePtr& module, Strategy strategy, std::size_t min_len) {
  switch (strategy) {
    case Strategy::sliding: return extract_sliding(module, min_len);
    case Strategy::intent: return extract_intent(module);
    case Strategy::method: return extract_method(module);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Variants

namespace {

// Collects fields read from `name`; false if `name` is used any other way.
bool only_field_reads(const Expr& e, const std::string& name, std::vector<std::string>& fields) {
  if (e.kind == ExprKind::Field && e.operands[0]->kind == ExprKind::Var &&
      e.operands[0]->text == name) {
    if (std::find(fields.begin(), fields.end(), e.text) == fields.end()) fields.push_back(e.text);
    return true;
  }
  if (e.kind == ExprKind::Var && e.text == name) return false;
  for (const auto& op : e.operands) {
    if (!only_field_reads(*op, name, fields)) return false;
  }
  return true;
}

bool only_field_reads(const StmtList& stmts, const std::string& name,
                      std::vector<std::string>& fields) {
  bool ok = true;
  for_each_stmt(stmts, [&](const Stmt& s) {
    if (!ok) return;
    if (s.target) {
      const Expr* root = lvalue_root(*s.target);
      if (root && root->text == name) {
        ok = false;
        return;
      }
      ok = only_field_reads(*s.target, name, fields);
    }
    if (ok && s.value) ok = only_field_reads(*s.value, name, fields);
  });
  return ok;
}

std::string exploded_name(const std::string& record_param, const std::string& field) {
  return record_param + "__" + field;
}

}  // namespace

std::vector<Chunk> expand_variants(const Chunk& chunk) {
  std::vector<Chunk> out{chunk};
  int record_inputs = 0;
  std::size_t index = 0;
  for (std::size_t i = 0; i < chunk.inputs.size(); ++i) {
    if (chunk.inputs[i].type.is_record()) {
      ++record_inputs;
      index = i;
    }
  }
  if (record_inputs != 1 || !chunk.module) return out;
  const Param& rec_param = chunk.inputs[index];
  const RecordDecl* rec = chunk.module->find_record(rec_param.type.name());
  if (!rec) return out;
  std::vector<std::string> fields;
  if (!only_field_reads(chunk.statements, rec_param.name, fields) || fields.empty()) return out;

  std::vector<Param> field_params;
  for (const auto& f : fields) {
    field_params.push_back(
        Param{exploded_name(rec_param.name, f), rec->field(f)->type, ParamOrigin::exploded_field});
  }
  Chunk v = chunk;
  v.variant.exploded = true;
  v.inputs.clear();
  for (std::size_t i = 0; i < chunk.inputs.size(); ++i) {
    if (i == index) {
      v.inputs.insert(v.inputs.end(), field_params.begin(), field_params.end());
    } else {
      v.inputs.push_back(chunk.inputs[i]);
    }
  }
  v.outputs.clear();
  for (const auto& o : chunk.outputs) {
    if (o.name == rec_param.name) {
      v.outputs.insert(v.outputs.end(), field_params.begin(), field_params.end());
    } else {
      v.outputs.push_back(o);
    }
  }
  const std::string& name = rec_param.name;
  v.statements = rewrite_statements(
      chunk.statements,
      [&](const Expr& e) -> ExprPtr {
        if (e.kind == ExprKind::Field && e.operands[0]->kind == ExprKind::Var &&
            e.operands[0]->text == name) {
          auto var = std::make_shared<Expr>();
          var->kind = ExprKind::Var;
          var->span = e.span;
          var->text = exploded_name(name, e.text);
          return var;
        }
        return nullptr;
      },
      [](const std::string& n) { return n; });
  v.references_project_types = std::any_of(v.inputs.begin(), v.inputs.end(), [](const Param& p) {
    return p.type.mentions_named_type();
  });
  v.id = compute_chunk_id(v);
  out.push_back(std::move(v));
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class ClosureCheck {
 public:
  explicit ClosureCheck(const Chunk& chunk) : chunk_(chunk) {
    scopes_.emplace_back();
    for (const auto& p : chunk.inputs) scopes_.back().insert(p.name);
    for (const auto& p : chunk.outputs) scopes_.back().insert(p.name);
  }

  std::optional<RejectReason> run() {
    check_list(chunk_.statements, 0);
    return result_;
  }

 private:
  bool defined(const std::string& name) const {
    for (const auto& scope : scopes_) {
      if (scope.count(name) != 0) return true;
    }
    return chunk_.module && chunk_.module->find_global(name) != nullptr;
  }

  void reject(RejectReason r) {
    if (!result_ || (r == RejectReason::DanglingBranch && *result_ != r)) result_ = r;
  }

  void check_expr(const Expr& e) {
    for_each_subexpr(e, [&](const Expr& sub) {
      if (sub.kind == ExprKind::Var && !defined(sub.text)) reject(RejectReason::UnclosableReference);
      if (sub.kind == ExprKind::Call) {
        bool known = is_builtin(sub.text) ||
                     (chunk_.module && (chunk_.module->find_function(sub.text) ||
                                        chunk_.module->find_extern(sub.text)));
        if (!known) reject(RejectReason::UnclosableReference);
      }
      if (sub.kind == ExprKind::RecordLit &&
          !(chunk_.module && chunk_.module->find_record(sub.text))) {
        reject(RejectReason::UnclosableReference);
      }
    });
  }

  void check_list(const StmtList& stmts, int loops) {
    for (const auto& s : stmts) check_stmt(*s, loops);
  }

  void scoped(const StmtList& stmts, int loops) {
    scopes_.emplace_back();
    check_list(stmts, loops);
    scopes_.pop_back();
  }

  void check_stmt(const Stmt& s, int loops) {
    switch (s.kind) {
      case StmtKind::VarDecl:
        check_expr(*s.value);
        scopes_.back().insert(s.name);
        break;
      case StmtKind::Assign:
        check_expr(*s.target);
        check_expr(*s.value);
        break;
      case StmtKind::If:
        check_expr(*s.value);
        scoped(s.body, loops);
        scoped(s.else_body, loops);
        break;
      case StmtKind::While:
        check_expr(*s.value);
        scoped(s.body, loops + 1);
        break;
      case StmtKind::For:
        scopes_.emplace_back();
        check_stmt(*s.init, loops);
        check_expr(*s.value);
        check_stmt(*s.step, loops);
        scoped(s.body, loops + 1);
        scopes_.pop_back();
        break;
      case StmtKind::Break:
      case StmtKind::Continue:
        if (loops == 0) reject(RejectReason::DanglingBranch);
        break;
      case StmtKind::Return:
        // Returns must have been rewritten to the exit jump.
        reject(RejectReason::UnclosableReference);
        break;
      case StmtKind::ExprStmt:
        check_expr(*s.value);
        break;
      case StmtKind::Block:
        scoped(s.body, loops);
        break;
      case StmtKind::Exit:
        break;
    }
  }

  const Chunk& chunk_;
  std::vector<std::unordered_set<std::string>> scopes_;
  std::optional<RejectReason> result_;
};

}  // namespace

std::optional<RejectReason> validate_chunk(const Chunk& chunk) {
  return ClosureCheck(chunk).run();
}

}  // namespace simion

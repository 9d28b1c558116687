#include <algorithm>
#include <set>
#include <unordered_set>

#include "simion/lang.hpp"

namespace simion {

SemanticError::SemanticError(SourceSpan span, const std::string& message)
    : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
                         message),
      span_(span) {}

UnresolvedName::UnresolvedName(SourceSpan span, const std::string& name)
    : SemanticError(span, "unresolved name '" + name + "'") {}

namespace {

const std::set<std::string, std::less<>> kBuiltins = {
    "len",     "substr",  "char_at", "chr",    "to_lower",   "to_upper",  "trim",
    "itos",    "stoi",    "ftos",    "to_float", "to_int",   "abs",       "min",
    "max",     "sqrt",    "append",  "new_array", "contains", "index_of", "starts_with",
    "ends_with",
};

}  // namespace

bool is_builtin(std::string_view name) { return kBuiltins.count(name) != 0; }

bool is_reserved_identifier(std::string_view name) {
  return name.find("__") != std::string_view::npos;
}

// ---------------------------------------------------------------------------
// Traversal

void for_each_stmt(const StmtList& stmts, const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : stmts) {
    fn(*s);
    if (s->init) for_each_stmt(StmtList{s->init}, fn);
    if (s->step) for_each_stmt(StmtList{s->step}, fn);
    for_each_stmt(s->body, fn);
    for_each_stmt(s->else_body, fn);
  }
}

void for_each_subexpr(const Expr& expr, const std::function<void(const Expr&)>& fn) {
  fn(expr);
  for (const auto& op : expr.operands) for_each_subexpr(*op, fn);
}

void for_each_expr(const Stmt& stmt, const std::function<void(const Expr&)>& fn) {
  if (stmt.target) for_each_subexpr(*stmt.target, fn);
  if (stmt.value) for_each_subexpr(*stmt.value, fn);
}

const Expr* lvalue_root(const Expr& target) {
  const Expr* e = &target;
  while (e->kind == ExprKind::Index || e->kind == ExprKind::Field) e = e->operands[0].get();
  return e->kind == ExprKind::Var ? e : nullptr;
}

// ---------------------------------------------------------------------------
// Resolution and type checking

namespace {

class Checker {
 public:
  Checker(const FunctionDecl* fn, const Module& module, SymbolTable& table)
      : fn_(fn), module_(module), table_(table) {}

  void check_function() {
    scopes_.emplace_back();
    for (std::size_t i = 0; i < fn_->params.size(); ++i) {
      scopes_.back().emplace(fn_->params[i].name,
                             Binding{BindingKind::Param, static_cast<int>(i)});
    }
    check_list(fn_->body);
    scopes_.pop_back();
  }

  TypeRef check_constant(const Expr& e) { return type_of(e); }

 private:
  [[noreturn]] void fail(const SourceSpan& span, const std::string& msg) const {
    throw SemanticError(span, msg);
  }

  std::optional<Binding> lookup_variable(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    for (std::size_t i = 0; i < module_.globals.size(); ++i) {
      if (module_.globals[i].name == name) return Binding{BindingKind::Global, static_cast<int>(i)};
    }
    return std::nullopt;
  }

  TypeRef binding_type(const Binding& b) const {
    switch (b.kind) {
      case BindingKind::Param: return fn_->params[static_cast<std::size_t>(b.index)].type;
      case BindingKind::Local: return table_.locals[static_cast<std::size_t>(b.index)].type;
      case BindingKind::Global: return module_.globals[static_cast<std::size_t>(b.index)].type;
      default: return TypeRef::void_type();
    }
  }

  void declare(const Stmt& s) {
    if (lookup_variable(s.name)) {
      fail(s.span, "declaration of '" + s.name + "' shadows an existing variable");
    }
    TypeRef init = type_of(*s.value);
    TypeRef type = init;
    if (s.declared_type) {
      if (!assignable(*s.declared_type, init)) {
        fail(s.span, "cannot initialize '" + s.name + "' of type " + s.declared_type->str() +
                         " with " + init.str());
      }
      type = *s.declared_type;
    } else if (init.is_void()) {
      fail(s.span, "cannot declare '" + s.name + "' from a void expression");
    } else if (init.is_array() && init.element().kind() == TypeRef::Kind::Any) {
      fail(s.span, "type annotation required for empty array '" + s.name + "'");
    }
    int index = static_cast<int>(table_.locals.size());
    table_.locals.push_back(LocalInfo{s.name, type, &s});
    table_.decls.emplace(&s, index);
    scopes_.back().emplace(s.name, Binding{BindingKind::Local, index});
  }

  void check_list(const StmtList& stmts) {
    for (const auto& s : stmts) check_stmt(*s);
  }

  void check_scoped(const StmtList& stmts) {
    scopes_.emplace_back();
    check_list(stmts);
    scopes_.pop_back();
  }

  void expect_bool(const Expr& e) {
    TypeRef t = type_of(e);
    if (t.kind() != TypeRef::Kind::Bool) fail(e.span, "condition must be bool, found " + t.str());
  }

  void check_assign(const Stmt& s) {
    TypeRef target = type_of(*s.target);
    TypeRef value = type_of(*s.value);
    if (!assignable(target, value)) {
      fail(s.span, "cannot assign " + value.str() + " to " + target.str());
    }
  }

  void check_stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::VarDecl:
        declare(s);
        break;
      case StmtKind::Assign:
        check_assign(s);
        break;
      case StmtKind::If:
        expect_bool(*s.value);
        check_scoped(s.body);
        check_scoped(s.else_body);
        break;
      case StmtKind::While:
        expect_bool(*s.value);
        ++loop_depth_;
        check_scoped(s.body);
        --loop_depth_;
        break;
      case StmtKind::For:
        scopes_.emplace_back();
        if (s.init->kind == StmtKind::VarDecl) {
          declare(*s.init);
        } else {
          check_assign(*s.init);
        }
        expect_bool(*s.value);
        check_assign(*s.step);
        ++loop_depth_;
        check_scoped(s.body);
        --loop_depth_;
        scopes_.pop_back();
        break;
      case StmtKind::Return: {
        if (!fn_) fail(s.span, "return outside a function");
        if (s.value) {
          TypeRef t = type_of(*s.value);
          if (fn_->return_type.is_void()) fail(s.span, "void function returns a value");
          if (!assignable(fn_->return_type, t)) {
            fail(s.span, "return type mismatch: expected " + fn_->return_type.str() + ", found " +
                             t.str());
          }
        } else if (!fn_->return_type.is_void()) {
          fail(s.span, "missing return value");
        }
        break;
      }
      case StmtKind::Break:
      case StmtKind::Continue:
        if (loop_depth_ == 0) fail(s.span, "break/continue outside a loop");
        break;
      case StmtKind::ExprStmt:
        type_of(*s.value);
        break;
      case StmtKind::Block:
        check_scoped(s.body);
        break;
      case StmtKind::Exit:
        break;
    }
  }

  TypeRef remember(const Expr& e, TypeRef t) {
    table_.types[&e] = t;
    return t;
  }

  TypeRef same_numeric(const Expr& e, const TypeRef& a, const TypeRef& b) {
    if (!a.is_numeric() || !(a == b)) {
      fail(e.span, "operator '" + std::string(op_symbol(e.op)) + "' needs matching numeric operands, found " +
                       a.str() + " and " + b.str());
    }
    return a;
  }

  TypeRef type_of(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return remember(e, TypeRef::int_type());
      case ExprKind::FloatLit: return remember(e, TypeRef::float_type());
      case ExprKind::BoolLit: return remember(e, TypeRef::bool_type());
      case ExprKind::StringLit: return remember(e, TypeRef::string_type());
      case ExprKind::Var: {
        auto b = lookup_variable(e.text);
        if (!b) throw UnresolvedName(e.span, e.text);
        table_.uses[&e] = *b;
        return remember(e, binding_type(*b));
      }
      case ExprKind::Unary: {
        TypeRef t = type_of(*e.operands[0]);
        if (e.op == Op::Not) {
          if (t.kind() != TypeRef::Kind::Bool) fail(e.span, "'!' needs a bool operand");
          return remember(e, t);
        }
        if (!t.is_numeric()) fail(e.span, "unary '-' needs a numeric operand");
        return remember(e, t);
      }
      case ExprKind::Binary: return remember(e, binary_type(e));
      case ExprKind::ArrayLit: {
        if (e.operands.empty()) return remember(e, TypeRef::array_of(TypeRef::any_type()));
        TypeRef elem = type_of(*e.operands[0]);
        if (elem.is_void()) fail(e.span, "array element cannot be void");
        for (std::size_t i = 1; i < e.operands.size(); ++i) {
          TypeRef t = type_of(*e.operands[i]);
          if (assignable(elem, t)) continue;
          if (assignable(t, elem)) {
            elem = t;
            continue;
          }
          fail(e.operands[i]->span, "array elements must share a type");
        }
        return remember(e, TypeRef::array_of(elem));
      }
      case ExprKind::Index: {
        TypeRef base = type_of(*e.operands[0]);
        TypeRef index = type_of(*e.operands[1]);
        if (!base.is_array()) fail(e.span, "indexing a non-array value of type " + base.str());
        if (index.kind() != TypeRef::Kind::Int) fail(e.span, "array index must be int");
        return remember(e, base.element());
      }
      case ExprKind::Field: {
        TypeRef base = type_of(*e.operands[0]);
        if (!base.is_record()) fail(e.span, "field access on non-record type " + base.str());
        const RecordDecl* rec = module_.find_record(base.name());
        const FieldDecl* f = rec ? rec->field(e.text) : nullptr;
        if (!f) fail(e.span, "record " + base.name() + " has no field '" + e.text + "'");
        return remember(e, f->type);
      }
      case ExprKind::RecordLit: {
        const RecordDecl* rec = module_.find_record(e.text);
        if (!rec) fail(e.span, "unknown record '" + e.text + "'");
        if (e.field_names.size() != rec->fields.size()) {
          fail(e.span, "record literal must initialize every field of " + rec->name);
        }
        std::set<std::string> seen;
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          const FieldDecl* f = rec->field(e.field_names[i]);
          if (!f || !seen.insert(e.field_names[i]).second) {
            fail(e.span, "bad field '" + e.field_names[i] + "' for " + rec->name);
          }
          TypeRef t = type_of(*e.operands[i]);
          if (!assignable(f->type, t)) {
            fail(e.operands[i]->span, "field '" + f->name + "' expects " + f->type.str());
          }
        }
        return remember(e, TypeRef::record(rec->name));
      }
      case ExprKind::Call: return remember(e, call_type(e));
    }
    return TypeRef::void_type();
  }

  TypeRef binary_type(const Expr& e) {
    TypeRef a = type_of(*e.operands[0]);
    TypeRef b = type_of(*e.operands[1]);
    switch (e.op) {
      case Op::Add:
        if (a.kind() == TypeRef::Kind::String && b.kind() == TypeRef::Kind::String) return a;
        return same_numeric(e, a, b);
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        return same_numeric(e, a, b);
      case Op::Mod:
        if (a.kind() != TypeRef::Kind::Int || b.kind() != TypeRef::Kind::Int) {
          fail(e.span, "'%' needs int operands");
        }
        return a;
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        if (!(a == b) || !(a.is_numeric() || a.kind() == TypeRef::Kind::String)) {
          fail(e.span, "ordering needs matching numeric or string operands");
        }
        return TypeRef::bool_type();
      case Op::Eq:
      case Op::Ne:
        if (!assignable(a, b) && !assignable(b, a)) {
          fail(e.span, "cannot compare " + a.str() + " with " + b.str());
        }
        if (a.is_void()) fail(e.span, "cannot compare void values");
        return TypeRef::bool_type();
      case Op::And:
      case Op::Or:
        if (a.kind() != TypeRef::Kind::Bool || b.kind() != TypeRef::Kind::Bool) {
          fail(e.span, "logical operator needs bool operands");
        }
        return a;
      default:
        fail(e.span, "bad binary operator");
    }
  }

  void check_args(const Expr& e, const std::vector<ParamDecl>& params) {
    if (params.size() != e.operands.size()) {
      fail(e.span, "'" + e.text + "' expects " + std::to_string(params.size()) + " arguments");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      TypeRef t = type_of(*e.operands[i]);
      if (!assignable(params[i].type, t)) {
        fail(e.operands[i]->span, "argument " + std::to_string(i + 1) + " of '" + e.text +
                                      "' expects " + params[i].type.str() + ", found " + t.str());
      }
    }
  }

  TypeRef call_type(const Expr& e) {
    for (std::size_t i = 0; i < module_.functions.size(); ++i) {
      if (module_.functions[i].name == e.text) {
        table_.uses[&e] = Binding{BindingKind::Function, static_cast<int>(i)};
        check_args(e, module_.functions[i].params);
        return module_.functions[i].return_type;
      }
    }
    for (std::size_t i = 0; i < module_.externs.size(); ++i) {
      if (module_.externs[i].name == e.text) {
        table_.uses[&e] = Binding{BindingKind::Extern, static_cast<int>(i)};
        check_args(e, module_.externs[i].params);
        return module_.externs[i].return_type;
      }
    }
    if (!is_builtin(e.text)) throw UnresolvedName(e.span, e.text);
    table_.uses[&e] = Binding{BindingKind::Builtin, -1};
    return builtin_type(e);
  }

  TypeRef builtin_type(const Expr& e) {
    std::vector<TypeRef> args;
    for (const auto& op : e.operands) args.push_back(type_of(*op));
    using K = TypeRef::Kind;
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        fail(e.span, "builtin '" + e.text + "' expects " + std::to_string(n) + " arguments");
      }
    };
    auto want = [&](std::size_t i, K k) {
      if (args[i].kind() != k) {
        fail(e.operands[i]->span, "argument " + std::to_string(i + 1) + " of '" + e.text +
                                      "' has type " + args[i].str());
      }
    };
    const std::string& n = e.text;
    if (n == "len") {
      arity(1);
      if (!args[0].is_array() && args[0].kind() != K::String) fail(e.span, "len needs string or array");
      return TypeRef::int_type();
    }
    if (n == "substr") {
      arity(3);
      want(0, K::String);
      want(1, K::Int);
      want(2, K::Int);
      return TypeRef::string_type();
    }
    if (n == "char_at") {
      arity(2);
      want(0, K::String);
      want(1, K::Int);
      return TypeRef::int_type();
    }
    if (n == "chr" || n == "itos") {
      arity(1);
      want(0, K::Int);
      return TypeRef::string_type();
    }
    if (n == "to_lower" || n == "to_upper" || n == "trim") {
      arity(1);
      want(0, K::String);
      return TypeRef::string_type();
    }
    if (n == "stoi") {
      arity(1);
      want(0, K::String);
      return TypeRef::int_type();
    }
    if (n == "ftos") {
      arity(1);
      want(0, K::Float);
      return TypeRef::string_type();
    }
    if (n == "to_float") {
      arity(1);
      want(0, K::Int);
      return TypeRef::float_type();
    }
    if (n == "to_int") {
      arity(1);
      want(0, K::Float);
      return TypeRef::int_type();
    }
    if (n == "abs") {
      arity(1);
      if (!args[0].is_numeric()) fail(e.span, "abs needs a numeric argument");
      return args[0];
    }
    if (n == "min" || n == "max") {
      arity(2);
      if (!args[0].is_numeric() || !(args[0] == args[1])) {
        fail(e.span, n + " needs two numeric arguments of one type");
      }
      return args[0];
    }
    if (n == "sqrt") {
      arity(1);
      want(0, K::Float);
      return TypeRef::float_type();
    }
    if (n == "append") {
      arity(2);
      if (!args[0].is_array()) fail(e.span, "append needs an array");
      if (args[0].element().kind() == K::Any) return TypeRef::array_of(args[1]);
      if (!assignable(args[0].element(), args[1])) fail(e.span, "append element type mismatch");
      return args[0];
    }
    if (n == "new_array") {
      arity(2);
      want(0, K::Int);
      if (args[1].is_void()) fail(e.span, "new_array element cannot be void");
      return TypeRef::array_of(args[1]);
    }
    if (n == "contains" || n == "starts_with" || n == "ends_with") {
      arity(2);
      want(0, K::String);
      want(1, K::String);
      return TypeRef::bool_type();
    }
    if (n == "index_of") {
      arity(2);
      want(0, K::String);
      want(1, K::String);
      return TypeRef::int_type();
    }
    fail(e.span, "unknown builtin '" + n + "'");
  }

  const FunctionDecl* fn_;
  const Module& module_;
  SymbolTable& table_;
  std::vector<std::unordered_map<std::string, Binding>> scopes_;
  int loop_depth_ = 0;
};

bool is_constant_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit:
    case ExprKind::BoolLit:
    case ExprKind::StringLit:
      return true;
    case ExprKind::Unary:
    case ExprKind::ArrayLit:
    case ExprKind::RecordLit:
      return std::all_of(e.operands.begin(), e.operands.end(),
                         [](const ExprPtr& op) { return is_constant_expr(*op); });
    default:
      return false;
  }
}

}  // namespace

SymbolTable analyze_scopes(const FunctionDecl& fn, const Module& module) {
  SymbolTable table;
  table.function = &fn;
  table.module = &module;
  Checker(&fn, module, table).check_function();
  return table;
}

void check_module(const Module& module) {
  for (const auto& g : module.globals) {
    if (!is_constant_expr(*g.init)) {
      throw SemanticError(g.span, "global '" + g.name + "' needs a constant initializer");
    }
    if (g.type.is_opaque()) {
      throw SemanticError(g.span, "global '" + g.name + "' has an opaque type");
    }
    SymbolTable scratch;
    scratch.module = &module;
    TypeRef t = Checker(nullptr, module, scratch).check_constant(*g.init);
    if (!assignable(g.type, t)) {
      throw SemanticError(g.span, "global '" + g.name + "' initializer has type " + t.str());
    }
  }
  for (const auto& f : module.functions) analyze_scopes(f, module);
}

// ---------------------------------------------------------------------------
// Range classification

const Binding* SymbolTable::binding(const Expr* e) const {
  auto it = uses.find(e);
  return it == uses.end() ? nullptr : &it->second;
}

TypeRef SymbolTable::type_of(const Expr* e) const {
  auto it = types.find(e);
  return it == types.end() ? TypeRef::void_type() : it->second;
}

namespace {

struct VarKey {
  BindingKind kind;
  int index;
  bool operator<(const VarKey& o) const {
    return kind != o.kind ? kind < o.kind : index < o.index;
  }
};

bool mentions(const Expr& e, const SymbolTable& table, const VarKey& key) {
  bool found = false;
  for_each_subexpr(e, [&](const Expr& sub) {
    if (sub.kind != ExprKind::Var) return;
    const Binding* b = table.binding(&sub);
    if (b && b->kind == key.kind && b->index == key.index) found = true;
  });
  return found;
}

}  // namespace

RangeInfo SymbolTable::classify(const StmtList& block, std::size_t begin, std::size_t end) const {
  RangeInfo info;
  StmtList range(block.begin() + static_cast<std::ptrdiff_t>(begin),
                 block.begin() + static_cast<std::ptrdiff_t>(end));
  StmtList after(block.begin() + static_cast<std::ptrdiff_t>(end), block.end());

  std::set<const Stmt*> decls_in_range;
  std::set<const Stmt*> top_level;
  for (const auto& s : range) top_level.insert(s.get());
  for_each_stmt(range, [&](const Stmt& s) {
    if (s.kind == StmtKind::VarDecl) decls_in_range.insert(&s);
    if (s.kind == StmtKind::Return) {
      (s.value ? info.has_value_return : info.has_void_return) = true;
    }
  });

  std::set<int> used_after;
  for_each_stmt(after, [&](const Stmt& s) {
    for_each_expr(s, [&](const Expr& e) {
      const Binding* b = binding(&e);
      if (e.kind == ExprKind::Var && b && b->kind == BindingKind::Local) used_after.insert(b->index);
    });
  });

  std::map<VarKey, std::size_t> slot;
  auto touch = [&](const Expr& var) {
    const Binding* b = binding(&var);
    if (!b || b->kind == BindingKind::Function || b->kind == BindingKind::Extern ||
        b->kind == BindingKind::Builtin) {
      return;
    }
    VarKey key{b->kind, b->index};
    if (slot.count(key) != 0) return;
    RangeReference ref;
    ref.name = var.text;
    switch (b->kind) {
      case BindingKind::Param:
        ref.var_class = VarClass::Parameter;
        ref.type = function->params[static_cast<std::size_t>(b->index)].type;
        break;
      case BindingKind::Global:
        ref.var_class = VarClass::Global;
        ref.type = module->globals[static_cast<std::size_t>(b->index)].type;
        break;
      default: {
        const LocalInfo& local = locals[static_cast<std::size_t>(b->index)];
        ref.type = local.type;
        if (decls_in_range.count(local.decl) == 0) {
          ref.var_class = VarClass::OuterLocal;
        } else if (top_level.count(local.decl) != 0 && used_after.count(b->index) != 0) {
          ref.var_class = VarClass::EscapingLocal;
        } else {
          ref.var_class = VarClass::NestedLocal;
        }
        break;
      }
    }
    slot.emplace(key, info.references.size());
    info.references.push_back(std::move(ref));
  };

  // Textual first-reference order; declarations count as references.
  std::map<VarKey, const Stmt*> first_stmt;
  std::function<void(const StmtList&)> walk = [&](const StmtList& stmts) {
    for (const auto& s : stmts) {
      auto visit_expr = [&](const Expr& e) {
        for_each_subexpr(e, [&](const Expr& sub) {
          if (sub.kind != ExprKind::Var) return;
          const Binding* b = binding(&sub);
          if (b) first_stmt.emplace(VarKey{b->kind, b->index}, s.get());
          touch(sub);
        });
      };
      if (s->kind == StmtKind::VarDecl) {
        auto it = decls.find(s.get());
        if (it != decls.end()) {
          VarKey key{BindingKind::Local, it->second};
          first_stmt.emplace(key, s.get());
          if (slot.count(key) == 0) {
            const LocalInfo& local = locals[static_cast<std::size_t>(it->second)];
            RangeReference ref;
            ref.name = s->name;
            ref.type = local.type;
            ref.var_class = (top_level.count(s.get()) != 0 && used_after.count(it->second) != 0)
                                ? VarClass::EscapingLocal
                                : VarClass::NestedLocal;
            slot.emplace(key, info.references.size());
            info.references.push_back(std::move(ref));
          }
        }
        if (s->value) visit_expr(*s->value);
        continue;
      }
      if (s->init) walk(StmtList{s->init});
      if (s->target) visit_expr(*s->target);
      if (s->value) visit_expr(*s->value);
      if (s->step) walk(StmtList{s->step});
      walk(s->body);
      walk(s->else_body);
    }
  };
  walk(range);

  // Assignments.
  for_each_stmt(range, [&](const Stmt& s) {
    if (s.kind != StmtKind::Assign) return;
    const Expr* root = lvalue_root(*s.target);
    const Binding* b = root ? binding(root) : nullptr;
    if (!b) return;
    auto it = slot.find(VarKey{b->kind, b->index});
    if (it != slot.end()) info.references[it->second].assigned = true;
  });

  // Inputs: a pre-range value is observable unless the first reference is an
  // unconditional top-level overwrite that does not read the variable.
  for (const auto& [key, index] : slot) {
    RangeReference& ref = info.references[index];
    if (ref.var_class != VarClass::Parameter && ref.var_class != VarClass::OuterLocal) continue;
    ref.needs_input = true;
    auto fs = first_stmt.find(key);
    if (fs == first_stmt.end()) continue;
    const Stmt* s = fs->second;
    if (top_level.count(s) != 0 && s->kind == StmtKind::Assign &&
        s->target->kind == ExprKind::Var && !mentions(*s->value, *this, key)) {
      const Binding* b = binding(s->target.get());
      if (b && b->kind == key.kind && b->index == key.index) ref.needs_input = false;
    }
  }
  return info;
}

}  // namespace simion

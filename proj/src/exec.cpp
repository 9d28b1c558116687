#include "simion/exec.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

namespace simion {

std::string_view run_error_name(RunError e) {
  switch (e) {
    case RunError::runtime: return "runtime";
    case RunError::timeout: return "timeout";
    case RunError::effect_denied: return "effect-denied";
  }
  return "runtime";
}

namespace {

struct Failure {
  RunError kind;
  std::string message;
};

[[noreturn]] void fail(std::string message) { throw Failure{RunError::runtime, std::move(message)}; }

enum class Flow { Normal, Break, Continue, Return, Exit };

using Scope = std::vector<std::pair<std::string, Value>>;

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

bool lang_equal(const Value& a, const Value& b) {
  if (a.storage().index() != b.storage().index()) return false;
  if (a.is_float()) return a.as_float() == b.as_float();
  if (a.is_array() || a.is_record()) {
    const auto& xs = a.is_array() ? a.as_array().items : a.as_record().fields;
    const auto& ys = b.is_array() ? b.as_array().items : b.as_record().fields;
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!lang_equal(xs[i], ys[i])) return false;
    }
    return true;
  }
  return values_equal(a, b);
}

std::string float_text(double d) { return to_display(Value(d)); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Interpreter {
 public:
  Interpreter(const Module& module, const ExecPolicy& policy) : module_(module), policy_(policy) {
    for (const auto& r : module.records) records_[r.name] = &r;
    for (const auto& f : module.functions) functions_[f.name] = &f;
  }

  // Fresh state for one run.
  void reset() {
    steps_ = 0;
    frames_.clear();
    globals_.clear();
    for (const auto& g : module_.globals) {
      Value v = eval(*g.init);
      retype(v, g.type);
      globals_.emplace_back(g.name, std::move(v));
    }
  }

  Outcome run(const Chunk& chunk, const std::vector<Value>& inputs) {
    Outcome out;
    try {
      reset();
      if (inputs.size() != chunk.inputs.size()) fail("input arity mismatch");
      frames_.emplace_back();
      frames_.back().emplace_back();
      Scope& top = frames_.back().back();
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        Value v = inputs[i];
        retype(v, chunk.inputs[i].type);
        top.emplace_back(chunk.inputs[i].name, std::move(v));
      }
      for (const auto& o : chunk.outputs) {
        if (!find_in(frames_.back().back(), o.name)) frames_.back().back().emplace_back(o.name, Value());
      }
      exec_list(chunk.statements);
      for (const auto& o : chunk.outputs) {
        const Value* v = find_in(frames_.back().front(), o.name);
        if (!v || v->is_unset()) fail("output '" + o.name + "' was never assigned");
        out.outputs.push_back(*v);
      }
    } catch (const Failure& f) {
      out.outputs.clear();
      out.error = f.kind;
      out.message = f.message;
    } catch (const std::exception& ex) {
      // Ill-typed operations surface as variant access errors.
      out.outputs.clear();
      out.error = RunError::runtime;
      out.message = ex.what();
    }
    return out;
  }

  Outcome call_named(std::string_view name, const std::vector<Value>& args) {
    Outcome out;
    try {
      reset();
      auto it = functions_.find(std::string(name));
      if (it == functions_.end()) fail("unknown function '" + std::string(name) + "'");
      Value v = call(*it->second, args);
      if (!v.is_unset()) out.outputs.push_back(std::move(v));
    } catch (const Failure& f) {
      out.error = f.kind;
      out.message = f.message;
    } catch (const std::exception& ex) {
      out.error = RunError::runtime;
      out.message = ex.what();
    }
    return out;
  }

 private:
  void step() {
    if (++steps_ > policy_.step_budget) throw Failure{RunError::timeout, "step budget exhausted"};
  }

  static Value* find_in(Scope& scope, const std::string& name) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }

  Value& lookup(const std::string& name) {
    if (!frames_.empty()) {
      auto& scopes = frames_.back();
      for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        if (Value* v = find_in(*it, name)) return *v;
      }
    }
    if (Value* v = find_in(globals_, name)) return *v;
    fail("unknown variable '" + name + "'");
  }

  void declare(const std::string& name, Value v) {
    Scope& scope = frames_.back().back();
    if (Value* existing = find_in(scope, name)) {
      *existing = std::move(v);
    } else {
      scope.emplace_back(name, std::move(v));
    }
  }

  const RecordDecl& record(const std::string& name) const {
    auto it = records_.find(name);
    if (it == records_.end()) fail("unknown record '" + name + "'");
    return *it->second;
  }

  // Record values generated for another module with the same structure
  // carry foreign type names; rename them after this module's declarations.
  void retype(Value& v, const TypeRef& t) const {
    if (t.is_record() && v.is_record()) {
      const RecordDecl& rec = record(t.name());
      RecordValue& r = v.as_record();
      r.type = rec.name;
      for (std::size_t i = 0; i < r.fields.size() && i < rec.fields.size(); ++i) {
        retype(r.fields[i], rec.fields[i].type);
      }
    } else if (t.is_array() && v.is_array() && t.element().kind() != TypeRef::Kind::Any) {
      for (auto& item : v.as_array().items) retype(item, t.element());
    }
  }

  void check_length(std::size_t n) const {
    if (n > policy_.max_length) fail("value exceeds the size limit");
  }

  // ---- statements

  Flow exec_list(const StmtList& stmts) {
    for (const auto& s : stmts) {
      Flow f = exec(*s);
      if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
  }

  Flow exec_block(const StmtList& stmts) {
    frames_.back().emplace_back();
    Flow f = exec_list(stmts);
    frames_.back().pop_back();
    return f;
  }

  Flow exec(const Stmt& s) {
    step();
    switch (s.kind) {
      case StmtKind::VarDecl: {
        Value v = eval(*s.value);
        if (s.declared_type) retype(v, *s.declared_type);
        declare(s.name, std::move(v));
        return Flow::Normal;
      }
      case StmtKind::Assign: {
        if (grow_in_place(s)) return Flow::Normal;
        Value v = eval(*s.value);
        assign(*s.target, std::move(v));
        return Flow::Normal;
      }
      case StmtKind::If:
        if (eval_bool(*s.value)) return exec_block(s.body);
        return exec_block(s.else_body);
      case StmtKind::While:
        for (;;) {
          step();
          if (!eval_bool(*s.value)) return Flow::Normal;
          Flow f = exec_block(s.body);
          if (f == Flow::Break) return Flow::Normal;
          if (f == Flow::Return || f == Flow::Exit) return f;
        }
      case StmtKind::For: {
        frames_.back().emplace_back();
        Flow result = Flow::Normal;
        exec(*s.init);
        for (;;) {
          step();
          if (!eval_bool(*s.value)) break;
          Flow f = exec_block(s.body);
          if (f == Flow::Break) break;
          if (f == Flow::Return || f == Flow::Exit) {
            result = f;
            break;
          }
          exec(*s.step);
        }
        frames_.back().pop_back();
        return result;
      }
      case StmtKind::Return:
        return_value_ = s.value ? eval(*s.value) : Value();
        return Flow::Return;
      case StmtKind::Break: return Flow::Break;
      case StmtKind::Continue: return Flow::Continue;
      case StmtKind::ExprStmt:
        eval(*s.value);
        return Flow::Normal;
      case StmtKind::Block: return exec_block(s.body);
      case StmtKind::Exit: return Flow::Exit;
    }
    return Flow::Normal;
  }

  // `x = x + e` on strings and `x = append(x, e)` extend x without
  // copying it. Only locals of the running frame qualify: evaluating e
  // cannot modify them, so the result equals the copying evaluation.
  bool grow_in_place(const Stmt& s) {
    const Expr& target = *s.target;
    const Expr& value = *s.value;
    if (target.kind != ExprKind::Var || value.operands.size() != 2) return false;
    const bool concat = value.kind == ExprKind::Binary && value.op == Op::Add;
    const bool push = value.kind == ExprKind::Call && value.text == "append" &&
                      !functions_.count(value.text) && !module_.find_extern(value.text);
    if (!concat && !push) return false;
    const Expr& first = *value.operands[0];
    if (first.kind != ExprKind::Var || first.text != target.text) return false;
    Value* place = find_local(target.text);
    if (!place || place->is_unset()) return false;
    if (concat && !place->is_string()) return false;
    if (push && !place->is_array()) return false;

    if (push) step();
    Value extra = eval(*value.operands[1]);
    place = find_local(target.text);
    if (concat) {
      const std::string& tail = extra.as_string();
      check_length(place->as_string().size() + tail.size());
      place->as_string() += tail;
    } else {
      auto& items = place->as_array().items;
      check_length(items.size() + 1);
      items.push_back(std::move(extra));
    }
    return true;
  }

  Value* find_local(const std::string& name) {
    auto& scopes = frames_.back();
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      if (Value* v = find_in(*it, name)) return v;
    }
    return nullptr;
  }

  void assign(const Expr& target, Value v) {
    // Evaluate every index before resolving the place, so calls inside
    // index expressions cannot invalidate it.
    struct Step {
      const Expr* expr;
      std::int64_t index;
    };
    std::vector<Step> path;
    const Expr* e = &target;
    while (e->kind != ExprKind::Var) {
      if (e->kind == ExprKind::Index) {
        path.push_back({e, eval_int(*e->operands[1])});
      } else if (e->kind == ExprKind::Field) {
        path.push_back({e, 0});
      } else {
        fail("invalid assignment target");
      }
      e = e->operands[0].get();
    }
    Value* place = &lookup(e->text);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      if (place->is_unset()) fail("read of unassigned variable");
      if (it->expr->kind == ExprKind::Index) {
        auto& items = place->as_array().items;
        if (it->index < 0 || static_cast<std::size_t>(it->index) >= items.size()) {
          fail("index " + std::to_string(it->index) + " out of bounds");
        }
        place = &items[static_cast<std::size_t>(it->index)];
      } else {
        RecordValue& r = place->as_record();
        place = &r.fields[field_slot(r, it->expr->text)];
      }
    }
    *place = std::move(v);
  }

  std::size_t field_slot(const RecordValue& r, const std::string& field) const {
    int idx = record(r.type).field_index(field);
    if (idx < 0 || static_cast<std::size_t>(idx) >= r.fields.size()) {
      fail("record has no field '" + field + "'");
    }
    return static_cast<std::size_t>(idx);
  }

  // ---- expressions

  // Operand values, borrowed from variables where that cannot be observed.
  // Borrowing is unsafe only when a later operand calls a user function,
  // which may reassign a global that an earlier operand refers to.
  struct Operands {
    std::array<Value, 3> tmp;
    std::array<const Value*, 3> ptr{};
    Operands() = default;
    Operands(const Operands&) = delete;
    Operands& operator=(const Operands&) = delete;
    const Value& operator[](std::size_t i) const { return *ptr[i]; }
  };

  void operands(const Expr& e, Operands& out) {
    const std::size_t n = e.operands.size();
    if (n > out.ptr.size()) fail("too many operands");
    const bool borrow = !calls_user_function(e);
    for (std::size_t i = 0; i < n; ++i) {
      if (borrow) {
        out.ptr[i] = &eval_ref(*e.operands[i], out.tmp[i]);
      } else {
        out.tmp[i] = eval(*e.operands[i]);
        out.ptr[i] = &out.tmp[i];
      }
    }
  }

  bool calls_user_function(const Expr& e) {
    auto it = calls_user_.find(&e);
    if (it != calls_user_.end()) return it->second;
    bool found = false;
    for (const auto& op : e.operands) {
      if (op->kind == ExprKind::Call && functions_.count(op->text)) found = true;
      if (!found && calls_user_function(*op)) found = true;
    }
    calls_user_.emplace(&e, found);
    return found;
  }

  bool eval_bool(const Expr& e) {
    Value v = eval(e);
    if (!v.is_bool()) fail("condition is not a bool");
    return v.as_bool();
  }

  std::int64_t eval_int(const Expr& e) {
    Value v = eval(e);
    if (!v.is_int()) fail("expected an int");
    return v.as_int();
  }

  // Reference to the value of a place expression without copying the
  // containing aggregate; `tmp` holds temporaries.
  const Value& eval_ref(const Expr& e, Value& tmp) {
    switch (e.kind) {
      case ExprKind::Var: {
        const Value& v = lookup(e.text);
        if (v.is_unset()) fail("read of unassigned variable '" + e.text + "'");
        return v;
      }
      case ExprKind::Index: {
        std::int64_t i = eval_int(*e.operands[1]);
        const Value& base = eval_ref(*e.operands[0], tmp);
        if (base.is_string()) fail("strings are not indexable");
        const auto& items = base.as_array().items;
        if (i < 0 || static_cast<std::size_t>(i) >= items.size()) {
          fail("index " + std::to_string(i) + " out of bounds");
        }
        return items[static_cast<std::size_t>(i)];
      }
      case ExprKind::Field: {
        const Value& base = eval_ref(*e.operands[0], tmp);
        const RecordValue& r = base.as_record();
        return r.fields[field_slot(r, e.text)];
      }
      default:
        tmp = eval(e);
        return tmp;
    }
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Value(e.int_value);
      case ExprKind::FloatLit: return Value(e.float_value);
      case ExprKind::BoolLit: return Value(e.bool_value);
      case ExprKind::StringLit: return Value(e.string_value);
      case ExprKind::Var:
      case ExprKind::Index:
      case ExprKind::Field: {
        Value tmp;
        const Value& v = eval_ref(e, tmp);
        if (&v == &tmp) return tmp;
        return v;
      }
      case ExprKind::Unary: {
        Value v = eval(*e.operands[0]);
        if (e.op == Op::Not) return Value(!v.as_bool());
        if (v.is_int()) return Value(wrap_sub(0, v.as_int()));
        return Value(-v.as_float());
      }
      case ExprKind::Binary: return binary(e);
      case ExprKind::ArrayLit: {
        ArrayValue arr;
        arr.items.reserve(e.operands.size());
        for (const auto& op : e.operands) arr.items.push_back(eval(*op));
        return Value(std::move(arr));
      }
      case ExprKind::RecordLit: {
        const RecordDecl& rec = record(e.text);
        RecordValue r{rec.name, std::vector<Value>(rec.fields.size())};
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          int idx = rec.field_index(e.field_names[i]);
          if (idx < 0) fail("record has no field '" + e.field_names[i] + "'");
          Value v = eval(*e.operands[i]);
          retype(v, rec.fields[static_cast<std::size_t>(idx)].type);
          r.fields[static_cast<std::size_t>(idx)] = std::move(v);
        }
        return Value(std::move(r));
      }
      case ExprKind::Call: return call_expr(e);
    }
    fail("unknown expression");
  }

  Value binary(const Expr& e) {
    if (e.op == Op::And) return Value(eval_bool(*e.operands[0]) && eval_bool(*e.operands[1]));
    if (e.op == Op::Or) return Value(eval_bool(*e.operands[0]) || eval_bool(*e.operands[1]));
    Operands ops;
    operands(e, ops);
    const Value& a = ops[0];
    const Value& b = ops[1];
    switch (e.op) {
      case Op::Eq: return Value(lang_equal(a, b));
      case Op::Ne: return Value(!lang_equal(a, b));
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge: {
        int c = 0;
        bool unordered = false;
        if (a.is_int()) {
          c = a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
        } else if (a.is_float()) {
          double x = a.as_float();
          double y = b.as_float();
          unordered = std::isnan(x) || std::isnan(y);
          c = x < y ? -1 : (x > y ? 1 : 0);
        } else {
          c = a.as_string().compare(b.as_string());
          c = c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        if (unordered) return Value(false);
        switch (e.op) {
          case Op::Lt: return Value(c < 0);
          case Op::Le: return Value(c <= 0);
          case Op::Gt: return Value(c > 0);
          default: return Value(c >= 0);
        }
      }
      default: break;
    }
    if (a.is_string()) {
      check_length(a.as_string().size() + b.as_string().size());
      return Value(a.as_string() + b.as_string());
    }
    if (a.is_int()) {
      std::int64_t x = a.as_int();
      std::int64_t y = b.as_int();
      switch (e.op) {
        case Op::Add: return Value(wrap_add(x, y));
        case Op::Sub: return Value(wrap_sub(x, y));
        case Op::Mul: return Value(wrap_mul(x, y));
        case Op::Div:
          if (y == 0) fail("division by zero");
          if (y == -1) return Value(wrap_sub(0, x));
          return Value(x / y);
        case Op::Mod:
          if (y == 0) fail("modulo by zero");
          if (y == -1) return Value(std::int64_t{0});
          return Value(x % y);
        default: break;
      }
    } else {
      double x = a.as_float();
      double y = b.as_float();
      switch (e.op) {
        case Op::Add: return Value(x + y);
        case Op::Sub: return Value(x - y);
        case Op::Mul: return Value(x * y);
        case Op::Div:
          if (y == 0.0) fail("division by zero");
          return Value(x / y);
        default: break;
      }
    }
    fail("bad operands for '" + std::string(op_symbol(e.op)) + "'");
  }

  Value call_expr(const Expr& e) {
    auto fn = functions_.find(e.text);
    if (fn != functions_.end()) {
      std::vector<Value> args;
      args.reserve(e.operands.size());
      for (const auto& op : e.operands) args.push_back(eval(*op));
      return call(*fn->second, std::move(args));
    }
    if (module_.find_extern(e.text)) {
      throw Failure{RunError::effect_denied, "extern call '" + e.text + "' denied"};
    }
    step();
    return builtin(e);
  }

  Value call(const FunctionDecl& fn, std::vector<Value> args) {
    step();
    if (static_cast<int>(frames_.size()) >= policy_.max_call_depth) fail("call depth exceeded");
    if (args.size() != fn.params.size()) fail("arity mismatch calling '" + fn.name + "'");
    frames_.emplace_back();
    frames_.back().emplace_back();
    for (std::size_t i = 0; i < args.size(); ++i) {
      retype(args[i], fn.params[i].type);
      frames_.back().back().emplace_back(fn.params[i].name, std::move(args[i]));
    }
    Flow f = exec_list(fn.body);
    frames_.pop_back();
    if (f == Flow::Return) {
      Value v = std::move(return_value_);
      return_value_ = Value();
      return v;
    }
    if (!fn.return_type.is_void()) fail("function '" + fn.name + "' ended without a return");
    return Value();
  }

  Value builtin(const Expr& e) {
    Operands a;
    operands(e, a);
    const std::string& n = e.text;
    if (n == "len") {
      return Value(static_cast<std::int64_t>(a[0].is_string() ? a[0].as_string().size()
                                                              : a[0].as_array().items.size()));
    }
    if (n == "substr") {
      const std::string& s = a[0].as_string();
      std::int64_t start = a[1].as_int();
      std::int64_t count = a[2].as_int();
      if (start < 0 || count < 0 || start > static_cast<std::int64_t>(s.size()) ||
          count > static_cast<std::int64_t>(s.size()) - start) {
        fail("substr out of range");
      }
      return Value(s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(count)));
    }
    if (n == "char_at") {
      const std::string& s = a[0].as_string();
      std::int64_t i = a[1].as_int();
      if (i < 0 || i >= static_cast<std::int64_t>(s.size())) fail("char_at out of range");
      return Value(static_cast<std::int64_t>(static_cast<unsigned char>(s[static_cast<std::size_t>(i)])));
    }
    if (n == "chr") {
      std::int64_t c = a[0].as_int();
      if (c < 0 || c > 255) fail("chr argument out of range");
      return Value(std::string(1, static_cast<char>(c)));
    }
    if (n == "to_lower" || n == "to_upper") {
      std::string s = a[0].as_string();
      bool lower = n == "to_lower";
      for (char& c : s) {
        if (lower && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (!lower && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
      return Value(std::move(s));
    }
    if (n == "trim") {
      const std::string& s = a[0].as_string();
      std::size_t b = 0;
      std::size_t end = s.size();
      while (b < end && is_space(s[b])) ++b;
      while (end > b && is_space(s[end - 1])) --end;
      return Value(s.substr(b, end - b));
    }
    if (n == "itos") return Value(std::to_string(a[0].as_int()));
    if (n == "stoi") {
      const std::string& s = a[0].as_string();
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        fail("stoi: not an integer");
      }
      return Value(v);
    }
    if (n == "ftos") return Value(float_text(a[0].as_float()));
    if (n == "to_float") return Value(static_cast<double>(a[0].as_int()));
    if (n == "to_int") {
      double d = a[0].as_float();
      if (std::isnan(d) || d >= 9223372036854775808.0 || d < -9223372036854775808.0) {
        fail("to_int out of range");
      }
      return Value(static_cast<std::int64_t>(d));
    }
    if (n == "abs") {
      if (a[0].is_int()) {
        std::int64_t v = a[0].as_int();
        return Value(v < 0 ? wrap_sub(0, v) : v);
      }
      return Value(std::fabs(a[0].as_float()));
    }
    if (n == "min" || n == "max") {
      bool take_first;
      if (a[0].is_int()) {
        take_first = n == "min" ? a[0].as_int() <= a[1].as_int() : a[0].as_int() >= a[1].as_int();
      } else {
        take_first = n == "min" ? a[0].as_float() <= a[1].as_float()
                                : a[0].as_float() >= a[1].as_float();
      }
      return take_first ? a[0] : a[1];
    }
    if (n == "sqrt") return Value(std::sqrt(a[0].as_float()));
    if (n == "append") {
      ArrayValue arr = a[0].as_array();
      check_length(arr.items.size() + 1);
      arr.items.push_back(a[1]);
      return Value(std::move(arr));
    }
    if (n == "new_array") {
      std::int64_t count = a[0].as_int();
      if (count < 0) fail("new_array with negative size");
      check_length(static_cast<std::size_t>(count));
      return Value(ArrayValue{std::vector<Value>(static_cast<std::size_t>(count), a[1])});
    }
    const std::string& s = a[0].as_string();
    const std::string& t = a[1].as_string();
    if (n == "contains") return Value(s.find(t) != std::string::npos);
    if (n == "starts_with") return Value(s.compare(0, t.size(), t) == 0 && s.size() >= t.size());
    if (n == "ends_with") {
      return Value(s.size() >= t.size() && s.compare(s.size() - t.size(), t.size(), t) == 0);
    }
    if (n == "index_of") {
      auto pos = s.find(t);
      return Value(pos == std::string::npos ? std::int64_t{-1} : static_cast<std::int64_t>(pos));
    }
    fail("unknown builtin '" + n + "'");
  }

  const Module& module_;
  const ExecPolicy& policy_;
  std::unordered_map<std::string, const RecordDecl*> records_;
  std::unordered_map<std::string, const FunctionDecl*> functions_;
  std::vector<std::vector<Scope>> frames_;
  Scope globals_;
  Value return_value_;
  std::unordered_map<const Expr*, bool> calls_user_;
  std::uint64_t steps_ = 0;
};

}  // namespace

Outcome execute(const Chunk& chunk, const std::vector<Value>& inputs, const ExecPolicy& policy) {
  Interpreter interp(*chunk.module, policy);
  return interp.run(chunk, inputs);
}

Outcome call_function(const Module& module, std::string_view name,
                      const std::vector<Value>& args, const ExecPolicy& policy) {
  Interpreter interp(module, policy);
  return interp.call_named(name, args);
}

ExecutionRecord run_chunk(const Chunk& chunk, const std::vector<InputVector>& inputs,
                          const ExecPolicy& policy) {
  ExecutionRecord rec;
  rec.chunk_id = chunk.id;
  rec.runs.reserve(inputs.size());
  Interpreter interp(*chunk.module, policy);
  for (const auto& in : inputs) rec.runs.push_back(Run{in.index, interp.run(chunk, in.values)});
  std::stable_sort(rec.runs.begin(), rec.runs.end(),
                   [](const Run& a, const Run& b) { return a.input_index < b.input_index; });
  return rec;
}

std::vector<std::pair<std::size_t, std::size_t>> partition_batches(std::size_t count,
                                                                   std::size_t batch_size) {
  if (batch_size == 0) batch_size = 1;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < count; b += batch_size) out.emplace_back(b, std::min(count, b + batch_size));
  return out;
}

std::vector<ExecutionRecord> run_batch(const std::vector<ExecJob>& jobs, const ExecPolicy& policy) {
  std::vector<ExecutionRecord> records(jobs.size());
  const auto batches = partition_batches(jobs.size(), policy.batch_size);

  auto run_one_batch = [&](std::size_t b) {
    for (std::size_t i = batches[b].first; i < batches[b].second; ++i) {
      const ExecJob& job = jobs[i];
      try {
        records[i] = run_chunk(*job.chunk, *job.inputs, policy);
      } catch (const std::exception& ex) {
        // Isolated to this chunk: every run becomes a runtime error.
        ExecutionRecord failed;
        failed.chunk_id = job.chunk->id;
        for (const auto& in : *job.inputs) {
          failed.runs.push_back(Run{in.index, Outcome{{}, RunError::runtime, ex.what()}});
        }
        records[i] = std::move(failed);
      }
    }
  };

  std::size_t workers = policy.workers != 0 ? policy.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, batches.size()));
  if (workers == 1) {
    for (std::size_t b = 0; b < batches.size(); ++b) run_one_batch(b);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < batches.size(); b = next++) run_one_batch(b);
    });
  }
  for (auto& t : pool) t.join();
  return records;
}

}  // namespace simion

#include <sstream>
#include <unordered_map>

#include "simion/lang.hpp"

namespace simion {

namespace {

int precedence(const Expr& e) {
  if (e.kind == ExprKind::Binary) {
    switch (e.op) {
      case Op::Or: return 1;
      case Op::And: return 2;
      case Op::Eq:
      case Op::Ne: return 3;
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge: return 4;
      case Op::Add:
      case Op::Sub: return 5;
      default: return 6;
    }
  }
  if (e.kind == ExprKind::Unary) return 7;
  // Negative literal folded from -9223372036854775808 behaves like a unary.
  if (e.kind == ExprKind::IntLit && !e.text.empty() && e.text[0] == '-') return 7;
  return 8;
}

enum class Tok { Plain, Variable };

// Emits the lexical tokens of statements and expressions. Parentheses are
// inserted only where precedence requires them.
class TokenEmitter {
 public:
  explicit TokenEmitter(std::vector<std::pair<Tok, std::string>>& out) : out_(out) {}

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::FloatLit:
      case ExprKind::BoolLit:
      case ExprKind::StringLit:
        plain(e.text);
        break;
      case ExprKind::Var:
        out_.emplace_back(Tok::Variable, e.text);
        break;
      case ExprKind::Unary:
        plain(std::string(op_symbol(e.op)));
        operand(*e.operands[0], 7, false);
        break;
      case ExprKind::Binary: {
        int p = precedence(e);
        operand(*e.operands[0], p, false);
        plain(std::string(op_symbol(e.op)));
        operand(*e.operands[1], p, true);
        break;
      }
      case ExprKind::ArrayLit:
        plain("[");
        list(e.operands);
        plain("]");
        break;
      case ExprKind::Index:
        operand(*e.operands[0], 8, false);
        plain("[");
        expr(*e.operands[1]);
        plain("]");
        break;
      case ExprKind::Field:
        operand(*e.operands[0], 8, false);
        plain(".");
        plain(e.text);
        break;
      case ExprKind::Call:
        plain(e.text);
        plain("(");
        list(e.operands);
        plain(")");
        break;
      case ExprKind::RecordLit:
        plain(e.text);
        plain("{");
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          if (i > 0) plain(",");
          plain(e.field_names[i]);
          plain(":");
          expr(*e.operands[i]);
        }
        plain("}");
        break;
    }
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::VarDecl:
        var_decl(s);
        plain(";");
        break;
      case StmtKind::Assign:
        assign(s);
        plain(";");
        break;
      case StmtKind::If:
        plain("if");
        plain("(");
        expr(*s.value);
        plain(")");
        block(s.body);
        if (s.has_else) {
          plain("else");
          if (s.else_if && s.else_body.size() == 1) {
            stmt(*s.else_body[0]);
          } else {
            block(s.else_body);
          }
        }
        break;
      case StmtKind::While:
        plain("while");
        plain("(");
        expr(*s.value);
        plain(")");
        block(s.body);
        break;
      case StmtKind::For:
        plain("for");
        plain("(");
        if (s.init->kind == StmtKind::VarDecl) {
          var_decl(*s.init);
        } else {
          assign(*s.init);
        }
        plain(";");
        expr(*s.value);
        plain(";");
        assign(*s.step);
        plain(")");
        block(s.body);
        break;
      case StmtKind::Return:
        plain("return");
        if (s.value) expr(*s.value);
        plain(";");
        break;
      case StmtKind::Break:
        plain("break");
        plain(";");
        break;
      case StmtKind::Continue:
        plain("continue");
        plain(";");
        break;
      case StmtKind::ExprStmt:
        expr(*s.value);
        plain(";");
        break;
      case StmtKind::Block:
        block(s.body);
        break;
      case StmtKind::Exit:
        plain("exit");
        plain(";");
        break;
    }
  }

 private:
  void plain(std::string t) { out_.emplace_back(Tok::Plain, std::move(t)); }

  void operand(const Expr& e, int parent, bool right) {
    int p = precedence(e);
    bool parens = p < parent || (right && p == parent);
    if (parens) plain("(");
    expr(e);
    if (parens) plain(")");
  }

  void list(const std::vector<ExprPtr>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) plain(",");
      expr(*items[i]);
    }
  }

  void var_decl(const Stmt& s) {
    plain("var");
    out_.emplace_back(Tok::Variable, s.name);
    if (s.declared_type) {
      plain(":");
      plain(s.declared_type->str());
    }
    plain("=");
    expr(*s.value);
  }

  void assign(const Stmt& s) {
    expr(*s.target);
    plain("=");
    expr(*s.value);
  }

  void block(const StmtList& body) {
    plain("{");
    for (const auto& s : body) stmt(*s);
    plain("}");
  }

  std::vector<std::pair<Tok, std::string>>& out_;
};

std::string join_expr(const Expr& e);

std::string join_operand(const Expr& e, int parent, bool right) {
  int p = precedence(e);
  bool parens = p < parent || (right && p == parent);
  return parens ? "(" + join_expr(e) + ")" : join_expr(e);
}

std::string join_list(const std::vector<ExprPtr>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += join_expr(*items[i]);
  }
  return out;
}

std::string join_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit:
    case ExprKind::BoolLit:
    case ExprKind::StringLit:
    case ExprKind::Var:
      return e.text;
    case ExprKind::Unary:
      return std::string(op_symbol(e.op)) + join_operand(*e.operands[0], 7, false);
    case ExprKind::Binary: {
      int p = precedence(e);
      return join_operand(*e.operands[0], p, false) + " " + std::string(op_symbol(e.op)) + " " +
             join_operand(*e.operands[1], p, true);
    }
    case ExprKind::ArrayLit:
      return "[" + join_list(e.operands) + "]";
    case ExprKind::Index:
      return join_operand(*e.operands[0], 8, false) + "[" + join_expr(*e.operands[1]) + "]";
    case ExprKind::Field:
      return join_operand(*e.operands[0], 8, false) + "." + e.text;
    case ExprKind::Call:
      return e.text + "(" + join_list(e.operands) + ")";
    case ExprKind::RecordLit: {
      std::string out = e.text + "{";
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i > 0) out += ", ";
        out += e.field_names[i] + ": " + join_expr(*e.operands[i]);
      }
      return out + "}";
    }
  }
  return {};
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent, bool first_in_block);

void print_body(std::ostringstream& os, const StmtList& body, int indent) {
  os << "{\n";
  for (std::size_t i = 0; i < body.size(); ++i) print_stmt(os, *body[i], indent + 1, i == 0);
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "}";
}

std::string simple_stmt(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::VarDecl:
      return "var " + s.name + (s.declared_type ? ": " + s.declared_type->str() : "") +
             " = " + join_expr(*s.value);
    case StmtKind::Assign:
      return join_expr(*s.target) + " = " + join_expr(*s.value);
    default:
      return {};
  }
}

void print_if_tail(std::ostringstream& os, const Stmt& s, int indent) {
  os << "if (" << join_expr(*s.value) << ") ";
  print_body(os, s.body, indent);
  if (s.has_else) {
    os << " else ";
    if (s.else_if && s.else_body.size() == 1) {
      print_if_tail(os, *s.else_body[0], indent);
    } else {
      print_body(os, s.else_body, indent);
    }
  }
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent, bool first_in_block) {
  if (s.separated_before) os << "\n";
  (void)first_in_block;
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad;
  switch (s.kind) {
    case StmtKind::VarDecl:
    case StmtKind::Assign:
      os << simple_stmt(s) << ";";
      break;
    case StmtKind::If:
      print_if_tail(os, s, indent);
      break;
    case StmtKind::While:
      os << "while (" << join_expr(*s.value) << ") ";
      print_body(os, s.body, indent);
      break;
    case StmtKind::For:
      os << "for (" << simple_stmt(*s.init) << "; " << join_expr(*s.value) << "; "
         << simple_stmt(*s.step) << ") ";
      print_body(os, s.body, indent);
      break;
    case StmtKind::Return:
      os << "return" << (s.value ? " " + join_expr(*s.value) : "") << ";";
      break;
    case StmtKind::Break: os << "break;"; break;
    case StmtKind::Continue: os << "continue;"; break;
    case StmtKind::ExprStmt: os << join_expr(*s.value) << ";"; break;
    case StmtKind::Block: print_body(os, s.body, indent); break;
    case StmtKind::Exit: os << "exit;"; break;
  }
  os << "\n";
}

std::string params_str(const std::vector<ParamDecl>& params) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out += ", ";
    out += params[i].name + ": " + params[i].type.str();
  }
  return out;
}

std::string return_str(const TypeRef& t) { return t.is_void() ? "" : " -> " + t.str(); }

}  // namespace

std::string print_statements(const StmtList& stmts, int indent) {
  std::ostringstream os;
  for (std::size_t i = 0; i < stmts.size(); ++i) print_stmt(os, *stmts[i], indent, i == 0);
  return os.str();
}

std::string print_module(const Module& m) {
  std::ostringstream os;
  for (const auto& r : m.records) {
    os << "record " << r.name << " { ";
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
      if (i > 0) os << ", ";
      os << r.fields[i].name << ": " << r.fields[i].type.str();
    }
    os << " }\n";
  }
  for (const auto& o : m.opaques) os << "opaque " << o.name << ";\n";
  for (const auto& e : m.externs) {
    os << "extern " << category_name(e.category) << " fn " << e.name << "("
       << params_str(e.params) << ")" << return_str(e.return_type) << ";\n";
  }
  for (const auto& g : m.globals) {
    os << "global " << g.name << ": " << g.type.str() << " = " << join_expr(*g.init) << ";\n";
  }
  for (const auto& f : m.functions) {
    os << "\nfn " << f.name << "(" << params_str(f.params) << ")" << return_str(f.return_type)
       << " {\n";
    os << print_statements(f.body, 1);
    os << "}\n";
  }
  return os.str();
}

namespace {

void collect_tokens(const StmtList& stmts, TokenMode mode,
                    std::unordered_map<std::string, int>& names,
                    std::vector<std::string>& per_stmt) {
  for (const auto& s : stmts) {
    std::vector<std::pair<Tok, std::string>> toks;
    TokenEmitter(toks).stmt(*s);
    std::string joined;
    for (auto& [kind, text] : toks) {
      if (!joined.empty()) joined += ' ';
      if (kind == Tok::Variable && mode == TokenMode::ConsistentRename) {
        auto [it, inserted] = names.emplace(text, static_cast<int>(names.size()));
        joined += "$" + std::to_string(it->second);
      } else {
        joined += text;
      }
    }
    per_stmt.push_back(std::move(joined));
  }
}

}  // namespace

std::vector<std::string> normalize_statements(const StmtList& stmts, TokenMode mode) {
  std::unordered_map<std::string, int> names;
  std::vector<std::string> out;
  collect_tokens(stmts, mode, names, out);
  return out;
}

std::vector<std::string> normalize_tokens(const StmtList& stmts, TokenMode mode) {
  std::unordered_map<std::string, int> names;
  std::vector<std::string> out;
  for (const auto& s : stmts) {
    std::vector<std::pair<Tok, std::string>> toks;
    TokenEmitter(toks).stmt(*s);
    for (auto& [kind, text] : toks) {
      if (kind == Tok::Variable && mode == TokenMode::ConsistentRename) {
        auto [it, inserted] = names.emplace(text, static_cast<int>(names.size()));
        out.push_back("$" + std::to_string(it->second));
      } else {
        out.push_back(std::move(text));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

bool same_list(const StmtList& a, const StmtList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_structure(*a[i], *b[i])) return false;
  }
  return true;
}

bool same_opt_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

bool same_opt_stmt(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

bool same_params(const std::vector<ParamDecl>& a, const std::vector<ParamDecl>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !(a[i].type == b[i].type)) return false;
  }
  return true;
}

}  // namespace

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
    case ExprKind::IntLit:
      if (a.int_value != b.int_value) return false;
      break;
    case ExprKind::FloatLit:
      if (a.text != b.text) return false;
      break;
    case ExprKind::BoolLit:
      if (a.bool_value != b.bool_value) return false;
      break;
    case ExprKind::StringLit:
      if (a.string_value != b.string_value) return false;
      break;
    case ExprKind::Unary:
    case ExprKind::Binary:
      if (a.op != b.op) return false;
      break;
    case ExprKind::Var:
    case ExprKind::Field:
    case ExprKind::Call:
      if (a.text != b.text) return false;
      break;
    case ExprKind::RecordLit:
      if (a.text != b.text || a.field_names != b.field_names) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (!same_structure(*a.operands[i], *b.operands[i])) return false;
  }
  return true;
}

bool same_structure(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.separated_before != b.separated_before || a.name != b.name ||
      a.has_else != b.has_else) {
    return false;
  }
  if (a.declared_type.has_value() != b.declared_type.has_value()) return false;
  if (a.declared_type && !(*a.declared_type == *b.declared_type)) return false;
  return same_opt_expr(a.target, b.target) && same_opt_expr(a.value, b.value) &&
         same_list(a.body, b.body) && same_list(a.else_body, b.else_body) &&
         same_opt_stmt(a.init, b.init) && same_opt_stmt(a.step, b.step);
}

bool same_structure(const Module& a, const Module& b) {
  if (a.records.size() != b.records.size() || a.opaques.size() != b.opaques.size() ||
      a.globals.size() != b.globals.size() || a.functions.size() != b.functions.size() ||
      a.externs.size() != b.externs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[i];
    if (ra.name != rb.name || ra.fields.size() != rb.fields.size()) return false;
    for (std::size_t j = 0; j < ra.fields.size(); ++j) {
      if (ra.fields[j].name != rb.fields[j].name || !(ra.fields[j].type == rb.fields[j].type)) {
        return false;
      }
    }
  }
  for (std::size_t i = 0; i < a.opaques.size(); ++i) {
    if (a.opaques[i].name != b.opaques[i].name) return false;
  }
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    const auto& ga = a.globals[i];
    const auto& gb = b.globals[i];
    if (ga.name != gb.name || !(ga.type == gb.type) || !same_structure(*ga.init, *gb.init)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.externs.size(); ++i) {
    const auto& ea = a.externs[i];
    const auto& eb = b.externs[i];
    if (ea.name != eb.name || ea.category != eb.category ||
        !(ea.return_type == eb.return_type) || !same_params(ea.params, eb.params)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || !(fa.return_type == fb.return_type) ||
        !same_params(fa.params, fb.params) || !same_list(fa.body, fb.body)) {
      return false;
    }
  }
  return true;
}

}  // namespace simion

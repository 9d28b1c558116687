#include <charconv>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

#include "simion/lang.hpp"

namespace simion {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

SourceFile SourceFile::from_text(std::string path, std::string text) {
  SourceFile file;
  file.path = std::move(path);
  file.text = std::move(text);
  std::size_t start = 0;
  const std::string& t = file.text;
  while (start < t.size()) {
    std::size_t end = t.find('\n', start);
    if (end == std::string::npos) end = t.size();
    std::string line = t.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    file.lines.push_back(std::move(line));
    start = end + 1;
  }
  return file;
}

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') continue;
    return c == '#';
  }
  return true;
}

std::size_t sloc(const SourceFile& file) {
  std::size_t n = 0;
  for (const auto& line : file.lines) {
    if (!is_blank_or_comment(line)) ++n;
  }
  return n;
}

namespace {

enum class TokKind { Ident, Int, Float, String, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;   // lexeme (decoded contents for strings)
  std::string raw;    // raw lexeme for literals
  int line = 1;
  int column = 1;
  int end_line = 1;
  int end_column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "fn",     "var",    "if",     "else",   "while",  "for",  "return",
    "break",  "continue", "true", "false",  "record", "opaque", "global",
    "extern", "int",    "float",  "bool",   "string", "void",
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= text_.size()) {
        tok.kind = TokKind::End;
        tok.end_line = line_;
        tok.end_column = column_;
        out.push_back(tok);
        return out;
      }
      char c = text_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        tok.kind = TokKind::Ident;
        tok.text = std::string(text_.substr(start, pos_ - start));
      } else if (is_digit(c)) {
        lex_number(tok);
      } else if (c == '"') {
        lex_string(tok);
      } else {
        lex_punct(tok);
      }
      tok.end_line = line_;
      tok.end_column = column_ - 1;
      out.push_back(std::move(tok));
    }
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& tok) {
    std::size_t start = pos_;
    bool is_float = false;
    while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && is_digit(text_[pos_ + 1])) {
      is_float = true;
      advance();
      while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = column_;
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      if (pos_ < text_.size() && is_digit(text_[pos_])) {
        is_float = true;
        while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
      } else {
        pos_ = save;
        column_ = save_col;
      }
    }
    tok.kind = is_float ? TokKind::Float : TokKind::Int;
    tok.text = std::string(text_.substr(start, pos_ - start));
    tok.raw = tok.text;
  }

  void lex_string(Token& tok) {
    std::size_t start = pos_;
    advance();
    std::string value;
    for (;;) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        throw ParseError(tok.line, tok.column, "unterminated string literal");
      }
      char c = text_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) {
          throw ParseError(tok.line, tok.column, "unterminated string literal");
        }
        char e = text_[pos_];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default:
            throw ParseError(line_, column_, std::string("unknown escape \\") + e);
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    tok.kind = TokKind::String;
    tok.text = std::move(value);
    tok.raw = std::string(text_.substr(start, pos_ - start));
  }

  void lex_punct(Token& tok) {
    static const char* const kTwo[] = {"->", "==", "!=", "<=", ">=", "&&", "||"};
    std::string_view rest = text_.substr(pos_);
    for (const char* two : kTwo) {
      if (rest.substr(0, 2) == two) {
        tok.kind = TokKind::Punct;
        tok.text = two;
        advance();
        advance();
        return;
      }
    }
    static const std::string_view kOne = "+-*/%<>=!(){}[],;:.";
    char c = text_[pos_];
    if (kOne.find(c) == std::string_view::npos) {
      throw ParseError(line_, column_, std::string("unexpected character '") + c + "'");
    }
    tok.kind = TokKind::Punct;
    tok.text = std::string(1, c);
    advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

struct MutExpr;

class Parser {
 public:
  Parser(std::vector<Token> tokens, const SourceFile& file)
      : toks_(std::move(tokens)), file_(file) {
    prescan();
  }

  Module run() {
    Module m;
    m.path = file_.path;
    while (!at_end()) parse_decl(m);
    check_decls(m);
    return m;
  }

 private:
  // -- token helpers -------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Punct && t.text == p;
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Ident && t.text == w;
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_ = &t;
    return t;
  }
  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(at.line, at.column, message);
  }
  std::string describe(const Token& t) const {
    if (t.kind == TokKind::End) return "end of input";
    return "'" + (t.raw.empty() ? t.text : t.raw) + "'";
  }
  const Token& expect_punct(std::string_view p) {
    if (!is_punct(p)) fail(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
    return take();
  }
  const Token& expect_word(std::string_view w) {
    if (!is_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
    return take();
  }
  std::string expect_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != TokKind::Ident || kKeywords.count(t.text) != 0) {
      fail(t, std::string("expected ") + what + ", found " + describe(t));
    }
    if (is_reserved_identifier(t.text)) {
      fail(t, "identifier '" + t.text + "' is reserved (contains '__')");
    }
    return take().text;
  }

  static SourceSpan span_from(const Token& first, const Token& last) {
    return SourceSpan{first.line, first.column, last.end_line, last.end_column};
  }

  void prescan() {
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      if (toks_[i].kind != TokKind::Ident || toks_[i + 1].kind != TokKind::Ident) continue;
      if (toks_[i].text == "opaque") opaque_names_.insert(toks_[i + 1].text);
      if (toks_[i].text == "record") record_names_.insert(toks_[i + 1].text);
    }
  }

  // -- declarations --------------------------------------------------------
  void parse_decl(Module& m) {
    const Token& t = peek();
    if (is_word("fn")) {
      m.functions.push_back(parse_function());
    } else if (is_word("record")) {
      m.records.push_back(parse_record());
    } else if (is_word("opaque")) {
      const Token& first = take();
      OpaqueDecl d;
      d.name = expect_ident("opaque type name");
      d.span = span_from(first, expect_punct(";"));
      m.opaques.push_back(std::move(d));
    } else if (is_word("global")) {
      const Token& first = take();
      GlobalVar g;
      g.name = expect_ident("global name");
      expect_punct(":");
      g.type = parse_type();
      expect_punct("=");
      g.init = parse_expr();
      g.span = span_from(first, expect_punct(";"));
      m.globals.push_back(std::move(g));
    } else if (is_word("extern")) {
      m.externs.push_back(parse_extern());
    } else {
      fail(t, "expected declaration, found " + describe(t));
    }
  }

  RecordDecl parse_record() {
    const Token& first = take();
    RecordDecl r;
    r.name = expect_ident("record name");
    expect_punct("{");
    while (!is_punct("}")) {
      FieldDecl f;
      f.name = expect_ident("field name");
      expect_punct(":");
      f.type = parse_type();
      r.fields.push_back(std::move(f));
      if (!is_punct(",")) break;
      take();
    }
    r.span = span_from(first, expect_punct("}"));
    return r;
  }

  std::vector<ParamDecl> parse_params() {
    std::vector<ParamDecl> params;
    expect_punct("(");
    while (!is_punct(")")) {
      const Token& first = peek();
      ParamDecl p;
      p.name = expect_ident("parameter name");
      expect_punct(":");
      p.type = parse_type();
      p.span = span_from(first, *last_);
      params.push_back(std::move(p));
      if (!is_punct(",")) break;
      take();
    }
    expect_punct(")");
    return params;
  }

  TypeRef parse_return_type() {
    if (!is_punct("->")) return TypeRef::void_type();
    take();
    return parse_type(/*allow_void=*/true);
  }

  ExternDecl parse_extern() {
    const Token& first = take();
    ExternDecl d;
    const Token& cat = peek();
    std::string cat_name = expect_ident("extern category (io, net, db, ui)");
    auto category = parse_category(cat_name);
    if (!category) fail(cat, "unknown extern category '" + cat_name + "'");
    d.category = *category;
    expect_word("fn");
    d.name = expect_ident("extern name");
    d.params = parse_params();
    d.return_type = parse_return_type();
    d.span = span_from(first, expect_punct(";"));
    return d;
  }

  FunctionDecl parse_function() {
    const Token& first = take();
    FunctionDecl f;
    f.name = expect_ident("function name");
    f.params = parse_params();
    f.return_type = parse_return_type();
    f.body = parse_block();
    f.span = span_from(first, *last_);
    return f;
  }

  TypeRef parse_type(bool allow_void = false) {
    const Token& t = peek();
    if (is_punct("[")) {
      take();
      TypeRef elem = parse_type();
      expect_punct("]");
      return TypeRef::array_of(std::move(elem));
    }
    if (t.kind != TokKind::Ident) fail(t, "expected type, found " + describe(t));
    take();
    if (t.text == "int") return TypeRef::int_type();
    if (t.text == "float") return TypeRef::float_type();
    if (t.text == "bool") return TypeRef::bool_type();
    if (t.text == "string") return TypeRef::string_type();
    if (t.text == "void") {
      if (!allow_void) fail(t, "'void' is only allowed as a return type");
      return TypeRef::void_type();
    }
    if (kKeywords.count(t.text) != 0) fail(t, "expected type, found " + describe(t));
    if (opaque_names_.count(t.text) != 0) return TypeRef::opaque(t.text);
    type_uses_.push_back(&t);
    return TypeRef::record(t.text);
  }

  void check_decls(const Module& m) {
    std::set<std::string> names;
    auto claim = [&](const std::string& name, const SourceSpan& span) {
      if (is_builtin(name)) {
        throw ParseError(span.line, span.column, "'" + name + "' is a builtin name");
      }
      if (!names.insert(name).second) {
        throw ParseError(span.line, span.column, "duplicate top-level name '" + name + "'");
      }
    };
    for (const auto& r : m.records) claim(r.name, r.span);
    for (const auto& o : m.opaques) claim(o.name, o.span);
    for (const auto& g : m.globals) claim(g.name, g.span);
    for (const auto& f : m.functions) claim(f.name, f.span);
    for (const auto& e : m.externs) claim(e.name, e.span);
    for (const Token* t : type_uses_) {
      if (m.find_record(t->text) == nullptr) {
        throw ParseError(t->line, t->column, "unknown type '" + t->text + "'");
      }
    }
    auto unique_names = [](const auto& items, const char* what) {
      std::set<std::string> seen;
      for (const auto& item : items) {
        if (!seen.insert(item.name).second) {
          throw ParseError(item.span.line, item.span.column,
                           std::string("duplicate ") + what + " '" + item.name + "'");
        }
      }
    };
    for (const auto& f : m.functions) unique_names(f.params, "parameter");
    for (const auto& e : m.externs) unique_names(e.params, "parameter");
    for (const auto& r : m.records) {
      std::set<std::string> seen;
      for (const auto& f : r.fields) {
        if (!seen.insert(f.name).second) {
          throw ParseError(r.span.line, r.span.column, "duplicate field '" + f.name + "'");
        }
      }
      if (r.fields.empty()) {
        throw ParseError(r.span.line, r.span.column, "record '" + r.name + "' has no fields");
      }
    }
  }

  // -- statements ----------------------------------------------------------
  bool gap_between(int after_line, int before_line) const {
    for (int l = after_line + 1; l < before_line; ++l) {
      if (l >= 1 && l <= static_cast<int>(file_.lines.size()) &&
          is_blank_or_comment(file_.lines[static_cast<std::size_t>(l - 1)])) {
        return true;
      }
    }
    return false;
  }

  StmtList parse_block() {
    const Token& open = expect_punct("{");
    StmtList out;
    int prev_end = open.line;
    while (!is_punct("}")) {
      if (at_end()) fail(peek(), "expected '}', found end of input");
      int start_line = peek().line;
      auto s = parse_stmt();
      s->separated_before = gap_between(prev_end, start_line);
      prev_end = s->span.end_line;
      out.push_back(std::move(s));
    }
    take();
    return out;
  }

  std::shared_ptr<Stmt> make_stmt(StmtKind kind) {
    auto s = std::make_shared<Stmt>();
    s->kind = kind;
    return s;
  }

  std::shared_ptr<Stmt> parse_var_decl_body(const Token& first) {
    auto s = make_stmt(StmtKind::VarDecl);
    s->name = expect_ident("variable name");
    if (is_punct(":")) {
      take();
      s->declared_type = parse_type();
    }
    expect_punct("=");
    s->value = parse_expr();
    s->span = span_from(first, *last_);
    return s;
  }

  std::shared_ptr<Stmt> parse_assign_or_expr() {
    const Token& first = peek();
    ExprPtr lhs = parse_expr();
    if (is_punct("=")) {
      const Token& eq = take();
      if (lhs->kind != ExprKind::Var && lhs->kind != ExprKind::Index &&
          lhs->kind != ExprKind::Field) {
        fail(eq, "left side of assignment is not assignable");
      }
      auto s = make_stmt(StmtKind::Assign);
      s->target = lhs;
      s->value = parse_expr();
      s->span = span_from(first, *last_);
      return s;
    }
    auto s = make_stmt(StmtKind::ExprStmt);
    s->value = lhs;
    s->span = span_from(first, *last_);
    return s;
  }

  std::shared_ptr<Stmt> parse_if() {
    const Token& first = take();
    auto s = make_stmt(StmtKind::If);
    expect_punct("(");
    s->value = parse_expr();
    expect_punct(")");
    s->body = parse_block();
    if (is_word("else")) {
      take();
      s->has_else = true;
      if (is_word("if")) {
        s->else_if = true;
        s->else_body.push_back(parse_if());
      } else {
        s->else_body = parse_block();
      }
    }
    s->span = span_from(first, *last_);
    return s;
  }

  std::shared_ptr<Stmt> parse_stmt() {
    const Token& first = peek();
    if (is_word("var")) {
      take();
      auto s = parse_var_decl_body(first);
      s->span = span_from(first, expect_punct(";"));
      return s;
    }
    if (is_word("if")) return parse_if();
    if (is_word("while")) {
      take();
      auto s = make_stmt(StmtKind::While);
      expect_punct("(");
      s->value = parse_expr();
      expect_punct(")");
      s->body = parse_block();
      s->span = span_from(first, *last_);
      return s;
    }
    if (is_word("for")) {
      take();
      auto s = make_stmt(StmtKind::For);
      expect_punct("(");
      if (is_word("var")) {
        const Token& vfirst = take();
        s->init = parse_var_decl_body(vfirst);
      } else {
        auto init = parse_assign_or_expr();
        if (init->kind != StmtKind::Assign) fail(first, "for-loop initializer must declare or assign");
        s->init = init;
      }
      expect_punct(";");
      s->value = parse_expr();
      expect_punct(";");
      auto step = parse_assign_or_expr();
      if (step->kind != StmtKind::Assign) fail(first, "for-loop step must be an assignment");
      s->step = step;
      expect_punct(")");
      s->body = parse_block();
      s->span = span_from(first, *last_);
      return s;
    }
    if (is_word("return")) {
      take();
      auto s = make_stmt(StmtKind::Return);
      if (!is_punct(";")) s->value = parse_expr();
      s->span = span_from(first, expect_punct(";"));
      return s;
    }
    if (is_word("break") || is_word("continue")) {
      auto s = make_stmt(is_word("break") ? StmtKind::Break : StmtKind::Continue);
      take();
      s->span = span_from(first, expect_punct(";"));
      return s;
    }
    if (is_punct("{")) {
      auto s = make_stmt(StmtKind::Block);
      s->body = parse_block();
      s->span = span_from(first, *last_);
      return s;
    }
    auto s = parse_assign_or_expr();
    s->span = span_from(first, expect_punct(";"));
    return s;
  }

  // -- expressions ---------------------------------------------------------
  static int binary_precedence(std::string_view p) {
    if (p == "||") return 1;
    if (p == "&&") return 2;
    if (p == "==" || p == "!=") return 3;
    if (p == "<" || p == "<=" || p == ">" || p == ">=") return 4;
    if (p == "+" || p == "-") return 5;
    if (p == "*" || p == "/" || p == "%") return 6;
    return 0;
  }

  static Op binary_op(std::string_view p) {
    if (p == "||") return Op::Or;
    if (p == "&&") return Op::And;
    if (p == "==") return Op::Eq;
    if (p == "!=") return Op::Ne;
    if (p == "<") return Op::Lt;
    if (p == "<=") return Op::Le;
    if (p == ">") return Op::Gt;
    if (p == ">=") return Op::Ge;
    if (p == "+") return Op::Add;
    if (p == "-") return Op::Sub;
    if (p == "*") return Op::Mul;
    if (p == "/") return Op::Div;
    return Op::Mod;
  }

  ExprPtr parse_expr(int min_prec = 1) {
    const Token& first = peek();
    ExprPtr lhs = parse_unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != TokKind::Punct) break;
      int prec = binary_precedence(t.text);
      if (prec == 0 || prec < min_prec) break;
      take();
      ExprPtr rhs = parse_expr(prec + 1);
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Binary;
      e->op = binary_op(t.text);
      e->operands = {lhs, rhs};
      e->span = span_from(first, *last_);
      lhs = e;
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    const Token& first = peek();
    if (is_punct("-") || is_punct("!")) {
      bool neg = is_punct("-");
      take();
      // -9223372036854775808 is only expressible as a negated literal.
      if (neg && peek().kind == TokKind::Int && peek().text == "9223372036854775808") {
        const Token& lit = take();
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::IntLit;
        e->int_value = std::numeric_limits<std::int64_t>::min();
        e->text = "-" + lit.text;
        e->span = span_from(first, lit);
        return e;
      }
      ExprPtr operand = parse_unary();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Unary;
      e->op = neg ? Op::Neg : Op::Not;
      e->operands = {operand};
      e->span = span_from(first, *last_);
      return e;
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    const Token& first = peek();
    ExprPtr e = parse_primary();
    for (;;) {
      if (is_punct("[")) {
        take();
        ExprPtr index = parse_expr();
        expect_punct("]");
        auto n = std::make_shared<Expr>();
        n->kind = ExprKind::Index;
        n->operands = {e, index};
        n->span = span_from(first, *last_);
        e = n;
      } else if (is_punct(".")) {
        take();
        auto n = std::make_shared<Expr>();
        n->kind = ExprKind::Field;
        n->text = expect_ident("field name");
        n->operands = {e};
        n->span = span_from(first, *last_);
        e = n;
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    auto e = std::make_shared<Expr>();
    switch (t.kind) {
      case TokKind::Int: {
        take();
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() ||
            v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
          fail(t, "integer literal out of range: " + t.text);
        }
        e->kind = ExprKind::IntLit;
        e->int_value = static_cast<std::int64_t>(v);
        e->text = t.text;
        e->span = span_from(t, t);
        return e;
      }
      case TokKind::Float: {
        take();
        e->kind = ExprKind::FloatLit;
        e->float_value = std::strtod(t.text.c_str(), nullptr);
        e->text = t.text;
        e->span = span_from(t, t);
        return e;
      }
      case TokKind::String:
        take();
        e->kind = ExprKind::StringLit;
        e->string_value = t.text;
        e->text = t.raw;
        e->span = span_from(t, t);
        return e;
      case TokKind::Punct:
        if (t.text == "(") {
          take();
          ExprPtr inner = parse_expr();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") {
          take();
          e->kind = ExprKind::ArrayLit;
          while (!is_punct("]")) {
            e->operands.push_back(parse_expr());
            if (!is_punct(",")) break;
            take();
          }
          expect_punct("]");
          e->span = span_from(t, *last_);
          return e;
        }
        break;
      case TokKind::Ident:
        if (t.text == "true" || t.text == "false") {
          take();
          e->kind = ExprKind::BoolLit;
          e->bool_value = t.text == "true";
          e->text = t.text;
          e->span = span_from(t, t);
          return e;
        }
        if (kKeywords.count(t.text) != 0) break;
        if (is_punct("(", 1)) {
          take();
          take();
          e->kind = ExprKind::Call;
          e->text = t.text;
          while (!is_punct(")")) {
            e->operands.push_back(parse_expr());
            if (!is_punct(",")) break;
            take();
          }
          expect_punct(")");
          e->span = span_from(t, *last_);
          return e;
        }
        if (is_punct("{", 1) && record_names_.count(t.text) != 0) {
          take();
          take();
          e->kind = ExprKind::RecordLit;
          e->text = t.text;
          while (!is_punct("}")) {
            e->field_names.push_back(expect_ident("field name"));
            expect_punct(":");
            e->operands.push_back(parse_expr());
            if (!is_punct(",")) break;
            take();
          }
          expect_punct("}");
          e->span = span_from(t, *last_);
          return e;
        }
        e->kind = ExprKind::Var;
        e->text = expect_ident("expression");
        e->span = span_from(t, t);
        return e;
      case TokKind::End:
        break;
    }
    fail(t, "expected expression, found " + describe(t));
  }

  std::vector<Token> toks_;
  const SourceFile& file_;
  std::size_t pos_ = 0;
  const Token* last_ = nullptr;
  std::set<std::string, std::less<>> opaque_names_;
  std::set<std::string, std::less<>> record_names_;
  std::vector<const Token*> type_uses_;
};

}  // namespace

Module parse(const SourceFile& file) {
  Lexer lexer(file.text);
  Parser parser(lexer.run(), file);
  return parser.run();
}

Module parse(std::string_view text, std::string path) {
  return parse(SourceFile::from_text(std::move(path), std::string(text)));
}

}  // namespace simion

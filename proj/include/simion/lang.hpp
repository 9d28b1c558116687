#pragma once

// MiniLang front end: parsing, source metrics, token normalization and
// per-function scope analysis.

#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simion/ast.hpp"

namespace simion {

struct SourceFile {
  std::string path;
  std::string text;
  // lines[0] is line 1; CR stripped.
  std::vector<std::string> lines;

  static SourceFile from_text(std::string path, std::string text);
};

std::size_t sloc(const SourceFile& file);

/// True for lines that contain only whitespace or a `#` comment.
bool is_blank_or_comment(std::string_view line);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Syntax analysis plus declaration-level checks (unique top-level names,
/// every type name resolves). Function bodies are checked by
/// analyze_scopes / check_module.
Module parse(std::string_view text, std::string path = {});
Module parse(const SourceFile& file);

/// Canonical source text; parse(print_module(m)) is structurally equal to m.
std::string print_module(const Module& module);
std::string print_statements(const StmtList& stmts, int indent = 0);

/// Span-insensitive structural equality.
bool same_structure(const Module& a, const Module& b);
bool same_structure(const Stmt& a, const Stmt& b);
bool same_structure(const Expr& a, const Expr& b);

enum class TokenMode { LayoutOnly, ConsistentRename };

/// Lexical token stream of the statements. Variable identifiers are
/// replaced by `$<k>` (k = index of first occurrence) in ConsistentRename
/// mode; literals, field names, callees and type names stay verbatim.
std::vector<std::string> normalize_tokens(const StmtList& stmts, TokenMode mode);

/// Same as normalize_tokens but grouped per top-level statement, with one
/// renaming shared across the whole sequence.
std::vector<std::string> normalize_statements(const StmtList& stmts, TokenMode mode);

// ---------------------------------------------------------------------------
// Semantic analysis

class SemanticError : public std::runtime_error {
 public:
  SemanticError(SourceSpan span, const std::string& message);
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

class UnresolvedName : public SemanticError {
 public:
  UnresolvedName(SourceSpan span, const std::string& name);
};

bool is_builtin(std::string_view name);
/// Names reserved for synthetic chunk variables contain a double underscore.
bool is_reserved_identifier(std::string_view name);

enum class BindingKind { Param, Local, Global, Function, Extern, Builtin };

struct Binding {
  BindingKind kind = BindingKind::Local;
  int index = -1;  // param / local / global / function / extern index
};

struct LocalInfo {
  std::string name;
  TypeRef type;
  const Stmt* decl = nullptr;
};

/// Where a referenced variable lives relative to a statement range.
enum class VarClass {
  Parameter,     // function parameter
  OuterLocal,    // local declared before the range
  NestedLocal,   // declared in the range, not visible after it
  EscapingLocal, // declared at the top level of the range, used after it
  Global,
};

struct RangeReference {
  std::string name;
  VarClass var_class = VarClass::NestedLocal;
  TypeRef type;
  // Value flows in: some read may observe the pre-range value.
  bool needs_input = false;
  // Written somewhere in the range (plain, element or field assignment).
  bool assigned = false;
};

struct RangeInfo {
  std::vector<RangeReference> references;  // first-reference order
  bool has_value_return = false;
  bool has_void_return = false;
};

class SymbolTable {
 public:
  const FunctionDecl* function = nullptr;
  const Module* module = nullptr;
  std::vector<LocalInfo> locals;
  std::unordered_map<const Expr*, Binding> uses;
  std::unordered_map<const Stmt*, int> decls;
  std::unordered_map<const Expr*, TypeRef> types;

  const Binding* binding(const Expr* e) const;
  TypeRef type_of(const Expr* e) const;

  /// Classifies every variable referenced in block[begin, end).
  /// `block` must be a statement list of this function (its body or a
  /// nested block).
  RangeInfo classify(const StmtList& block, std::size_t begin, std::size_t end) const;
};

/// Resolves names and type-checks one function body.
/// Throws UnresolvedName or SemanticError.
SymbolTable analyze_scopes(const FunctionDecl& fn, const Module& module);

/// Checks global initializers and every function body.
void check_module(const Module& module);

// ---------------------------------------------------------------------------
// Traversal helpers

void for_each_stmt(const StmtList& stmts, const std::function<void(const Stmt&)>& fn);
void for_each_expr(const Stmt& stmt, const std::function<void(const Expr&)>& fn);
void for_each_subexpr(const Expr& expr, const std::function<void(const Expr&)>& fn);

/// Root variable of an lvalue (`a`, `a[i]`, `a.f[j]`), or null.
const Expr* lvalue_root(const Expr& target);

// ---------------------------------------------------------------------------
// Rewriting

/// Returns a replacement for an expression, or null to keep it and recurse
/// into its operands.
using ExprRewrite = std::function<ExprPtr(const Expr&)>;

/// Deep copy of `stmts` with expressions rewritten top-down by `rewrite`
/// and declared variable names passed through `rename_decl`.
StmtList rewrite_statements(const StmtList& stmts, const ExprRewrite& rewrite,
                            const std::function<std::string(const std::string&)>& rename_decl);

/// Consistently renames variables (uses and declarations).
StmtList rename_variables(const StmtList& stmts,
                          const std::function<std::string(const std::string&)>& rename);

}  // namespace simion

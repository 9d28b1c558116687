#pragma once

// MiniLang abstract syntax tree.
//
// Nodes are immutable once a Module has been built and are shared between
// the module, the chunks cut out of it and any rewritten chunk statements.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simion {

struct SourceSpan {
  int line = 0;
  int column = 0;
  int end_line = 0;
  int end_column = 0;
};

class TypeRef {
 public:
  enum class Kind { Void, Int, Float, Bool, String, Array, Record, Opaque, Any };

  TypeRef() = default;

  static TypeRef void_type() { return TypeRef(Kind::Void); }
  static TypeRef int_type() { return TypeRef(Kind::Int); }
  static TypeRef float_type() { return TypeRef(Kind::Float); }
  static TypeRef bool_type() { return TypeRef(Kind::Bool); }
  static TypeRef string_type() { return TypeRef(Kind::String); }
  /// Element type of the empty array literal; assignable to every array.
  static TypeRef any_type() { return TypeRef(Kind::Any); }
  static TypeRef array_of(TypeRef element);
  static TypeRef record(std::string name);
  static TypeRef opaque(std::string name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const TypeRef& element() const { return *element_; }

  bool is_void() const { return kind_ == Kind::Void; }
  bool is_primitive() const {
    return kind_ == Kind::Int || kind_ == Kind::Float || kind_ == Kind::Bool ||
           kind_ == Kind::String;
  }
  bool is_array() const { return kind_ == Kind::Array; }
  bool is_record() const { return kind_ == Kind::Record; }
  bool is_opaque() const { return kind_ == Kind::Opaque; }
  bool is_numeric() const { return kind_ == Kind::Int || kind_ == Kind::Float; }

  /// True if a record or opaque type occurs anywhere inside this type.
  bool mentions_named_type() const;

  /// Source syntax: `int`, `[string]`, `Point`.
  std::string str() const;

  friend bool operator==(const TypeRef& a, const TypeRef& b);

 private:
  explicit TypeRef(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Void;
  std::string name_;
  std::shared_ptr<const TypeRef> element_;
};

/// Value-level assignability: identical types, or `[any]` into any array.
bool assignable(const TypeRef& to, const TypeRef& from);

enum class Op { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Neg, Not };

std::string_view op_symbol(Op op);

enum class ExprKind {
  IntLit,
  FloatLit,
  BoolLit,
  StringLit,
  Var,
  Unary,
  Binary,
  ArrayLit,
  Index,
  RecordLit,
  Field,
  Call,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceSpan span;
  // Literal lexeme, variable name, field name, callee or record type name.
  std::string text;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  bool bool_value = false;
  std::string string_value;
  Op op = Op::Add;
  // Unary/Binary operands, Index (base, index), Field (base), ArrayLit
  // elements, Call arguments, RecordLit field values.
  std::vector<ExprPtr> operands;
  // RecordLit only, parallel to operands.
  std::vector<std::string> field_names;
};

enum class StmtKind {
  VarDecl,
  Assign,
  If,
  While,
  For,
  Return,
  Break,
  Continue,
  ExprStmt,
  Block,
  // Jump to the chunk exit label; produced only by return rewriting.
  Exit,
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::ExprStmt;
  SourceSpan span;
  // A blank or comment-only line sits between this statement and the
  // previous one (or the opening brace).
  bool separated_before = false;

  std::string name;                     // VarDecl
  std::optional<TypeRef> declared_type; // VarDecl
  ExprPtr target;                       // Assign lvalue
  ExprPtr value;  // VarDecl init, Assign rhs, Return value, ExprStmt, conditions
  StmtList body;       // If then-branch, loop body, Block
  StmtList else_body;  // If
  bool has_else = false;
  bool else_if = false;  // else-branch was written as `else if`
  StmtPtr init;          // For
  StmtPtr step;          // For
};

struct ParamDecl {
  std::string name;
  TypeRef type;
  SourceSpan span;
};

struct FieldDecl {
  std::string name;
  TypeRef type;
};

struct RecordDecl {
  std::string name;
  std::vector<FieldDecl> fields;
  SourceSpan span;

  const FieldDecl* field(std::string_view field_name) const;
  int field_index(std::string_view field_name) const;
};

struct OpaqueDecl {
  std::string name;
  SourceSpan span;
};

struct GlobalVar {
  std::string name;
  TypeRef type;
  ExprPtr init;
  SourceSpan span;
};

enum class ExternCategory { io, net, db, ui };

std::string_view category_name(ExternCategory c);
std::optional<ExternCategory> parse_category(std::string_view s);

struct ExternDecl {
  std::string name;
  std::vector<ParamDecl> params;
  TypeRef return_type;
  ExternCategory category = ExternCategory::io;
  SourceSpan span;
};

struct FunctionDecl {
  std::string name;
  std::vector<ParamDecl> params;
  TypeRef return_type;
  StmtList body;
  SourceSpan span;
};

struct Module {
  std::string path;
  std::vector<RecordDecl> records;
  std::vector<OpaqueDecl> opaques;
  std::vector<GlobalVar> globals;
  std::vector<FunctionDecl> functions;
  std::vector<ExternDecl> externs;

  const RecordDecl* find_record(std::string_view name) const;
  const GlobalVar* find_global(std::string_view name) const;
  const FunctionDecl* find_function(std::string_view name) const;
  const ExternDecl* find_extern(std::string_view name) const;
  bool has_opaque(std::string_view name) const;
};

using ModulePtr = std::shared_ptr<const Module>;

}  // namespace simion

#include "simion/ast.hpp"

#include <algorithm>

namespace simion {

TypeRef TypeRef::array_of(TypeRef element) {
  TypeRef t(Kind::Array);
  t.element_ = std::make_shared<const TypeRef>(std::move(element));
  return t;
}

TypeRef TypeRef::record(std::string name) {
  TypeRef t(Kind::Record);
  t.name_ = std::move(name);
  return t;
}

TypeRef TypeRef::opaque(std::string name) {
  TypeRef t(Kind::Opaque);
  t.name_ = std::move(name);
  return t;
}

bool TypeRef::mentions_named_type() const {
  if (kind_ == Kind::Record || kind_ == Kind::Opaque) return true;
  if (kind_ == Kind::Array) return element_->mentions_named_type();
  return false;
}

std::string TypeRef::str() const {
  switch (kind_) {
    case Kind::Void: return "void";
    case Kind::Int: return "int";
    case Kind::Float: return "float";
    case Kind::Bool: return "bool";
    case Kind::String: return "string";
    case Kind::Any: return "any";
    case Kind::Array: return "[" + element_->str() + "]";
    case Kind::Record:
    case Kind::Opaque: return name_;
  }
  return "?";
}

bool operator==(const TypeRef& a, const TypeRef& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case TypeRef::Kind::Array: return *a.element_ == *b.element_;
    case TypeRef::Kind::Record:
    case TypeRef::Kind::Opaque: return a.name_ == b.name_;
    default: return true;
  }
}

bool assignable(const TypeRef& to, const TypeRef& from) {
  if (to == from) return true;
  if (to.is_array() && from.is_array()) {
    if (from.element().kind() == TypeRef::Kind::Any) return true;
    return assignable(to.element(), from.element());
  }
  return false;
}

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Neg: return "-";
    case Op::Not: return "!";
  }
  return "?";
}

std::string_view category_name(ExternCategory c) {
  switch (c) {
    case ExternCategory::io: return "io";
    case ExternCategory::net: return "net";
    case ExternCategory::db: return "db";
    case ExternCategory::ui: return "ui";
  }
  return "io";
}

std::optional<ExternCategory> parse_category(std::string_view s) {
  if (s == "io") return ExternCategory::io;
  if (s == "net") return ExternCategory::net;
  if (s == "db") return ExternCategory::db;
  if (s == "ui") return ExternCategory::ui;
  return std::nullopt;
}

const FieldDecl* RecordDecl::field(std::string_view field_name) const {
  auto it = std::find_if(fields.begin(), fields.end(),
                         [&](const FieldDecl& f) { return f.name == field_name; });
  return it == fields.end() ? nullptr : &*it;
}

int RecordDecl::field_index(std::string_view field_name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == field_name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

template <typename Decl>
const Decl* find_named(const std::vector<Decl>& decls, std::string_view name) {
  auto it = std::find_if(decls.begin(), decls.end(),
                         [&](const Decl& d) { return d.name == name; });
  return it == decls.end() ? nullptr : &*it;
}

}  // namespace

const RecordDecl* Module::find_record(std::string_view name) const {
  return find_named(records, name);
}
const GlobalVar* Module::find_global(std::string_view name) const {
  return find_named(globals, name);
}
const FunctionDecl* Module::find_function(std::string_view name) const {
  return find_named(functions, name);
}
const ExternDecl* Module::find_extern(std::string_view name) const {
  return find_named(externs, name);
}
bool Module::has_opaque(std::string_view name) const {
  return find_named(opaques, name) != nullptr;
}

}  // namespace simion

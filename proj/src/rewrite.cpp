#include "simion/lang.hpp"

namespace simion {

namespace {

ExprPtr rewrite_expr(const ExprPtr& e, const ExprRewrite& rewrite) {
  if (ExprPtr replaced = rewrite(*e)) return replaced;
  if (e->operands.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& op : copy->operands) op = rewrite_expr(op, rewrite);
  return copy;
}

StmtPtr rewrite_stmt(const StmtPtr& s, const ExprRewrite& rewrite,
                     const std::function<std::string(const std::string&)>& rename_decl) {
  auto copy = std::make_shared<Stmt>(*s);
  if (copy->kind == StmtKind::VarDecl) copy->name = rename_decl(copy->name);
  if (copy->target) copy->target = rewrite_expr(copy->target, rewrite);
  if (copy->value) copy->value = rewrite_expr(copy->value, rewrite);
  if (copy->init) copy->init = rewrite_stmt(copy->init, rewrite, rename_decl);
  if (copy->step) copy->step = rewrite_stmt(copy->step, rewrite, rename_decl);
  copy->body = rewrite_statements(copy->body, rewrite, rename_decl);
  copy->else_body = rewrite_statements(copy->else_body, rewrite, rename_decl);
  return copy;
}

}  // namespace

StmtList rewrite_statements(const StmtList& stmts, const ExprRewrite& rewrite,
                            const std::function<std::string(const std::string&)>& rename_decl) {
  StmtList out;
  out.reserve(stmts.size());
  for (const auto& s : stmts) out.push_back(rewrite_stmt(s, rewrite, rename_decl));
  return out;
}

StmtList rename_variables(const StmtList& stmts,
                          const std::function<std::string(const std::string&)>& rename) {
  return rewrite_statements(
      stmts,
      [&](const Expr& e) -> ExprPtr {
        if (e.kind != ExprKind::Var) return nullptr;
        auto copy = std::make_shared<Expr>(e);
        copy->text = rename(e.text);
        return copy;
      },
      rename);
}

}  // namespace simion

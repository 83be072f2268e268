#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "exo2ir/cursor.hpp"
#include "exo2ir/ir.hpp"

namespace exo2ir {

// Preorder traversal over statements and expressions with full paths.
// Statement order: the statement itself, its expressions (label order), then
// sub-blocks. Visitors return false to stop the walk early.

using StmtVisitor = std::function<bool(const Path&, const StmtP&)>;
using ExprVisitor = std::function<bool(const Path&, const ExprP&)>;

namespace walk_detail {

inline bool walk_expr(Path& path, const ExprP& e, const ExprVisitor& fn) {
  if (!fn(path, e)) return false;
  switch (e->kind) {
    case ExprKind::Binary:
      path.push_back({Label::Lhs, -1});
      if (!walk_expr(path, e->args[0], fn)) return false;
      path.back() = {Label::Rhs, -1};
      if (!walk_expr(path, e->args[1], fn)) return false;
      path.pop_back();
      return true;
    case ExprKind::Read:
      for (size_t i = 0; i < e->args.size(); ++i) {
        path.push_back({Label::Idx, (int)i});
        if (!walk_expr(path, e->args[i], fn)) return false;
        path.pop_back();
      }
      return true;
    case ExprKind::Slice:
      for (size_t i = 0; i < e->dims.size(); ++i) {
        const SliceDim& d = e->dims[i];
        if (d.is_point()) {
          path.push_back({Label::Idx, (int)i});
          if (!walk_expr(path, d.lo, fn)) return false;
          path.pop_back();
        } else {
          path.push_back({Label::Lo, (int)i});
          if (!walk_expr(path, d.lo, fn)) return false;
          path.back() = {Label::Hi, (int)i};
          if (!walk_expr(path, d.hi, fn)) return false;
          path.pop_back();
        }
      }
      return true;
    default:
      return true;
  }
}

inline bool walk_block(Path& path, const Block& b, const StmtVisitor& sfn,
                       const ExprVisitor& efn, Label label);

inline bool walk_stmt(Path& path, const StmtP& s, const StmtVisitor& sfn,
                      const ExprVisitor& efn) {
  if (sfn && !sfn(path, s)) return false;
  auto expr_at = [&](Label l, int idx, const ExprP& e) {
    if (!efn || !e) return true;
    path.push_back({l, idx});
    bool cont = walk_expr(path, e, efn);
    path.pop_back();
    return cont;
  };
  switch (s->kind) {
    case StmtKind::For:
      if (!expr_at(Label::Lo, -1, s->lo)) return false;
      if (!expr_at(Label::Hi, -1, s->hi)) return false;
      return walk_block(path, s->body, sfn, efn, Label::Body);
    case StmtKind::If:
      if (!expr_at(Label::Cond, -1, s->cond)) return false;
      if (!walk_block(path, s->body, sfn, efn, Label::Body)) return false;
      if (!s->orelse.empty())
        return walk_block(path, s->orelse, sfn, efn, Label::Orelse);
      return true;
    case StmtKind::Assign:
    case StmtKind::Reduce:
      for (size_t i = 0; i < s->idx.size(); ++i)
        if (!expr_at(Label::Idx, (int)i, s->idx[i])) return false;
      return expr_at(Label::Rhs, -1, s->rhs);
    case StmtKind::Alloc:
      for (size_t i = 0; i < s->idx.size(); ++i)
        if (!expr_at(Label::Idx, (int)i, s->idx[i])) return false;
      return true;
    case StmtKind::Call:
      for (size_t i = 0; i < s->args.size(); ++i)
        if (!expr_at(Label::Arg, (int)i, s->args[i])) return false;
      return true;
    case StmtKind::Pass:
      return true;
  }
  return true;
}

inline bool walk_block(Path& path, const Block& b, const StmtVisitor& sfn,
                       const ExprVisitor& efn, Label label) {
  for (size_t i = 0; i < b.size(); ++i) {
    path.push_back({label, (int)i});
    bool cont = walk_stmt(path, b[i], sfn, efn);
    path.pop_back();
    if (!cont) return false;
  }
  return true;
}

}  // namespace walk_detail

// Walks the whole procedure body.
inline void walk_proc(const Procedure& p, const StmtVisitor& sfn,
                      const ExprVisitor& efn = nullptr) {
  Path path;
  walk_detail::walk_block(path, p.body, sfn, efn, Label::Body);
}

// Walks the subtree rooted at `path` (a statement or expression), visiting
// the root itself first.
inline void walk_subtree(const Procedure& p, const Path& root,
                         const StmtVisitor& sfn,
                         const ExprVisitor& efn = nullptr) {
  auto r = try_resolve_path(p, root);
  if (!r) return;
  Path path = root;
  if (r->is_stmt()) {
    Path parent(root.begin(), root.end() - 1);
    path = parent;
    path.push_back(root.back());
    walk_detail::walk_stmt(path, r->stmt, sfn, efn);
  } else if (efn) {
    walk_detail::walk_expr(path, r->expr, efn);
  }
}

// All paths of expressions satisfying `pred` under the whole procedure.
inline std::vector<Path> expr_paths_where(
    const Procedure& p, const std::function<bool(const ExprP&)>& pred) {
  std::vector<Path> out;
  walk_proc(
      p, [](const Path&, const StmtP&) { return true; },
      [&](const Path& path, const ExprP& e) {
        if (pred(e)) out.push_back(path);
        return true;
      });
  return out;
}

}  // namespace exo2ir

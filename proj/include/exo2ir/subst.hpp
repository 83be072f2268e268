#pragma once

#include <map>
#include <string>
#include <unordered_set>

#include "exo2ir/ir.hpp"

namespace exo2ir {

// Capture-free substitution of scalar/size/iterator reads. Well-formedness
// forbids shadowing, so a plain recursive walk is safe.
inline ExprP subst_expr(const ExprP& e, const std::map<std::string, ExprP>& m) {
  switch (e->kind) {
    case ExprKind::Literal:
      return e;
    case ExprKind::Var: {
      auto it = m.find(e->name);
      return it == m.end() ? e : it->second;
    }
    case ExprKind::Read: {
      std::vector<ExprP> idx;
      bool changed = false;
      for (const auto& i : e->args) {
        ExprP n = subst_expr(i, m);
        changed |= n != i;
        idx.push_back(std::move(n));
      }
      if (!changed) return e;
      return make_read(e->name, std::move(idx), e->type);
    }
    case ExprKind::Binary: {
      ExprP a = subst_expr(e->args[0], m);
      ExprP b = subst_expr(e->args[1], m);
      if (a == e->args[0] && b == e->args[1]) return e;
      return make_binop(e->op, std::move(a), std::move(b));
    }
    case ExprKind::Slice: {
      std::vector<SliceDim> dims;
      bool changed = false;
      for (const auto& d : e->dims) {
        SliceDim nd;
        nd.lo = subst_expr(d.lo, m);
        nd.hi = d.hi ? subst_expr(d.hi, m) : nullptr;
        changed |= nd.lo != d.lo || nd.hi != d.hi;
        dims.push_back(std::move(nd));
      }
      if (!changed) return e;
      return make_slice(e->name, std::move(dims), e->type);
    }
  }
  return e;
}

inline Block subst_block(const Block& b, const std::map<std::string, ExprP>& m);

inline StmtP subst_stmt(const StmtP& s, const std::map<std::string, ExprP>& m) {
  auto n = std::make_shared<Stmt>(*s);
  if (s->lo) n->lo = subst_expr(s->lo, m);
  if (s->hi) n->hi = subst_expr(s->hi, m);
  if (s->cond) n->cond = subst_expr(s->cond, m);
  if (s->rhs) n->rhs = subst_expr(s->rhs, m);
  for (auto& e : n->idx) e = subst_expr(e, m);
  for (auto& e : n->args) e = subst_expr(e, m);
  n->body = subst_block(s->body, m);
  n->orelse = subst_block(s->orelse, m);
  return n;
}

inline Block subst_block(const Block& b, const std::map<std::string, ExprP>& m) {
  Block out;
  out.reserve(b.size());
  for (const auto& s : b) out.push_back(subst_stmt(s, m));
  return out;
}

// Renames buffers (reads, writes, slices, allocs) — not scalars/iterators.
inline ExprP rename_buffer_expr(const ExprP& e, const std::string& from,
                                const std::string& to) {
  auto n = std::make_shared<Expr>(*e);
  if ((e->kind == ExprKind::Read || e->kind == ExprKind::Slice ||
       e->kind == ExprKind::Var) &&
      e->name == from)
    n->name = to;
  for (auto& a : n->args) a = rename_buffer_expr(a, from, to);
  for (auto& d : n->dims) {
    d.lo = rename_buffer_expr(d.lo, from, to);
    if (d.hi) d.hi = rename_buffer_expr(d.hi, from, to);
  }
  return n;
}

inline Block rename_buffer_block(const Block& b, const std::string& from,
                                 const std::string& to);

inline StmtP rename_buffer_stmt(const StmtP& s, const std::string& from,
                                const std::string& to) {
  auto n = std::make_shared<Stmt>(*s);
  if ((s->kind == StmtKind::Assign || s->kind == StmtKind::Reduce ||
       s->kind == StmtKind::Alloc) &&
      s->name == from)
    n->name = to;
  if (s->lo) n->lo = rename_buffer_expr(s->lo, from, to);
  if (s->hi) n->hi = rename_buffer_expr(s->hi, from, to);
  if (s->cond) n->cond = rename_buffer_expr(s->cond, from, to);
  if (s->rhs) n->rhs = rename_buffer_expr(s->rhs, from, to);
  for (auto& e : n->idx) e = rename_buffer_expr(e, from, to);
  for (auto& e : n->args) e = rename_buffer_expr(e, from, to);
  n->body = rename_buffer_block(s->body, from, to);
  n->orelse = rename_buffer_block(s->orelse, from, to);
  return n;
}

inline Block rename_buffer_block(const Block& b, const std::string& from,
                                 const std::string& to) {
  Block out;
  out.reserve(b.size());
  for (const auto& s : b) out.push_back(rename_buffer_stmt(s, from, to));
  return out;
}

// Fresh-renames every Alloc and iterator in the fragment so it can be
// spliced next to existing code without capture.
inline Block freshen_block(const Block& b,
                           std::unordered_set<std::string>& used);

inline StmtP freshen_stmt(const StmtP& s,
                          std::unordered_set<std::string>& used) {
  switch (s->kind) {
    case StmtKind::For: {
      std::string it = s->name;
      StmtP cur = s;
      if (used.count(it)) {
        std::string next = fresh_name(it, used);
        cur = subst_stmt(s, {{it, make_var(next, ScalarKind::Index)}});
        auto n = std::make_shared<Stmt>(*cur);
        n->name = next;
        cur = n;
      } else {
        used.insert(it);
      }
      auto n = std::make_shared<Stmt>(*cur);
      n->body = freshen_block(cur->body, used);
      return n;
    }
    case StmtKind::Alloc: {
      if (!used.count(s->name)) {
        used.insert(s->name);
        return s;
      }
      // renaming an alloc requires renaming its uses, which live in sibling
      // statements; handled by freshen_block below
      return s;
    }
    default: {
      auto n = std::make_shared<Stmt>(*s);
      n->body = freshen_block(s->body, used);
      n->orelse = freshen_block(s->orelse, used);
      return n;
    }
  }
}

inline Block freshen_block(const Block& b,
                           std::unordered_set<std::string>& used) {
  Block out;
  out.reserve(b.size());
  for (const auto& s : b) out.push_back(s);
  // rename colliding allocs across the whole block first
  for (size_t i = 0; i < out.size(); ++i) {
    const StmtP& s = out[i];
    if (s->kind == StmtKind::Alloc && used.count(s->name)) {
      std::string next = fresh_name(s->name, used);
      for (size_t j = i; j < out.size(); ++j)
        out[j] = rename_buffer_stmt(out[j], s->name, next);
    } else if (s->kind == StmtKind::Alloc) {
      used.insert(s->name);
    }
  }
  for (auto& s : out) s = freshen_stmt(s, used);
  return out;
}

}  // namespace exo2ir

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/prim_base.hpp"
#include "exo2ir/subst.hpp"

namespace exo2ir {

namespace prim {

// Every appearance of a buffer name in a subtree.
struct BufUse {
  enum K { ReadE, SliceE, Dest, AllocD } kind;
  Path path;  // expr path for ReadE/SliceE, statement path otherwise
};

inline std::vector<BufUse> buffer_uses(const Procedure& p,
                                       const std::string& name,
                                       const Path& under = {}) {
  std::vector<BufUse> out;
  StmtVisitor sfn = [&](const Path& path, const StmtP& s) {
    if ((s->kind == StmtKind::Assign || s->kind == StmtKind::Reduce) &&
        s->name == name)
      out.push_back({BufUse::Dest, path});
    if (s->kind == StmtKind::Alloc && s->name == name)
      out.push_back({BufUse::AllocD, path});
    return true;
  };
  ExprVisitor efn = [&](const Path& path, const ExprP& e) {
    if (e->kind == ExprKind::Read && e->name == name)
      out.push_back({BufUse::ReadE, path});
    if (e->kind == ExprKind::Slice && e->name == name)
      out.push_back({BufUse::SliceE, path});
    if (e->kind == ExprKind::Var && e->name == name)
      out.push_back({BufUse::ReadE, path});  // rank-0 buffer read
    return true;
  };
  if (under.empty()) walk_proc(p, sfn, efn);
  else walk_subtree(p, under, sfn, efn);
  return out;
}

inline Cursor as_alloc_cursor(const ProcP& p, const Target& t,
                              const char* who) {
  Cursor c = t.is_cursor() ? t.resolve(p) : [&] {
    // a bare name finds the allocation statement
    std::vector<Path> hits;
    walk_proc(*p, [&](const Path& path, const StmtP& s) {
      if (s->kind == StmtKind::Alloc && s->name == t.pattern_text())
        hits.push_back(path);
      return true;
    });
    if (hits.empty())
      throw NotFoundError(std::string(who) + ": no allocation " + t.describe());
    return Cursor(p, CursorCore::node(hits.front()));
  }();
  if (c.kind() != CursorKind::Node || c.stmt()->kind != StmtKind::Alloc)
    throw InvalidCursorError(std::string(who) + ": expected an allocation");
  return c;
}

}  // namespace prim

// ---------------------------------------------------------------------------
// A.5 Buffer transformations
// ---------------------------------------------------------------------------

// hoists an allocation above its enclosing loop (or if)
inline ProcP lift_alloc(const ProcP& p, const Target& alloc_t) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "lift_alloc");
  StmtP alloc = alloc_c.stmt();
  const Path apath = alloc_c.path();
  if (apath.size() < 2)
    prim::unsafe("lift_alloc: allocation is already at the top level");
  Path parent_path(apath.begin(), apath.end() - 1);
  auto parent = try_resolve_path(*p, parent_path);
  if (!parent || !parent->is_stmt())
    throw InvalidCursorError("lift_alloc: cannot resolve parent");
  StmtP host = parent->stmt;

  if (host->kind == StmtKind::For) {
    std::unordered_set<std::string> dim_names;
    for (const auto& d : alloc->idx) collect_names(d, dim_names);
    if (dim_names.count(host->name))
      prim::unsafe("lift_alloc: dimensions depend on iterator '" + host->name +
                   "'");
    // no loop-carried dependencies on the buffer: a shared allocation must
    // not let one iteration observe another's writes
    FactSet base = facts_at(*p, parent_path);
    if (dependence(host->body, host->body, {host}, base, IterRel::Distinct,
                   /*reduces_commute=*/false, alloc->name) !=
        DepResult::Independent)
      prim::unsafe("lift_alloc: '" + alloc->name +
                   "' has loop-carried accesses");
  } else if (host->kind != StmtKind::If) {
    prim::unsafe("lift_alloc: parent is not a loop or if");
  }

  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(apath);
  auto [parent_list, parent_pos] = EditSession::stmt_position(parent_path);
  ed.move(list, pos, 1, parent_list, parent_pos);
  return ed.finish();
}

// moves an allocation into the loop that immediately follows it
inline ProcP sink_alloc(const ProcP& p, const Target& alloc_t) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "sink_alloc");
  StmtP alloc = alloc_c.stmt();
  const Path apath = alloc_c.path();
  Cursor next_c = alloc_c.next();
  StmtP host = next_c.stmt();
  if (host->kind != StmtKind::For)
    prim::unsafe("sink_alloc: the allocation must precede a loop");
  // all uses must live inside that loop
  Path host_path = next_c.path();
  for (const auto& use : prim::buffer_uses(*p, alloc->name)) {
    if (use.path == apath) continue;
    if (!is_prefix(host_path, use.path))
      prim::unsafe("sink_alloc: '" + alloc->name +
                   "' is accessed outside the loop");
  }
  FactSet base = facts_at(*p, host_path);
  if (dependence(host->body, host->body, {host}, base, IterRel::Distinct,
                 /*reduces_commute=*/false, alloc->name) !=
      DepResult::Independent)
    prim::unsafe("sink_alloc: '" + alloc->name + "' has loop-carried accesses");

  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(apath);
  ed.move(list, pos, 1, {host_path, Label::Body}, 0);
  return ed.finish();
}

// removes a dead allocation together with the pure statements writing it
inline ProcP delete_buffer(const ProcP& p, const Target& alloc_t) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "delete_buffer");
  StmtP alloc = alloc_c.stmt();
  std::vector<Path> writes;
  for (const auto& use : prim::buffer_uses(*p, alloc->name)) {
    switch (use.kind) {
      case prim::BufUse::AllocD:
        break;
      case prim::BufUse::Dest: {
        auto r = try_resolve_path(*p, use.path);
        // the write must have no other effect; its rhs reads are dropped
        writes.push_back(use.path);
        (void)r;
        break;
      }
      default:
        prim::unsafe("delete_buffer: '" + alloc->name + "' is still read");
    }
  }
  writes.push_back(alloc_c.path());
  // erase deepest/latest first so earlier positions stay valid
  std::sort(writes.begin(), writes.end(), [](const Path& a, const Path& b) {
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
      if (a[i].index != b[i].index) return a[i].index > b[i].index;
    }
    return a.size() > b.size();
  });
  EditSession ed(p);
  for (const auto& w : writes) {
    auto [list, pos] = EditSession::stmt_position(w);
    ed.erase(list, pos, 1);
  }
  return ed.finish();
}

// renames b's uses to a when a is dead after b's allocation
inline ProcP reuse_buffer(const ProcP& p, const Target& a_t, const Target& b_t) {
  Cursor a_c = prim::as_alloc_cursor(p, a_t, "reuse_buffer");
  Cursor b_c = prim::as_alloc_cursor(p, b_t, "reuse_buffer");
  StmtP a = a_c.stmt();
  StmtP b = b_c.stmt();
  if (a->type != b->type || a->idx.size() != b->idx.size())
    prim::unsafe("reuse_buffer: buffers have different type or rank");
  for (size_t i = 0; i < a->idx.size(); ++i)
    if (!struct_eq(a->idx[i], b->idx[i]))
      prim::unsafe("reuse_buffer: buffers have different sizes");

  // document order: everything at or after b's allocation must not touch a
  auto doc_lt = [](const Path& x, const Path& y) {
    for (size_t i = 0; i < x.size() && i < y.size(); ++i)
      if (x[i].index != y[i].index) return x[i].index < y[i].index;
    return x.size() < y.size();
  };
  const Path& bpath = b_c.path();
  for (const auto& use : prim::buffer_uses(*p, a->name)) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (!doc_lt(use.path, bpath))
      prim::unsafe("reuse_buffer: '" + a->name + "' is not dead after '" +
                   b->name + "' is allocated");
  }

  EditSession ed(p);
  // rename uses of b to a
  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, b->name);
  for (const auto& use : uses) {
    switch (use.kind) {
      case prim::BufUse::AllocD:
        break;
      case prim::BufUse::Dest: {
        StmtP cur = prim::stmt_at(ed, use.path);
        auto n = std::make_shared<Stmt>(*cur);
        n->name = a->name;
        ed.replace_stmt(use.path, n, /*keep_children=*/true);
        break;
      }
      default: {
        auto r = ed.peek(use.path);
        auto n = std::make_shared<Expr>(*r->expr);
        n->name = a->name;
        ed.replace_expr(use.path, n);
        break;
      }
    }
  }
  auto [list, pos] = EditSession::stmt_position(bpath);
  ed.erase(list, pos, 1);
  return ed.finish();
}

// adds a leading dimension of extent `size`, indexing it with `index`
inline ProcP expand_dim(const ProcP& p, const Target& alloc_t,
                        const std::string& size_text,
                        const std::string& index_text) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "expand_dim");
  StmtP alloc = alloc_c.stmt();
  ExprP size = parse_expr_text(size_text, prim::env_at(*p, alloc_c.path()));
  FactSet alloc_facts = facts_at(*p, alloc_c.path());
  prim::require_valid(
      prove(alloc_facts, make_binop(BinOp::Gt, size, prim::ilit(0))),
      "expand_dim: cannot prove the new extent is positive");

  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, alloc->name);
  EditSession ed(p);
  for (const auto& use : uses) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (use.kind == prim::BufUse::SliceE)
      prim::unsafe("expand_dim: '" + alloc->name + "' is windowed in a call");
    ExprP index =
        parse_expr_text(index_text, prim::env_at(*p, use.path));
    FactSet facts = facts_at(*p, use.path);
    prim::require_valid(
        prove(facts, make_binop(BinOp::Ge, index, prim::ilit(0))),
        "expand_dim: cannot prove 0 <= " + index_text + " at a use site");
    prim::require_valid(
        prove(facts, make_binop(BinOp::Lt, index, size)),
        "expand_dim: cannot prove " + index_text + " < " + size_text +
            " at a use site");
    if (use.kind == prim::BufUse::ReadE) {
      auto r = ed.peek(use.path);
      auto n = std::make_shared<Expr>(*r->expr);
      if (n->kind == ExprKind::Var) {  // rank-0 read becomes rank-1
        n = std::make_shared<Expr>();
        n->kind = ExprKind::Read;
        n->type = r->expr->type;
        n->name = alloc->name;
        n->args = {index};
      } else {
        n->args.insert(n->args.begin(), index);
      }
      ed.replace_expr(use.path, n);
    } else {  // Dest
      StmtP cur = prim::stmt_at(ed, use.path);
      auto n = std::make_shared<Stmt>(*cur);
      n->idx.insert(n->idx.begin(), index);
      ed.replace_stmt(use.path, n);
    }
  }
  StmtP cur = prim::stmt_at(ed, alloc_c.path());
  auto n = std::make_shared<Stmt>(*cur);
  n->idx.insert(n->idx.begin(), size);
  ed.replace_stmt(alloc_c.path(), n);
  return ed.finish();
}

// shrinks/offsets one dimension; with fold the accesses wrap modulo the size
inline ProcP resize_dim(const ProcP& p, const Target& alloc_t, int dim,
                        const ExprP& size, const ExprP& offset, bool fold) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "resize_dim");
  StmtP alloc = alloc_c.stmt();
  if (dim < 0 || dim >= (int)alloc->idx.size())
    prim::unsafe("resize_dim: dimension out of range");
  FactSet alloc_facts = facts_at(*p, alloc_c.path());
  prim::require_valid(
      prove(alloc_facts, make_binop(BinOp::Gt, size, prim::ilit(0))),
      "resize_dim: cannot prove the new extent is positive");

  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, alloc->name);
  EditSession ed(p);
  for (const auto& use : uses) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (use.kind == prim::BufUse::SliceE)
      prim::unsafe("resize_dim: '" + alloc->name + "' is windowed in a call");
    FactSet facts = facts_at(*p, use.path);
    auto adjust = [&](const ExprP& idx) -> ExprP {
      prim::require_valid(
          prove(facts, make_binop(BinOp::Ge, idx, offset)),
          "resize_dim: access may fall below the new window");
      prim::require_valid(
          prove(facts, make_binop(BinOp::Lt, idx,
                                  make_binop(BinOp::Add, offset, size))),
          "resize_dim: access may fall beyond the new window");
      ExprP shifted = make_binop(BinOp::Sub, idx, offset);
      if (fold) {
        if (size->kind != ExprKind::Literal)
          prim::unsafe("resize_dim: folding requires a constant size");
        shifted = make_binop(BinOp::Mod, shifted, size);
      }
      return shifted;
    };
    if (use.kind == prim::BufUse::ReadE) {
      auto r = ed.peek(use.path);
      if (r->expr->kind != ExprKind::Read) continue;
      auto n = std::make_shared<Expr>(*r->expr);
      n->args[dim] = adjust(n->args[dim]);
      ed.replace_expr(use.path, n);
    } else {
      StmtP cur = prim::stmt_at(ed, use.path);
      auto n = std::make_shared<Stmt>(*cur);
      n->idx[dim] = adjust(n->idx[dim]);
      ed.replace_stmt(use.path, n);
    }
  }
  StmtP cur = prim::stmt_at(ed, alloc_c.path());
  auto n = std::make_shared<Stmt>(*cur);
  n->idx[dim] = size;
  ed.replace_stmt(alloc_c.path(), n);
  return ed.finish();
}

inline ProcP resize_dim(const ProcP& p, const Target& alloc_t, int dim,
                        const std::string& size_text, const std::string& off,
                        bool fold = false) {
  Cursor c = prim::as_alloc_cursor(p, alloc_t, "resize_dim");
  ScopeEnv env = prim::env_at(*p, c.path());
  return resize_dim(p, Target(c), dim, parse_expr_text(size_text, env),
                    parse_expr_text(off, env), fold);
}

// permutes the dimensions of an allocation
inline ProcP rearrange_dim(const ProcP& p, const Target& alloc_t,
                           const std::vector<int>& perm) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "rearrange_dim");
  StmtP alloc = alloc_c.stmt();
  size_t r = alloc->idx.size();
  std::vector<bool> seen(r, false);
  if (perm.size() != r) prim::unsafe("rearrange_dim: permutation rank mismatch");
  for (int v : perm) {
    if (v < 0 || v >= (int)r || seen[v])
      prim::unsafe("rearrange_dim: not a permutation");
    seen[v] = true;
  }
  auto permute = [&](const std::vector<ExprP>& idx) {
    std::vector<ExprP> out(r);
    for (size_t i = 0; i < r; ++i) out[i] = idx[perm[i]];
    return out;
  };
  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, alloc->name);
  EditSession ed(p);
  for (const auto& use : uses) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (use.kind == prim::BufUse::SliceE)
      prim::unsafe("rearrange_dim: '" + alloc->name +
                   "' is windowed in a call");
    if (use.kind == prim::BufUse::ReadE) {
      auto rr = ed.peek(use.path);
      auto n = std::make_shared<Expr>(*rr->expr);
      n->args = permute(n->args);
      ed.replace_expr(use.path, n);
    } else {
      StmtP cur = prim::stmt_at(ed, use.path);
      auto n = std::make_shared<Stmt>(*cur);
      n->idx = permute(n->idx);
      ed.replace_stmt(use.path, n);
    }
  }
  StmtP cur = prim::stmt_at(ed, alloc_c.path());
  auto n = std::make_shared<Stmt>(*cur);
  n->idx = permute(n->idx);
  ed.replace_stmt(alloc_c.path(), n);
  return ed.finish();
}

// splits dimension `dim` of constant extent divisible by c into (d/c, c)
inline ProcP divide_dim(const ProcP& p, const Target& alloc_t, int dim,
                        long long c) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "divide_dim");
  StmtP alloc = alloc_c.stmt();
  if (dim < 0 || dim >= (int)alloc->idx.size())
    prim::unsafe("divide_dim: dimension out of range");
  const ExprP& d = alloc->idx[dim];
  if (c <= 0 || d->kind != ExprKind::Literal || d->value.to_integer() % c != 0)
    prim::unsafe("divide_dim: extent must be a constant divisible by " +
                 std::to_string(c));
  long long outer = d->value.to_integer() / c;

  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, alloc->name);
  EditSession ed(p);
  for (const auto& use : uses) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (use.kind == prim::BufUse::SliceE)
      prim::unsafe("divide_dim: '" + alloc->name + "' is windowed in a call");
    auto split = [&](std::vector<ExprP>& idx) {
      ExprP e = idx[dim];
      idx[dim] = make_binop(BinOp::Div, e, prim::ilit(c));
      idx.insert(idx.begin() + dim + 1, make_binop(BinOp::Mod, e, prim::ilit(c)));
    };
    if (use.kind == prim::BufUse::ReadE) {
      auto rr = ed.peek(use.path);
      auto n = std::make_shared<Expr>(*rr->expr);
      split(n->args);
      ed.replace_expr(use.path, n);
    } else {
      StmtP cur = prim::stmt_at(ed, use.path);
      auto n = std::make_shared<Stmt>(*cur);
      split(n->idx);
      ed.replace_stmt(use.path, n);
    }
  }
  StmtP cur = prim::stmt_at(ed, alloc_c.path());
  auto n = std::make_shared<Stmt>(*cur);
  n->idx[dim] = prim::ilit(outer);
  n->idx.insert(n->idx.begin() + dim + 1, prim::ilit(c));
  ed.replace_stmt(alloc_c.path(), n);
  return ed.finish();
}

// merges dimension dim2 (constant extent) into dim: a[i,..,j] -> a[c*i+j,..]
inline ProcP mult_dim(const ProcP& p, const Target& alloc_t, int dim,
                      int dim2) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "mult_dim");
  StmtP alloc = alloc_c.stmt();
  int r = (int)alloc->idx.size();
  if (dim < 0 || dim2 < 0 || dim >= r || dim2 >= r || dim == dim2)
    prim::unsafe("mult_dim: bad dimension pair");
  const ExprP& d2 = alloc->idx[dim2];
  if (d2->kind != ExprKind::Literal)
    prim::unsafe("mult_dim: the merged dimension must have constant extent");
  long long c = d2->value.to_integer();

  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, alloc->name);
  EditSession ed(p);
  for (const auto& use : uses) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (use.kind == prim::BufUse::SliceE)
      prim::unsafe("mult_dim: '" + alloc->name + "' is windowed in a call");
    auto merge = [&](std::vector<ExprP>& idx) {
      ExprP combined = make_binop(
          BinOp::Add, make_binop(BinOp::Mul, prim::ilit(c), idx[dim]),
          idx[dim2]);
      idx[dim] = combined;
      idx.erase(idx.begin() + dim2);
    };
    if (use.kind == prim::BufUse::ReadE) {
      auto rr = ed.peek(use.path);
      auto n = std::make_shared<Expr>(*rr->expr);
      merge(n->args);
      ed.replace_expr(use.path, n);
    } else {
      StmtP cur = prim::stmt_at(ed, use.path);
      auto n = std::make_shared<Stmt>(*cur);
      merge(n->idx);
      ed.replace_stmt(use.path, n);
    }
  }
  StmtP cur = prim::stmt_at(ed, alloc_c.path());
  auto n = std::make_shared<Stmt>(*cur);
  n->idx[dim] = make_binop(BinOp::Mul, prim::ilit(c), n->idx[dim]);
  n->idx.erase(n->idx.begin() + dim2);
  ed.replace_stmt(alloc_c.path(), n);
  return ed.finish();
}

// replaces a constant dimension accessed at constant indices by one buffer
// per index
inline ProcP unroll_buffer(const ProcP& p, const Target& alloc_t, int dim) {
  Cursor alloc_c = prim::as_alloc_cursor(p, alloc_t, "unroll_buffer");
  StmtP alloc = alloc_c.stmt();
  if (dim < 0 || dim >= (int)alloc->idx.size())
    prim::unsafe("unroll_buffer: dimension out of range");
  const ExprP& d = alloc->idx[dim];
  if (d->kind != ExprKind::Literal)
    prim::unsafe("unroll_buffer: dimension extent must be constant");
  long long c = d->value.to_integer();
  if (c <= 0 || c > 64) prim::unsafe("unroll_buffer: unreasonable extent");

  prim::Names names_used(*p);
  std::vector<std::string> parts;
  for (long long k = 0; k < c; ++k)
    parts.push_back(names_used.fresh(alloc->name + "_" + std::to_string(k)));

  std::vector<prim::BufUse> uses = prim::buffer_uses(*p, alloc->name);
  EditSession ed(p);
  for (const auto& use : uses) {
    if (use.kind == prim::BufUse::AllocD) continue;
    if (use.kind == prim::BufUse::SliceE)
      prim::unsafe("unroll_buffer: '" + alloc->name +
                   "' is windowed in a call");
    auto part_of = [&](const std::vector<ExprP>& idx) -> long long {
      const ExprP& e = idx[dim];
      if (e->kind != ExprKind::Literal)
        prim::unsafe("unroll_buffer: non-constant index in the unrolled "
                     "dimension");
      long long k = e->value.to_integer();
      if (k < 0 || k >= c) prim::unsafe("unroll_buffer: index out of range");
      return k;
    };
    if (use.kind == prim::BufUse::ReadE) {
      auto rr = ed.peek(use.path);
      auto n = std::make_shared<Expr>(*rr->expr);
      long long k = part_of(n->args);
      n->name = parts[(size_t)k];
      n->args.erase(n->args.begin() + dim);
      if (n->args.empty()) {
        auto v = make_var(n->name, n->type);
        ed.replace_expr(use.path, v);
      } else {
        ed.replace_expr(use.path, n);
      }
    } else {
      StmtP cur = prim::stmt_at(ed, use.path);
      auto n = std::make_shared<Stmt>(*cur);
      long long k = part_of(n->idx);
      n->name = parts[(size_t)k];
      n->idx.erase(n->idx.begin() + dim);
      ed.replace_stmt(use.path, n);
    }
  }
  // replace the allocation by one per part
  std::vector<ExprP> rest = alloc->idx;
  rest.erase(rest.begin() + dim);
  Block allocs;
  for (const auto& name : parts)
    allocs.push_back(make_alloc(name, alloc->type, rest, alloc->mem));
  auto [list, pos] = EditSession::stmt_position(alloc_c.path());
  ed.replace_block(list, pos, 1, std::move(allocs));
  return ed.finish();
}

// binds a numeric subexpression to a fresh scalar; with cse, later
// structurally-equal occurrences reuse it while provably unchanged
inline ProcP bind_expr(const ProcP& p, const Target& expr_t,
                       const std::string& name, bool cse = false) {
  Cursor expr_c = expr_t.resolve(p);
  Resolved r = expr_c.resolve();
  if (r.is_stmt())
    throw InvalidCursorError("bind_expr: expected an expression cursor");
  ExprP e = r.expr;
  if (!is_numeric(e->type) || e->kind == ExprKind::Slice)
    prim::unsafe("bind_expr: expected a numeric value expression");
  // index-typed subexpressions are not bindable
  const Path& epath = expr_c.path();
  prim::Names names_used(*p);
  if (names_used.taken(name))
    prim::unsafe("bind_expr: name '" + name + "' is taken");

  // the statement that contains the occurrence
  Path stmt_path = epath;
  while (!stmt_path.empty() && !is_block_label(stmt_path.back().label))
    stmt_path.pop_back();
  if (stmt_path.empty()) throw InternalError("bind_expr: no owning statement");

  std::unordered_set<std::string> read_bufs;
  for (const Access& a : accesses_of(Block{make_assign("__x", {}, e)}))
    read_bufs.insert(a.buf);

  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(stmt_path);
  ed.insert(list, pos,
            {make_alloc(name, e->type, {}), make_assign(name, {}, e)});

  // occurrences: the bound one, plus (with cse) equal ones in the same
  // statement and in following siblings until a write barrier
  std::vector<Path> occurrences;
  StmtP owner = prim::stmt_at(ed, Path{list.prefix} = [&] {
    Path q = stmt_path;
    return q;
  }());
  (void)owner;
  auto collect_in_stmt = [&](const Path& spath) {
    walk_subtree(
        ed.current(), spath, [](const Path&, const StmtP&) { return true; },
        [&](const Path& path, const ExprP& cand) {
          if (struct_eq(cand, e)) occurrences.push_back(path);
          return true;
        });
  };
  collect_in_stmt(stmt_path);
  if (occurrences.empty())
    throw InternalError("bind_expr: lost the bound occurrence");
  if (cse) {
    Block siblings = ed.get_list(list);
    std::unordered_set<std::string> vars_of_e;
    collect_names(e, vars_of_e);
    for (int i = pos + 1; i < (int)siblings.size(); ++i) {
      // skip the two statements we just inserted
      const StmtP& s = siblings[(size_t)i];
      if (i <= pos + 1) continue;
      // barrier: s writes one of e's buffers or rebinds one of its names
      bool barrier = false;
      for (const Access& a : accesses_of(Block{s}))
        if (a.kind != Access::Read && read_bufs.count(a.buf)) barrier = true;
      if (s->kind == StmtKind::For && vars_of_e.count(s->name)) barrier = true;
      if (barrier) break;
      Path spath = list.prefix;
      spath.push_back({list.label, i});
      collect_in_stmt(spath);
    }
  }
  for (const auto& path : occurrences)
    ed.replace_expr(path, make_var(name, e->type));
  return ed.finish();
}

// ---------------------------------------------------------------------------
// stage_mem: loads a window of `buffer` into a fresh temporary around a
// block, retargeting the block's accesses.
// ---------------------------------------------------------------------------

struct WindowSpec {
  std::vector<std::pair<ExprP, ExprP>> dims;  // [lo, hi) per dimension
};

inline WindowSpec parse_window_spec(const std::string& text,
                                    const ScopeEnv& env,
                                    const std::string& buffer) {
  ExprP e = parse_expr_text(text, env);
  if (e->kind != ExprKind::Slice || e->name != buffer)
    throw SchedulingError("stage_mem: window must be a slice of '" + buffer +
                          "', e.g. \"" + buffer + "[0:n]\"");
  WindowSpec w;
  for (const auto& d : e->dims) {
    if (d.is_point())
      w.dims.push_back({d.lo, make_binop(BinOp::Add, d.lo, prim::ilit(1))});
    else
      w.dims.push_back({d.lo, d.hi});
  }
  return w;
}

inline ProcP stage_mem(const ProcP& p, const Target& block_t,
                       const std::string& buffer, const WindowSpec& window,
                       const std::string& tmp) {
  Cursor blk = prim::as_block_cursor(p, block_t);
  prim::Names names_used(*p);
  if (names_used.taken(tmp))
    prim::unsafe("stage_mem: name '" + tmp + "' is taken");

  // classify accesses and check containment
  Block stmts = blk.block_stmts();
  std::vector<Access> all = accesses_of(stmts);
  bool any_read = false, any_write = false, any_reduce = false, seen = false;
  for (const auto& a : all) {
    if (a.buf != buffer) continue;
    seen = true;
    if (a.kind == Access::Read) any_read = true;
    if (a.kind == Access::Write) any_write = true;
    if (a.kind == Access::Reduce) any_reduce = true;
  }
  if (!seen)
    prim::unsafe("stage_mem: block does not access '" + buffer + "'");
  bool reduce_mode = any_reduce && !any_read && !any_write;

  Window inferred = bounds_infer_block(*p, stmts, blk.path(), buffer);
  if (inferred.dims.size() != window.dims.size())
    prim::unsafe("stage_mem: window rank mismatch");
  FactSet facts = facts_at(*p, blk.path());
  std::vector<ExprP> win_lo, win_hi, extents;
  for (size_t d = 0; d < window.dims.size(); ++d) {
    const auto& [lo_e, hi_e] = window.dims[d];
    NormResult lo = normalize(lo_e, facts.atoms);
    NormResult hi = normalize(hi_e, facts.atoms);
    if (!lo || !hi) prim::unsafe("stage_mem: non-affine window bound");
    facts.close_atoms();
    prim::require_valid(
        prove_constraint(facts, {inferred.dims[d].lo - *lo, false}),
        "stage_mem: accesses may fall below the window in dim " +
            std::to_string(d));
    prim::require_valid(
        prove_constraint(facts, {*hi - inferred.dims[d].hi, false}),
        "stage_mem: accesses may fall beyond the window in dim " +
            std::to_string(d));
    win_lo.push_back(lo_e);
    win_hi.push_back(hi_e);
    ExprP ext = make_binop(BinOp::Sub, hi_e, lo_e);
    if (ExprP simp = simplify_index(ext, facts)) ext = simp;
    extents.push_back(ext);
  }

  // write-only staging must cover the window before the store-back
  if (!reduce_mode && !any_read && (any_write || any_reduce)) {
    Window wr = inferred;  // unions reads+writes; with no reads this is writes
    // dense unit-stride coverage: every write access in each dim must be
    // lo_d + iter with full range; conservatively require the inferred
    // window to exactly match and each access to use one distinct iterator
    for (const auto& a : all) {
      if (a.buf != buffer || a.kind == Access::Read) continue;
      std::set<std::string> seen_iters;
      for (size_t d = 0; d < a.idx.size(); ++d) {
        NormResult f = normalize(a.idx[d], facts.atoms);
        if (!f) prim::unsafe("stage_mem: non-affine write index");
        AffineForm rel = *f - *normalize(win_lo[d], facts.atoms);
        // rel must be exactly one loop iterator of full extent (or constant
        // zero with extent one)
        bool ok = false;
        if (rel.coeffs().empty() && rel.constant().is_zero()) {
          NormResult ext = normalize(extents[d], facts.atoms);
          ok = ext && ext->is_constant() && ext->constant() == Rational(1);
        } else if (rel.coeffs().size() == 1 && rel.constant().is_zero() &&
                   rel.coeffs().begin()->second == Rational(1)) {
          const std::string& it = rel.coeffs().begin()->first;
          if (!seen_iters.insert(it).second) continue;
          for (const auto& l : a.loops)
            if (l.name == it) {
              NormResult llo = normalize(l.lo, facts.atoms);
              NormResult lhi = normalize(l.hi, facts.atoms);
              NormResult ext = normalize(extents[d], facts.atoms);
              if (llo && lhi && ext && llo->is_zero() && *lhi == *ext)
                ok = true;
            }
        }
        if (!ok)
          prim::unsafe(
              "stage_mem: write-only staging requires dense unit-stride "
              "coverage of the window");
      }
    }
    (void)wr;
  }

  // build the load / store nests
  ScalarKind elem = ScalarKind::F32;
  {
    ScopeEnv env = prim::env_at(*p, blk.path());
    auto it = env.find(buffer);
    if (it == env.end()) prim::unsafe("stage_mem: unknown buffer");
    elem = it->second.type;
  }
  std::vector<std::string> qs;
  for (size_t d = 0; d < extents.size(); ++d)
    qs.push_back(names_used.fresh("q" + std::to_string(d)));

  auto nest = [&](StmtP leaf) {
    for (size_t d = extents.size(); d-- > 0;)
      leaf = make_for(qs[d], prim::ilit(0), extents[d], {leaf});
    return leaf;
  };
  auto tmp_idx = [&]() {
    std::vector<ExprP> idx;
    for (const auto& q : qs) idx.push_back(prim::ivar(q));
    return idx;
  };
  auto buf_idx = [&]() {
    std::vector<ExprP> idx;
    for (size_t d = 0; d < qs.size(); ++d)
      idx.push_back(make_binop(BinOp::Add, win_lo[d], prim::ivar(qs[d])));
    return idx;
  };

  EditSession ed(p);
  auto [list, first_pos] = EditSession::stmt_position(blk.path());
  int count = blk.block_size();

  // rewrite accesses inside the block to the temporary
  for (int i = 0; i < count; ++i) {
    Path spath = list.prefix;
    spath.push_back({list.label, first_pos + i});
    for (const auto& use : prim::buffer_uses(ed.current(), buffer, spath)) {
      FactSet ufacts = facts_at(ed.current(), use.path);
      auto shift = [&](const ExprP& idx, size_t d) {
        ExprP out = make_binop(BinOp::Sub, idx, win_lo[d]);
        if (ExprP simp = simplify_index(out, ufacts)) out = simp;
        return out;
      };
      switch (use.kind) {
        case prim::BufUse::ReadE: {
          auto rr = ed.peek(use.path);
          if (rr->expr->kind != ExprKind::Read) break;
          auto n = std::make_shared<Expr>(*rr->expr);
          n->name = tmp;
          for (size_t d = 0; d < n->args.size(); ++d)
            n->args[d] = shift(n->args[d], d);
          ed.replace_expr(use.path, n);
          break;
        }
        case prim::BufUse::SliceE: {
          auto rr = ed.peek(use.path);
          auto n = std::make_shared<Expr>(*rr->expr);
          n->name = tmp;
          for (size_t d = 0; d < n->dims.size(); ++d) {
            n->dims[d].lo = shift(n->dims[d].lo, d);
            if (n->dims[d].hi) n->dims[d].hi = shift(n->dims[d].hi, d);
          }
          ed.replace_expr(use.path, n);
          break;
        }
        case prim::BufUse::Dest: {
          StmtP cur = prim::stmt_at(ed, use.path);
          // first adjust index children, then swap the name
          for (size_t d = 0; d < cur->idx.size(); ++d) {
            Path ip = use.path;
            ip.push_back({Label::Idx, (int)d});
            ed.replace_expr(ip, shift(cur->idx[d], d));
          }
          StmtP cur2 = prim::stmt_at(ed, use.path);
          auto n = std::make_shared<Stmt>(*cur2);
          n->name = tmp;
          ed.replace_stmt(use.path, n, /*keep_children=*/true);
          break;
        }
        case prim::BufUse::AllocD:
          prim::unsafe("stage_mem: cannot stage an allocation of itself");
      }
    }
  }

  // prologue: allocation plus load (or zero-init in reduce mode)
  Block prologue{make_alloc(tmp, elem, extents)};
  if (reduce_mode) {
    prologue.push_back(
        nest(make_assign(tmp, tmp_idx(), make_literal(Rational(0), elem))));
  } else if (any_read || any_reduce) {
    prologue.push_back(
        nest(make_assign(tmp, tmp_idx(), make_read(buffer, buf_idx(), elem))));
  }
  ed.insert(list, first_pos, std::move(prologue));
  int inserted = reduce_mode || any_read || any_reduce ? 2 : 1;

  // epilogue: store back
  if (any_write || any_reduce) {
    StmtP store =
        reduce_mode
            ? make_reduce(buffer, buf_idx(), make_read(tmp, tmp_idx(), elem))
            : make_assign(buffer, buf_idx(), make_read(tmp, tmp_idx(), elem));
    ed.insert(list, first_pos + inserted + count, {nest(store)});
  }
  return ed.finish();
}

inline ProcP stage_mem(const ProcP& p, const Target& block_t,
                       const std::string& buffer,
                       const std::string& window_text, const std::string& tmp) {
  Cursor blk = prim::as_block_cursor(p, block_t);
  ScopeEnv env = prim::env_at(*p, blk.path());
  return stage_mem(p, Target(blk), buffer,
                   parse_window_spec(window_text, env, buffer), tmp);
}

}  // namespace exo2ir

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/printer.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// Paths: label-index steps from the procedure body down to a node.
// ---------------------------------------------------------------------------

enum class Label { Body, Orelse, Lo, Hi, Cond, Lhs, Rhs, Idx, Arg };

inline const char* label_name(Label l) {
  switch (l) {
    case Label::Body: return "body";
    case Label::Orelse: return "orelse";
    case Label::Lo: return "lo";
    case Label::Hi: return "hi";
    case Label::Cond: return "cond";
    case Label::Lhs: return "lhs";
    case Label::Rhs: return "rhs";
    case Label::Idx: return "idx";
    case Label::Arg: return "arg";
  }
  return "?";
}

struct PathStep {
  Label label;
  int index = -1;  // -1 when the child is not part of a list

  friend bool operator==(const PathStep& a, const PathStep& b) {
    return a.label == b.label && a.index == b.index;
  }
};

using Path = std::vector<PathStep>;

inline bool is_block_label(Label l) {
  return l == Label::Body || l == Label::Orelse;
}

inline std::string path_text(const Path& p) {
  std::string out;
  for (const auto& s : p) {
    if (!out.empty()) out += ".";
    out += label_name(s.label);
    if (s.index >= 0) out += "[" + std::to_string(s.index) + "]";
  }
  return out.empty() ? "<root>" : out;
}

inline bool is_prefix(const Path& pre, const Path& p) {
  if (pre.size() > p.size()) return false;
  for (size_t i = 0; i < pre.size(); ++i)
    if (!(pre[i] == p[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Child access on IR nodes, used by resolution and the edit engine.
// ---------------------------------------------------------------------------

struct Resolved {
  StmtP stmt;  // exactly one of stmt/expr is set
  ExprP expr;

  bool is_stmt() const { return stmt != nullptr; }
};

// For slice arguments, (Lo,k)/(Hi,k)/(Idx,k) address dim k's bounds or point.
inline ExprP expr_child(const ExprP& e, const PathStep& st) {
  switch (e->kind) {
    case ExprKind::Binary:
      if (st.label == Label::Lhs) return e->args[0];
      if (st.label == Label::Rhs) return e->args[1];
      break;
    case ExprKind::Read:
      if (st.label == Label::Idx && st.index >= 0 &&
          st.index < (int)e->args.size())
        return e->args[st.index];
      break;
    case ExprKind::Slice:
      if (st.index >= 0 && st.index < (int)e->dims.size()) {
        const SliceDim& d = e->dims[st.index];
        if (st.label == Label::Lo && !d.is_point()) return d.lo;
        if (st.label == Label::Hi && !d.is_point()) return d.hi;
        if (st.label == Label::Idx && d.is_point()) return d.lo;
      }
      break;
    default:
      break;
  }
  return nullptr;
}

inline ExprP with_expr_child(const ExprP& e, const PathStep& st, ExprP child) {
  auto n = std::make_shared<Expr>(*e);
  switch (e->kind) {
    case ExprKind::Binary:
      if (st.label == Label::Lhs) { n->args[0] = std::move(child); return n; }
      if (st.label == Label::Rhs) { n->args[1] = std::move(child); return n; }
      break;
    case ExprKind::Read:
      if (st.label == Label::Idx && st.index >= 0 &&
          st.index < (int)n->args.size()) {
        n->args[st.index] = std::move(child);
        return n;
      }
      break;
    case ExprKind::Slice:
      if (st.index >= 0 && st.index < (int)n->dims.size()) {
        SliceDim& d = n->dims[st.index];
        if (st.label == Label::Lo && !d.is_point()) { d.lo = std::move(child); return n; }
        if (st.label == Label::Hi && !d.is_point()) { d.hi = std::move(child); return n; }
        if (st.label == Label::Idx && d.is_point()) { d.lo = std::move(child); return n; }
      }
      break;
    default:
      break;
  }
  throw InternalError("with_expr_child: bad step " + std::string(label_name(st.label)));
}

inline ExprP stmt_child_expr(const StmtP& s, const PathStep& st) {
  switch (s->kind) {
    case StmtKind::For:
      if (st.label == Label::Lo) return s->lo;
      if (st.label == Label::Hi) return s->hi;
      break;
    case StmtKind::If:
      if (st.label == Label::Cond) return s->cond;
      break;
    case StmtKind::Assign:
    case StmtKind::Reduce:
      if (st.label == Label::Rhs) return s->rhs;
      if (st.label == Label::Idx && st.index >= 0 &&
          st.index < (int)s->idx.size())
        return s->idx[st.index];
      break;
    case StmtKind::Alloc:
      if (st.label == Label::Idx && st.index >= 0 &&
          st.index < (int)s->idx.size())
        return s->idx[st.index];
      break;
    case StmtKind::Call:
      if (st.label == Label::Arg && st.index >= 0 &&
          st.index < (int)s->args.size())
        return s->args[st.index];
      break;
    default:
      break;
  }
  return nullptr;
}

inline StmtP with_stmt_child_expr(const StmtP& s, const PathStep& st,
                                  ExprP child) {
  auto n = std::make_shared<Stmt>(*s);
  switch (s->kind) {
    case StmtKind::For:
      if (st.label == Label::Lo) { n->lo = std::move(child); return n; }
      if (st.label == Label::Hi) { n->hi = std::move(child); return n; }
      break;
    case StmtKind::If:
      if (st.label == Label::Cond) { n->cond = std::move(child); return n; }
      break;
    case StmtKind::Assign:
    case StmtKind::Reduce:
      if (st.label == Label::Rhs) { n->rhs = std::move(child); return n; }
      if (st.label == Label::Idx && st.index >= 0 &&
          st.index < (int)n->idx.size()) {
        n->idx[st.index] = std::move(child);
        return n;
      }
      break;
    case StmtKind::Alloc:
      if (st.label == Label::Idx && st.index >= 0 &&
          st.index < (int)n->idx.size()) {
        n->idx[st.index] = std::move(child);
        return n;
      }
      break;
    case StmtKind::Call:
      if (st.label == Label::Arg && st.index >= 0 &&
          st.index < (int)n->args.size()) {
        n->args[st.index] = std::move(child);
        return n;
      }
      break;
    default:
      break;
  }
  throw InternalError("with_stmt_child_expr: bad step");
}

inline const Block* stmt_child_block(const StmtP& s, Label l) {
  if (s->kind == StmtKind::For && l == Label::Body) return &s->body;
  if (s->kind == StmtKind::If && l == Label::Body) return &s->body;
  if (s->kind == StmtKind::If && l == Label::Orelse) return &s->orelse;
  return nullptr;
}

inline StmtP with_stmt_block(const StmtP& s, Label l, Block b) {
  auto n = std::make_shared<Stmt>(*s);
  if (s->kind == StmtKind::For && l == Label::Body) { n->body = std::move(b); return n; }
  if (s->kind == StmtKind::If && l == Label::Body) { n->body = std::move(b); return n; }
  if (s->kind == StmtKind::If && l == Label::Orelse) { n->orelse = std::move(b); return n; }
  throw InternalError("with_stmt_block: node has no such block");
}

// Resolves `path` against `p`'s body; returns nullopt when it does not exist.
inline std::optional<Resolved> try_resolve_path(const Procedure& p,
                                                const Path& path) {
  if (path.empty()) return std::nullopt;
  const Block* blk = &p.body;
  StmtP cur_stmt;
  ExprP cur_expr;
  for (size_t i = 0; i < path.size(); ++i) {
    const PathStep& st = path[i];
    if (cur_expr) {
      ExprP next = expr_child(cur_expr, st);
      if (!next) return std::nullopt;
      cur_expr = next;
      continue;
    }
    if (is_block_label(st.label)) {
      const Block* list = blk;
      if (cur_stmt) {
        list = stmt_child_block(cur_stmt, st.label);
        if (!list) return std::nullopt;
      } else if (st.label != Label::Body) {
        return std::nullopt;
      }
      if (st.index < 0 || st.index >= (int)list->size()) return std::nullopt;
      cur_stmt = (*list)[st.index];
      blk = nullptr;
      continue;
    }
    if (!cur_stmt) return std::nullopt;
    ExprP next = stmt_child_expr(cur_stmt, st);
    if (!next) return std::nullopt;
    cur_expr = next;
    cur_stmt = nullptr;
  }
  Resolved r;
  r.stmt = cur_stmt;
  r.expr = cur_expr;
  return r;
}

// The statement list addressed by `prefix` + block label.
inline const Block* try_resolve_list(const Procedure& p, const Path& prefix,
                                     Label label) {
  if (prefix.empty()) return label == Label::Body ? &p.body : nullptr;
  auto r = try_resolve_path(p, prefix);
  if (!r || !r->is_stmt()) return nullptr;
  return stmt_child_block(r->stmt, label);
}

// ---------------------------------------------------------------------------
// Cursors.
// ---------------------------------------------------------------------------

enum class CursorKind { Node, Gap, Block, Invalid };
enum class GapSide { Before, After };

// The version-independent payload of a cursor; edit forwarding maps these.
struct CursorCore {
  CursorKind kind = CursorKind::Invalid;
  Path path;        // Node: node path. Gap: anchor statement path.
                    // Block: path of the FIRST statement; range_end closes it.
  GapSide side = GapSide::Before;  // gaps only
  int range_end = -1;              // blocks only: [path.back().index, range_end)

  friend bool operator==(const CursorCore& a, const CursorCore& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == CursorKind::Invalid) return true;
    if (!(a.path == b.path)) return false;
    if (a.kind == CursorKind::Gap && a.side != b.side) return false;
    if (a.kind == CursorKind::Block && a.range_end != b.range_end) return false;
    return true;
  }

  static CursorCore invalid() { return CursorCore{}; }
  static CursorCore node(Path p) {
    CursorCore c;
    c.kind = CursorKind::Node;
    c.path = std::move(p);
    return c;
  }
  static CursorCore gap(Path anchor, GapSide side) {
    CursorCore c;
    c.kind = CursorKind::Gap;
    c.path = std::move(anchor);
    c.side = side;
    return c;
  }
  static CursorCore block(Path first, int end) {
    CursorCore c;
    c.kind = CursorKind::Block;
    c.path = std::move(first);
    c.range_end = end;
    return c;
  }
};

class Cursor {
public:
  Cursor() = default;
  Cursor(ProcP proc, CursorCore core)
      : proc_(std::move(proc)), core_(std::move(core)) {}

  const ProcP& proc() const { return proc_; }
  std::uint64_t version() const { return proc_ ? proc_->version : 0; }
  const CursorCore& core() const { return core_; }
  CursorKind kind() const { return core_.kind; }
  const Path& path() const { return core_.path; }
  GapSide side() const { return core_.side; }
  bool valid() const { return core_.kind != CursorKind::Invalid; }

  // block range [begin, end) within its owning list
  int block_begin() const { return core_.path.back().index; }
  int block_end() const { return core_.range_end; }
  int block_size() const { return core_.range_end - core_.path.back().index; }

  friend bool operator==(const Cursor& a, const Cursor& b) {
    return a.version() == b.version() && a.core_ == b.core_;
  }
  friend bool operator!=(const Cursor& a, const Cursor& b) { return !(a == b); }

  // --- resolution ---

  Resolved resolve() const {
    require_kind(CursorKind::Node, "resolve");
    auto r = try_resolve_path(*proc_, core_.path);
    if (!r)
      throw InvalidCursorError("cursor does not resolve: " +
                               path_text(core_.path));
    return *r;
  }

  StmtP stmt() const {
    Resolved r = resolve();
    if (!r.is_stmt())
      throw InvalidCursorError("cursor is not a statement: " +
                               path_text(core_.path));
    return r.stmt;
  }

  ExprP expr() const {
    Resolved r = resolve();
    if (r.is_stmt())
      throw InvalidCursorError("cursor is not an expression: " +
                               path_text(core_.path));
    return r.expr;
  }

  // statements of a block cursor
  Block block_stmts() const {
    require_kind(CursorKind::Block, "block_stmts");
    const Block* list = owning_list();
    Block out;
    for (int i = block_begin(); i < block_end(); ++i) out.push_back((*list)[i]);
    return out;
  }

  StmtP anchor_stmt() const {
    require_kind(CursorKind::Gap, "anchor_stmt");
    auto r = try_resolve_path(*proc_, core_.path);
    if (!r || !r->is_stmt())
      throw InvalidCursorError("gap anchor does not resolve");
    return r.value().stmt;
  }

  // --- navigation (all return new cursors; they throw InvalidCursorError
  // --- when the move does not denote a location) ---

  Cursor parent() const {
    require_valid("parent");
    Path p = core_.path;
    if (p.empty() || (core_.kind != CursorKind::Node && p.size() == 1) ||
        (core_.kind == CursorKind::Node && p.size() == 1))
      throw InvalidCursorError("parent of a top-level location is invalid");
    p.pop_back();
    // pop expression steps down to the owning node boundary: parent of an
    // expr is its owning node; parent of a stmt is the enclosing stmt
    return Cursor(proc_, CursorCore::node(std::move(p)));
  }

  Cursor next(int n = 1) const { return sibling(n); }
  Cursor prev(int n = 1) const { return sibling(-n); }

  Cursor before() const {
    stmt_only("before");
    return Cursor(proc_, CursorCore::gap(core_.path, GapSide::Before));
  }
  Cursor after() const {
    if (core_.kind == CursorKind::Block) {
      Path p = core_.path;
      p.back().index = core_.range_end - 1;
      check_stmt_path(p, "after");
      return Cursor(proc_, CursorCore::gap(std::move(p), GapSide::After));
    }
    stmt_only("after");
    return Cursor(proc_, CursorCore::gap(core_.path, GapSide::After));
  }

  Cursor anchor() const {
    require_kind(CursorKind::Gap, "anchor");
    Cursor c(proc_, CursorCore::node(core_.path));
    c.stmt();  // validate
    return c;
  }

  Cursor body(int i) const { return child_stmt(Label::Body, i, "body"); }
  Cursor orelse(int i) const { return child_stmt(Label::Orelse, i, "orelse"); }

  int body_size() const {
    StmtP s = stmt();
    const Block* b = stmt_child_block(s, Label::Body);
    if (!b) throw InvalidCursorError("node has no body");
    return (int)b->size();
  }
  int orelse_size() const {
    StmtP s = stmt();
    const Block* b = stmt_child_block(s, Label::Orelse);
    return b ? (int)b->size() : 0;
  }

  Cursor body_block() const {
    StmtP s = stmt();
    const Block* b = stmt_child_block(s, Label::Body);
    if (!b || b->empty()) throw InvalidCursorError("node has no body");
    Path p = core_.path;
    p.push_back({Label::Body, 0});
    return Cursor(proc_, CursorCore::block(std::move(p), (int)b->size()));
  }

  Cursor body_range(int i, int j) const {
    StmtP s = stmt();
    const Block* b = stmt_child_block(s, Label::Body);
    if (!b || i < 0 || j <= i || j > (int)b->size())
      throw InvalidCursorError("body_range out of bounds");
    Path p = core_.path;
    p.push_back({Label::Body, i});
    return Cursor(proc_, CursorCore::block(std::move(p), j));
  }

  Cursor lo() const { return child_expr({Label::Lo, -1}, "lo"); }
  Cursor hi() const { return child_expr({Label::Hi, -1}, "hi"); }
  Cursor cond() const { return child_expr({Label::Cond, -1}, "cond"); }
  Cursor lhs() const { return child_expr({Label::Lhs, -1}, "lhs"); }
  Cursor rhs() const { return child_expr({Label::Rhs, -1}, "rhs"); }
  Cursor idx(int k) const { return child_expr({Label::Idx, k}, "idx"); }
  Cursor arg(int k) const { return child_expr({Label::Arg, k}, "arg"); }

  // widen a statement or block cursor by siblings on each side
  Cursor expand(int nbefore, int nafter) const {
    int b, e;
    Path p = core_.path;
    if (core_.kind == CursorKind::Node) {
      check_stmt_path(p, "expand");
      b = p.back().index;
      e = b + 1;
    } else if (core_.kind == CursorKind::Block) {
      b = block_begin();
      e = block_end();
    } else {
      throw InvalidCursorError("expand requires a statement or block cursor");
    }
    const Block* list = owning_list_of(p);
    b -= nbefore;
    e += nafter;
    if (b < 0 || e > (int)list->size() || b >= e)
      throw InvalidCursorError("expand out of bounds");
    p.back().index = b;
    return Cursor(proc_, CursorCore::block(std::move(p), e));
  }

  // restrict a block cursor back to a single statement
  Cursor at(int offset) const {
    require_kind(CursorKind::Block, "at");
    int i = block_begin() + offset;
    if (i < 0 || i >= block_end())
      throw InvalidCursorError("block offset out of range");
    Path p = core_.path;
    p.back().index = i;
    return Cursor(proc_, CursorCore::node(std::move(p)));
  }

  std::string str() const {
    switch (core_.kind) {
      case CursorKind::Invalid: return "<invalid cursor>";
      case CursorKind::Node: return path_text(core_.path);
      case CursorKind::Gap:
        return path_text(core_.path) +
               (core_.side == GapSide::Before ? " (gap before)" : " (gap after)");
      case CursorKind::Block:
        return path_text(core_.path) + "..+" + std::to_string(block_size());
    }
    return "?";
  }

private:
  Cursor sibling(int delta) const {
    stmt_only("next/prev");
    Path p = core_.path;
    int i = p.back().index + delta;
    p.back().index = i;
    if (i < 0) throw InvalidCursorError("no such sibling");
    const Block* list = owning_list_of(p);
    if (i >= (int)list->size()) throw InvalidCursorError("no such sibling");
    return Cursor(proc_, CursorCore::node(std::move(p)));
  }

  Cursor child_stmt(Label l, int i, const char* what) const {
    StmtP s = stmt();
    const Block* b = stmt_child_block(s, l);
    if (!b || i < 0 || i >= (int)b->size())
      throw InvalidCursorError(std::string(what) + " index out of range");
    Path p = core_.path;
    p.push_back({l, i});
    return Cursor(proc_, CursorCore::node(std::move(p)));
  }

  Cursor child_expr(PathStep st, const char* what) const {
    Resolved r = resolve();
    ExprP child =
        r.is_stmt() ? stmt_child_expr(r.stmt, st) : expr_child(r.expr, st);
    if (!child)
      throw InvalidCursorError(std::string("node has no ") + what + " child");
    Path p = core_.path;
    p.push_back(st);
    return Cursor(proc_, CursorCore::node(std::move(p)));
  }

  const Block* owning_list() const { return owning_list_of(core_.path); }

  const Block* owning_list_of(const Path& p) const {
    Path prefix(p.begin(), p.end() - 1);
    const Block* list = try_resolve_list(*proc_, prefix, p.back().label);
    if (!list) throw InvalidCursorError("owning list does not resolve");
    return list;
  }

  void check_stmt_path(const Path& p, const char* what) const {
    if (p.empty() || !is_block_label(p.back().label))
      throw InvalidCursorError(std::string(what) +
                               " requires a statement cursor");
    auto r = try_resolve_path(*proc_, p);
    if (!r || !r->is_stmt())
      throw InvalidCursorError(std::string(what) +
                               ": cursor does not resolve to a statement");
  }

  void stmt_only(const char* what) const {
    require_kind(CursorKind::Node, what);
    check_stmt_path(core_.path, what);
  }

  void require_kind(CursorKind k, const char* what) const {
    require_valid(what);
    if (core_.kind != k)
      throw InvalidCursorError(std::string(what) +
                               ": wrong cursor kind for this operation");
  }
  void require_valid(const char* what) const {
    if (!proc_ || core_.kind == CursorKind::Invalid)
      throw InvalidCursorError(std::string(what) + " on an invalid cursor");
  }

  ProcP proc_;
  CursorCore core_;
};

// Cursor to the i-th top-level statement.
inline Cursor top_cursor(const ProcP& p, int i = 0) {
  if (i < 0 || i >= (int)p->body.size())
    throw InvalidCursorError("top-level index out of range");
  return Cursor(p, CursorCore::node({{Label::Body, i}}));
}

// Block cursor covering the whole procedure body.
inline Cursor body_cursor(const ProcP& p) {
  return Cursor(p, CursorCore::block({{Label::Body, 0}}, (int)p->body.size()));
}

}  // namespace exo2ir

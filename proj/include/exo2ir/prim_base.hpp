#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/analysis.hpp"
#include "exo2ir/cursor.hpp"
#include "exo2ir/edits.hpp"
#include "exo2ir/errors.hpp"
#include "exo2ir/object_ops.hpp"
#include "exo2ir/pattern.hpp"
#include "exo2ir/printer.hpp"

namespace exo2ir {

// How divide_loop handles extents that the factor may not divide.
enum class TailStrategy { Perfect, Guard, Cut, CutAndGuard };

inline TailStrategy tail_from_name(const std::string& s) {
  if (s == "perfect") return TailStrategy::Perfect;
  if (s == "guard") return TailStrategy::Guard;
  if (s == "cut") return TailStrategy::Cut;
  if (s == "cut_and_guard") return TailStrategy::CutAndGuard;
  throw SchedulingError("unknown tail strategy '" + s + "'");
}

// Cursor-or-pattern argument. Pattern strings desugar through find; a bare
// identifier (optionally "#n") names a loop.
class Target {
public:
  Target(Cursor c) : cursor_(std::move(c)) {}  // NOLINT: implicit by design
  Target(std::string pattern) : pattern_(std::move(pattern)) {}  // NOLINT
  Target(const char* pattern) : pattern_(pattern) {}  // NOLINT

  bool is_cursor() const { return cursor_.has_value(); }

  // Implicitly forwards cursors; resolves patterns with find.
  Cursor resolve(const ProcP& p) const {
    if (cursor_) return resolve_in(p, *cursor_);
    return find(p, pattern_);
  }

  // Loop arguments: identifiers go through find_loop.
  Cursor resolve_loop(const ProcP& p) const {
    if (cursor_) return resolve_in(p, *cursor_);
    if (looks_like_loop_name()) return find_loop(p, pattern_);
    return find(p, pattern_);
  }

  std::string describe() const {
    if (cursor_) return cursor_->str();
    return "'" + pattern_ + "'";
  }

  const std::string& pattern_text() const { return pattern_; }

private:
  bool looks_like_loop_name() const {
    bool seen_hash = false;
    for (size_t i = 0; i < pattern_.size(); ++i) {
      char c = pattern_[i];
      if (c == '#') { seen_hash = true; continue; }
      if (c == ' ' && seen_hash) continue;
      if (seen_hash) {
        if (!std::isdigit((unsigned char)c)) return false;
      } else if (i == 0 ? !(std::isalpha((unsigned char)c) || c == '_')
                        : !(std::isalnum((unsigned char)c) || c == '_')) {
        if (c == ' ' && i + 1 < pattern_.size() && pattern_[i + 1] == '#')
          continue;
        return false;
      }
    }
    return !pattern_.empty();
  }

  std::optional<Cursor> cursor_;
  std::string pattern_;
};

namespace prim {

inline ExprP ilit(long long v) {
  return make_literal(Rational(v), ScalarKind::Index);
}
inline ExprP ivar(const std::string& n) { return make_var(n, ScalarKind::Index); }

[[noreturn]] inline void unsafe(const std::string& what,
                                const std::string& trace = {}) {
  throw SchedulingError(what, trace);
}

inline void require_valid(const ProveOutcome& out, const std::string& what) {
  if (out.result != ProveResult::Valid) unsafe(what, out.trace);
}

inline Cursor as_stmt_cursor(const ProcP& p, const Target& t) {
  Cursor c = t.resolve(p);
  if (c.kind() != CursorKind::Node)
    throw InvalidCursorError("expected a statement cursor, got " + c.str());
  c.stmt();
  return c;
}

inline Cursor as_loop_cursor(const ProcP& p, const Target& t,
                             const char* who) {
  Cursor c = t.resolve_loop(p);
  if (c.kind() != CursorKind::Node || c.resolve().stmt == nullptr ||
      c.stmt()->kind != StmtKind::For)
    throw InvalidCursorError(std::string(who) + ": " + t.describe() +
                             " is not a for loop");
  return c;
}

// Accepts a block cursor, or a statement cursor treated as a block of one.
inline Cursor as_block_cursor(const ProcP& p, const Target& t) {
  Cursor c = t.resolve(p);
  if (c.kind() == CursorKind::Block) return c;
  if (c.kind() == CursorKind::Node && c.resolve().is_stmt())
    return c.expand(0, 0);
  throw InvalidCursorError("expected a statement block, got " + c.str());
}

inline ExprP loop_extent(const StmtP& loop) {
  if (loop->lo->kind == ExprKind::Literal && loop->lo->value == Rational(0))
    return loop->hi;
  return make_binop(BinOp::Sub, loop->hi, loop->lo);
}

// i |-> lo + c*outer + inner, folding the lo == 0 case to c*outer + inner
inline ExprP divided_iter(const ExprP& lo, long long c,
                          const std::string& outer, const std::string& inner) {
  ExprP combo = make_binop(BinOp::Add,
                           make_binop(BinOp::Mul, ilit(c), ivar(outer)),
                           ivar(inner));
  if (lo->kind == ExprKind::Literal && lo->value == Rational(0)) return combo;
  return make_binop(BinOp::Add, lo, combo);
}

// fresh name helper bound to a procedure's used names
class Names {
public:
  explicit Names(const Procedure& p) : used_(used_names(p)) {}
  std::string fresh(const std::string& base) { return fresh_name(base, used_); }
  bool taken(const std::string& n) const { return used_.count(n) > 0; }
  void reserve(const std::string& n) { used_.insert(n); }
  std::unordered_set<std::string>& set() { return used_; }

private:
  std::unordered_set<std::string> used_;
};

// occurrence paths of an iterator variable under a subtree (current session
// coordinates)
inline std::vector<Path> iter_occurrences(const Procedure& cur,
                                          const Path& subtree,
                                          const std::string& iter) {
  std::vector<Path> out;
  walk_subtree(
      cur, subtree, [](const Path&, const StmtP&) { return true; },
      [&](const Path& path, const ExprP& e) {
        if (e->kind == ExprKind::Var && e->name == iter) out.push_back(path);
        return true;
      });
  return out;
}

// substitute an iterator by an expression across a subtree of the working
// procedure (one ReplaceNode per occurrence)
inline void subst_iter(EditSession& ed, const Path& subtree,
                       const std::string& iter, const ExprP& repl) {
  for (const auto& path : iter_occurrences(ed.current(), subtree, iter))
    ed.replace_expr(path, repl);
}

inline StmtP stmt_at(const EditSession& ed, const Path& p) {
  auto r = ed.peek(p);
  if (!r || !r->is_stmt()) throw InternalError("stmt_at: bad path");
  return r->stmt;
}

// enclosing For statements of a path, outermost first
inline std::vector<StmtP> enclosing_loops(const Procedure& p,
                                          const Path& path) {
  std::vector<StmtP> out;
  Path walk;
  for (size_t i = 0; i + 1 <= path.size(); ++i) {
    if (!is_block_label(path[i].label)) break;
    walk.push_back(path[i]);
    if (walk.size() == path.size()) break;  // the node itself
    auto r = try_resolve_path(p, walk);
    if (!r || !r->is_stmt()) break;
    if (r->stmt->kind == StmtKind::For) out.push_back(r->stmt);
  }
  return out;
}

inline ScopeEnv env_at(const Procedure& p, const Path& path) {
  ScopeEnv env = param_env(p);
  for (const StmtP& l : enclosing_loops(p, path))
    env[l->name] = {Binding::Iterator, ScalarKind::Index, 0};
  // local allocs visible at the path
  Path walk;
  const Block* blk = &p.body;
  for (size_t i = 0; i < path.size(); ++i) {
    const PathStep& st = path[i];
    if (!is_block_label(st.label) || !blk) break;
    for (int k = 0; k < st.index && k < (int)blk->size(); ++k) {
      const StmtP& s = (*blk)[k];
      if (s->kind == StmtKind::Alloc)
        env[s->name] = {Binding::BufferAlloc, s->type, s->idx.size()};
    }
    walk.push_back(st);
    auto r = try_resolve_path(p, walk);
    if (!r || !r->is_stmt()) break;
    blk = stmt_child_block(r->stmt, i + 1 < path.size() ? path[i + 1].label
                                                        : Label::Body);
  }
  return env;
}

}  // namespace prim
}  // namespace exo2ir

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/cursor.hpp"
#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/wellformed.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// Atomic edits. Every primitive decomposes into these five (replace comes in
// node and block flavors), each with a canonical forwarding rule.
// ---------------------------------------------------------------------------

// A statement list inside a version: the owning statement's path plus which
// of its blocks. An empty prefix addresses the procedure body.
struct ListAddr {
  Path prefix;
  Label label = Label::Body;

  friend bool operator==(const ListAddr& a, const ListAddr& b) {
    return a.label == b.label && a.prefix == b.prefix;
  }
};

struct AtomicEdit {
  enum Kind { Insert, Delete, ReplaceNode, ReplaceBlock, Move, Wrap } kind;

  ListAddr list;   // Insert/Delete/ReplaceBlock/Wrap/Move: source list
  int pos = 0;
  int count = 0;       // Insert: #inserted; others: #covered statements
  int new_count = 0;   // ReplaceBlock: #replacement statements
  int list_len = 0;    // length of `list` before the edit
  bool pass_filled = false;  // Delete/Move: emptied list received a Pass

  Path node;                  // ReplaceNode target
  bool keep_children = false; // ReplaceNode: children structurally reused

  ListAddr dst;    // Move destination (coordinates AFTER source removal)
  int dst_pos = 0;
};

// Heuristic per-primitive forwarding: an exact pre-edit cursor mapped to an
// explicit post-edit cursor, consulted before the atomic rules.
struct Redirect {
  CursorCore from;
  CursorCore to;
};

struct EditTrace {
  std::vector<AtomicEdit> edits;
  std::vector<Redirect> redirects;
};

// ---------------------------------------------------------------------------
// Forwarding math.
// ---------------------------------------------------------------------------

namespace fwd {

struct ListHit {
  bool through = false;
  int index = 0;
  size_t step = 0;  // position of the list step within the path
};

inline ListHit hit(const Path& q, const ListAddr& l) {
  ListHit h;
  if (q.size() <= l.prefix.size()) return h;
  if (!is_prefix(l.prefix, q)) return h;
  const PathStep& st = q[l.prefix.size()];
  if (st.label != l.label) return h;
  h.through = true;
  h.index = st.index;
  h.step = l.prefix.size();
  return h;
}

inline Path with_index(Path q, size_t step, int idx) {
  q[step].index = idx;
  return q;
}

// Generic splice of [pos, pos+removed) -> `inserted` statements on one list.
// `rebase(i, suffix)` handles paths into the removed range when the edit
// relocates them (move/wrap); when absent those paths are invalidated.
using RebaseFn =
    std::function<std::optional<Path>(int inside_index, Path suffix)>;

struct Splice {
  ListAddr list;
  int pos;
  int removed;
  int inserted;
  int list_len = 0;  // pre-edit length
  const RebaseFn* rebase = nullptr;
};

inline std::optional<Path> map_node_path(const Path& q, const Splice& sp) {
  ListHit h = hit(q, sp.list);
  if (!h.through) return q;
  int i = h.index;
  if (i < sp.pos) return q;
  if (i >= sp.pos + sp.removed)
    return with_index(q, h.step, i + sp.inserted - sp.removed);
  if (sp.rebase) {
    Path suffix(q.begin() + h.step + 1, q.end());
    return (*sp.rebase)(i, std::move(suffix));
  }
  return std::nullopt;
}

inline std::optional<CursorCore> map_core(const CursorCore& c, const Splice& sp,
                                          bool exact_block_resizes = false) {
  switch (c.kind) {
    case CursorKind::Invalid:
      return c;
    case CursorKind::Node: {
      auto p = map_node_path(c.path, sp);
      if (!p) return std::nullopt;
      return CursorCore::node(std::move(*p));
    }
    case CursorKind::Gap: {
      ListHit h = hit(c.path, sp.list);
      bool anchor_at_list = h.through && h.step + 1 == c.path.size();
      auto p = map_node_path(c.path, sp);
      if (!p) {
        // seam handling for removed anchors
        if (!anchor_at_list) return std::nullopt;
        int i = h.index;
        if (i < sp.pos || i >= sp.pos + sp.removed) return std::nullopt;
        bool at_left = (c.side == GapSide::Before && i == sp.pos);
        bool at_right =
            (c.side == GapSide::After && i == sp.pos + sp.removed - 1);
        if (!at_left && !at_right) return std::nullopt;
        if (sp.inserted > 0) {
          int idx = at_left ? sp.pos : sp.pos + sp.inserted - 1;
          return CursorCore::gap(with_index(c.path, h.step, idx), c.side);
        }
        // nothing inserted: attach to a surviving neighbor
        int new_len = sp.list_len - sp.removed;
        if (at_left) {
          if (sp.pos < new_len)
            return CursorCore::gap(with_index(c.path, h.step, sp.pos),
                                   GapSide::Before);
          if (sp.pos > 0)
            return CursorCore::gap(with_index(c.path, h.step, sp.pos - 1),
                                   GapSide::After);
          return std::nullopt;
        }
        if (sp.pos > 0)
          return CursorCore::gap(with_index(c.path, h.step, sp.pos - 1),
                                 GapSide::After);
        if (new_len > 0)
          return CursorCore::gap(with_index(c.path, h.step, 0),
                                 GapSide::Before);
        return std::nullopt;
      }
      return CursorCore::gap(std::move(*p), c.side);
    }
    case CursorKind::Block: {
      ListHit h = hit(c.path, sp.list);
      bool block_at_list = h.through && h.step + 1 == c.path.size();
      if (!block_at_list) {
        auto p = map_node_path(c.path, sp);
        if (!p) return std::nullopt;
        return CursorCore::block(std::move(*p), c.range_end);
      }
      int b = h.index;
      int e = c.range_end;
      int pe = sp.pos + sp.removed;
      int d = sp.inserted - sp.removed;
      if (e <= sp.pos)
        return c;
      if (b >= pe)
        return CursorCore::block(with_index(c.path, h.step, b + d), e + d);
      if (b == sp.pos && e == pe) {
        if (sp.rebase) {
          Path first = (*sp.rebase)(b, {}).value_or(Path{});
          if (first.empty()) return std::nullopt;
          return CursorCore::block(first,
                                   first.back().index + (e - b));
        }
        if (exact_block_resizes) {
          if (sp.inserted == 0) return std::nullopt;
          return CursorCore::block(with_index(c.path, h.step, sp.pos),
                                   sp.pos + sp.inserted);
        }
        return std::nullopt;
      }
      if (b <= sp.pos && e >= pe)
        return CursorCore::block(c.path, e + d);  // covers the splice
      if (b >= sp.pos && e <= pe) {
        if (sp.rebase) {
          Path first = (*sp.rebase)(b, {}).value_or(Path{});
          if (first.empty()) return std::nullopt;
          return CursorCore::block(first, first.back().index + (e - b));
        }
        return std::nullopt;
      }
      return std::nullopt;  // crosses the boundary
    }
  }
  return std::nullopt;
}

}  // namespace fwd

inline std::optional<CursorCore> forward_edit(const CursorCore& c,
                                              const AtomicEdit& ed) {
  using fwd::Splice;
  switch (ed.kind) {
    case AtomicEdit::Insert: {
      Splice sp{ed.list, ed.pos, 0, ed.count, ed.list_len};
      // gap used as the insertion point: ends up after the fragment
      if (c.kind == CursorKind::Gap) {
        fwd::ListHit h = fwd::hit(c.path, ed.list);
        if (h.through && h.step + 1 == c.path.size() &&
            c.side == GapSide::After && h.index == ed.pos - 1) {
          return CursorCore::gap(
              fwd::with_index(c.path, h.step, ed.pos + ed.count - 1),
              GapSide::After);
        }
      }
      return fwd::map_core(c, sp);
    }
    case AtomicEdit::Delete: {
      Splice sp{ed.list, ed.pos, ed.count, ed.pass_filled ? 1 : 0,
                ed.list_len};
      return fwd::map_core(c, sp, /*exact_block_resizes=*/ed.pass_filled);
    }
    case AtomicEdit::ReplaceNode: {
      if (c.kind == CursorKind::Invalid) return c;
      const Path& n = ed.node;
      auto inside = [&](const Path& q) {
        return q.size() > n.size() && is_prefix(n, q);
      };
      if (c.kind == CursorKind::Node) {
        if (c.path == n) return c;
        if (inside(c.path)) return ed.keep_children ? std::optional(c) : std::nullopt;
        return c;
      }
      if (inside(c.path) || c.path == n)
        return ed.keep_children ? std::optional(c) : std::nullopt;
      return c;
    }
    case AtomicEdit::ReplaceBlock: {
      Splice sp{ed.list, ed.pos, ed.count, ed.new_count, ed.list_len};
      return fwd::map_core(c, sp, /*exact_block_resizes=*/true);
    }
    case AtomicEdit::Move: {
      fwd::RebaseFn rebase = [&](int i, Path suffix) -> std::optional<Path> {
        Path p = ed.dst.prefix;
        p.push_back({ed.dst.label, ed.dst_pos + (i - ed.pos)});
        for (auto& st : suffix) p.push_back(st);
        return p;
      };
      Splice src{ed.list, ed.pos,         ed.count,
                 ed.pass_filled ? 1 : 0,  ed.list_len, &rebase};
      // interior node paths rebase to the destination, but a node path that
      // IS a removed position with pass-fill must not be treated as exact
      auto first = fwd::map_core(c, src);
      if (!first) return std::nullopt;
      // skip the destination shift for rebased cursors: their new coordinates
      // are already post-insertion. Blocks that merely COVER the moved range
      // keep their path and still need the destination shift.
      bool rebased = false;
      if (c.kind != CursorKind::Invalid) {
        fwd::ListHit h = fwd::hit(c.path, ed.list);
        if (h.through) {
          bool at_list = h.step + 1 == c.path.size();
          if (c.kind == CursorKind::Block && at_list)
            rebased = h.index >= ed.pos && c.range_end <= ed.pos + ed.count;
          else
            rebased = h.index >= ed.pos && h.index < ed.pos + ed.count;
        }
      }
      if (rebased) return first;
      Splice dst{ed.dst, ed.dst_pos, 0, ed.count, 0};
      if (first->kind == CursorKind::Gap) {
        fwd::ListHit h = fwd::hit(first->path, ed.dst);
        if (h.through && h.step + 1 == first->path.size() &&
            first->side == GapSide::After && h.index == ed.dst_pos - 1) {
          return CursorCore::gap(
              fwd::with_index(first->path, h.step, ed.dst_pos + ed.count - 1),
              GapSide::After);
        }
      }
      return fwd::map_core(*first, dst);
    }
    case AtomicEdit::Wrap: {
      fwd::RebaseFn rebase = [&](int i, Path suffix) -> std::optional<Path> {
        Path p = ed.list.prefix;
        p.push_back({ed.list.label, ed.pos});
        p.push_back({Label::Body, i - ed.pos});
        for (auto& st : suffix) p.push_back(st);
        return p;
      };
      Splice sp{ed.list, ed.pos, ed.count, 1, ed.list_len, &rebase};
      return fwd::map_core(c, sp);
    }
  }
  return std::nullopt;
}

inline CursorCore forward_trace(CursorCore c, const EditTrace& tr) {
  if (c.kind == CursorKind::Invalid) return c;
  for (const auto& r : tr.redirects)
    if (r.from == c) return r.to;
  for (const auto& ed : tr.edits) {
    auto n = forward_edit(c, ed);
    if (!n) return CursorCore::invalid();
    c = std::move(*n);
    if (c.kind == CursorKind::Invalid) return c;
  }
  return c;
}

// Maps `c` into `target`'s frame by composing the traces along the provenance
// chain. Invalidity, once introduced, is maintained.
inline Cursor forward(const ProcP& target, const Cursor& c) {
  if (!c.proc()) throw InvalidCursorError("forwarding a null cursor");
  if (c.proc() == target || c.version() == target->version)
    return Cursor(target, c.core());
  std::vector<ProcP> chain;
  ProcP walk = target;
  while (walk && walk->version != c.version()) {
    chain.push_back(walk);
    walk = walk->parent;
  }
  if (!walk)
    throw ProvenanceError("cursor's version " + std::to_string(c.version()) +
                          " is not an ancestor of '" + target->name + "'");
  CursorCore core = c.core();
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const ProcP& step = *it;
    if (step->trace) core = forward_trace(std::move(core), *step->trace);
    if (core.kind == CursorKind::Invalid) break;
  }
  return Cursor(target, std::move(core));
}

// Implicit forwarding plus resolution, the read entry point primitives use.
inline Cursor resolve_in(const ProcP& p, const Cursor& c) {
  Cursor f = forward(p, c);
  if (!f.valid())
    throw InvalidCursorError("cursor was invalidated by earlier rewrites");
  return f;
}

// ---------------------------------------------------------------------------
// EditSession: builds a new version by applying atomic edits, recording the
// trace. Edit coordinates are relative to the CURRENT working state.
// ---------------------------------------------------------------------------

class EditSession {
public:
  explicit EditSession(ProcP base) : base_(std::move(base)), work_(*base_) {
    work_.parent = nullptr;
    work_.trace = nullptr;
  }

  const Procedure& current() const { return work_; }

  // Map a cursor core given against the BASE version into current coordinates.
  CursorCore now(CursorCore c) const {
    EditTrace tr;
    tr.edits = edits_;
    return forward_trace(std::move(c), tr);
  }

  void insert(const ListAddr& list, int pos, Block fragment) {
    if (fragment.empty()) throw EditError("insert: empty fragment");
    Block cur = get_list(list);
    if (pos < 0 || pos > (int)cur.size()) throw EditError("insert: bad position");
    Block next(cur.begin(), cur.begin() + pos);
    for (auto& s : fragment) next.push_back(s);
    next.insert(next.end(), cur.begin() + pos, cur.end());
    set_list(list, std::move(next));
    AtomicEdit ed;
    ed.kind = AtomicEdit::Insert;
    ed.list = list;
    ed.pos = pos;
    ed.count = (int)fragment.size();
    ed.list_len = (int)cur.size();
    edits_.push_back(std::move(ed));
  }

  void insert_at_gap(const CursorCore& gap, Block fragment) {
    if (gap.kind != CursorKind::Gap) throw EditError("not a gap cursor");
    auto [list, pos] = gap_position(gap);
    insert(list, pos, std::move(fragment));
  }

  void erase(const ListAddr& list, int pos, int count) {
    Block cur = get_list(list);
    if (count <= 0 || pos < 0 || pos + count > (int)cur.size())
      throw EditError("erase: bad range");
    Block next(cur.begin(), cur.begin() + pos);
    next.insert(next.end(), cur.begin() + pos + count, cur.end());
    bool fill = next.empty();
    if (fill) next.push_back(make_pass());
    set_list(list, std::move(next));
    AtomicEdit ed;
    ed.kind = AtomicEdit::Delete;
    ed.list = list;
    ed.pos = pos;
    ed.count = count;
    ed.list_len = (int)cur.size();
    ed.pass_filled = fill;
    edits_.push_back(std::move(ed));
  }

  void replace_stmt(const Path& path, StmtP next, bool keep_children = false) {
    auto r = try_resolve_path(work_, path);
    if (!r || !r->is_stmt()) throw EditError("replace_stmt: path not a statement");
    if (keep_children) check_same_children(r->stmt, next);
    set_node(path, Resolved{std::move(next), nullptr});
    AtomicEdit ed;
    ed.kind = AtomicEdit::ReplaceNode;
    ed.node = path;
    ed.keep_children = keep_children;
    edits_.push_back(std::move(ed));
  }

  void replace_expr(const Path& path, ExprP next) {
    auto r = try_resolve_path(work_, path);
    if (!r || r->is_stmt()) throw EditError("replace_expr: path not an expression");
    set_node(path, Resolved{nullptr, std::move(next)});
    AtomicEdit ed;
    ed.kind = AtomicEdit::ReplaceNode;
    ed.node = path;
    ed.keep_children = false;
    edits_.push_back(std::move(ed));
  }

  void replace_block(const ListAddr& list, int pos, int count, Block fragment) {
    Block cur = get_list(list);
    if (count <= 0 || pos < 0 || pos + count > (int)cur.size())
      throw EditError("replace_block: bad range");
    if (fragment.empty()) fragment.push_back(make_pass());
    Block next(cur.begin(), cur.begin() + pos);
    int new_count = (int)fragment.size();
    for (auto& s : fragment) next.push_back(std::move(s));
    next.insert(next.end(), cur.begin() + pos + count, cur.end());
    set_list(list, std::move(next));
    AtomicEdit ed;
    ed.kind = AtomicEdit::ReplaceBlock;
    ed.list = list;
    ed.pos = pos;
    ed.count = count;
    ed.new_count = new_count;
    ed.list_len = (int)cur.size();
    edits_.push_back(std::move(ed));
  }

  // Moves [pos, pos+count) of src to the gap at (dst_list, dst_pos), all in
  // current coordinates.
  void move(const ListAddr& src, int pos, int count, const ListAddr& dst_list,
            int dst_pos) {
    Block from = get_list(src);
    if (count <= 0 || pos < 0 || pos + count > (int)from.size())
      throw EditError("move: bad source range");
    // destination must not sit inside the moved subtree
    {
      Path moved = src.prefix;
      moved.push_back({src.label, 0});
      for (int i = pos; i < pos + count; ++i) {
        moved.back().index = i;
        if (is_prefix(moved, dst_list.prefix))
          throw EditError("move: destination inside the moved block");
      }
    }
    Block removed(from.begin() + pos, from.begin() + pos + count);
    Block next(from.begin(), from.begin() + pos);
    next.insert(next.end(), from.begin() + pos + count, from.end());
    bool fill = next.empty();
    if (fill) next.push_back(make_pass());
    set_list(src, std::move(next));

    // destination coordinates after the removal
    ListAddr dst = dst_list;
    int dpos = dst_pos;
    fwd::ListHit h = fwd::hit(dst.prefix, src);
    if (h.through) {
      if (h.index >= pos + count)
        dst.prefix[h.step].index -= count;
      else if (h.index >= pos)
        throw EditError("move: destination inside the moved block");
    }
    if (dst == src && dpos > pos) {
      if (dpos < pos + count) throw EditError("move: destination inside range");
      dpos -= count;
    }
    Block to = get_list(dst);
    if (dpos < 0 || dpos > (int)to.size()) throw EditError("move: bad gap");
    Block out(to.begin(), to.begin() + dpos);
    for (auto& s : removed) out.push_back(std::move(s));
    out.insert(out.end(), to.begin() + dpos, to.end());
    set_list(dst, std::move(out));

    AtomicEdit ed;
    ed.kind = AtomicEdit::Move;
    ed.list = src;
    ed.pos = pos;
    ed.count = count;
    ed.list_len = (int)from.size();
    ed.pass_filled = fill;
    ed.dst = dst;
    ed.dst_pos = dpos;
    edits_.push_back(std::move(ed));
  }

  // Wraps [pos, pos+count) in `wrapper` (a For or If whose body becomes the
  // wrapped statements).
  void wrap(const ListAddr& list, int pos, int count, const StmtP& wrapper) {
    if (wrapper->kind != StmtKind::For && wrapper->kind != StmtKind::If)
      throw EditError("wrap: wrapper must be a for or if");
    Block cur = get_list(list);
    if (count <= 0 || pos < 0 || pos + count > (int)cur.size())
      throw EditError("wrap: bad range");
    Block inner(cur.begin() + pos, cur.begin() + pos + count);
    StmtP filled = with_stmt_block(wrapper, Label::Body, std::move(inner));
    Block next(cur.begin(), cur.begin() + pos);
    next.push_back(std::move(filled));
    next.insert(next.end(), cur.begin() + pos + count, cur.end());
    set_list(list, std::move(next));
    AtomicEdit ed;
    ed.kind = AtomicEdit::Wrap;
    ed.list = list;
    ed.pos = pos;
    ed.count = count;
    ed.list_len = (int)cur.size();
    edits_.push_back(std::move(ed));
  }

  // --- procedure-level (not cursor-addressable) ---
  void set_name(std::string name) { work_.name = std::move(name); }
  void set_params(std::vector<Param> params) { work_.params = std::move(params); }
  void set_asserts(std::vector<ExprP> asserts) {
    work_.asserts = std::move(asserts);
  }

  void redirect(CursorCore from, CursorCore to) {
    redirects_.push_back({std::move(from), std::move(to)});
  }

  ProcP finish() {
    auto tr = std::make_shared<EditTrace>();
    tr->edits = std::move(edits_);
    tr->redirects = std::move(redirects_);
    ProcP out = derive_proc(base_, std::move(work_), std::move(tr));
    debug_check_wellformed(out);
    return out;
  }

  // Current-coordinate resolution helpers for primitives mid-rewrite.
  Block get_list(const ListAddr& list) const {
    const Block* b = try_resolve_list(work_, list.prefix, list.label);
    if (!b) throw EditError("list does not resolve: " + path_text(list.prefix));
    return *b;
  }

  std::optional<Resolved> peek(const Path& path) const {
    return try_resolve_path(work_, path);
  }

  static std::pair<ListAddr, int> gap_position(const CursorCore& gap) {
    ListAddr list;
    list.prefix = Path(gap.path.begin(), gap.path.end() - 1);
    list.label = gap.path.back().label;
    int pos = gap.path.back().index + (gap.side == GapSide::After ? 1 : 0);
    return {list, pos};
  }

  static std::pair<ListAddr, int> stmt_position(const Path& p) {
    if (p.empty() || !is_block_label(p.back().label))
      throw EditError("not a statement path: " + path_text(p));
    ListAddr list;
    list.prefix = Path(p.begin(), p.end() - 1);
    list.label = p.back().label;
    return {list, p.back().index};
  }

private:
  void set_list(const ListAddr& list, Block next) {
    if (list.prefix.empty()) {
      if (list.label != Label::Body) throw EditError("bad top-level list");
      work_.body = std::move(next);
      return;
    }
    rebuild_node(list.prefix, [&](Resolved r) -> Resolved {
      if (!r.is_stmt()) throw EditError("list owner is not a statement");
      return {with_stmt_block(r.stmt, list.label, std::move(next)), nullptr};
    });
  }

  void set_node(const Path& path, Resolved next) {
    rebuild_node(path, [&](Resolved) { return next; });
  }

  // Persistent update: rebuilds the spine from the target back to the root.
  void rebuild_node(const Path& path,
                    const std::function<Resolved(Resolved)>& xform) {
    work_.body = rebuild_block(work_.body, path, 0, xform);
  }

  Block rebuild_block(const Block& blk, const Path& path, size_t k,
                      const std::function<Resolved(Resolved)>& xform) {
    const PathStep& st = path[k];
    if (!is_block_label(st.label) || st.index < 0 ||
        st.index >= (int)blk.size())
      throw EditError("path does not resolve: " + path_text(path));
    Block out = blk;
    StmtP child = out[st.index];
    if (k + 1 == path.size()) {
      Resolved r = xform(Resolved{child, nullptr});
      if (!r.is_stmt()) throw EditError("statement position needs a statement");
      out[st.index] = r.stmt;
    } else {
      out[st.index] = rebuild_stmt(child, path, k + 1, xform);
    }
    return out;
  }

  StmtP rebuild_stmt(const StmtP& s, const Path& path, size_t k,
                     const std::function<Resolved(Resolved)>& xform) {
    const PathStep& st = path[k];
    if (is_block_label(st.label)) {
      const Block* b = stmt_child_block(s, st.label);
      if (!b) throw EditError("path does not resolve: " + path_text(path));
      return with_stmt_block(s, st.label, rebuild_block(*b, path, k, xform));
    }
    ExprP e = stmt_child_expr(s, st);
    if (!e) throw EditError("path does not resolve: " + path_text(path));
    ExprP next = (k + 1 == path.size())
                     ? require_expr(xform(Resolved{nullptr, e}))
                     : rebuild_expr(e, path, k + 1, xform);
    return with_stmt_child_expr(s, st, std::move(next));
  }

  ExprP rebuild_expr(const ExprP& e, const Path& path, size_t k,
                     const std::function<Resolved(Resolved)>& xform) {
    const PathStep& st = path[k];
    ExprP child = expr_child(e, st);
    if (!child) throw EditError("path does not resolve: " + path_text(path));
    ExprP next = (k + 1 == path.size())
                     ? require_expr(xform(Resolved{nullptr, child}))
                     : rebuild_expr(child, path, k + 1, xform);
    return with_expr_child(e, st, std::move(next));
  }

  static ExprP require_expr(Resolved r) {
    if (r.is_stmt()) throw EditError("expression position needs an expression");
    return r.expr;
  }

  static void check_same_children(const StmtP& a, const StmtP& b) {
    bool same = a->kind == b->kind && a->idx.size() == b->idx.size() &&
                a->args.size() == b->args.size() &&
                a->body.size() == b->body.size() &&
                a->orelse.size() == b->orelse.size();
    if (!same)
      throw EditError("replace with keep_children must preserve child shape");
  }

  ProcP base_;
  Procedure work_;
  std::vector<AtomicEdit> edits_;
  std::vector<Redirect> redirects_;
};

}  // namespace exo2ir

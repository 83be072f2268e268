#pragma once

#include <string>
#include <utility>
#include <vector>

#include "exo2ir/prim_base.hpp"
#include "exo2ir/subst.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// A.1 Loop transformations
// ---------------------------------------------------------------------------

// for i in [lo,hi): s   ~>   for o in [0,(hi-lo)/c): for n in [0,c): s'
// with i |-> lo + c*o + n; tail per strategy. The old loop cursor forwards to
// the new outer loop; body statements survive one level deeper.
inline ProcP divide_loop(const ProcP& p, const Target& loop_t, long long factor,
                         std::pair<std::string, std::string> names,
                         TailStrategy tail) {
  Cursor loop_c = prim::as_loop_cursor(p, loop_t, "divide_loop");
  StmtP loop = loop_c.stmt();
  if (factor <= 0) prim::unsafe("divide_loop: factor must be positive");

  prim::Names names_used(*p);
  const std::string outer = names.first;
  const std::string inner = names.second;
  if (names_used.taken(outer) || names_used.taken(inner) || outer == inner)
    prim::unsafe("divide_loop: iterator names '" + outer + "', '" + inner +
                 "' must be fresh");

  ExprP extent = prim::loop_extent(loop);
  FactSet facts = facts_at(*p, loop_c.path());
  if (tail == TailStrategy::Perfect) {
    ProveOutcome out = prove(
        facts, make_binop(BinOp::Eq,
                          make_binop(BinOp::Mod, extent, prim::ilit(factor)),
                          prim::ilit(0)));
    prim::require_valid(out, "divide_loop: cannot prove " +
                                 print_expr(extent) + " % " +
                                 std::to_string(factor) + " == 0");
  }

  Block orig_body = loop->body;  // for tail copies
  ExprP orig_lo = loop->lo;
  ExprP orig_hi = loop->hi;
  std::string orig_iter = loop->name;

  EditSession ed(p);
  const Path loop_path = loop_c.path();

  // wrap the body with the inner loop
  StmtP inner_for = make_for(inner, prim::ilit(0), prim::ilit(factor),
                             {make_pass()});
  ed.wrap({loop_path, Label::Body}, 0, (int)loop->body.size(), inner_for);

  // substitute occurrences of the old iterator
  ExprP repl = prim::divided_iter(orig_lo, factor, outer, inner);
  prim::subst_iter(ed, loop_path, orig_iter, repl);

  // outer bounds: [0, extent/c)  (guard rounds up)
  ExprP main_hi =
      tail == TailStrategy::Guard
          ? make_binop(BinOp::Div,
                       make_binop(BinOp::Add, extent, prim::ilit(factor - 1)),
                       prim::ilit(factor))
          : make_binop(BinOp::Div, extent, prim::ilit(factor));
  {
    Path lp = loop_path;
    lp.push_back({Label::Lo, -1});
    ed.replace_expr(lp, prim::ilit(0));
    Path hp = loop_path;
    hp.push_back({Label::Hi, -1});
    ed.replace_expr(hp, main_hi);
  }
  // rename the loop header, keeping children
  {
    StmtP cur = prim::stmt_at(ed, loop_path);
    auto hdr = std::make_shared<Stmt>(*cur);
    hdr->name = outer;
    ed.replace_stmt(loop_path, hdr, /*keep_children=*/true);
  }

  if (tail == TailStrategy::Guard) {
    // guard the (substituted) body of the inner loop
    Path inner_path = loop_path;
    inner_path.push_back({Label::Body, 0});
    StmtP cur_inner = prim::stmt_at(ed, inner_path);
    ExprP cond = make_binop(BinOp::Lt, repl, orig_hi);
    StmtP guard = make_if(cond, {make_pass()});
    ed.wrap({inner_path, Label::Body}, 0, (int)cur_inner->body.size(), guard);
  } else if (tail == TailStrategy::Cut || tail == TailStrategy::CutAndGuard) {
    // emit the tail loop after the main loop
    auto [list, pos] = EditSession::stmt_position(loop_path);
    ExprP tail_extent = make_binop(BinOp::Mod, extent, prim::ilit(factor));
    ExprP tail_base = make_binop(
        BinOp::Mul, prim::ilit(factor),
        make_binop(BinOp::Div, extent, prim::ilit(factor)));
    ExprP tail_iter_expr = make_binop(BinOp::Add, tail_base, prim::ivar(inner));
    if (!(orig_lo->kind == ExprKind::Literal &&
          orig_lo->value == Rational(0)))
      tail_iter_expr = make_binop(BinOp::Add, orig_lo, tail_iter_expr);
    Block tail_body =
        subst_block(orig_body, {{orig_iter, tail_iter_expr}});
    tail_body = freshen_block(tail_body, names_used.set());
    StmtP tail_loop =
        make_for(inner, prim::ilit(0), tail_extent, std::move(tail_body));
    Block frag{tail_loop};
    if (tail == TailStrategy::CutAndGuard) {
      ExprP cond = make_binop(BinOp::Gt, tail_extent, prim::ilit(0));
      frag = {make_if(cond, std::move(frag))};
    }
    ed.insert(list, pos + 1, std::move(frag));
  }
  return ed.finish();
}

inline ProcP divide_loop(const ProcP& p, const Target& loop, long long factor,
                         std::pair<std::string, std::string> names,
                         const std::string& tail) {
  return divide_loop(p, loop, factor, std::move(names), tail_from_name(tail));
}

// for i < I: s  ~>  for o < N: for n < c + I - N*c: s[i -> c*o + n]
// Safety: s idempotent, N*c <= I.
inline ProcP divide_with_recompute(const ProcP& p, const Target& loop_t,
                                   const ExprP& n_expr, long long c,
                                   std::pair<std::string, std::string> names) {
  Cursor loop_c = prim::as_loop_cursor(p, loop_t, "divide_with_recompute");
  StmtP loop = loop_c.stmt();
  if (c <= 0) prim::unsafe("divide_with_recompute: factor must be positive");
  if (idempotent(loop->body) != Idem::Yes)
    prim::unsafe("divide_with_recompute: loop body is not provably idempotent");

  prim::Names names_used(*p);
  const std::string outer = names.first;
  const std::string inner = names.second;
  if (names_used.taken(outer) || names_used.taken(inner) || outer == inner)
    prim::unsafe("divide_with_recompute: iterator names must be fresh");

  ExprP extent = prim::loop_extent(loop);
  FactSet facts = facts_at(*p, loop_c.path());
  prim::require_valid(
      prove(facts, make_binop(BinOp::Le,
                              make_binop(BinOp::Mul, n_expr, prim::ilit(c)),
                              extent)),
      "divide_with_recompute: cannot prove N*c <= extent");
  // the inner extent must be positive, else the loop covers nothing
  ExprP inner_extent = make_binop(
      BinOp::Add, prim::ilit(c),
      make_binop(BinOp::Sub, extent,
                 make_binop(BinOp::Mul, n_expr, prim::ilit(c))));

  EditSession ed(p);
  const Path loop_path = loop_c.path();
  StmtP inner_for =
      make_for(inner, prim::ilit(0), inner_extent, {make_pass()});
  ed.wrap({loop_path, Label::Body}, 0, (int)loop->body.size(), inner_for);
  ExprP repl = prim::divided_iter(loop->lo, c, outer, inner);
  prim::subst_iter(ed, loop_path, loop->name, repl);
  {
    Path lp = loop_path;
    lp.push_back({Label::Lo, -1});
    ed.replace_expr(lp, prim::ilit(0));
    Path hp = loop_path;
    hp.push_back({Label::Hi, -1});
    ed.replace_expr(hp, n_expr);
  }
  StmtP cur = prim::stmt_at(ed, loop_path);
  auto hdr = std::make_shared<Stmt>(*cur);
  hdr->name = outer;
  ed.replace_stmt(loop_path, hdr, /*keep_children=*/true);
  return ed.finish();
}

// for i < I: { for j < c: s }  ~>  for k < I*c: s[i -> k/c, j -> k%c]
inline ProcP mult_loops(const ProcP& p, const Target& outer_t,
                        const std::string& k_name) {
  Cursor outer_c = prim::as_loop_cursor(p, outer_t, "mult_loops");
  StmtP outer = outer_c.stmt();
  if (outer->body.size() != 1 || outer->body[0]->kind != StmtKind::For)
    prim::unsafe("mult_loops: the inner loop must be the sole statement");
  StmtP inner = outer->body[0];
  if (inner->hi->kind != ExprKind::Literal)
    prim::unsafe("mult_loops: inner extent must be a constant");
  auto zero = [](const ExprP& e) {
    return e->kind == ExprKind::Literal && e->value == Rational(0);
  };
  if (!zero(outer->lo) || !zero(inner->lo))
    prim::unsafe("mult_loops: loops must start at 0");
  long long c = inner->hi->value.to_integer();
  prim::Names names_used(*p);
  if (names_used.taken(k_name))
    prim::unsafe("mult_loops: name '" + k_name + "' is taken");

  EditSession ed(p);
  const Path outer_path = outer_c.path();
  auto [list, pos] = EditSession::stmt_position(outer_path);

  // wrap the nest with the flat loop
  ExprP flat_hi = make_binop(BinOp::Mul, outer->hi, prim::ilit(c));
  ed.wrap(list, pos, 1, make_for(k_name, prim::ilit(0), flat_hi, {make_pass()}));
  Path wrapped = outer_path;  // the wrapper now sits at the same position
  Path old_outer = wrapped;
  old_outer.push_back({Label::Body, 0});
  // substitute in the (still nested) body
  prim::subst_iter(ed, old_outer, outer->name,
                   make_binop(BinOp::Div, prim::ivar(k_name), prim::ilit(c)));
  prim::subst_iter(ed, old_outer, inner->name,
                   make_binop(BinOp::Mod, prim::ivar(k_name), prim::ilit(c)));
  // move the payload out and delete the husk
  Path inner_path = old_outer;
  inner_path.push_back({Label::Body, 0});
  StmtP inner_now = prim::stmt_at(ed, inner_path);
  ed.move({inner_path, Label::Body}, 0, (int)inner_now->body.size(),
          {wrapped, Label::Body}, 0);
  // the husk (old outer loop) moved to index (its body count)
  Block k_body = ed.get_list({wrapped, Label::Body});
  ed.erase({wrapped, Label::Body}, (int)k_body.size() - 1, 1);
  ed.redirect(CursorCore::node(outer_path), CursorCore::node(wrapped));
  return ed.finish();
}

// for i in [l,h): s  ~>  for i in [l,e): s ; for i in [e,h): s'
inline ProcP cut_loop(const ProcP& p, const Target& loop_t, const ExprP& cut) {
  Cursor loop_c = prim::as_loop_cursor(p, loop_t, "cut_loop");
  StmtP loop = loop_c.stmt();
  FactSet facts = facts_at(*p, loop_c.path());
  prim::require_valid(prove(facts, make_binop(BinOp::Le, loop->lo, cut)),
                      "cut_loop: cannot prove lo <= cutoff");
  prim::require_valid(prove(facts, make_binop(BinOp::Le, cut, loop->hi)),
                      "cut_loop: cannot prove cutoff <= hi");

  prim::Names names_used(*p);
  Block second_body = freshen_block(loop->body, names_used.set());
  StmtP second = make_for(loop->name, cut, loop->hi, std::move(second_body),
                          loop->parallel);

  EditSession ed(p);
  const Path loop_path = loop_c.path();
  auto [list, pos] = EditSession::stmt_position(loop_path);
  ed.insert(list, pos + 1, {second});
  Path hp = loop_path;
  hp.push_back({Label::Hi, -1});
  ed.replace_expr(hp, cut);
  return ed.finish();
}

inline ProcP cut_loop(const ProcP& p, const Target& loop_t,
                      const std::string& cut_text) {
  Cursor c = prim::as_loop_cursor(p, loop_t, "cut_loop");
  ExprP cut = parse_expr_text(cut_text, prim::env_at(*p, c.path()));
  return cut_loop(p, Target(c), cut);
}

// adjacent loops with identical bodies and h1 == l2 join into one
inline ProcP join_loops(const ProcP& p, const Target& first_t,
                        const Target& second_t) {
  Cursor c1 = prim::as_loop_cursor(p, first_t, "join_loops");
  Cursor c2 = prim::as_loop_cursor(p, second_t, "join_loops");
  StmtP l1 = c1.stmt();
  StmtP l2 = c2.stmt();
  Path p1 = c1.path();
  Path p2 = c2.path();
  if (p1.size() != p2.size() ||
      !(Path(p1.begin(), p1.end() - 1) == Path(p2.begin(), p2.end() - 1)) ||
      p2.back().index != p1.back().index + 1)
    prim::unsafe("join_loops: loops must be adjacent siblings");
  // alpha-compare bodies
  Block renamed = l2->body;
  if (l1->name != l2->name)
    renamed = subst_block(l2->body, {{l2->name, prim::ivar(l1->name)}});
  if (!struct_eq(l1->body, renamed))
    prim::unsafe("join_loops: loop bodies differ");
  FactSet facts = facts_at(*p, p1);
  prim::require_valid(prove(facts, make_binop(BinOp::Eq, l1->hi, l2->lo)),
                      "join_loops: cannot prove h1 == l2");

  EditSession ed(p);
  Path hp = p1;
  hp.push_back({Label::Hi, -1});
  ed.replace_expr(hp, l2->hi);
  auto [list, pos] = EditSession::stmt_position(p2);
  ed.erase(list, pos, 1);
  ed.redirect(CursorCore::node(p2), CursorCore::node(p1));
  return ed.finish();
}

// for i in [l,h): s  ~>  for i in [e, h+e-l): s[i -> i - e + l]
inline ProcP shift_loop(const ProcP& p, const Target& loop_t,
                        const ExprP& new_lo) {
  Cursor loop_c = prim::as_loop_cursor(p, loop_t, "shift_loop");
  StmtP loop = loop_c.stmt();
  FactSet facts = facts_at(*p, loop_c.path());
  prim::require_valid(prove(facts, make_binop(BinOp::Ge, new_lo, prim::ilit(0))),
                      "shift_loop: cannot prove new lower bound >= 0");

  EditSession ed(p);
  const Path loop_path = loop_c.path();
  // i -> i - (e - l) = i - e + l
  ExprP back = make_binop(BinOp::Add,
                          make_binop(BinOp::Sub, prim::ivar(loop->name), new_lo),
                          loop->lo);
  prim::subst_iter(ed, loop_path, loop->name, back);
  Path lp = loop_path;
  lp.push_back({Label::Lo, -1});
  ed.replace_expr(lp, new_lo);
  Path hp = loop_path;
  hp.push_back({Label::Hi, -1});
  ed.replace_expr(
      hp, make_binop(BinOp::Sub, make_binop(BinOp::Add, loop->hi, new_lo),
                     loop->lo));
  return ed.finish();
}

inline ProcP shift_loop(const ProcP& p, const Target& loop_t,
                        const std::string& lo_text) {
  Cursor c = prim::as_loop_cursor(p, loop_t, "shift_loop");
  return shift_loop(p, Target(c),
                    parse_expr_text(lo_text, prim::env_at(*p, c.path())));
}

namespace prim {

// single-level fission of the loop directly enclosing the gap
inline ProcP fission_once(const ProcP& p, const Cursor& gap) {
  if (gap.kind() != CursorKind::Gap)
    throw InvalidCursorError("fission: expected a gap cursor");
  auto [list, pos] = EditSession::gap_position(gap.core());
  if (list.prefix.empty())
    prim::unsafe("fission: gap is not inside a loop");
  auto owner = try_resolve_path(*p, list.prefix);
  if (!owner || !owner->is_stmt() || owner->stmt->kind != StmtKind::For ||
      list.label != Label::Body)
    prim::unsafe("fission: gap is not directly inside a loop");
  StmtP loop = owner->stmt;
  int n = (int)loop->body.size();
  if (pos <= 0 || pos >= n)
    prim::unsafe("fission: nothing to split at this gap");

  Block s1(loop->body.begin(), loop->body.begin() + pos);
  Block s2(loop->body.begin() + pos, loop->body.end());

  // allocations in s1 must not be used by s2
  for (const auto& st : s1) {
    if (st->kind != StmtKind::Alloc) continue;
    std::unordered_set<std::string> used;
    collect_names(s2, used);
    if (used.count(st->name))
      prim::unsafe("fission: s2 depends on allocation '" + st->name +
                   "' in s1");
  }

  // commutation across the split: s1 at later iterations moves before s2
  FactSet base = facts_at(*p, list.prefix);
  if (dependence(s2, s1, {loop}, base, IterRel::SecondLater) !=
      DepResult::Independent)
    prim::unsafe(
        "fission: effects of s1 and s2 do not provably commute across "
        "iterations");

  EditSession ed(p);
  auto [parent_list, loop_pos] = EditSession::stmt_position(list.prefix);
  // move s2 out, then wrap it in a copy of the loop header
  ed.move(list, pos, n - pos, parent_list, loop_pos + 1);
  StmtP second_hdr =
      make_for(loop->name, loop->lo, loop->hi, {make_pass()}, loop->parallel);
  ed.wrap(parent_list, loop_pos + 1, n - pos, second_hdr);

  // the input gap forwards to the gap between the two loops
  Path second_path = list.prefix;
  second_path.back().index = loop_pos + 1;
  Path first_last = list.prefix;
  first_last.push_back({Label::Body, pos - 1});
  Path second_first = list.prefix;
  second_first.push_back({Label::Body, pos});
  ed.redirect(CursorCore::gap(first_last, GapSide::After),
              CursorCore::gap(second_path, GapSide::Before));
  ed.redirect(CursorCore::gap(second_first, GapSide::Before),
              CursorCore::gap(second_path, GapSide::Before));
  return ed.finish();
}

}  // namespace prim

// Splits the loop nest around the gap; n_lifts levels of enclosing loops are
// duplicated. The gap forwards to the gap between the two resulting nests.
inline ProcP fission(const ProcP& p, const Cursor& gap, int n_lifts = 1) {
  if (n_lifts < 1) prim::unsafe("fission: n_lifts must be >= 1");
  Cursor g = resolve_in(p, gap);
  ProcP out = p;
  for (int level = 0; level < n_lifts; ++level) {
    out = prim::fission_once(out, g);
    if (level + 1 < n_lifts) g = forward(out, g);
  }
  return out;
}

// for i: s  ~>  s   (idempotent body, no dependence on i, extent >= 1)
inline ProcP remove_loop(const ProcP& p, const Target& loop_t) {
  Cursor loop_c = prim::as_loop_cursor(p, loop_t, "remove_loop");
  StmtP loop = loop_c.stmt();
  if (idempotent(loop->body) != Idem::Yes)
    prim::unsafe("remove_loop: body is not provably idempotent");
  std::unordered_set<std::string> used;
  collect_names(loop->body, used);
  if (used.count(loop->name))
    prim::unsafe("remove_loop: body depends on iterator '" + loop->name + "'");
  FactSet facts = facts_at(*p, loop_c.path());
  prim::require_valid(
      prove(facts, make_binop(BinOp::Gt, loop->hi, loop->lo)),
      "remove_loop: cannot prove the loop executes at least once");

  EditSession ed(p);
  const Path loop_path = loop_c.path();
  auto [list, pos] = EditSession::stmt_position(loop_path);
  int n = (int)loop->body.size();
  ed.move({loop_path, Label::Body}, 0, n, list, pos + 1);
  ed.erase(list, pos, 1);
  // the loop cursor forwards to the lifted block
  Path first = list.prefix;
  first.push_back({list.label, pos});
  ed.redirect(CursorCore::node(loop_path), CursorCore::block(first, pos + n));
  return ed.finish();
}

// s ~> for name in [0,hi): s  (guard=false requires idempotence; guard=true
// wraps s in `if name == 0`)
inline ProcP add_loop(const ProcP& p, const Target& stmt_t,
                      const std::string& name, const ExprP& hi, bool guard) {
  Cursor stmt_c = prim::as_stmt_cursor(p, stmt_t);
  prim::Names names_used(*p);
  if (names_used.taken(name))
    prim::unsafe("add_loop: name '" + name + "' is taken");
  FactSet facts = facts_at(*p, stmt_c.path());
  prim::require_valid(prove(facts, make_binop(BinOp::Gt, hi, prim::ilit(0))),
                      "add_loop: cannot prove hi > 0");
  if (!guard && idempotent({stmt_c.stmt()}) != Idem::Yes)
    prim::unsafe("add_loop: statement is not provably idempotent");

  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(stmt_c.path());
  if (guard) {
    ExprP cond = make_binop(BinOp::Eq, prim::ivar(name), prim::ilit(0));
    ed.wrap(list, pos, 1, make_if(cond, {make_pass()}));
  }
  ed.wrap(list, pos, 1, make_for(name, prim::ilit(0), hi, {make_pass()}));
  return ed.finish();
}

// constant-extent loop unrolled into successive copies
inline ProcP unroll_loop(const ProcP& p, const Target& loop_t) {
  Cursor loop_c = prim::as_loop_cursor(p, loop_t, "unroll_loop");
  StmtP loop = loop_c.stmt();
  if (loop->lo->kind != ExprKind::Literal || loop->hi->kind != ExprKind::Literal)
    prim::unsafe("unroll_loop: bounds must be constants");
  long long lo = loop->lo->value.to_integer();
  long long hi = loop->hi->value.to_integer();
  if (hi - lo <= 0) prim::unsafe("unroll_loop: extent must be positive");

  prim::Names names_used(*p);
  Block copies;
  for (long long t = lo; t < hi; ++t) {
    Block body = subst_block(loop->body, {{loop->name, prim::ilit(t)}});
    body = freshen_block(body, names_used.set());
    for (auto& s : body) copies.push_back(std::move(s));
  }
  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(loop_c.path());
  int count = (int)copies.size();
  ed.replace_block(list, pos, 1, std::move(copies));
  Path first = list.prefix;
  first.push_back({list.label, pos});
  ed.redirect(CursorCore::node(loop_c.path()),
              CursorCore::block(first, pos + count));
  return ed.finish();
}

// ---------------------------------------------------------------------------
// A.2 Code rearrangement
// ---------------------------------------------------------------------------

// swaps a block of two adjacent statements (s1 and s2 must commute)
inline ProcP reorder_stmts(const ProcP& p, const Target& block_t) {
  Cursor blk = prim::as_block_cursor(p, block_t);
  if (blk.block_size() != 2)
    throw InvalidCursorError("reorder_stmts: expected a block of 2 statements");
  Block stmts = blk.block_stmts();
  FactSet base = facts_at(*p, blk.path());
  if (dependence({stmts[0]}, {stmts[1]}, {}, base, IterRel::Same) !=
      DepResult::Independent)
    prim::unsafe("reorder_stmts: statements do not provably commute");

  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(blk.path());
  ed.move(list, pos + 1, 1, list, pos);
  return ed.finish();
}

// x+y ~> y+x ; x*y ~> y*x
inline ProcP commute_expr(const ProcP& p, const Target& expr_t) {
  Cursor c = expr_t.resolve(p);
  Resolved r = c.resolve();
  if (r.is_stmt() || r.expr->kind != ExprKind::Binary)
    throw InvalidCursorError("commute_expr: expected a binary expression");
  if (r.expr->op != BinOp::Add && r.expr->op != BinOp::Mul)
    prim::unsafe("commute_expr: operator is not commutative");
  EditSession ed(p);
  ed.replace_expr(c.path(),
                  make_binop(r.expr->op, r.expr->args[1], r.expr->args[0]));
  return ed.finish();
}

// ---------------------------------------------------------------------------
// A.3 Scope transformations
// ---------------------------------------------------------------------------

// s ~> if conds[0]: s else: if conds[1]: s else: ... (copies in every branch)
inline ProcP specialize(const ProcP& p, const Target& stmt_t,
                        const std::vector<ExprP>& conds) {
  Cursor stmt_c = prim::as_stmt_cursor(p, stmt_t);
  if (conds.empty()) prim::unsafe("specialize: no conditions given");
  StmtP s = stmt_c.stmt();
  prim::Names names_used(*p);
  // innermost else holds the final copy
  Block chain = freshen_block({s}, names_used.set());
  for (size_t i = conds.size(); i-- > 1;) {
    Block copy = freshen_block({s}, names_used.set());
    chain = {make_if(conds[i], std::move(copy), std::move(chain))};
  }
  EditSession ed(p);
  auto [list, pos] = EditSession::stmt_position(stmt_c.path());
  StmtP wrapper = make_if(conds[0], {make_pass()}, std::move(chain));
  ed.wrap(list, pos, 1, wrapper);
  return ed.finish();
}

inline ProcP specialize(const ProcP& p, const Target& stmt_t,
                        const std::vector<std::string>& cond_texts) {
  Cursor c = prim::as_stmt_cursor(p, stmt_t);
  ScopeEnv env = prim::env_at(*p, c.path());
  std::vector<ExprP> conds;
  for (const auto& t : cond_texts) conds.push_back(parse_expr_text(t, env));
  return specialize(p, Target(c), conds);
}

// adjacent loops (or ifs) with provably equal ranges fuse into one
inline ProcP fuse(const ProcP& p, const Target& first_t, const Target& second_t) {
  Cursor c1 = first_t.resolve(p);
  Cursor c2 = second_t.resolve(p);
  StmtP s1 = c1.stmt();
  StmtP s2 = c2.stmt();
  Path p1 = c1.path();
  Path p2 = c2.path();
  bool adjacent =
      p1.size() == p2.size() &&
      Path(p1.begin(), p1.end() - 1) == Path(p2.begin(), p2.end() - 1) &&
      p2.back().index == p1.back().index + 1;
  if (!adjacent) prim::unsafe("fuse: statements must be adjacent siblings");

  EditSession ed(p);
  if (s1->kind == StmtKind::For && s2->kind == StmtKind::For) {
    FactSet facts = facts_at(*p, p1);
    prim::require_valid(prove(facts, make_binop(BinOp::Eq, s1->lo, s2->lo)),
                        "fuse: cannot prove equal lower bounds");
    prim::require_valid(prove(facts, make_binop(BinOp::Eq, s1->hi, s2->hi)),
                        "fuse: cannot prove equal upper bounds");
    Block body2 = s2->body;
    if (s1->name != s2->name)
      body2 = subst_block(body2, {{s2->name, prim::ivar(s1->name)}});
    // later iterations of s1's body move before earlier iterations of s2's
    if (dependence(body2, s1->body, {s1}, facts, IterRel::SecondLater) !=
        DepResult::Independent)
      prim::unsafe("fuse: loop bodies do not provably commute across "
                   "iterations");
    if (s1->name != s2->name)
      prim::subst_iter(ed, p2, s2->name, prim::ivar(s1->name));
    StmtP s2_now = prim::stmt_at(ed, p2);
    int n1 = (int)s1->body.size();
    ed.move({p2, Label::Body}, 0, (int)s2_now->body.size(), {p1, Label::Body},
            n1);
    auto [list, pos] = EditSession::stmt_position(p2);
    ed.erase(list, pos, 1);
    ed.redirect(CursorCore::node(p2), CursorCore::node(p1));
    return ed.finish();
  }
  if (s1->kind == StmtKind::If && s2->kind == StmtKind::If) {
    if (!struct_eq(s1->cond, s2->cond))
      prim::unsafe("fuse: if conditions are not identical");
    if (!s1->orelse.empty() || !s2->orelse.empty())
      prim::unsafe("fuse: fusing ifs with else branches is not supported");
    StmtP s2_now = prim::stmt_at(ed, p2);
    ed.move({p2, Label::Body}, 0, (int)s2_now->body.size(), {p1, Label::Body},
            (int)s1->body.size());
    auto [list, pos] = EditSession::stmt_position(p2);
    ed.erase(list, pos, 1);
    ed.redirect(CursorCore::node(p2), CursorCore::node(p1));
    return ed.finish();
  }
  prim::unsafe("fuse: expected two adjacent for loops or if statements");
}

namespace prim {

// the for-over-for interchange shared by lift_scope and reorder_loops
inline ProcP interchange(const ProcP& p, const Cursor& outer_c,
                         const Cursor& inner_c) {
  StmtP outer = outer_c.stmt();
  StmtP inner = inner_c.stmt();
  if (outer->body.size() != 1)
    unsafe("lift_scope: the lifted loop must be the sole statement");
  // the inner loop's bounds cannot depend on the outer iterator
  std::unordered_set<std::string> bound_names;
  collect_names(inner->lo, bound_names);
  collect_names(inner->hi, bound_names);
  if (bound_names.count(outer->name))
    unsafe("lift_scope: inner loop bounds depend on '" + outer->name + "'");
  // loop body must commute across swapped iteration pairs
  FactSet facts = facts_at(*p, outer_c.path());
  if (dependence(inner->body, inner->body, {outer, inner}, facts,
                 IterRel::Swapped) != DepResult::Independent)
    unsafe("lift_scope: loop body does not provably commute for reordered "
           "iteration pairs");

  EditSession ed(p);
  const Path outer_path = outer_c.path();
  auto [list, pos] = EditSession::stmt_position(outer_path);
  StmtP wrapper = make_for(inner->name, inner->lo, inner->hi, {make_pass()},
                           inner->parallel);
  ed.wrap(list, pos, 1, wrapper);
  // paths shifted: wrapper at outer_path, old outer one level down
  Path old_outer = outer_path;
  old_outer.push_back({Label::Body, 0});
  Path old_inner = old_outer;
  old_inner.push_back({Label::Body, 0});
  StmtP inner_now = prim::stmt_at(ed, old_inner);
  ed.move({old_inner, Label::Body}, 0, (int)inner_now->body.size(),
          {old_outer, Label::Body}, 0);
  // the husk moved to the end of the outer body
  Block outer_body = ed.get_list({old_outer, Label::Body});
  ed.erase({old_outer, Label::Body}, (int)outer_body.size() - 1, 1);
  ed.redirect(CursorCore::node(old_inner), CursorCore::node(outer_path));
  // note: the pre-edit inner loop's path equals old_inner's shape in the
  // original frame (outer_path + body[0])
  return ed.finish();
}

}  // namespace prim

// Interchanges `scope` (a for or if) with its immediately surrounding for or
// if; the scope cursor forwards to the lifted construct.
inline ProcP lift_scope(const ProcP& p, const Target& scope_t) {
  Cursor scope_c = scope_t.is_cursor() ? scope_t.resolve(p)
                                       : scope_t.resolve_loop(p);
  StmtP scope = scope_c.stmt();
  if (scope->kind != StmtKind::For && scope->kind != StmtKind::If)
    throw InvalidCursorError("lift_scope: expected a for or if statement");
  Cursor parent_c = scope_c.parent();
  StmtP parent = parent_c.stmt();
  const Path scope_path = scope_c.path();
  if (scope_path.back().label != Label::Body || scope_path.back().index != 0)
    prim::unsafe("lift_scope: scope must lead its parent's body");

  if (parent->kind == StmtKind::For && scope->kind == StmtKind::For)
    return prim::interchange(p, parent_c, scope_c);

  if (parent->kind == StmtKind::For && scope->kind == StmtKind::If) {
    // for i: { if e: A else: B }  ~>  if e: {for i: A} else: {for i: B}
    if (parent->body.size() != 1)
      prim::unsafe("lift_scope: the if must be the sole statement");
    std::unordered_set<std::string> cond_names;
    collect_names(scope->cond, cond_names);
    if (cond_names.count(parent->name))
      prim::unsafe("lift_scope: condition depends on '" + parent->name + "'");

    EditSession ed(p);
    const Path parent_path = parent_c.path();
    auto [list, pos] = EditSession::stmt_position(parent_path);
    Block orelse;
    prim::Names names_used(*p);
    if (!scope->orelse.empty()) {
      Block b_copy = freshen_block(scope->orelse, names_used.set());
      orelse = {make_for(parent->name, parent->lo, parent->hi,
                         std::move(b_copy), parent->parallel)};
    }
    StmtP wrapper = make_if(scope->cond, {make_pass()}, std::move(orelse));
    ed.wrap(list, pos, 1, wrapper);
    // inside the then branch: dissolve the inner if, keeping A
    Path for_path = parent_path;
    for_path.push_back({Label::Body, 0});
    Path if_path = for_path;
    if_path.push_back({Label::Body, 0});
    StmtP if_now = prim::stmt_at(ed, if_path);
    ed.move({if_path, Label::Body}, 0, (int)if_now->body.size(),
            {for_path, Label::Body}, 0);
    Block for_body = ed.get_list({for_path, Label::Body});
    ed.erase({for_path, Label::Body}, (int)for_body.size() - 1, 1);
    ed.redirect(CursorCore::node(scope_path), CursorCore::node(parent_path));
    return ed.finish();
  }

  if (parent->kind == StmtKind::If && scope->kind == StmtKind::For) {
    // if e: {for i: s}  ~>  for i: {if e: s}   (no else allowed)
    if (!parent->orelse.empty())
      prim::unsafe("lift_scope: if statement cannot have an else clause");
    if (parent->body.size() != 1)
      prim::unsafe("lift_scope: the loop must be the sole statement");

    EditSession ed(p);
    const Path parent_path = parent_c.path();
    auto [list, pos] = EditSession::stmt_position(parent_path);
    StmtP wrapper = make_for(scope->name, scope->lo, scope->hi, {make_pass()},
                             scope->parallel);
    ed.wrap(list, pos, 1, wrapper);
    Path if_path = parent_path;
    if_path.push_back({Label::Body, 0});
    Path for_path = if_path;
    for_path.push_back({Label::Body, 0});
    StmtP for_now = prim::stmt_at(ed, for_path);
    ed.move({for_path, Label::Body}, 0, (int)for_now->body.size(),
            {if_path, Label::Body}, 0);
    Block if_body = ed.get_list({if_path, Label::Body});
    ed.erase({if_path, Label::Body}, (int)if_body.size() - 1, 1);
    ed.redirect(CursorCore::node(scope_path), CursorCore::node(parent_path));
    return ed.finish();
  }

  if (parent->kind == StmtKind::If && scope->kind == StmtKind::If) {
    // if e: {if e2: s else: s3} else: s2
    //   ~>  if e2: {if e: s else: s2} else: {if e: s3 else: s2}
    if (parent->body.size() != 1)
      prim::unsafe("lift_scope: the inner if must be the sole statement");
    EditSession ed(p);
    prim::Names names_used(*p);
    const Path parent_path = parent_c.path();
    auto [list, pos] = EditSession::stmt_position(parent_path);
    Block orelse;
    {
      Block inner_then =
          scope->orelse.empty()
              ? Block{make_pass()}
              : freshen_block(scope->orelse, names_used.set());
      Block inner_else = parent->orelse.empty()
                             ? Block{}
                             : freshen_block(parent->orelse, names_used.set());
      orelse = {make_if(parent->cond, std::move(inner_then),
                        std::move(inner_else))};
    }
    StmtP wrapper = make_if(scope->cond, {make_pass()}, std::move(orelse));
    ed.wrap(list, pos, 1, wrapper);
    // then branch: if e: {if e2: s else: s3} else: s2 — dissolve inner if e2,
    // keeping s
    Path outer_if = parent_path;
    outer_if.push_back({Label::Body, 0});
    Path inner_if = outer_if;
    inner_if.push_back({Label::Body, 0});
    StmtP inner_now = prim::stmt_at(ed, inner_if);
    ed.move({inner_if, Label::Body}, 0, (int)inner_now->body.size(),
            {outer_if, Label::Body}, 0);
    Block then_body = ed.get_list({outer_if, Label::Body});
    ed.erase({outer_if, Label::Body}, (int)then_body.size() - 1, 1);
    ed.redirect(CursorCore::node(scope_path), CursorCore::node(parent_path));
    return ed.finish();
  }
  prim::unsafe("lift_scope: unsupported parent/scope combination");
}

// A.1 reorder_loops(p, nest): interchange the two loops of a perfect pair.
inline ProcP reorder_loops(const ProcP& p, const Target& outer_t) {
  Cursor outer_c = prim::as_loop_cursor(p, outer_t, "reorder_loops");
  StmtP outer = outer_c.stmt();
  if (outer->body.size() != 1 || outer->body[0]->kind != StmtKind::For)
    prim::unsafe("reorder_loops: expected a perfect two-loop nest");
  Cursor inner_c = outer_c.body(0);
  return prim::interchange(p, outer_c, inner_c);
}

}  // namespace exo2ir

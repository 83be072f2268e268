#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/cursor.hpp"
#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/prove.hpp"
#include "exo2ir/subst.hpp"
#include "exo2ir/walk.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// Context facts: procedure asserts plus the ranges and guards enclosing a
// location.
// ---------------------------------------------------------------------------

inline FactSet facts_at(const Procedure& p, const Path& path) {
  FactSet facts;
  for (const auto& a : p.asserts) facts.assume(a);
  Path walk;
  for (size_t i = 0; i < path.size(); ++i) {
    const PathStep& st = path[i];
    if (!is_block_label(st.label)) break;
    // the context of position i is everything strictly above it
    Path owner = walk;
    walk.push_back(st);
    auto r = try_resolve_path(p, walk);
    if (!r || !r->is_stmt()) break;
    (void)owner;
    if (i + 1 < path.size()) {
      const StmtP& s = r->stmt;
      if (s->kind == StmtKind::For) {
        NormResult lo = normalize(s->lo, facts.atoms);
        NormResult hi = normalize(s->hi, facts.atoms);
        if (lo && hi) {
          facts.close_atoms();
          facts.add_iter_range(s->name, *lo, *hi);
        }
      } else if (s->kind == StmtKind::If) {
        if (path[i + 1].label == Label::Orelse) facts.assume_not(s->cond);
        else if (path[i + 1].label == Label::Body) facts.assume(s->cond);
      }
    }
  }
  facts.close_atoms();
  return facts;
}

inline FactSet facts_of_proc(const Procedure& p) {
  FactSet facts;
  for (const auto& a : p.asserts) facts.assume(a);
  facts.close_atoms();
  return facts;
}

// ---------------------------------------------------------------------------
// Buffer accesses of a block, with instruction calls expanded through their
// bodies. Each access carries the loops between the block root and itself.
// ---------------------------------------------------------------------------

struct InnerLoop {
  std::string name;
  ExprP lo;
  ExprP hi;
};

struct Access {
  enum Kind { Read, Write, Reduce } kind;
  std::string buf;
  std::vector<ExprP> idx;
  std::vector<InnerLoop> loops;  // outermost first
};

namespace access_detail {

struct BufMap {  // callee buffer param -> caller buffer window
  std::string caller_buf;
  // one entry per caller dim: fixed index expr, or lo expr consuming the
  // next callee index
  struct Dim {
    ExprP base;
    bool is_range;
  };
  std::vector<Dim> dims;
};

struct CallCtx {
  std::map<std::string, ExprP> scalar_sub;  // callee sizes/scalars -> exprs
  std::map<std::string, BufMap> buf_sub;    // callee buffers -> windows
};

class Collector {
public:
  explicit Collector(std::vector<Access>& out) : out_(out) {}

  void block(const Block& b, const CallCtx* ctx,
             std::vector<InnerLoop>& loops) {
    for (const auto& s : b) stmt(s, ctx, loops);
  }

  void stmt(const StmtP& s, const CallCtx* ctx, std::vector<InnerLoop>& loops) {
    switch (s->kind) {
      case StmtKind::Pass:
        return;
      case StmtKind::Alloc:
        return;  // dims read no buffers
      case StmtKind::For: {
        std::string name = s->name;
        ExprP lo = rewrite(s->lo, ctx);
        ExprP hi = rewrite(s->hi, ctx);
        if (ctx) {
          // freshen callee iterator names so copies stay distinct
          name = "__c" + std::to_string(counter_++) + "_" + name;
          local_iter_[s->name] = name;
          lo = rewrite_iters(lo);
          hi = rewrite_iters(hi);
        }
        loops.push_back({name, lo, hi});
        block(s->body, ctx, loops);
        loops.pop_back();
        if (ctx) local_iter_.erase(s->name);
        return;
      }
      case StmtKind::If:
        expr(s->cond, ctx, loops);
        block(s->body, ctx, loops);
        block(s->orelse, ctx, loops);
        return;
      case StmtKind::Assign:
      case StmtKind::Reduce: {
        for (const auto& e : s->idx) expr(e, ctx, loops);
        expr(s->rhs, ctx, loops);
        emit(s->kind == StmtKind::Assign ? Access::Write : Access::Reduce,
             s->name, s->idx, ctx, loops);
        return;
      }
      case StmtKind::Call: {
        if (!s->callee) return;
        CallCtx sub = bind_call(*s->callee, s->args, ctx, loops);
        std::vector<InnerLoop> callee_loops = loops;
        block(s->callee->body, &sub, callee_loops);
        return;
      }
    }
  }

private:
  void expr(const ExprP& e, const CallCtx* ctx, std::vector<InnerLoop>& loops) {
    switch (e->kind) {
      case ExprKind::Read:
        for (const auto& i : e->args) expr(i, ctx, loops);
        emit(Access::Read, e->name, e->args, ctx, loops);
        return;
      case ExprKind::Var: {
        // a scalar read of a rank-0 buffer param is a read access when the
        // name maps to a buffer
        if (ctx) {
          auto it = ctx->buf_sub.find(e->name);
          if (it != ctx->buf_sub.end()) emit(Access::Read, e->name, {}, ctx, loops);
        }
        return;
      }
      case ExprKind::Binary:
        expr(e->args[0], ctx, loops);
        expr(e->args[1], ctx, loops);
        return;
      case ExprKind::Slice:
      case ExprKind::Literal:
        return;
    }
  }

  // records one access, translating callee coordinates into caller ones
  void emit(Access::Kind kind, const std::string& name,
            const std::vector<ExprP>& idx, const CallCtx* ctx,
            const std::vector<InnerLoop>& loops) {
    Access a;
    a.kind = kind;
    a.loops = loops;
    if (!ctx) {
      a.buf = name;
      a.idx = idx;
      out_.push_back(std::move(a));
      return;
    }
    auto bit = ctx->buf_sub.find(name);
    if (bit == ctx->buf_sub.end()) return;  // callee-local alloc
    const BufMap& bm = bit->second;
    a.buf = bm.caller_buf;
    size_t k = 0;
    for (const auto& d : bm.dims) {
      if (!d.is_range) {
        a.idx.push_back(d.base);
      } else {
        ExprP inner = k < idx.size() ? rewrite(idx[k], ctx) : nullptr;
        if (!inner) inner = make_literal(Rational(0), ScalarKind::Index);
        inner = rewrite_iters(inner);
        a.idx.push_back(make_binop(BinOp::Add, d.base, inner));
        ++k;
      }
    }
    out_.push_back(std::move(a));
  }

  // substitutes callee sizes/scalars with caller expressions
  ExprP rewrite(const ExprP& e, const CallCtx* ctx) {
    if (!ctx) return e;
    return subst_expr(e, ctx->scalar_sub);
  }
  ExprP rewrite_iters(const ExprP& e) {
    if (local_iter_.empty()) return e;
    std::map<std::string, ExprP> m;
    for (const auto& [from, to] : local_iter_)
      m[from] = make_var(to, ScalarKind::Index);
    return subst_expr(e, m);
  }

  CallCtx bind_call(const Procedure& callee, const std::vector<ExprP>& args,
                    const CallCtx* outer, std::vector<InnerLoop>& loops) {
    CallCtx sub;
    for (size_t i = 0; i < callee.params.size() && i < args.size(); ++i) {
      const Param& prm = callee.params[i];
      ExprP arg = outer ? subst_expr(args[i], outer->scalar_sub) : args[i];
      if (outer) arg = rewrite_iters(arg);
      if (prm.is_buffer()) {
        if (arg->kind != ExprKind::Slice) continue;
        BufMap bm;
        // compose with an outer window when the slice names a callee param
        if (outer && outer->buf_sub.count(arg->name)) {
          const BufMap& base = outer->buf_sub.at(arg->name);
          bm.caller_buf = base.caller_buf;
          size_t k = 0;
          for (const auto& d : base.dims) {
            if (!d.is_range) {
              bm.dims.push_back(d);
              continue;
            }
            const SliceDim& sd = arg->dims[k++];
            ExprP lo = make_binop(BinOp::Add, d.base, sd.lo);
            bm.dims.push_back({lo, !sd.is_point()});
          }
        } else {
          bm.caller_buf = arg->name;
          for (const auto& sd : arg->dims)
            bm.dims.push_back({sd.lo, !sd.is_point()});
        }
        sub.buf_sub[prm.name] = std::move(bm);
        // the staged window itself is touched: record conservative coverage
        // through the callee's own accesses only (handled by recursion)
      } else {
        sub.scalar_sub[prm.name] = arg;
      }
    }
    (void)loops;
    return sub;
  }

  std::vector<Access>& out_;
  std::map<std::string, std::string> local_iter_;
  int counter_ = 0;
};

}  // namespace access_detail

inline std::vector<Access> accesses_of(const Block& b) {
  std::vector<Access> out;
  access_detail::Collector c(out);
  std::vector<InnerLoop> loops;
  c.block(b, nullptr, loops);
  return out;
}

inline std::vector<Access> accesses_of(const StmtP& s) {
  return accesses_of(Block{s});
}

// ---------------------------------------------------------------------------
// Dependence testing.
// ---------------------------------------------------------------------------

enum class DepResult { Independent, MayDepend };

// Relation between the two copies of the shared loop iterators.
enum class IterRel {
  Same,         // identical iterations (statement reorder within one body)
  Distinct,     // any two different iterations
  SecondLater,  // second copy lexicographically later
  Swapped,      // outer <, inner > (two-loop interchange conflicts)
};

namespace dep_detail {

inline std::string primed(const std::string& v) { return "__p_" + v; }

// Adds the iterator ranges of an access's inner loops; returns false when a
// bound is non-affine.
inline bool add_inner_ranges(FactSet& facts, const Access& a,
                             const std::map<std::string, ExprP>& prime_map,
                             const std::string& suffix) {
  for (const auto& l : a.loops) {
    ExprP lo = subst_expr(l.lo, prime_map);
    ExprP hi = subst_expr(l.hi, prime_map);
    NormResult lof = normalize(lo, facts.atoms);
    NormResult hif = normalize(hi, facts.atoms);
    if (!lof || !hif) return false;
    std::string name = l.name + suffix;
    facts.close_atoms();
    facts.add_iter_range(name, *lof, *hif);
  }
  return true;
}

inline std::map<std::string, ExprP> iter_rename(const Access& a,
                                                const std::string& suffix) {
  std::map<std::string, ExprP> m;
  for (const auto& l : a.loops)
    m[l.name] = make_var(l.name + suffix, ScalarKind::Index);
  return m;
}

inline bool write_like(Access::Kind k) {
  return k == Access::Write || k == Access::Reduce;
}

}  // namespace dep_detail

// May iteration-copies of access `x` (in frame 1) and `y` (frame 2) touch
// the same cell of their common buffer, under `rel` on the shared loops?
inline bool accesses_may_alias(const Access& x, const Access& y,
                               const std::vector<StmtP>& shared_loops,
                               const FactSet& base, IterRel rel) {
  using namespace dep_detail;
  if (x.buf != y.buf) return false;
  if (x.idx.size() != y.idx.size()) return true;  // ill-shaped: be safe

  // prime map for frame 2: shared iterators i -> i'
  std::map<std::string, ExprP> prime;
  for (const auto& l : shared_loops)
    prime[l->name] = make_var(primed(l->name), ScalarKind::Index);

  // relation disjuncts over the shared iterators
  std::vector<std::vector<LinearConstraint>> disjuncts;
  size_t L = shared_loops.size();
  auto eq = [&](size_t k) {
    return LinearConstraint{AffineForm::var(shared_loops[k]->name) -
                                AffineForm::var(primed(shared_loops[k]->name)),
                            true};
  };
  auto lt = [&](size_t k, bool first_smaller) {
    AffineForm d =
        first_smaller
            ? AffineForm::var(primed(shared_loops[k]->name)) -
                  AffineForm::var(shared_loops[k]->name)
            : AffineForm::var(shared_loops[k]->name) -
                  AffineForm::var(primed(shared_loops[k]->name));
    return LinearConstraint{d - AffineForm(Rational(1)), false};
  };
  switch (rel) {
    case IterRel::Same: {
      std::vector<LinearConstraint> d;
      for (size_t k = 0; k < L; ++k) d.push_back(eq(k));
      disjuncts.push_back(std::move(d));
      break;
    }
    case IterRel::Distinct:
      for (size_t k = 0; k < L; ++k)
        for (bool fs : {true, false}) {
          std::vector<LinearConstraint> d;
          for (size_t j = 0; j < k; ++j) d.push_back(eq(j));
          d.push_back(lt(k, fs));
          disjuncts.push_back(std::move(d));
        }
      break;
    case IterRel::SecondLater:
      for (size_t k = 0; k < L; ++k) {
        std::vector<LinearConstraint> d;
        for (size_t j = 0; j < k; ++j) d.push_back(eq(j));
        d.push_back(lt(k, /*first_smaller=*/true));
        disjuncts.push_back(std::move(d));
      }
      break;
    case IterRel::Swapped: {
      if (L != 2) return true;  // only defined for a two-loop interchange
      std::vector<LinearConstraint> d;
      d.push_back(lt(0, true));   // i < i'
      d.push_back(lt(1, false));  // j > j'
      disjuncts.push_back(std::move(d));
      break;
    }
  }
  if (L == 0) {
    // no shared loops: Same means sequential composition in one iteration
    if (rel == IterRel::Same || rel == IterRel::SecondLater) {
      disjuncts.clear();
      disjuncts.push_back({});
    } else {
      return false;  // distinct iterations of nothing cannot collide
    }
  }

  for (const auto& disjunct : disjuncts) {
    FactSet facts = base;
    // shared loop ranges, both frames
    bool affine_ok = true;
    for (const auto& l : shared_loops) {
      NormResult lo = normalize(l->lo, facts.atoms);
      NormResult hi = normalize(l->hi, facts.atoms);
      if (!lo || !hi) {
        affine_ok = false;
        break;
      }
      facts.close_atoms();
      facts.add_iter_range(l->name, *lo, *hi);
      // frame-2 bounds: outer shared iterators in bounds get primes
      NormResult lo2 = normalize(subst_expr(l->lo, prime), facts.atoms);
      NormResult hi2 = normalize(subst_expr(l->hi, prime), facts.atoms);
      if (!lo2 || !hi2) {
        affine_ok = false;
        break;
      }
      facts.close_atoms();
      facts.add_iter_range(dep_detail::primed(l->name), *lo2, *hi2);
    }
    if (!affine_ok) return true;

    auto x_rename = dep_detail::iter_rename(x, "__a");
    auto y_rename = dep_detail::iter_rename(y, "__b");
    // frame 2's inner loop bounds also see primed shared iterators
    std::map<std::string, ExprP> y_sub = prime;
    for (auto& [k, v] : y_rename) y_sub[k] = v;

    if (!dep_detail::add_inner_ranges(facts, x, x_rename, "__a")) return true;
    if (!dep_detail::add_inner_ranges(facts, y, y_sub, "__b")) return true;

    for (const auto& c : disjunct) facts.add(c);
    facts.close_atoms();

    // per-dimension index equality
    bool dims_ok = true;
    std::vector<LinearConstraint> eqs;
    for (size_t d = 0; d < x.idx.size(); ++d) {
      ExprP xi = subst_expr(x.idx[d], x_rename);
      ExprP yi = subst_expr(y.idx[d], y_sub);
      NormResult xf = normalize(xi, facts.atoms);
      NormResult yf = normalize(yi, facts.atoms);
      if (!xf || !yf) {
        dims_ok = false;
        break;
      }
      eqs.push_back({*xf - *yf, true});
    }
    if (!dims_ok) return true;  // non-affine: conservative
    for (auto& e : eqs) facts.add(std::move(e));
    facts.close_atoms();

    prove_detail::System sys;
    sys.cons = facts.constraints();
    sys.divs = facts.divisibilities();
    if (prove_detail::feasible(std::move(sys)) != prove_detail::Feas::Infeasible)
      return true;
  }
  return false;
}

// Conservative dependence between two blocks under shared loops.
// `reduces_commute`: exact arithmetic makes reduce/reduce pairs commute
// (used by reorder/fission/fuse); parallelize must not set it.
inline DepResult dependence(const Block& a, const Block& b,
                            const std::vector<StmtP>& shared_loops,
                            const FactSet& base, IterRel rel,
                            bool reduces_commute = true,
                            const std::string& only_buffer = "") {
  std::vector<Access> xs = accesses_of(a);
  std::vector<Access> ys = accesses_of(b);
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      if (!dep_detail::write_like(x.kind) && !dep_detail::write_like(y.kind))
        continue;
      if (reduces_commute && x.kind == Access::Reduce &&
          y.kind == Access::Reduce)
        continue;
      if (!only_buffer.empty() &&
          (x.buf != only_buffer || y.buf != only_buffer))
        continue;
      if (accesses_may_alias(x, y, shared_loops, base, rel))
        return DepResult::MayDepend;
    }
  }
  return DepResult::Independent;
}

// ---------------------------------------------------------------------------
// Idempotence (strict; see remove_loop / divide_with_recompute).
// ---------------------------------------------------------------------------

enum class Idem { Yes, Unknown };

// Inside instruction bodies loops and guards of plain assigns are fine:
// bounds and conditions are pure, so re-execution writes identical values.
inline bool idempotent_shape_relaxed(const Block& b) {
  for (const auto& s : b) {
    switch (s->kind) {
      case StmtKind::Pass:
      case StmtKind::Assign:
        break;
      case StmtKind::For:
        if (!idempotent_shape_relaxed(s->body)) return false;
        break;
      case StmtKind::If:
        if (!idempotent_shape_relaxed(s->body)) return false;
        if (!idempotent_shape_relaxed(s->orelse)) return false;
        break;
      case StmtKind::Call:
        if (!s->callee || !idempotent_shape_relaxed(s->callee->body))
          return false;
        break;
      default:
        return false;  // Reduce, Alloc
    }
  }
  return true;
}

// Top-level statements must be assigns or calls to idempotent instructions.
inline bool idempotent_shape(const Block& b) {
  for (const auto& s : b) {
    switch (s->kind) {
      case StmtKind::Pass:
      case StmtKind::Assign:
        break;
      case StmtKind::Call:
        if (!s->callee || !idempotent_shape_relaxed(s->callee->body))
          return false;
        break;
      default:
        return false;  // Reduce, For, If, Alloc
    }
  }
  return true;
}

inline Idem idempotent(const Block& b) {
  if (!idempotent_shape(b)) return Idem::Unknown;
  std::set<std::string> reads, writes;
  for (const Access& a : accesses_of(b)) {
    if (a.kind == Access::Reduce) return Idem::Unknown;
    (a.kind == Access::Read ? reads : writes).insert(a.buf);
  }
  for (const auto& w : writes)
    if (reads.count(w)) return Idem::Unknown;
  return Idem::Yes;
}

// ---------------------------------------------------------------------------
// Bounds inference: per-dimension union of access windows with bound
// iterators eliminated through their ranges.
// ---------------------------------------------------------------------------

struct WindowDim {
  AffineForm lo;  // inclusive
  AffineForm hi;  // exclusive
};

struct Window {
  std::vector<WindowDim> dims;
};

namespace bounds_detail {

// replace iterator `v` to push the form to its extreme
inline AffineForm eliminate(AffineForm f, const InnerLoop& l, bool maximize,
                            AtomTable& atoms) {
  Rational c = f.coeff(l.name);
  if (c.is_zero()) return f;
  NormResult lo = normalize(l.lo, atoms);
  NormResult hi = normalize(l.hi, atoms);
  if (!lo || !hi)
    throw AnalysisError("bounds_infer: non-affine loop bound for '" + l.name +
                        "'");
  AffineForm hi_incl = *hi - AffineForm(Rational(1));
  bool take_hi = (c > Rational(0)) == maximize;
  return f.subst(l.name, take_hi ? hi_incl : *lo);
}

}  // namespace bounds_detail

inline Window bounds_infer_block(const Procedure& proc, const Block& scope,
                                 const Path& scope_path,
                                 const std::string& buffer) {
  std::vector<Access> all = accesses_of(scope);
  std::vector<Access> hits;
  for (auto& a : all)
    if (a.buf == buffer) hits.push_back(std::move(a));
  if (hits.empty())
    throw AnalysisError("bounds_infer: no accesses to '" + buffer +
                        "' in scope");

  FactSet facts = facts_at(proc, scope_path);
  size_t rank = hits[0].idx.size();
  Window w;
  bool first = true;
  for (const Access& a : hits) {
    if (a.idx.size() != rank)
      throw AnalysisError("bounds_infer: mixed-rank accesses to '" + buffer +
                          "'");
    for (size_t d = 0; d < rank; ++d) {
      NormResult f = normalize(a.idx[d], facts.atoms);
      if (!f)
        throw AnalysisError("bounds_infer: non-affine access " +
                            print_expr(a.idx[d]));
      AffineForm mn = *f, mx = *f;
      for (auto it = a.loops.rbegin(); it != a.loops.rend(); ++it) {
        mn = bounds_detail::eliminate(mn, *it, /*maximize=*/false, facts.atoms);
        mx = bounds_detail::eliminate(mx, *it, /*maximize=*/true, facts.atoms);
      }
      facts.close_atoms();
      AffineForm hi_excl = mx + AffineForm(Rational(1));
      if (first) {
        if (w.dims.size() <= d) w.dims.push_back({mn, hi_excl});
      } else {
        // keep the provable min / max
        auto le = [&](const AffineForm& x, const AffineForm& y) {
          return prove_constraint(facts, {y - x, false}).result ==
                 ProveResult::Valid;
        };
        WindowDim& cur = w.dims[d];
        if (!(cur.lo == mn)) {
          if (le(mn, cur.lo)) cur.lo = mn;
          else if (!le(cur.lo, mn))
            throw AnalysisError(
                "bounds_infer: cannot order lower bounds " + cur.lo.str() +
                " vs " + mn.str());
        }
        if (!(cur.hi == hi_excl)) {
          if (le(cur.hi, hi_excl)) cur.hi = hi_excl;
          else if (!le(hi_excl, cur.hi))
            throw AnalysisError(
                "bounds_infer: cannot order upper bounds " + cur.hi.str() +
                " vs " + hi_excl.str());
        }
      }
    }
    first = false;
  }
  return w;
}

// Scope given as a cursor to a statement or block. For a loop, the scope is
// the loop BODY: the loop's own iterator stays free in the window (the §-4
// style per-iteration window), while deeper iterators are eliminated.
inline Window bounds_infer(const Cursor& scope, const std::string& buffer) {
  const ProcP& p = scope.proc();
  if (scope.kind() == CursorKind::Block)
    return bounds_infer_block(*p, scope.block_stmts(), scope.path(), buffer);
  StmtP s = scope.stmt();
  if (s->kind == StmtKind::For) {
    Path inside = scope.path();
    inside.push_back({Label::Body, 0});
    return bounds_infer_block(*p, s->body, inside, buffer);
  }
  return bounds_infer_block(*p, Block{s}, scope.path(), buffer);
}

// ---------------------------------------------------------------------------
// Fact-driven index simplification (the engine behind `simplify`).
// ---------------------------------------------------------------------------

// Splits each div/mod atom (inner op c) as inner = c*g + h; when the facts
// prove 0 <= h < c the atom collapses (div -> g, mod -> h).
inline std::optional<AffineForm> reduce_atoms(const AffineForm& f,
                                              FactSet& facts) {
  AffineForm out(f.constant());
  bool changed = false;
  for (const auto& [v, k] : f.coeffs()) {
    const AtomInfo* info = facts.atoms.lookup(v);
    if (!info) {
      out += AffineForm::var(v, k);
      continue;
    }
    auto reduced_inner = reduce_atoms(info->inner, facts);
    AffineForm inner = reduced_inner ? *reduced_inner : info->inner;
    Rational c{info->divisor};
    // g takes floor(coeff/c) of every term
    AffineForm g(Rational(inner.constant() / c).floor());
    for (const auto& [iv, ik] : inner.coeffs())
      g += AffineForm::var(iv, Rational((ik / c).floor()));
    AffineForm h = inner - g * c;
    bool in_range =
        prove_constraint(facts, {h, false}).result == ProveResult::Valid &&
        prove_constraint(facts, {AffineForm(c - Rational(1)) - h, false})
                .result == ProveResult::Valid;
    if (in_range) {
      changed = true;
      if (info->kind == AtomInfo::FloorDiv) out += g * k;
      else out += h * k;
    } else if (reduced_inner && !(inner == info->inner)) {
      AtomInfo ni{info->kind, inner, info->divisor,
                  make_binop(info->kind == AtomInfo::FloorDiv ? BinOp::Div
                                                              : BinOp::Mod,
                             render_affine(inner, facts.atoms),
                             make_literal(Rational(info->divisor),
                                          ScalarKind::Index))};
      out += AffineForm::var(facts.atoms.intern(std::move(ni)), k);
      changed = true;
    } else {
      out += AffineForm::var(v, k);
    }
  }
  if (!changed) return std::nullopt;
  return out;
}

// Returns a simplified structurally-different expression, or null.
inline ExprP simplify_index(const ExprP& e, FactSet& facts) {
  NormResult f = normalize(e, facts.atoms);
  if (!f) return nullptr;
  facts.close_atoms();
  auto reduced = reduce_atoms(*f, facts);
  AffineForm best = reduced ? *reduced : *f;
  ExprP rendered = render_affine(best, facts.atoms);
  if (struct_eq(rendered, e)) return nullptr;
  return rendered;
}

}  // namespace exo2ir

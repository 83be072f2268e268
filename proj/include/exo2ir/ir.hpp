#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/rational.hpp"

namespace exo2ir {

enum class ScalarKind { F32, F64, I8, I32, Index, Bool };

inline bool is_numeric(ScalarKind k) {
  return k == ScalarKind::F32 || k == ScalarKind::F64 || k == ScalarKind::I8 ||
         k == ScalarKind::I32;
}
inline bool is_integral(ScalarKind k) {
  return k == ScalarKind::I8 || k == ScalarKind::I32 || k == ScalarKind::Index;
}
inline const char* scalar_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::F32: return "f32";
    case ScalarKind::F64: return "f64";
    case ScalarKind::I8: return "i8";
    case ScalarKind::I32: return "i32";
    case ScalarKind::Index: return "size";
    case ScalarKind::Bool: return "bool";
  }
  return "?";
}

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And };

inline bool is_comparison(BinOp op) {
  return op == BinOp::Eq || op == BinOp::Ne || op == BinOp::Lt ||
         op == BinOp::Le || op == BinOp::Gt || op == BinOp::Ge;
}
inline const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
  }
  return "?";
}

struct Expr;
struct Stmt;
struct Procedure;
struct EditTrace;
using ExprP = std::shared_ptr<const Expr>;
using StmtP = std::shared_ptr<const Stmt>;
using ProcP = std::shared_ptr<const Procedure>;
using Block = std::vector<StmtP>;

// One dimension of a slice argument: [lo, hi) when hi is set, a point index
// otherwise.
struct SliceDim {
  ExprP lo;
  ExprP hi;  // null for a point
  bool is_point() const { return hi == nullptr; }
};

enum class ExprKind {
  Literal,  // exact rational constant
  Var,      // scalar/size/iterator read
  Read,     // buffer read: name[e0, e1, ...]
  Binary,   // op(lhs, rhs)
  Slice,    // call-argument window: name[lo:hi, p, ...]
};

struct Expr {
  ExprKind kind;
  ScalarKind type = ScalarKind::Index;
  Rational value;               // Literal
  std::string name;             // Var / Read / Slice
  BinOp op = BinOp::Add;        // Binary
  std::vector<ExprP> args;      // Read: indices; Binary: {lhs, rhs}
  std::vector<SliceDim> dims;   // Slice
};

enum class StmtKind { For, If, Assign, Reduce, Alloc, Pass, Call };

struct Stmt {
  StmtKind kind;
  std::string name;         // For: iterator; Assign/Reduce: dest;
                            // Alloc: buffer; Call: instruction name
  ExprP lo, hi;             // For bounds
  ExprP cond;               // If condition
  std::vector<ExprP> idx;   // Assign/Reduce: dest indices; Alloc: dims
  ExprP rhs;                // Assign/Reduce
  Block body;               // For body / If then-branch
  Block orelse;             // If else-branch (may be empty)
  ScalarKind type = ScalarKind::F32;  // Alloc element type
  std::string mem;          // Alloc / param memory tag
  bool parallel = false;    // For: set by parallelize_loop only
  std::vector<ExprP> args;  // Call arguments (exprs or slices)
  ProcP callee;             // Call: resolved instruction/procedure
};

struct Param {
  std::string name;
  ScalarKind type = ScalarKind::Index;
  std::vector<ExprP> dims;  // empty for scalar and size params
  std::string mem;
  bool is_buffer() const { return !dims.empty(); }
};

// --- expression constructors (fold literal-literal arithmetic so that
// --- parse/print reaches a fixpoint) --------------------------------------

inline ExprP make_literal(Rational v, ScalarKind t) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Literal;
  e->type = t;
  e->value = v;
  return e;
}

inline ExprP make_var(std::string name, ScalarKind t) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->type = t;
  e->name = std::move(name);
  return e;
}

inline ExprP make_read(std::string name, std::vector<ExprP> idx, ScalarKind t) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Read;
  e->type = t;
  e->name = std::move(name);
  e->args = std::move(idx);
  return e;
}

inline ExprP make_slice(std::string name, std::vector<SliceDim> dims,
                        ScalarKind t) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Slice;
  e->type = t;
  e->name = std::move(name);
  e->dims = std::move(dims);
  return e;
}

inline Rational fold_binop(BinOp op, const Rational& a, const Rational& b,
                           ScalarKind t) {
  switch (op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return a * b;
    case BinOp::Div:
      if (b.is_zero()) throw InternalError("fold: division by zero");
      if (is_integral(t)) return Rational((a / b).floor());
      return a / b;
    case BinOp::Mod: {
      if (b.is_zero()) throw InternalError("fold: modulus by zero");
      Rational q((a / b).floor());
      return a - q * b;
    }
    default: throw InternalError("fold: not an arithmetic op");
  }
}

inline ExprP make_binop(BinOp op, ExprP lhs, ExprP rhs) {
  ScalarKind t = is_comparison(op) || op == BinOp::And ? ScalarKind::Bool
                                                       : lhs->type;
  if (!is_comparison(op) && op != BinOp::And &&
      lhs->kind == ExprKind::Literal && rhs->kind == ExprKind::Literal) {
    return make_literal(fold_binop(op, lhs->value, rhs->value, t), t);
  }
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->type = t;
  e->op = op;
  e->args = {std::move(lhs), std::move(rhs)};
  return e;
}

// --- statement constructors -------------------------------------------------

inline StmtP make_for(std::string iter, ExprP lo, ExprP hi, Block body,
                      bool parallel = false) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::For;
  s->name = std::move(iter);
  s->lo = std::move(lo);
  s->hi = std::move(hi);
  s->body = std::move(body);
  s->parallel = parallel;
  return s;
}

inline StmtP make_if(ExprP cond, Block then_body, Block orelse = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->cond = std::move(cond);
  s->body = std::move(then_body);
  s->orelse = std::move(orelse);
  return s;
}

inline StmtP make_assign(std::string dest, std::vector<ExprP> idx, ExprP rhs) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->name = std::move(dest);
  s->idx = std::move(idx);
  s->rhs = std::move(rhs);
  return s;
}

inline StmtP make_reduce(std::string dest, std::vector<ExprP> idx, ExprP rhs) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Reduce;
  s->name = std::move(dest);
  s->idx = std::move(idx);
  s->rhs = std::move(rhs);
  return s;
}

inline StmtP make_alloc(std::string name, ScalarKind type,
                        std::vector<ExprP> dims, std::string mem = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Alloc;
  s->name = std::move(name);
  s->type = type;
  s->idx = std::move(dims);
  s->mem = std::move(mem);
  return s;
}

inline StmtP make_pass() {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Pass;
  return s;
}

inline StmtP make_call(std::string name, std::vector<ExprP> args, ProcP callee) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Call;
  s->name = std::move(name);
  s->args = std::move(args);
  s->callee = std::move(callee);
  return s;
}

// --- procedures --------------------------------------------------------------

struct Procedure {
  std::string name;
  std::vector<Param> params;
  std::vector<ExprP> asserts;
  Block body;
  bool is_instruction = false;
  std::string intrinsic;  // C template with {0},{1},... holes; instructions only

  // Provenance: parent version plus the edit trace that produced this one.
  std::uint64_t version = 0;
  ProcP parent;
  std::shared_ptr<const EditTrace> trace;
};

inline std::uint64_t next_version_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

inline ProcP make_proc(std::string name, std::vector<Param> params,
                       std::vector<ExprP> asserts, Block body,
                       bool is_instruction = false, std::string intrinsic = {}) {
  auto p = std::make_shared<Procedure>();
  p->name = std::move(name);
  p->params = std::move(params);
  p->asserts = std::move(asserts);
  p->body = std::move(body);
  p->is_instruction = is_instruction;
  p->intrinsic = std::move(intrinsic);
  p->version = next_version_id();
  return p;
}

// A new version derived from `parent`; `trace` explains how cursors map.
inline ProcP derive_proc(const ProcP& parent, Procedure next,
                         std::shared_ptr<const EditTrace> trace) {
  auto p = std::make_shared<Procedure>(std::move(next));
  p->version = next_version_id();
  p->parent = parent;
  p->trace = std::move(trace);
  return p;
}

inline ProcP provenance_root(ProcP p) {
  while (p->parent) p = p->parent;
  return p;
}

// --- structural equality (ignores provenance and versions) -------------------

inline bool struct_eq(const ExprP& a, const ExprP& b);
inline bool struct_eq(const StmtP& a, const StmtP& b);

inline bool struct_eq(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!struct_eq(a[i], b[i])) return false;
  return true;
}

inline bool struct_eq(const ExprP& a, const ExprP& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->type != b->type) return false;
  switch (a->kind) {
    case ExprKind::Literal: return a->value == b->value;
    case ExprKind::Var: return a->name == b->name;
    case ExprKind::Read: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!struct_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case ExprKind::Binary:
      return a->op == b->op && struct_eq(a->args[0], b->args[0]) &&
             struct_eq(a->args[1], b->args[1]);
    case ExprKind::Slice: {
      if (a->name != b->name || a->dims.size() != b->dims.size()) return false;
      for (size_t i = 0; i < a->dims.size(); ++i) {
        if (a->dims[i].is_point() != b->dims[i].is_point()) return false;
        if (!struct_eq(a->dims[i].lo, b->dims[i].lo)) return false;
        if (!a->dims[i].is_point() && !struct_eq(a->dims[i].hi, b->dims[i].hi))
          return false;
      }
      return true;
    }
  }
  return false;
}

inline bool struct_eq(const StmtP& a, const StmtP& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case StmtKind::For:
      return a->name == b->name && a->parallel == b->parallel &&
             struct_eq(a->lo, b->lo) && struct_eq(a->hi, b->hi) &&
             struct_eq(a->body, b->body);
    case StmtKind::If:
      return struct_eq(a->cond, b->cond) && struct_eq(a->body, b->body) &&
             struct_eq(a->orelse, b->orelse);
    case StmtKind::Assign:
    case StmtKind::Reduce: {
      if (a->name != b->name || a->idx.size() != b->idx.size()) return false;
      for (size_t i = 0; i < a->idx.size(); ++i)
        if (!struct_eq(a->idx[i], b->idx[i])) return false;
      return struct_eq(a->rhs, b->rhs);
    }
    case StmtKind::Alloc: {
      if (a->name != b->name || a->type != b->type || a->mem != b->mem ||
          a->idx.size() != b->idx.size())
        return false;
      for (size_t i = 0; i < a->idx.size(); ++i)
        if (!struct_eq(a->idx[i], b->idx[i])) return false;
      return true;
    }
    case StmtKind::Pass: return true;
    case StmtKind::Call: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!struct_eq(a->args[i], b->args[i])) return false;
      return true;
    }
  }
  return false;
}

inline bool struct_eq(const Param& a, const Param& b) {
  if (a.name != b.name || a.type != b.type || a.mem != b.mem ||
      a.dims.size() != b.dims.size())
    return false;
  for (size_t i = 0; i < a.dims.size(); ++i)
    if (!struct_eq(a.dims[i], b.dims[i])) return false;
  return true;
}

inline bool struct_eq(const ProcP& a, const ProcP& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->name != b->name || a->is_instruction != b->is_instruction ||
      a->intrinsic != b->intrinsic || a->params.size() != b->params.size() ||
      a->asserts.size() != b->asserts.size())
    return false;
  for (size_t i = 0; i < a->params.size(); ++i)
    if (!struct_eq(a->params[i], b->params[i])) return false;
  for (size_t i = 0; i < a->asserts.size(); ++i)
    if (!struct_eq(a->asserts[i], b->asserts[i])) return false;
  return struct_eq(a->body, b->body);
}

// --- name utilities ----------------------------------------------------------

inline void collect_names(const ExprP& e, std::unordered_set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Literal: break;
    case ExprKind::Var:
    case ExprKind::Slice:
    case ExprKind::Read: out.insert(e->name); break;
    case ExprKind::Binary: break;
  }
  for (const auto& a : e->args) collect_names(a, out);
  for (const auto& d : e->dims) {
    collect_names(d.lo, out);
    collect_names(d.hi, out);
  }
}

inline void collect_names(const Block& b, std::unordered_set<std::string>& out);

inline void collect_names(const StmtP& s, std::unordered_set<std::string>& out) {
  if (!s) return;
  if (!s->name.empty()) out.insert(s->name);
  collect_names(s->lo, out);
  collect_names(s->hi, out);
  collect_names(s->cond, out);
  collect_names(s->rhs, out);
  for (const auto& e : s->idx) collect_names(e, out);
  for (const auto& e : s->args) collect_names(e, out);
  collect_names(s->body, out);
  collect_names(s->orelse, out);
}

inline void collect_names(const Block& b, std::unordered_set<std::string>& out) {
  for (const auto& s : b) collect_names(s, out);
}

inline std::unordered_set<std::string> used_names(const Procedure& p) {
  std::unordered_set<std::string> out;
  for (const auto& pr : p.params) {
    out.insert(pr.name);
    for (const auto& d : pr.dims) collect_names(d, out);
  }
  for (const auto& a : p.asserts) collect_names(a, out);
  collect_names(p.body, out);
  return out;
}

inline std::string fresh_name(const std::string& base,
                              std::unordered_set<std::string>& used) {
  if (!used.count(base)) {
    used.insert(base);
    return base;
  }
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!used.count(cand)) {
      used.insert(cand);
      return cand;
    }
  }
}

}  // namespace exo2ir

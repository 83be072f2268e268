#pragma once

#include <map>
#include <string>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/printer.hpp"

namespace exo2ir {

namespace wf {

struct NameInfo {
  enum Kind { SizeParam, ScalarParam, BufferParam, BufferAlloc, Iterator } kind;
  ScalarKind type;
  size_t ndims;
  int depth;  // nesting depth of the binder, for shadowing detection
};

class Checker {
public:
  explicit Checker(const Procedure& p) : proc_(p) {}

  std::vector<std::string> run() {
    for (const auto& pr : proc_.params) {
      if (env_.count(pr.name)) diag("duplicate parameter '" + pr.name + "'");
      if (pr.is_buffer()) {
        for (const auto& d : pr.dims) index_expr(d, "buffer dimension");
        env_[pr.name] = {NameInfo::BufferParam, pr.type, pr.dims.size(), 0};
      } else if (pr.type == ScalarKind::Index) {
        env_[pr.name] = {NameInfo::SizeParam, ScalarKind::Index, 0, 0};
      } else {
        env_[pr.name] = {NameInfo::ScalarParam, pr.type, 0, 0};
      }
    }
    for (const auto& a : proc_.asserts) {
      predicate(a);
      assert_params_only(a);
    }
    if (proc_.body.empty()) diag("procedure body is empty");
    block(proc_.body, 1);
    return diags_;
  }

private:
  void block(const Block& b, int depth) {
    if (b.empty()) diag("empty block (should contain 'pass')");
    std::vector<std::string> local;  // allocs introduced at this level
    for (const auto& s : b) stmt(s, depth, local);
    for (const auto& n : local) env_.erase(n);
  }

  void stmt(const StmtP& s, int depth, std::vector<std::string>& local) {
    switch (s->kind) {
      case StmtKind::For: {
        index_expr(s->lo, "loop bound");
        index_expr(s->hi, "loop bound");
        if (env_.count(s->name))
          diag("loop iterator '" + s->name + "' shadows an existing name");
        env_[s->name] = {NameInfo::Iterator, ScalarKind::Index, 0, depth};
        block(s->body, depth + 1);
        env_.erase(s->name);
        break;
      }
      case StmtKind::If:
        predicate(s->cond);
        block(s->body, depth + 1);
        if (!s->orelse.empty()) block(s->orelse, depth + 1);
        break;
      case StmtKind::Assign:
      case StmtKind::Reduce: {
        auto it = env_.find(s->name);
        if (it == env_.end()) {
          diag("write to unbound name '" + s->name + "'");
          break;
        }
        const NameInfo& ni = it->second;
        if (ni.kind == NameInfo::SizeParam || ni.kind == NameInfo::Iterator ||
            ni.kind == NameInfo::ScalarParam)
          diag("'" + s->name + "' is read-only and cannot be assigned");
        if (s->idx.size() != ni.ndims)
          diag("'" + s->name + "' expects " + std::to_string(ni.ndims) +
               " indices, got " + std::to_string(s->idx.size()));
        for (const auto& e : s->idx) index_expr(e, "index");
        numeric_expr(s->rhs);
        break;
      }
      case StmtKind::Alloc: {
        if (env_.count(s->name))
          diag("allocation '" + s->name + "' shadows an existing name");
        for (const auto& d : s->idx) index_expr(d, "allocation dimension");
        env_[s->name] = {NameInfo::BufferAlloc, s->type, s->idx.size(), depth};
        local.push_back(s->name);
        break;
      }
      case StmtKind::Pass:
        break;
      case StmtKind::Call: {
        if (!s->callee) {
          diag("call to unknown procedure '" + s->name + "'");
          break;
        }
        const Procedure& c = *s->callee;
        if (s->args.size() != c.params.size()) {
          diag("call to '" + s->name + "' expects " +
               std::to_string(c.params.size()) + " arguments, got " +
               std::to_string(s->args.size()));
          break;
        }
        for (size_t i = 0; i < s->args.size(); ++i)
          call_arg(s->args[i], c.params[i], s->name);
        break;
      }
    }
  }

  void call_arg(const ExprP& a, const Param& p, const std::string& callee) {
    if (p.is_buffer()) {
      if (a->kind != ExprKind::Slice) {
        diag("argument for buffer parameter '" + p.name + "' of '" + callee +
             "' must be a slice");
        return;
      }
      auto it = env_.find(a->name);
      if (it == env_.end()) {
        diag("slice of unbound buffer '" + a->name + "'");
        return;
      }
      if (it->second.ndims != a->dims.size())
        diag("slice of '" + a->name + "' has " + std::to_string(a->dims.size()) +
             " dims, buffer has " + std::to_string(it->second.ndims));
      size_t ranges = 0;
      for (const auto& d : a->dims) {
        index_expr(d.lo, "slice bound");
        if (!d.is_point()) {
          index_expr(d.hi, "slice bound");
          ++ranges;
        }
      }
      if (ranges != p.dims.size())
        diag("slice for '" + p.name + "' must expose " +
             std::to_string(p.dims.size()) + " range dims, got " +
             std::to_string(ranges));
    } else if (p.type == ScalarKind::Index) {
      index_expr(a, "size argument");
    } else {
      if (a->kind == ExprKind::Slice)
        diag("scalar parameter '" + p.name + "' cannot take a slice");
      else
        numeric_expr(a);
    }
  }

  // Index expressions: index-typed, affine with constant-divisor div/mod.
  void index_expr(const ExprP& e, const char* what) {
    switch (e->kind) {
      case ExprKind::Literal:
        if (e->type != ScalarKind::Index || !e->value.is_integer())
          diag(std::string(what) + " must be an integer: " + print_expr(e));
        return;
      case ExprKind::Var: {
        auto it = env_.find(e->name);
        if (it == env_.end()) {
          diag("unbound name '" + e->name + "'");
          return;
        }
        if (it->second.type != ScalarKind::Index ||
            it->second.kind == NameInfo::BufferParam ||
            it->second.kind == NameInfo::BufferAlloc)
          diag("'" + e->name + "' is not index-typed in " + what);
        return;
      }
      case ExprKind::Read:
        diag("buffer reads are not allowed in index expressions: " +
             print_expr(e));
        return;
      case ExprKind::Slice:
        diag("slices are not allowed in index expressions");
        return;
      case ExprKind::Binary:
        switch (e->op) {
          case BinOp::Add:
          case BinOp::Sub:
            index_expr(e->args[0], what);
            index_expr(e->args[1], what);
            return;
          case BinOp::Mul:
            if (e->args[0]->kind != ExprKind::Literal &&
                e->args[1]->kind != ExprKind::Literal)
              diag("non-affine product in " + std::string(what) + ": " +
                   print_expr(e));
            index_expr(e->args[0], what);
            index_expr(e->args[1], what);
            return;
          case BinOp::Div:
          case BinOp::Mod:
            index_expr(e->args[0], what);
            if (e->args[1]->kind != ExprKind::Literal ||
                !e->args[1]->value.is_integer() ||
                e->args[1]->value.num() <= 0)
              diag("divisor must be a positive integer constant: " +
                   print_expr(e));
            return;
          default:
            diag("boolean operator in index expression: " + print_expr(e));
            return;
        }
    }
  }

  void numeric_expr(const ExprP& e) {
    switch (e->kind) {
      case ExprKind::Literal:
        if (is_integral(e->type) && !e->value.is_integer())
          diag("non-integer literal of integral type: " + print_expr(e));
        return;
      case ExprKind::Var: {
        auto it = env_.find(e->name);
        if (it == env_.end()) {
          diag("unbound name '" + e->name + "'");
          return;
        }
        if (it->second.ndims != 0)
          diag("buffer '" + e->name + "' read without indices");
        return;
      }
      case ExprKind::Read: {
        auto it = env_.find(e->name);
        if (it == env_.end()) {
          diag("unbound name '" + e->name + "'");
          return;
        }
        if (it->second.kind != NameInfo::BufferParam &&
            it->second.kind != NameInfo::BufferAlloc)
          diag("'" + e->name + "' is not a buffer");
        else if (it->second.ndims != e->args.size())
          diag("'" + e->name + "' expects " +
               std::to_string(it->second.ndims) + " indices, got " +
               std::to_string(e->args.size()));
        for (const auto& i : e->args) index_expr(i, "index");
        return;
      }
      case ExprKind::Slice:
        diag("slices may only appear as call arguments");
        return;
      case ExprKind::Binary:
        if (is_comparison(e->op) || e->op == BinOp::And) {
          diag("boolean expression in numeric position: " + print_expr(e));
          return;
        }
        if (e->type == ScalarKind::Index) {
          index_expr(e, "index expression");
          return;
        }
        numeric_expr(e->args[0]);
        numeric_expr(e->args[1]);
        if (e->op == BinOp::Div) {
          if (e->args[1]->kind != ExprKind::Literal ||
              e->args[1]->value <= Rational(0))
            diag("divisor must be a positive constant: " + print_expr(e));
        } else if (e->op == BinOp::Mod) {
          if (!is_integral(e->type))
            diag("'%' requires an integral type: " + print_expr(e));
          if (e->args[1]->kind != ExprKind::Literal ||
              !e->args[1]->value.is_integer() || e->args[1]->value.num() <= 0)
            diag("modulus must be a positive integer constant: " +
                 print_expr(e));
        }
        return;
    }
  }

  void predicate(const ExprP& e) {
    if (e->kind == ExprKind::Binary && e->op == BinOp::And) {
      predicate(e->args[0]);
      predicate(e->args[1]);
      return;
    }
    if (e->kind != ExprKind::Binary || !is_comparison(e->op)) {
      diag("expected a comparison predicate: " + print_expr(e));
      return;
    }
    index_expr(e->args[0], "predicate operand");
    index_expr(e->args[1], "predicate operand");
  }

  void assert_params_only(const ExprP& e) {
    if (e->kind == ExprKind::Var) {
      auto it = env_.find(e->name);
      if (it != env_.end() && it->second.kind != NameInfo::SizeParam)
        diag("assert may reference only size parameters: '" + e->name + "'");
    }
    for (const auto& a : e->args) assert_params_only(a);
  }

  void diag(std::string msg) { diags_.push_back(std::move(msg)); }

  const Procedure& proc_;
  std::map<std::string, NameInfo> env_;
  std::vector<std::string> diags_;
};

}  // namespace wf

inline std::vector<std::string> check_wellformed(const ProcP& p) {
  wf::Checker c(*p);
  return c.run();
}

inline void require_wellformed(const ProcP& p) {
  auto diags = check_wellformed(p);
  if (!diags.empty()) {
    std::string msg = "procedure '" + p->name + "' is not well-formed:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw WellFormednessError(msg);
  }
}

// Re-validation hook used by the rewrite engine after every edit batch.
// Active in debug builds; define EXO2IR_VALIDATE_REWRITES to force it on in
// optimized builds (the test suites do).
inline void debug_check_wellformed(const ProcP& p) {
#if !defined(NDEBUG) || defined(EXO2IR_VALIDATE_REWRITES)
  auto diags = check_wellformed(p);
  if (!diags.empty()) {
    std::string msg = "rewrite produced an ill-formed procedure '" + p->name +
                      "':";
    for (const auto& d : diags) msg += "\n  " + d;
    throw InternalError(msg);
  }
#else
  (void)p;
#endif
}

}  // namespace exo2ir

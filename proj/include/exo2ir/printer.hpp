#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"

namespace exo2ir {

// Text span of a printed node: [line, col_begin, col_end), 0-based lines.
struct PrintSpan {
  int first_line = -1;
  int last_line = -1;
  int col_begin = 0;
  int col_end = 0;
};

class Printer {
public:
  // `track` lists node pointers whose printed spans should be recorded.
  explicit Printer(std::set<const void*> track = {}) : track_(std::move(track)) {}

  std::string proc_text(const Procedure& p) {
    out_.clear();
    line_start_ = 0;
    emit(p.is_instruction ? "instr " : "proc ");
    emit(p.name);
    emit("(");
    for (size_t i = 0; i < p.params.size(); ++i) {
      if (i) emit(", ");
      param(p.params[i]);
    }
    emit("):\n");
    if (!p.intrinsic.empty()) {
      emit("  intrin \"");
      for (char c : p.intrinsic) {
        if (c == '"' || c == '\\') out_.push_back('\\');
        out_.push_back(c);
      }
      emit("\"\n");
    }
    for (const auto& a : p.asserts) {
      emit("  assert ");
      expr(a, 0);
      emit("\n");
    }
    block(p.body, 1);
    return out_;
  }

  const std::map<const void*, PrintSpan>& spans() const { return spans_; }

  std::string expr_text(const ExprP& e) {
    out_.clear();
    line_start_ = 0;
    expr(e, 0);
    return out_;
  }

  std::string block_text(const Block& b, int depth = 0) {
    out_.clear();
    line_start_ = 0;
    block(b, depth);
    return out_;
  }

  void block(const Block& b, int depth) {
    for (const auto& s : b) stmt(s, depth);
  }

  void stmt(const StmtP& s, int depth) {
    begin_span(s.get());
    indent(depth);
    switch (s->kind) {
      case StmtKind::For:
        emit("for ");
        emit(s->name);
        emit(s->parallel ? " in par(" : " in seq(");
        expr(s->lo, 0);
        emit(", ");
        expr(s->hi, 0);
        emit("):\n");
        block(s->body, depth + 1);
        break;
      case StmtKind::If:
        emit("if ");
        expr(s->cond, 0);
        emit(":\n");
        block(s->body, depth + 1);
        if (!s->orelse.empty()) {
          indent(depth);
          emit("else:\n");
          block(s->orelse, depth + 1);
        }
        break;
      case StmtKind::Assign:
      case StmtKind::Reduce:
        emit(s->name);
        if (!s->idx.empty()) {
          emit("[");
          for (size_t i = 0; i < s->idx.size(); ++i) {
            if (i) emit(", ");
            expr(s->idx[i], 0);
          }
          emit("]");
        }
        emit(s->kind == StmtKind::Assign ? " = " : " += ");
        expr(s->rhs, 0);
        emit("\n");
        break;
      case StmtKind::Alloc:
        emit(s->name);
        emit(": ");
        emit(scalar_name(s->type));
        if (!s->idx.empty()) {
          emit("[");
          for (size_t i = 0; i < s->idx.size(); ++i) {
            if (i) emit(", ");
            expr(s->idx[i], 0);
          }
          emit("]");
        }
        if (!s->mem.empty()) {
          emit(" @");
          emit(s->mem);
        }
        emit("\n");
        break;
      case StmtKind::Pass:
        emit("pass\n");
        break;
      case StmtKind::Call:
        emit(s->name);
        emit("(");
        for (size_t i = 0; i < s->args.size(); ++i) {
          if (i) emit(", ");
          expr(s->args[i], 0);
        }
        emit(")\n");
        break;
    }
    end_span(s.get());
  }

  // Precedence levels: and=1, comparisons=2, +/-=3, * / %=4, atoms=5.
  void expr(const ExprP& e, int ctx_prec) {
    begin_span(e.get());
    switch (e->kind) {
      case ExprKind::Literal:
        emit(rational_text(e->value, e->type));
        break;
      case ExprKind::Var:
        emit(e->name);
        break;
      case ExprKind::Read:
        emit(e->name);
        emit("[");
        for (size_t i = 0; i < e->args.size(); ++i) {
          if (i) emit(", ");
          expr(e->args[i], 0);
        }
        emit("]");
        break;
      case ExprKind::Slice:
        emit(e->name);
        emit("[");
        for (size_t i = 0; i < e->dims.size(); ++i) {
          if (i) emit(", ");
          expr(e->dims[i].lo, 0);
          if (!e->dims[i].is_point()) {
            emit(":");
            expr(e->dims[i].hi, 0);
          }
        }
        emit("]");
        break;
      case ExprKind::Binary: {
        int prec = e->op == BinOp::And ? 1
                   : is_comparison(e->op) ? 2
                   : (e->op == BinOp::Add || e->op == BinOp::Sub) ? 3
                                                                  : 4;
        bool parens = prec < ctx_prec;
        if (parens) emit("(");
        expr(e->args[0], prec);
        emit(" ");
        emit(binop_name(e->op));
        emit(" ");
        expr(e->args[1], prec + 1);  // right operand: stricter, keeps shape
        if (parens) emit(")");
        break;
      }
    }
    end_span(e.get());
  }

  static std::string rational_text(const Rational& v, ScalarKind t) {
    if (is_integral(t) || t == ScalarKind::Bool) {
      if (!v.is_integer())
        throw InternalError("non-integer literal of integral type");
      return std::to_string(v.num());
    }
    if (v.is_integer()) return std::to_string(v.num()) + ".0";
    // decimal expansion when the denominator is 2^a * 5^b
    long long den = v.den();
    int k = 0;
    long long d = den;
    while (d % 2 == 0) { d /= 2; }
    while (d % 5 == 0) { d /= 5; }
    if (d == 1) {
      long long scale = 1;
      d = den;
      while (d != 1 && k < 18) {
        scale *= 10;
        ++k;
        if (scale % den == 0) break;
        d = den / gcd_ll(scale, den);
      }
      if (scale % den == 0) {
        long long scaled = v.num() * (scale / den);
        bool neg = scaled < 0;
        std::string digits = std::to_string(neg ? -scaled : scaled);
        while ((int)digits.size() <= k) digits.insert(digits.begin(), '0');
        digits.insert(digits.end() - k, '.');
        return (neg ? "-" : "") + digits;
      }
    }
    return "(" + std::to_string(v.num()) + ".0 / " + std::to_string(v.den()) +
           ".0)";
  }

private:
  static long long gcd_ll(long long a, long long b) {
    while (b) { long long t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }

  void param(const Param& p) {
    emit(p.name);
    emit(": ");
    if (p.type == ScalarKind::Index && p.dims.empty()) {
      emit("size");
    } else {
      emit(scalar_name(p.type));
      if (!p.dims.empty()) {
        emit("[");
        for (size_t i = 0; i < p.dims.size(); ++i) {
          if (i) emit(", ");
          expr(p.dims[i], 0);
        }
        emit("]");
      }
    }
    if (!p.mem.empty()) {
      emit(" @");
      emit(p.mem);
    }
  }

  void indent(int depth) {
    for (int i = 0; i < depth * 2; ++i) out_.push_back(' ');
  }

  void emit(const std::string& s) {
    for (char c : s) {
      out_.push_back(c);
      if (c == '\n') {
        ++cur_line_;
        line_start_ = out_.size();
      }
    }
  }

  void begin_span(const void* node) {
    if (!track_.count(node)) return;
    PrintSpan& sp = spans_[node];
    sp.first_line = cur_line_;
    sp.col_begin = (int)(out_.size() - line_start_);
  }
  void end_span(const void* node) {
    if (!track_.count(node)) return;
    PrintSpan& sp = spans_[node];
    // statements end with a newline already consumed by emit()
    if (!out_.empty() && out_.back() == '\n') {
      sp.last_line = cur_line_ - 1;
      sp.col_end = 0;
    } else {
      sp.last_line = cur_line_;
      sp.col_end = (int)(out_.size() - line_start_);
    }
  }

  std::string out_;
  size_t line_start_ = 0;
  int cur_line_ = 0;
  std::set<const void*> track_;
  std::map<const void*, PrintSpan> spans_;
};

inline std::string print_proc(const ProcP& p) {
  Printer pr;
  return pr.proc_text(*p);
}

inline std::string print_expr(const ExprP& e) {
  Printer pr;
  return pr.expr_text(e);
}

inline std::string print_stmt(const StmtP& s) {
  Printer pr;
  return pr.block_text(Block{s});
}

inline std::string print_block(const Block& b) {
  Printer pr;
  return pr.block_text(b);
}

// Collects `p` plus every procedure its calls reference (transitively),
// dependency-first, and prints them as one file.
inline void collect_callees(const Block& b, std::vector<ProcP>& order,
                            std::set<const Procedure*>& seen);

inline void collect_callees_proc(const ProcP& p, std::vector<ProcP>& order,
                                 std::set<const Procedure*>& seen) {
  if (!p || seen.count(p.get())) return;
  seen.insert(p.get());
  collect_callees(p->body, order, seen);
  order.push_back(p);
}

inline void collect_callees(const Block& b, std::vector<ProcP>& order,
                            std::set<const Procedure*>& seen) {
  for (const auto& s : b) {
    if (s->kind == StmtKind::Call && s->callee)
      collect_callees_proc(s->callee, order, seen);
    collect_callees(s->body, order, seen);
    collect_callees(s->orelse, order, seen);
  }
}

inline std::string print_file(const ProcP& p) {
  std::vector<ProcP> order;
  std::set<const Procedure*> seen;
  collect_callees_proc(p, order, seen);
  std::string out;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i) out += "\n";
    out += print_proc(order[i]);
  }
  return out;
}

inline std::string print_file(const std::vector<ProcP>& procs) {
  std::vector<ProcP> order;
  std::set<const Procedure*> seen;
  for (const auto& p : procs) collect_callees_proc(p, order, seen);
  std::string out;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i) out += "\n";
    out += print_proc(order[i]);
  }
  return out;
}

}  // namespace exo2ir

#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "exo2ir/ir.hpp"
#include "exo2ir/parser.hpp"
#include "exo2ir/printer.hpp"

namespace exo2ir::testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(EXO2IR_FIXTURE_DIR) + "/" + name;
}

inline ProcP load_fixture(const std::string& name) {
  return parse_proc(read_file(fixture_path(name)));
}

inline ProcP gemv() { return load_fixture("gemv.exo2ir"); }

// ---------------------------------------------------------------------------
// Random well-formed procedure generator. Used by the round-trip property
// test and the forwarding fuzz. Programs are small loop/if nests over a few
// buffers, with all names unique so edits cannot capture.
// ---------------------------------------------------------------------------

class ProgramGen {
public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  ProcP proc() {
    buffers_.clear();
    iters_.clear();
    next_id_ = 0;
    std::vector<Param> params;
    params.push_back({"n", ScalarKind::Index, {}, ""});
    int nbuf = 1 + (int)(rng_() % 3);
    for (int i = 0; i < nbuf; ++i) {
      std::string name = "b" + std::to_string(i);
      params.push_back(
          {name, ScalarKind::F32, {make_var("n", ScalarKind::Index)}, ""});
      buffers_.push_back(name);
    }
    std::vector<ExprP> asserts;
    asserts.push_back(make_binop(BinOp::Ge, make_var("n", ScalarKind::Index),
                                 make_literal(Rational(4), ScalarKind::Index)));
    Block body = block(2);
    return make_proc("rand_proc", std::move(params), std::move(asserts),
                     std::move(body));
  }

  Block block(int depth) {
    int len = 1 + (int)(rng_() % 3);
    Block b;
    for (int i = 0; i < len; ++i) b.push_back(stmt(depth));
    return b;
  }

  StmtP stmt(int depth) {
    int pick = (int)(rng_() % (depth > 0 ? 6 : 4));
    switch (pick) {
      case 0: return make_pass();
      case 1:
      case 2: {
        bool reduce = pick == 2;
        std::string buf = buffers_[rng_() % buffers_.size()];
        auto idx = index_expr();
        ExprP rhs = value_expr();
        return reduce ? make_reduce(buf, {idx}, rhs)
                      : make_assign(buf, {idx}, rhs);
      }
      case 3: {
        ExprP cond = make_binop(BinOp::Lt, index_expr(), index_expr());
        Block then_b = block(depth - 1);
        Block else_b = (rng_() % 2) ? block(depth - 1) : Block{};
        return make_if(cond, then_b, else_b);
      }
      default: {
        std::string it = "i" + std::to_string(next_id_++);
        iters_.push_back(it);
        Block body = block(depth - 1);
        iters_.pop_back();
        ExprP hi = (rng_() % 2) ? make_var("n", ScalarKind::Index)
                                : make_literal(Rational(2 + (long long)(rng_() % 3)),
                                               ScalarKind::Index);
        return make_for(it, make_literal(Rational(0), ScalarKind::Index), hi,
                        body);
      }
    }
  }

  // Affine, in-bounds-ish index expression over in-scope iterators.
  ExprP index_expr() {
    if (!iters_.empty() && rng_() % 2) {
      ExprP e = make_var(iters_[rng_() % iters_.size()], ScalarKind::Index);
      if (rng_() % 2)
        e = make_binop(BinOp::Add, e,
                       make_literal(Rational((long long)(rng_() % 2)),
                                    ScalarKind::Index));
      return e;
    }
    return make_literal(Rational((long long)(rng_() % 4)), ScalarKind::Index);
  }

  ExprP value_expr() {
    int pick = (int)(rng_() % 3);
    if (pick == 0)
      return make_literal(Rational((long long)(rng_() % 7) - 3, 1 + (long long)(rng_() % 2)),
                          ScalarKind::F32);
    std::string buf = buffers_[rng_() % buffers_.size()];
    ExprP rd = make_read(buf, {index_expr()}, ScalarKind::F32);
    if (pick == 1) return rd;
    return make_binop((rng_() % 2) ? BinOp::Add : BinOp::Mul, rd, value_expr());
  }

  std::mt19937_64& rng() { return rng_; }

private:
  std::mt19937_64 rng_;
  std::vector<std::string> buffers_;
  std::vector<std::string> iters_;
  int next_id_ = 0;
};

}  // namespace exo2ir::testutil

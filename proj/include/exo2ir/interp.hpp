#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/printer.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// Stores and instances.
// ---------------------------------------------------------------------------

struct BufferData {
  std::vector<long long> dims;  // empty for scalars
  std::vector<Rational> vals;
  std::vector<bool> init;

  static BufferData make(std::vector<long long> dims) {
    BufferData b;
    long long n = 1;
    for (long long d : dims) {
      if (d < 1) throw InstanceError("buffer dimension < 1");
      n *= d;
    }
    b.dims = std::move(dims);
    b.vals.assign((size_t)n, Rational(0));
    b.init.assign((size_t)n, false);
    return b;
  }

  friend bool operator==(const BufferData& a, const BufferData& b) {
    return a.dims == b.dims && a.init == b.init && a.vals == b.vals;
  }
};

using BufferStore = std::map<std::string, BufferData>;

struct Instance {
  std::map<std::string, long long> sizes;
  std::map<std::string, Rational> scalars;  // non-buffer numeric params
  BufferStore inputs;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Interpreter: big-step, exact rationals, strict about uninitialized reads
// and out-of-bounds accesses.
// ---------------------------------------------------------------------------

namespace interp_detail {

// A possibly-windowed handle on a buffer. `dims` maps each underlying axis to
// either a fixed index or a running lower bound selected by callee indices.
struct DimMap {
  long long at = 0;
  bool is_range = false;
};

struct BufferRef {
  BufferData* data = nullptr;
  std::vector<DimMap> map;  // one entry per underlying axis

  size_t rank() const {
    size_t r = 0;
    for (const auto& d : map) r += d.is_range ? 1 : 0;
    return r;
  }
};

struct Frame {
  std::map<std::string, long long> sizes;
  std::map<std::string, long long> iters;
  std::map<std::string, Rational> scalars;
  std::map<std::string, BufferRef> buffers;
  std::vector<std::unique_ptr<BufferData>>* arena = nullptr;
};

class Eval {
public:
  explicit Eval(std::vector<std::unique_ptr<BufferData>>& arena)
      : arena_(arena) {}

  void run_proc(const Procedure& p, Frame& f) {
    for (const auto& a : p.asserts) {
      if (!truth(a, f))
        fault("assert violated: " + print_expr(a), f);
    }
    block(p.body, f);
  }

  void block(const Block& b, Frame& f) {
    std::vector<std::string> local;
    for (size_t i = 0; i < b.size(); ++i) {
      path_.push_back((int)i);
      stmt(b[i], f, local);
      path_.pop_back();
    }
    for (const auto& n : local) f.buffers.erase(n);
  }

  void stmt(const StmtP& s, Frame& f, std::vector<std::string>& local) {
    switch (s->kind) {
      case StmtKind::Pass: return;
      case StmtKind::For: {
        long long lo = index(s->lo, f);
        long long hi = index(s->hi, f);
        for (long long i = lo; i < hi; ++i) {
          f.iters[s->name] = i;
          block(s->body, f);
        }
        f.iters.erase(s->name);
        return;
      }
      case StmtKind::If: {
        if (truth(s->cond, f)) block(s->body, f);
        else if (!s->orelse.empty()) block(s->orelse, f);
        return;
      }
      case StmtKind::Alloc: {
        std::vector<long long> dims;
        for (const auto& d : s->idx) {
          long long v = index(d, f);
          if (v < 1)
            fault("allocation '" + s->name + "' has extent " +
                      std::to_string(v),
                  f);
          dims.push_back(v);
        }
        arena_.push_back(
            std::make_unique<BufferData>(BufferData::make(std::move(dims))));
        BufferRef ref;
        ref.data = arena_.back().get();
        for (size_t i = 0; i < ref.data->dims.size(); ++i)
          ref.map.push_back({0, true});
        if (ref.data->dims.empty()) {
          // scalar allocs are one-cell arrays with rank 0
          ref.data->vals.assign(1, Rational(0));
          ref.data->init.assign(1, false);
        }
        f.buffers[s->name] = ref;
        local.push_back(s->name);
        return;
      }
      case StmtKind::Assign:
      case StmtKind::Reduce: {
        Rational v = value(s->rhs, f);
        auto [buf, flat] = locate(s->name, s->idx, f);
        if (s->kind == StmtKind::Reduce) {
          if (!buf->init[flat])
            fault("reduction into uninitialized cell of '" + s->name + "'", f);
          buf->vals[flat] += v;
        } else {
          buf->vals[flat] = v;
          buf->init[flat] = true;
        }
        return;
      }
      case StmtKind::Call: {
        if (!s->callee) fault("call to unresolved '" + s->name + "'", f);
        call(*s->callee, s->args, f);
        return;
      }
    }
  }

  void call(const Procedure& callee, const std::vector<ExprP>& args, Frame& f) {
    if (args.size() != callee.params.size())
      fault("arity mismatch calling '" + callee.name + "'", f);
    Frame g;
    for (size_t i = 0; i < args.size(); ++i) {
      const Param& p = callee.params[i];
      if (p.is_buffer()) {
        g.buffers[p.name] = slice_ref(args[i], f);
      } else if (p.type == ScalarKind::Index) {
        g.sizes[p.name] = index(args[i], f);
      } else {
        g.scalars[p.name] = value(args[i], f);
      }
    }
    run_proc(callee, g);
  }

  BufferRef slice_ref(const ExprP& arg, Frame& f) {
    if (arg->kind != ExprKind::Slice)
      fault("expected slice argument: " + print_expr(arg), f);
    BufferRef base = buffer(arg->name, f);
    BufferRef out;
    out.data = base.data;
    size_t k = 0;  // position among base's range dims
    for (const auto& dm : base.map) {
      if (!dm.is_range) {
        out.map.push_back(dm);
        continue;
      }
      if (k >= arg->dims.size())
        fault("slice rank mismatch on '" + arg->name + "'", f);
      const SliceDim& sd = arg->dims[k];
      long long lo = index(sd.lo, f);
      if (sd.is_point()) {
        out.map.push_back({dm.at + lo, false});
      } else {
        long long hi = index(sd.hi, f);
        if (lo > hi)
          fault("empty slice bounds on '" + arg->name + "'", f);
        out.map.push_back({dm.at + lo, true});
      }
      ++k;
    }
    if (k != arg->dims.size())
      fault("slice rank mismatch on '" + arg->name + "'", f);
    return out;
  }

  std::pair<BufferData*, size_t> locate(const std::string& name,
                                        const std::vector<ExprP>& idx,
                                        Frame& f) {
    BufferRef ref = buffer(name, f);
    std::vector<long long> is;
    for (const auto& e : idx) is.push_back(index(e, f));
    if (is.size() != ref.rank())
      fault("'" + name + "' expects " + std::to_string(ref.rank()) +
                " indices, got " + std::to_string(is.size()),
            f);
    size_t flat = 0;
    size_t k = 0;
    for (size_t d = 0; d < ref.data->dims.size(); ++d) {
      long long i = ref.map[d].is_range ? ref.map[d].at + is[k++]
                                        : ref.map[d].at;
      if (i < 0 || i >= ref.data->dims[d])
        fault("out-of-bounds access " + name + " axis " + std::to_string(d) +
                  " index " + std::to_string(i) + " extent " +
                  std::to_string(ref.data->dims[d]),
              f);
      flat = flat * (size_t)ref.data->dims[d] + (size_t)i;
    }
    return {ref.data, flat};
  }

  BufferRef buffer(const std::string& name, Frame& f) {
    auto it = f.buffers.find(name);
    if (it == f.buffers.end()) fault("unbound buffer '" + name + "'", f);
    return it->second;
  }

  long long index(const ExprP& e, Frame& f) {
    Rational v = value(e, f);
    if (!v.is_integer()) fault("non-integer index " + v.str(), f);
    return v.num();
  }

  bool truth(const ExprP& e, Frame& f) {
    if (e->kind != ExprKind::Binary) fault("bad predicate", f);
    if (e->op == BinOp::And) return truth(e->args[0], f) && truth(e->args[1], f);
    Rational a = value(e->args[0], f);
    Rational b = value(e->args[1], f);
    switch (e->op) {
      case BinOp::Eq: return a == b;
      case BinOp::Ne: return a != b;
      case BinOp::Lt: return a < b;
      case BinOp::Le: return a <= b;
      case BinOp::Gt: return a > b;
      case BinOp::Ge: return a >= b;
      default: fault("bad predicate op", f);
    }
    return false;
  }

  Rational value(const ExprP& e, Frame& f) {
    switch (e->kind) {
      case ExprKind::Literal: return e->value;
      case ExprKind::Var: {
        if (auto it = f.iters.find(e->name); it != f.iters.end())
          return Rational(it->second);
        if (auto it = f.sizes.find(e->name); it != f.sizes.end())
          return Rational(it->second);
        if (auto it = f.scalars.find(e->name); it != f.scalars.end())
          return it->second;
        // rank-0 buffer read through a point view
        if (auto it = f.buffers.find(e->name); it != f.buffers.end())
          return read_cell(e->name, {}, f);
        fault("unbound name '" + e->name + "'", f);
      }
      case ExprKind::Read: return read_cell(e->name, e->args, f);
      case ExprKind::Slice: fault("slice outside call arguments", f);
      case ExprKind::Binary: {
        Rational a = value(e->args[0], f);
        Rational b = value(e->args[1], f);
        switch (e->op) {
          case BinOp::Add: return a + b;
          case BinOp::Sub: return a - b;
          case BinOp::Mul: return a * b;
          case BinOp::Div:
            if (b.is_zero()) fault("division by zero", f);
            if (is_integral(e->type)) return Rational((a / b).floor());
            return a / b;
          case BinOp::Mod: {
            if (b.is_zero()) fault("modulus by zero", f);
            Rational q((a / b).floor());
            return a - q * b;
          }
          default: fault("boolean operator in value position", f);
        }
      }
    }
    fault("unreachable expression kind", f);
  }

  Rational read_cell(const std::string& name, const std::vector<ExprP>& idx,
                     Frame& f) {
    auto [buf, flat] = locate(name, idx, f);
    if (!buf->init[flat])
      fault("read of uninitialized cell of '" + name + "'", f);
    return buf->vals[flat];
  }

  [[noreturn]] void fault(const std::string& msg, Frame&) {
    std::string where;
    for (size_t i = 0; i < path_.size(); ++i) {
      if (i) where += "/";
      where += "body[" + std::to_string(path_[i]) + "]";
    }
    throw RuntimeFault(msg + " at " + where, where);
  }

private:
  std::vector<std::unique_ptr<BufferData>>& arena_;
  std::vector<int> path_;
};

}  // namespace interp_detail

// Deterministic evaluation; returns the final contents of all buffer params.
inline BufferStore interpret(const ProcP& p, const Instance& inst) {
  std::vector<std::unique_ptr<BufferData>> arena;
  interp_detail::Eval ev(arena);
  interp_detail::Frame f;
  f.sizes = inst.sizes;
  f.scalars = inst.scalars;

  BufferStore work = inst.inputs;  // copy: interpret never mutates the input
  for (const auto& prm : p->params) {
    if (prm.is_buffer()) {
      auto it = work.find(prm.name);
      if (it == work.end())
        throw InstanceError("instance is missing buffer '" + prm.name + "'");
      interp_detail::BufferRef ref;
      ref.data = &it->second;
      for (size_t d = 0; d < it->second.dims.size(); ++d)
        ref.map.push_back({0, true});
      f.buffers[prm.name] = ref;
    } else if (prm.type == ScalarKind::Index) {
      if (!inst.sizes.count(prm.name))
        throw InstanceError("instance is missing size '" + prm.name + "'");
    } else {
      if (!inst.scalars.count(prm.name))
        throw InstanceError("instance is missing scalar '" + prm.name + "'");
    }
  }
  ev.run_proc(*p, f);

  BufferStore out;
  for (const auto& prm : p->params)
    if (prm.is_buffer()) out[prm.name] = std::move(work[prm.name]);
  return out;
}

// ---------------------------------------------------------------------------
// Random instances.
// ---------------------------------------------------------------------------

inline Rational small_rational(std::mt19937_64& rng) {
  long long k = (long long)(rng() % 17) - 8;  // [-8, 8]
  long long d = 1 + (long long)(rng() % 3);   // {1, 2, 3}
  return Rational(k, d);
}

inline bool eval_assert_on_sizes(const ExprP& e,
                                 const std::map<std::string, long long>& sizes);

inline long long eval_size_expr(const ExprP& e,
                                const std::map<std::string, long long>& sizes) {
  switch (e->kind) {
    case ExprKind::Literal: return e->value.to_integer();
    case ExprKind::Var: {
      auto it = sizes.find(e->name);
      if (it == sizes.end())
        throw InstanceError("unknown size '" + e->name + "'");
      return it->second;
    }
    case ExprKind::Binary: {
      long long a = eval_size_expr(e->args[0], sizes);
      long long b = eval_size_expr(e->args[1], sizes);
      switch (e->op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: {
          if (b == 0) throw InstanceError("size division by zero");
          return Rational(a, b).floor();
        }
        case BinOp::Mod: {
          if (b == 0) throw InstanceError("size modulus by zero");
          long long q = Rational(a, b).floor();
          return a - q * b;
        }
        default: throw InstanceError("boolean op in size expression");
      }
    }
    default: throw InstanceError("bad size expression");
  }
}

inline bool eval_assert_on_sizes(const ExprP& e,
                                 const std::map<std::string, long long>& sizes) {
  if (e->kind != ExprKind::Binary) throw InstanceError("bad assert");
  if (e->op == BinOp::And)
    return eval_assert_on_sizes(e->args[0], sizes) &&
           eval_assert_on_sizes(e->args[1], sizes);
  long long a = eval_size_expr(e->args[0], sizes);
  long long b = eval_size_expr(e->args[1], sizes);
  switch (e->op) {
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    case BinOp::Lt: return a < b;
    case BinOp::Le: return a <= b;
    case BinOp::Gt: return a > b;
    case BinOp::Ge: return a >= b;
    default: throw InstanceError("bad assert op");
  }
}

// Draws sizes from [size_range.first, size_range.second], rounding up to the
// modulus when an assert demands divisibility, then fills buffers with small
// rationals k/d, k in [-8,8], d in {1,2,3}.
inline Instance random_instance(const ProcP& p, std::uint64_t seed,
                                std::pair<long long, long long> size_range = {1,
                                                                              12}) {
  if (size_range.first > size_range.second || size_range.first < 1)
    throw InstanceError("empty size range");
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
  for (int attempt = 0; attempt < 200; ++attempt) {
    Instance inst;
    inst.seed = seed;
    std::uniform_int_distribution<long long> dist(size_range.first,
                                                  size_range.second);
    for (const auto& prm : p->params)
      if (!prm.is_buffer() && prm.type == ScalarKind::Index)
        inst.sizes[prm.name] = dist(rng);

    // honor divisibility asserts (S % c == 0) by rounding up
    for (const auto& a : p->asserts) {
      if (a->kind == ExprKind::Binary && a->op == BinOp::Eq &&
          a->args[0]->kind == ExprKind::Binary &&
          a->args[0]->op == BinOp::Mod &&
          a->args[0]->args[0]->kind == ExprKind::Var &&
          a->args[0]->args[1]->kind == ExprKind::Literal &&
          a->args[1]->kind == ExprKind::Literal &&
          a->args[1]->value == Rational(0)) {
        const std::string& name = a->args[0]->args[0]->name;
        long long c = a->args[0]->args[1]->value.to_integer();
        auto it = inst.sizes.find(name);
        if (it != inst.sizes.end() && c > 0) {
          long long r = it->second % c;
          if (r != 0) it->second += c - r;
        }
      }
    }

    bool ok = true;
    for (const auto& a : p->asserts)
      if (!eval_assert_on_sizes(a, inst.sizes)) ok = false;
    if (!ok) continue;

    try {
      for (const auto& prm : p->params) {
        if (prm.is_buffer()) {
          std::vector<long long> dims;
          for (const auto& d : prm.dims)
            dims.push_back(eval_size_expr(d, inst.sizes));
          BufferData b = BufferData::make(dims);
          for (auto& v : b.vals) v = small_rational(rng);
          b.init.assign(b.init.size(), true);
          inst.inputs[prm.name] = std::move(b);
        } else if (prm.type != ScalarKind::Index) {
          inst.scalars[prm.name] = small_rational(rng);
        }
      }
    } catch (const InstanceError&) {
      continue;  // e.g. a dimension evaluated below 1; redraw
    }
    return inst;
  }
  throw InstanceError("no satisfying sizes for '" + p->name + "' in range [" +
                      std::to_string(size_range.first) + ", " +
                      std::to_string(size_range.second) + "]");
}

// ---------------------------------------------------------------------------
// Equivalence checking: the oracle for every scheduling primitive.
// ---------------------------------------------------------------------------

struct EquivReport {
  bool equal = true;
  int trials = 0;
  int first_bad_trial = -1;
  std::string detail;
};

inline bool signature_compatible(const Procedure& a, const Procedure& b) {
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    const Param& pa = a.params[i];
    const Param& pb = b.params[i];
    if (pa.name != pb.name) return false;
    if (pa.is_buffer() != pb.is_buffer()) return false;
    if (pa.dims.size() != pb.dims.size()) return false;
    bool size_a = !pa.is_buffer() && pa.type == ScalarKind::Index;
    bool size_b = !pb.is_buffer() && pb.type == ScalarKind::Index;
    if (size_a != size_b) return false;
  }
  return true;
}

inline EquivReport check_equiv(const ProcP& p1, const ProcP& p2, int trials = 20,
                               std::uint64_t seed = 0,
                               std::pair<long long, long long> size_range = {
                                   1, 12}) {
  EquivReport rep;
  rep.trials = trials;
  if (!signature_compatible(*p1, *p2)) {
    rep.equal = false;
    rep.detail = "parameter signatures differ";
    return rep;
  }
  for (int t = 0; t < trials; ++t) {
    Instance inst = random_instance(p1, seed + (std::uint64_t)t, size_range);
    BufferStore s1, s2;
    try {
      s1 = interpret(p1, inst);
    } catch (const RuntimeFault& e) {
      rep.equal = false;
      rep.first_bad_trial = t;
      rep.detail = "'" + p1->name + "' faulted: " + e.what();
      return rep;
    }
    try {
      s2 = interpret(p2, inst);
    } catch (const RuntimeFault& e) {
      rep.equal = false;
      rep.first_bad_trial = t;
      rep.detail = "'" + p2->name + "' (candidate) faulted: " + e.what();
      return rep;
    }
    if (!(s1 == s2)) {
      rep.equal = false;
      rep.first_bad_trial = t;
      for (const auto& [name, buf] : s1) {
        const auto& other = s2.at(name);
        if (!(buf == other)) {
          for (size_t i = 0; i < buf.vals.size(); ++i) {
            if (buf.init[i] != other.init[i] ||
                (buf.init[i] && buf.vals[i] != other.vals[i])) {
              rep.detail = "buffer '" + name + "' differs at flat index " +
                           std::to_string(i) + ": " +
                           (buf.init[i] ? buf.vals[i].str() : "<uninit>") +
                           " vs " +
                           (other.init[i] ? other.vals[i].str() : "<uninit>");
              break;
            }
          }
          break;
        }
      }
      return rep;
    }
  }
  return rep;
}

}  // namespace exo2ir

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "exo2ir/affine.hpp"
#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"

namespace exo2ir {

// form >= 0, or form == 0 when is_eq
struct LinearConstraint {
  AffineForm form;
  bool is_eq = false;

  std::string str() const {
    return form.str() + (is_eq ? " == 0" : " >= 0");
  }
};

// divisor | form
struct Divisibility {
  long long divisor;
  AffineForm form;

  std::string str() const {
    return std::to_string(divisor) + " | " + form.str();
  }
};

enum class ProveResult { Valid, Unknown };

// Conjunction of linear facts plus divisibility facts, with the atom table
// shared by every form in it.
class FactSet {
public:
  AtomTable atoms;

  void add(LinearConstraint c) { cons_.push_back(std::move(c)); }
  void add_div(Divisibility d) {
    if (d.divisor > 1) divs_.push_back(std::move(d));
  }

  // lo <= v < hi
  void add_iter_range(const std::string& v, const AffineForm& lo,
                      const AffineForm& hi) {
    add({AffineForm::var(v) - lo, false});
    add({hi - AffineForm::var(v) - AffineForm(Rational(1)), false});
  }

  // every atom carries its defining range facts:
  //   q = e div c:  c*q <= e <= c*q + c-1
  //   m = e mod c:  0 <= m <= c-1  and  c | (e - m)
  void close_atoms() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::string> names;
      for (const auto& [name, info] : atoms.all())
        if (!closed_.count(name)) names.push_back(name);
      for (const auto& name : names) {
        closed_.insert(name);
        changed = true;
        const AtomInfo& info = *atoms.lookup(name);
        AffineForm q = AffineForm::var(name);
        Rational c{info.divisor};
        if (info.kind == AtomInfo::FloorDiv) {
          add({info.inner - q * c, false});                       // e - c q >= 0
          add({q * c + AffineForm(c - Rational(1)) - info.inner,  // c q + c-1 >= e
               false});
        } else {
          add({q, false});
          add({AffineForm(c - Rational(1)) - q, false});
          add_div({info.divisor, info.inner - q});
        }
      }
    }
  }

  const std::vector<LinearConstraint>& constraints() const { return cons_; }
  const std::vector<Divisibility>& divisibilities() const { return divs_; }

  // Adds a comparison/`and` predicate as facts (used for asserts and guard
  // contexts). Non-affine operands are skipped (conservative).
  void assume(const ExprP& pred) {
    if (pred->kind != ExprKind::Binary) return;
    if (pred->op == BinOp::And) {
      assume(pred->args[0]);
      assume(pred->args[1]);
      return;
    }
    if (!is_comparison(pred->op)) return;
    // special-case divisibility shape: e % c == 0
    if (pred->op == BinOp::Eq) {
      const ExprP* mod_side = nullptr;
      const ExprP* zero_side = nullptr;
      if (pred->args[0]->kind == ExprKind::Binary &&
          pred->args[0]->op == BinOp::Mod) {
        mod_side = &pred->args[0];
        zero_side = &pred->args[1];
      } else if (pred->args[1]->kind == ExprKind::Binary &&
                 pred->args[1]->op == BinOp::Mod) {
        mod_side = &pred->args[1];
        zero_side = &pred->args[0];
      }
      if (mod_side && (*zero_side)->kind == ExprKind::Literal &&
          (*zero_side)->value == Rational(0)) {
        NormResult inner = normalize((*mod_side)->args[0], atoms);
        if (inner && (*mod_side)->args[1]->kind == ExprKind::Literal) {
          add_div({(*mod_side)->args[1]->value.to_integer(), *inner});
          close_atoms();
          return;
        }
      }
    }
    NormResult a = normalize(pred->args[0], atoms);
    NormResult b = normalize(pred->args[1], atoms);
    if (!a || !b) return;
    switch (pred->op) {
      case BinOp::Eq: add({*a - *b, true}); break;
      case BinOp::Le: add({*b - *a, false}); break;
      case BinOp::Lt: add({*b - *a - AffineForm(Rational(1)), false}); break;
      case BinOp::Ge: add({*a - *b, false}); break;
      case BinOp::Gt: add({*a - *b - AffineForm(Rational(1)), false}); break;
      case BinOp::Ne: break;  // disjunctive; dropped (conservative)
      default: break;
    }
    close_atoms();
  }

  // Assume the NEGATION of a comparison (used for else-branches).
  void assume_not(const ExprP& pred) {
    if (pred->kind != ExprKind::Binary || !is_comparison(pred->op)) return;
    NormResult a = normalize(pred->args[0], atoms);
    NormResult b = normalize(pred->args[1], atoms);
    if (!a || !b) return;
    switch (pred->op) {
      case BinOp::Le: add({*a - *b - AffineForm(Rational(1)), false}); break;
      case BinOp::Lt: add({*a - *b, false}); break;
      case BinOp::Ge: add({*b - *a - AffineForm(Rational(1)), false}); break;
      case BinOp::Gt: add({*b - *a, false}); break;
      case BinOp::Ne: add({*a - *b, true}); break;
      case BinOp::Eq: break;  // disjunctive; dropped (conservative)
      default: break;
    }
    close_atoms();
  }

  std::string str() const {
    std::string out;
    for (const auto& c : cons_) out += "  " + c.str() + "\n";
    for (const auto& d : divs_) out += "  " + d.str() + "\n";
    return out;
  }

private:
  std::vector<LinearConstraint> cons_;
  std::vector<Divisibility> divs_;
  std::set<std::string> closed_;
};

// ---------------------------------------------------------------------------
// Feasibility core: rational Fourier-Motzkin with integer tightening on
// constant bounds, GCD tests on equalities, and a bounded exhaustive
// fallback when every variable has proven constant bounds.
// ---------------------------------------------------------------------------

namespace prove_detail {

constexpr size_t kMaxConstraints = 2000;
constexpr long long kMaxEnumPoints = 200000;

inline long long gcd_ll(long long a, long long b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// scale to integer coefficients
inline AffineForm integerize(const AffineForm& f) {
  long long lcm = 1;
  auto fold = [&](const Rational& r) {
    long long d = r.den();
    lcm = lcm / gcd_ll(lcm, d) * d;
  };
  fold(f.constant());
  for (const auto& [v, c] : f.coeffs()) fold(c);
  return f * Rational(lcm);
}

enum class Feas { Infeasible, Maybe };

struct System {
  std::vector<LinearConstraint> cons;
  std::vector<Divisibility> divs;
  std::vector<std::string>* log = nullptr;

  void note(const std::string& s) {
    if (log) log->push_back(s);
  }
};

// Integer tightening: scale to integer coefficients, divide by the content
// (gcd of the variable coefficients), and floor the constant. Sound because
// all variables range over the integers.
inline void tighten(System& sys) {
  for (auto& c : sys.cons) {
    if (c.is_eq || c.form.coeffs().empty()) continue;
    AffineForm f = integerize(c.form);
    long long g = 0;
    for (const auto& [v, k] : f.coeffs()) g = gcd_ll(g, k.num());
    if (g <= 0) continue;
    AffineForm out(Rational((f.constant() / Rational(g)).floor()));
    for (const auto& [v, k] : f.coeffs())
      out += AffineForm::var(v, Rational(k.num() / g));
    c.form = std::move(out);
  }
}

inline Feas check_constants(System& sys) {
  std::vector<LinearConstraint> keep;
  for (auto& c : sys.cons) {
    if (!c.form.is_constant()) {
      keep.push_back(std::move(c));
      continue;
    }
    if (c.is_eq && !c.form.constant().is_zero()) {
      sys.note("contradiction: " + c.str());
      return Feas::Infeasible;
    }
    if (!c.is_eq && c.form.constant() < Rational(0)) {
      sys.note("contradiction: " + c.str());
      return Feas::Infeasible;
    }
  }
  sys.cons = std::move(keep);
  return Feas::Maybe;
}

// gcd test on integer equalities
inline Feas gcd_test(System& sys) {
  for (const auto& c : sys.cons) {
    if (!c.is_eq) continue;
    AffineForm f = integerize(c.form);
    if (f.is_constant()) continue;
    long long g = 0;
    for (const auto& [v, k] : f.coeffs()) g = gcd_ll(g, k.num());
    if (g > 1 && f.constant().num() % g != 0) {
      sys.note("gcd test fails: " + c.str());
      return Feas::Infeasible;
    }
  }
  return Feas::Maybe;
}

// constant bounds per variable from single-var constraints
struct Box {
  std::map<std::string, std::pair<long long, long long>> range;
  bool total = false;
};

inline Box constant_box(const System& sys) {
  std::map<std::string, long long> lo, hi;
  std::set<std::string> vars;
  for (const auto& c : sys.cons)
    for (const auto& [v, k] : c.form.coeffs()) vars.insert(v);
  for (const auto& d : sys.divs)
    for (const auto& [v, k] : d.form.coeffs()) vars.insert(v);
  for (const auto& c : sys.cons) {
    if (c.form.coeffs().size() != 1) continue;
    const auto& [v, a] = *c.form.coeffs().begin();
    Rational b = c.form.constant();
    if (c.is_eq) {
      Rational x = b * Rational(-1) / a;
      if (!x.is_integer()) continue;
      if (!lo.count(v) || lo[v] < x.num()) lo[v] = x.num();
      if (!hi.count(v) || hi[v] > x.num()) hi[v] = x.num();
      continue;
    }
    if (a > Rational(0)) {
      long long bound = (b * Rational(-1) / a).ceil();
      if (!lo.count(v) || lo[v] < bound) lo[v] = bound;
    } else {
      long long bound = (b / (a * Rational(-1))).floor();
      if (!hi.count(v) || hi[v] > bound) hi[v] = bound;
    }
  }
  Box box;
  box.total = true;
  for (const auto& v : vars) {
    if (!lo.count(v) || !hi.count(v)) {
      box.total = false;
      continue;
    }
    box.range[v] = {lo[v], hi[v]};
  }
  return box;
}

inline bool eval_point(const System& sys,
                       const std::map<std::string, long long>& pt) {
  for (const auto& c : sys.cons) {
    Rational acc = c.form.constant();
    for (const auto& [v, k] : c.form.coeffs()) acc += k * Rational(pt.at(v));
    if (c.is_eq ? !acc.is_zero() : acc < Rational(0)) return false;
  }
  for (const auto& d : sys.divs) {
    Rational acc = d.form.constant();
    for (const auto& [v, k] : d.form.coeffs()) acc += k * Rational(pt.at(v));
    if (!acc.is_integer() || acc.num() % d.divisor != 0) return false;
  }
  return true;
}

inline Feas enumerate_box(System& sys, const Box& box) {
  long long points = 1;
  for (const auto& [v, r] : box.range) {
    if (r.second < r.first) {
      sys.note("empty box on " + v);
      return Feas::Infeasible;
    }
    points *= (r.second - r.first + 1);
    if (points > kMaxEnumPoints) return Feas::Maybe;
  }
  std::vector<std::string> vars;
  for (const auto& [v, r] : box.range) vars.push_back(v);
  std::map<std::string, long long> pt;
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == vars.size()) return eval_point(sys, pt);
    auto [a, b] = box.range.at(vars[i]);
    for (long long x = a; x <= b; ++x) {
      pt[vars[i]] = x;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (rec(0)) {
    sys.note("integer point satisfies the system");
    return Feas::Maybe;
  }
  sys.note("exhaustive enumeration over the variable box found no point");
  return Feas::Infeasible;
}

// single-variable divisibility feasibility: d | (a v + b) with gcd test
inline Feas div_quick_checks(System& sys) {
  for (const auto& d : sys.divs) {
    AffineForm f = integerize(d.form);
    if (f.is_constant()) {
      if (f.constant().num() % d.divisor != 0) {
        sys.note("divisibility contradiction: " + d.str());
        return Feas::Infeasible;
      }
      continue;
    }
    if (f.coeffs().size() == 1) {
      long long a = f.coeffs().begin()->second.num();
      long long g = gcd_ll(a, d.divisor);
      if (f.constant().num() % g != 0) {
        sys.note("divisibility gcd contradiction: " + d.str());
        return Feas::Infeasible;
      }
    }
  }
  return Feas::Maybe;
}

inline Feas feasible(System sys) {
  tighten(sys);
  if (check_constants(sys) == Feas::Infeasible) return Feas::Infeasible;
  if (gcd_test(sys) == Feas::Infeasible) return Feas::Infeasible;
  if (div_quick_checks(sys) == Feas::Infeasible) return Feas::Infeasible;

  // exhaustive integer check when the box is small; this honors
  // divisibility facts exactly
  Box box = constant_box(sys);
  if (box.total && !box.range.empty()) {
    Feas f = enumerate_box(sys, box);
    if (f == Feas::Infeasible) return f;
    // a Maybe from enumeration that actually scanned every point is definite
    long long points = 1;
    bool scanned = true;
    for (const auto& [v, r] : box.range) {
      points *= (r.second - r.first + 1);
      if (points > kMaxEnumPoints) scanned = false;
    }
    if (scanned) return Feas::Maybe;  // genuine integer point exists
  }

  // rational Fourier-Motzkin
  System work = sys;
  for (int round = 0; round < 64; ++round) {
    tighten(work);
    if (check_constants(work) == Feas::Infeasible) return Feas::Infeasible;
    if (gcd_test(work) == Feas::Infeasible) return Feas::Infeasible;

    std::set<std::string> vars;
    for (const auto& c : work.cons)
      for (const auto& [v, k] : c.form.coeffs()) vars.insert(v);
    if (vars.empty()) break;

    // substitute an equality when available
    bool substituted = false;
    for (size_t i = 0; i < work.cons.size() && !substituted; ++i) {
      if (!work.cons[i].is_eq || work.cons[i].form.coeffs().empty()) continue;
      std::string v = work.cons[i].form.coeffs().begin()->first;
      Rational a = work.cons[i].form.coeffs().begin()->second;
      AffineForm repl =
          (work.cons[i].form - AffineForm::var(v, a)) * (Rational(-1) / a);
      work.note("substituting " + v + " := " + repl.str());
      work.cons.erase(work.cons.begin() + (long)i);
      for (auto& c : work.cons) c.form = c.form.subst(v, repl);
      for (auto& dv : work.divs) dv.form = dv.form.subst(v, repl);
      substituted = true;
    }
    if (substituted) continue;

    // pick the variable with the fewest pos*neg products
    std::string best;
    size_t best_cost = SIZE_MAX;
    for (const auto& v : vars) {
      size_t pos = 0, neg = 0;
      for (const auto& c : work.cons) {
        Rational k = c.form.coeff(v);
        if (k > Rational(0)) ++pos;
        else if (k < Rational(0)) ++neg;
      }
      size_t cost = pos * neg + (pos + neg);
      if (cost < best_cost) {
        best_cost = cost;
        best = v;
      }
    }
    work.note("eliminating " + best);

    std::vector<LinearConstraint> rest, P, N;
    for (const auto& c : work.cons) {
      Rational k = c.form.coeff(best);
      if (k.is_zero()) rest.push_back(c);
      else if (k > Rational(0)) P.push_back(c);
      else N.push_back(c);
    }
    for (const auto& p : P)
      for (const auto& n : N) {
        Rational a = p.form.coeff(best);
        Rational cneg = n.form.coeff(best) * Rational(-1);
        LinearConstraint combo{p.form * cneg + n.form * a, false};
        combo.form = combo.form.subst(best, AffineForm(Rational(0)));
        rest.push_back(std::move(combo));
      }
    // drop divisibility facts mentioning an eliminated unbounded variable
    std::vector<Divisibility> divs_keep;
    for (const auto& dv : work.divs)
      if (dv.form.coeff(best).is_zero()) divs_keep.push_back(dv);
    work.divs = std::move(divs_keep);
    work.cons = std::move(rest);
    if (work.cons.size() > kMaxConstraints) return Feas::Maybe;
  }
  if (check_constants(work) == Feas::Infeasible) return Feas::Infeasible;
  return Feas::Maybe;
}

}  // namespace prove_detail

struct ProveOutcome {
  ProveResult result;
  std::string trace;
};

// "valid" only if `goal >= 0` (or == 0) holds for every integer assignment
// satisfying the facts: decided by refuting facts + !goal.
inline ProveOutcome prove_constraint(const FactSet& facts,
                                     const LinearConstraint& goal) {
  using namespace prove_detail;
  std::vector<std::string> log;
  auto refute = [&](LinearConstraint negated) -> bool {
    System sys;
    sys.cons = facts.constraints();
    sys.divs = facts.divisibilities();
    sys.log = &log;
    sys.cons.push_back(std::move(negated));
    return feasible(std::move(sys)) == Feas::Infeasible;
  };

  bool ok;
  if (goal.is_eq) {
    // !(f == 0)  ==  f <= -1  or  f >= 1
    LinearConstraint low{AffineForm(Rational(-1)) - goal.form, false};
    LinearConstraint high{goal.form - AffineForm(Rational(1)), false};
    log.push_back("refuting " + goal.form.str() + " <= -1");
    bool a = refute(low);
    log.push_back(a ? "  refuted" : "  not refuted");
    log.push_back("refuting " + goal.form.str() + " >= 1");
    bool b = a && refute(high);
    if (a) log.push_back(b ? "  refuted" : "  not refuted");
    ok = a && b;
  } else {
    // !(f >= 0)  ==  f <= -1
    log.push_back("refuting " + goal.form.str() + " <= -1");
    ok = refute({AffineForm(Rational(-1)) - goal.form, false});
    log.push_back(ok ? "  refuted" : "  not refuted");
  }
  std::string trace = "facts:\n" + facts.str() + "goal: " + goal.str() + "\n";
  for (const auto& l : log) trace += l + "\n";
  return {ok ? ProveResult::Valid : ProveResult::Unknown, std::move(trace)};
}

// Predicate entry point: comparisons, `and` conjunctions, and the
// divisibility shape e % c == 0.
inline ProveOutcome prove(const FactSet& facts, const ExprP& pred) {
  FactSet work = facts;  // atoms interned during normalization live here
  if (pred->kind != ExprKind::Binary)
    return {ProveResult::Unknown, "goal is not a predicate"};
  if (pred->op == BinOp::And) {
    ProveOutcome a = prove(facts, pred->args[0]);
    if (a.result != ProveResult::Valid) return a;
    ProveOutcome b = prove(facts, pred->args[1]);
    b.trace = a.trace + b.trace;
    return b;
  }
  if (!is_comparison(pred->op))
    return {ProveResult::Unknown, "goal is not a comparison"};

  // divisibility goal: e % c == 0
  if (pred->op == BinOp::Eq) {
    const ExprP& l = pred->args[0];
    const ExprP& r = pred->args[1];
    const ExprP* mod_e = nullptr;
    if (l->kind == ExprKind::Binary && l->op == BinOp::Mod &&
        r->kind == ExprKind::Literal && r->value == Rational(0))
      mod_e = &l;
    else if (r->kind == ExprKind::Binary && r->op == BinOp::Mod &&
             l->kind == ExprKind::Literal && l->value == Rational(0))
      mod_e = &r;
    if (mod_e) {
      NormResult inner = normalize((*mod_e)->args[0], work.atoms);
      long long c = (*mod_e)->args[1]->value.to_integer();
      if (inner) {
        // coefficient-wise divisibility, possibly after canceling one
        // divisibility fact
        auto divisible = [&](const AffineForm& f) {
          AffineForm g = prove_detail::integerize(f);
          if (!(g == f)) return false;  // fractional coefficients
          if (!f.constant().is_integer() || f.constant().num() % c != 0)
            return false;
          for (const auto& [v, k] : f.coeffs())
            if (!k.is_integer() || k.num() % c != 0) return false;
          return true;
        };
        if (divisible(*inner))
          return {ProveResult::Valid, "coefficients divisible by " +
                                          std::to_string(c)};
        for (const auto& d : work.divisibilities()) {
          if (d.divisor % c != 0) continue;
          // find lambda canceling one variable of the fact
          for (const auto& [v, k] : d.form.coeffs()) {
            Rational iv = inner->coeff(v);
            if (iv.is_zero() || k.is_zero()) continue;
            Rational lambda = iv / k;
            if (!lambda.is_integer()) continue;
            AffineForm res = *inner - d.form * lambda;
            if (divisible(res))
              return {ProveResult::Valid,
                      "divisible modulo fact " + d.str()};
          }
        }
        return {ProveResult::Unknown,
                "cannot establish " + std::to_string(c) + " | " +
                    inner->str() + "\nfacts:\n" + work.str()};
      }
      return {ProveResult::Unknown, "non-affine modulus operand"};
    }
  }

  NormResult a = normalize(pred->args[0], work.atoms);
  NormResult b = normalize(pred->args[1], work.atoms);
  if (!a || !b) return {ProveResult::Unknown, "non-affine goal operand"};
  work.close_atoms();

  switch (pred->op) {
    case BinOp::Le: return prove_constraint(work, {*b - *a, false});
    case BinOp::Lt:
      return prove_constraint(work,
                              {*b - *a - AffineForm(Rational(1)), false});
    case BinOp::Ge: return prove_constraint(work, {*a - *b, false});
    case BinOp::Gt:
      return prove_constraint(work,
                              {*a - *b - AffineForm(Rational(1)), false});
    case BinOp::Eq: return prove_constraint(work, {*a - *b, true});
    case BinOp::Ne: {
      // valid iff the equality system is infeasible
      prove_detail::System sys;
      std::vector<std::string> log;
      sys.cons = work.constraints();
      sys.divs = work.divisibilities();
      sys.log = &log;
      sys.cons.push_back({*a - *b, true});
      bool ok = prove_detail::feasible(std::move(sys)) ==
                prove_detail::Feas::Infeasible;
      std::string trace = "facts:\n" + work.str() + "goal: " + a->str() +
                          " != " + b->str() + "\n";
      for (const auto& l : log) trace += l + "\n";
      return {ok ? ProveResult::Valid : ProveResult::Unknown,
              std::move(trace)};
    }
    default: return {ProveResult::Unknown, "bad predicate"};
  }
}

}  // namespace exo2ir

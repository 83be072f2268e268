#include <gtest/gtest.h>

#include <random>

#include "exo2ir/affine.hpp"
#include "exo2ir/analysis.hpp"
#include "exo2ir/parser.hpp"
#include "exo2ir/prove.hpp"
#include "testutil.hpp"

namespace exo2ir {
namespace {

ScopeEnv env_with(std::initializer_list<const char*> names) {
  ScopeEnv env;
  for (const char* n : names)
    env[n] = {Binding::SizeParam, ScalarKind::Index, 0};
  return env;
}

AffineForm norm(const std::string& text, AtomTable& atoms,
                std::initializer_list<const char*> names = {"io", "ii", "i",
                                                            "k", "M", "N",
                                                            "n"}) {
  ExprP e = parse_expr_text(text, env_with(names));
  NormResult r = normalize(e, atoms);
  EXPECT_TRUE(r.has_value()) << text;
  return *r;
}

TEST(Affine, NormalizeLinearCombination) {
  AtomTable atoms;
  AffineForm f = norm("32 * io + ii + 1", atoms);
  EXPECT_EQ(f.constant(), Rational(1));
  EXPECT_EQ(f.coeff("io"), Rational(32));
  EXPECT_EQ(f.coeff("ii"), Rational(1));
}

TEST(Affine, CancellationYieldsConstant) {
  AtomTable atoms;
  AffineForm f = norm("i - i", atoms);
  EXPECT_TRUE(f.is_constant());
  EXPECT_TRUE(f.constant().is_zero());
}

TEST(Affine, DistributesConstants) {
  AtomTable atoms;
  AffineForm f = norm("2 * (io + 3) - io", atoms);
  EXPECT_EQ(f.coeff("io"), Rational(1));
  EXPECT_EQ(f.constant(), Rational(6));
}

TEST(Affine, NonAffineProductRejected) {
  AtomTable atoms;
  ExprP e = parse_expr_text("io * ii", env_with({"io", "ii"}));
  EXPECT_FALSE(normalize(e, atoms).has_value());
}

TEST(Affine, DivModBecomeAtomsWithFacts) {
  FactSet facts;
  AffineForm f = norm("k / 8", facts.atoms);
  ASSERT_EQ(f.coeffs().size(), 1u);
  facts.close_atoms();
  EXPECT_GE(facts.constraints().size(), 2u);  // c*q <= k <= c*q + 7
}

// (8*io + ii) with io := k/8, ii := k%8 simplifies to k given range facts.
// Oracle: enumerate k in [0, 64) and compare values.
TEST(Affine, DivModRecombination) {
  FactSet facts;
  facts.assume(parse_expr_text("k >= 0", env_with({"k"})));
  facts.assume(parse_expr_text("k < 64", env_with({"k"})));
  ExprP e = parse_expr_text("8 * (k / 8) + k % 8", env_with({"k"}));
  ExprP simplified = simplify_index(e, facts);
  ASSERT_NE(simplified, nullptr);
  EXPECT_EQ(print_expr(simplified), "k");
  for (long long k = 0; k < 64; ++k) {
    long long lhs = 8 * (k / 8) + k % 8;
    EXPECT_EQ(lhs, k);
  }
}

TEST(Prove, DivisibilityRestatement) {
  FactSet facts;
  facts.assume(parse_expr_text("M % 8 == 0", env_with({"M"})));
  facts.assume(parse_expr_text("M >= 8", env_with({"M"})));
  ProveOutcome out = prove(facts, parse_expr_text("M % 8 == 0", env_with({"M"})));
  EXPECT_EQ(out.result, ProveResult::Valid);
}

TEST(Prove, BoundsFromLoopRangeFacts) {
  // knowing 0 <= ii < 32:  32*io <= 32*io + ii + 2 < 32*io + 34
  FactSet facts;
  facts.assume(parse_expr_text("ii >= 0", env_with({"ii", "io"})));
  facts.assume(parse_expr_text("ii < 32", env_with({"ii", "io"})));
  EXPECT_EQ(prove(facts, parse_expr_text("32 * io <= 32 * io + ii + 2",
                                         env_with({"ii", "io"})))
                .result,
            ProveResult::Valid);
  EXPECT_EQ(prove(facts, parse_expr_text("32 * io + ii + 2 < 32 * io + 34",
                                         env_with({"ii", "io"})))
                .result,
            ProveResult::Valid);
}

TEST(Prove, UnconstrainedIsUnknown) {
  FactSet facts;
  ProveOutcome out = prove(facts, parse_expr_text("N >= 1", env_with({"N"})));
  EXPECT_EQ(out.result, ProveResult::Unknown);
  EXPECT_FALSE(out.trace.empty());
}

TEST(Prove, DivisibilityOfScaledDifference) {
  FactSet facts;
  facts.assume(parse_expr_text("M % 8 == 0", env_with({"M", "q"})));
  // 8 | (M - 8*q)
  EXPECT_EQ(prove(facts, parse_expr_text("(M - 8 * q) % 8 == 0",
                                         env_with({"M", "q"})))
                .result,
            ProveResult::Valid);
}

TEST(Prove, ParityContradiction) {
  // 2i == 2i' + 1 has no integer solution (gcd test)
  FactSet facts;
  facts.assume(parse_expr_text("i >= 0", env_with({"i", "j"})));
  facts.assume(parse_expr_text("j >= 0", env_with({"i", "j"})));
  EXPECT_EQ(
      prove(facts, parse_expr_text("2 * i != 2 * j + 1", env_with({"i", "j"})))
          .result,
      ProveResult::Valid);
}

TEST(Prove, MonotonicUnderMoreFacts) {
  for (int extra = 0; extra < 3; ++extra) {
    FactSet facts;
    facts.assume(parse_expr_text("ii >= 0", env_with({"ii", "io", "M"})));
    facts.assume(parse_expr_text("ii < 32", env_with({"ii", "io", "M"})));
    if (extra > 0)
      facts.assume(parse_expr_text("io >= 0", env_with({"ii", "io", "M"})));
    if (extra > 1)
      facts.assume(parse_expr_text("M % 8 == 0", env_with({"ii", "io", "M"})));
    EXPECT_EQ(prove(facts, parse_expr_text("ii <= 31", env_with({"ii", "io",
                                                                 "M"})))
                  .result,
              ProveResult::Valid)
        << "extra=" << extra;
  }
}

// ---------------------------------------------------------------------------
// Acceptance #11: analysis soundness fuzz. 500 random affine predicates and
// dependence-style queries cross-checked against exhaustive enumeration over
// variable boxes of side <= 8. Unknowns are permitted; unsound Valid /
// Independent verdicts are not.
// ---------------------------------------------------------------------------

struct RandomSystem {
  std::vector<std::string> vars;
  std::map<std::string, std::pair<long long, long long>> box;
  FactSet facts;
  std::vector<std::pair<long long, ExprP>> div_facts;  // (divisor, expr)
};

ExprP rand_affine(std::mt19937_64& rng, const std::vector<std::string>& vars,
                  int max_terms = 3) {
  ScopeEnv env;
  for (const auto& v : vars) env[v] = {Binding::SizeParam, ScalarKind::Index, 0};
  ExprP acc = make_literal(Rational((long long)(rng() % 9) - 4),
                           ScalarKind::Index);
  int terms = 1 + (int)(rng() % max_terms);
  for (int t = 0; t < terms; ++t) {
    const std::string& v = vars[rng() % vars.size()];
    long long coeff = (long long)(rng() % 7) - 3;
    if (coeff == 0) coeff = 1;
    ExprP term = make_binop(BinOp::Mul,
                            make_literal(Rational(coeff), ScalarKind::Index),
                            make_var(v, ScalarKind::Index));
    acc = make_binop(BinOp::Add, acc, term);
  }
  if (rng() % 4 == 0) {  // sprinkle a div or mod atom
    long long c = 2 + (long long)(rng() % 3);
    acc = make_binop(rng() % 2 ? BinOp::Div : BinOp::Mod, acc,
                     make_literal(Rational(c), ScalarKind::Index));
  }
  return acc;
}

RandomSystem random_system(std::mt19937_64& rng) {
  RandomSystem sys;
  int nvars = 1 + (int)(rng() % 3);
  for (int i = 0; i < nvars; ++i) sys.vars.push_back("v" + std::to_string(i));
  ScopeEnv env;
  for (const auto& v : sys.vars)
    env[v] = {Binding::SizeParam, ScalarKind::Index, 0};
  for (const auto& v : sys.vars) {
    long long lo = (long long)(rng() % 5) - 2;
    long long hi = lo + 1 + (long long)(rng() % 7);  // side <= 8
    sys.box[v] = {lo, hi};
    sys.facts.assume(parse_expr_text(
        v + " >= " + std::to_string(lo) + " and " + v +
            " <= " + std::to_string(hi),
        env));
  }
  if (rng() % 3 == 0) {
    const std::string& v = sys.vars[rng() % sys.vars.size()];
    long long c = 2 + (long long)(rng() % 3);
    ExprP fact = parse_expr_text(v + " % " + std::to_string(c) + " == 0", env);
    sys.facts.assume(fact);
    sys.div_facts.push_back({c, make_var(v, ScalarKind::Index)});
  }
  return sys;
}

long long eval_ll(const ExprP& e, const std::map<std::string, long long>& pt) {
  switch (e->kind) {
    case ExprKind::Literal: return e->value.to_integer();
    case ExprKind::Var: return pt.at(e->name);
    case ExprKind::Binary: {
      long long a = eval_ll(e->args[0], pt);
      long long b = eval_ll(e->args[1], pt);
      switch (e->op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: return Rational(a, b).floor();
        case BinOp::Mod: return a - Rational(a, b).floor() * b;
        default: throw std::runtime_error("cmp in eval_ll");
      }
    }
    default: throw std::runtime_error("bad expr in eval_ll");
  }
}

bool eval_pred(const ExprP& e, const std::map<std::string, long long>& pt) {
  long long a = eval_ll(e->args[0], pt);
  long long b = eval_ll(e->args[1], pt);
  switch (e->op) {
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    case BinOp::Lt: return a < b;
    case BinOp::Le: return a <= b;
    case BinOp::Gt: return a > b;
    case BinOp::Ge: return a >= b;
    default: throw std::runtime_error("bad pred");
  }
}

template <typename Fn>
void for_each_point(const RandomSystem& sys, const Fn& fn) {
  std::vector<std::string> vars = sys.vars;
  std::map<std::string, long long> pt;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == vars.size()) {
      for (const auto& [c, e] : sys.div_facts) {
        long long v = eval_ll(e, pt);
        if (((v % c) + c) % c != 0) return;
      }
      fn(pt);
      return;
    }
    auto [lo, hi] = sys.box.at(vars[i]);
    for (long long x = lo; x <= hi; ++x) {
      pt[vars[i]] = x;
      rec(i + 1);
    }
  };
  rec(0);
}

TEST(AnalysisSoundnessFuzz, FiveHundredQueriesVsEnumeration) {
  std::mt19937_64 rng(2024);
  int valid_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    RandomSystem sys = random_system(rng);
    ScopeEnv env;
    for (const auto& v : sys.vars)
      env[v] = {Binding::SizeParam, ScalarKind::Index, 0};

    ExprP lhs = rand_affine(rng, sys.vars);
    ExprP rhs = rand_affine(rng, sys.vars);
    BinOp ops[] = {BinOp::Le, BinOp::Lt, BinOp::Ge, BinOp::Gt, BinOp::Eq,
                   BinOp::Ne};
    ExprP pred = make_binop(ops[rng() % 6], lhs, rhs);

    ProveOutcome out = prove(sys.facts, pred);
    if (out.result == ProveResult::Valid) {
      ++valid_count;
      for_each_point(sys, [&](const std::map<std::string, long long>& pt) {
        ASSERT_TRUE(eval_pred(pred, pt))
            << "UNSOUND valid at trial " << trial << "\npred "
            << print_expr(pred) << "\n"
            << out.trace;
      });
    }
  }
  // the prover should not be vacuously weak
  EXPECT_GT(valid_count, 25);
}

TEST(DependenceSoundnessFuzz, RandomAccessPairsVsEnumeration) {
  std::mt19937_64 rng(77);
  int independent_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // one shared loop i in [0, 8); accesses a[f(i)] and a[g(i)]
    ScopeEnv env = env_with({"i"});
    ExprP f = rand_affine(rng, {"i"}, 1);
    ExprP g = rand_affine(rng, {"i"}, 1);
    ProcP host = parse_proc(
        "proc h(a: f32[99]):\n"
        "  for i in seq(0, 8):\n"
        "    pass\n");
    StmtP loop = host->body[0];

    Access x{Access::Write, "a", {f}, {}};
    Access y{Access::Read, "a", {g}, {}};
    FactSet base;
    bool alias =
        accesses_may_alias(x, y, {loop}, base, IterRel::Distinct);
    if (!alias) {
      ++independent_count;
      // exhaustive check: no i != i' with f(i) == g(i')
      for (long long i = 0; i < 8; ++i)
        for (long long j = 0; j < 8; ++j) {
          if (i == j) continue;
          long long fi = eval_ll(f, {{"i", i}});
          long long gj = eval_ll(g, {{"i", j}});
          ASSERT_NE(fi, gj) << "UNSOUND independent: f=" << print_expr(f)
                            << " g=" << print_expr(g) << " i=" << i
                            << " i'=" << j;
        }
    }
  }
  EXPECT_GT(independent_count, 10);
}

}  // namespace
}  // namespace exo2ir

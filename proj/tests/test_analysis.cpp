#include <gtest/gtest.h>

#include "exo2ir/analysis.hpp"
#include "exo2ir/parser.hpp"
#include "exo2ir/pattern.hpp"
#include "testutil.hpp"

namespace exo2ir {
namespace {

TEST(Dependence, DisjointBuffersIndependent) {
  ProcP g = testutil::gemv();
  // y[i] += ... writes y; x[j] is only read: distinct buffers
  StmtP i_loop = g->body[0];
  StmtP j_loop = i_loop->body[0];
  StmtP red = j_loop->body[0];
  FactSet base = facts_of_proc(*g);
  Access w{Access::Reduce, "y", {make_var("i", ScalarKind::Index)}, {}};
  Access r{Access::Read, "x", {make_var("j", ScalarKind::Index)}, {}};
  EXPECT_FALSE(accesses_may_alias(w, r, {i_loop, j_loop}, base,
                                  IterRel::Distinct));
}

TEST(Dependence, NeighboringCellsCollideAcrossIterations) {
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[n + 1]):\n"
      "  for i in seq(0, n):\n"
      "    a[i] = 1.0\n"
      "    a[i + 1] = 2.0\n");
  StmtP loop = p->body[0];
  FactSet base = facts_of_proc(*p);
  // concrete collision: a[i+1] (iter i) aliases a[i'] (iter i' = i+1)
  DepResult r = dependence({loop->body[0]}, {loop->body[1]}, {loop}, base,
                           IterRel::Distinct);
  EXPECT_EQ(r, DepResult::MayDepend);
}

TEST(Dependence, ParityDisjointByDivisibility) {
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[2 * n + 2]):\n"
      "  for i in seq(0, n):\n"
      "    a[2 * i] = 1.0\n"
      "    a[2 * i + 1] += a[2 * i + 1]\n");
  StmtP loop = p->body[0];
  FactSet base = facts_of_proc(*p);
  // writes to a[2i] never alias accesses of a[2i'+1], any iterations;
  // enumeration oracle over i, i' in [0,16) agrees
  for (long long i = 0; i < 16; ++i)
    for (long long j = 0; j < 16; ++j) ASSERT_NE(2 * i, 2 * j + 1);
  DepResult r = dependence({loop->body[0]}, {loop->body[1]}, {loop}, base,
                           IterRel::Distinct);
  EXPECT_EQ(r, DepResult::Independent);
}

TEST(Dependence, SameIterationWriteReadConflicts) {
  ProcP p = parse_proc(
      "proc p(a: f32[4]):\n"
      "  a[1] = 2.0\n"
      "  a[2] = a[1]\n");
  FactSet base;
  DepResult r = dependence({p->body[0]}, {p->body[1]}, {}, base, IterRel::Same);
  EXPECT_EQ(r, DepResult::MayDepend);
}

TEST(Dependence, ReduceReduceCommutesExactly) {
  ProcP p = parse_proc(
      "proc p(s: f32[1]):\n"
      "  s[0] += 1.0\n"
      "  s[0] += 2.0\n");
  FactSet base;
  EXPECT_EQ(dependence({p->body[0]}, {p->body[1]}, {}, base, IterRel::Same,
                       /*reduces_commute=*/true),
            DepResult::Independent);
  EXPECT_EQ(dependence({p->body[0]}, {p->body[1]}, {}, base, IterRel::Same,
                       /*reduces_commute=*/false),
            DepResult::MayDepend);
}

TEST(Dependence, CallAccessesSeenThroughSlices) {
  std::string text =
      "instr vst(dst: f32[4]):\n"
      "  for k in seq(0, 4):\n"
      "    dst[k] = 0.0\n"
      "\n"
      "proc p(n: size, a: f32[n]):\n"
      "  assert n >= 12\n"
      "  for i in seq(0, 2):\n"
      "    vst(a[4 * i : 4 * i + 4])\n"
      "    a[8] = 1.0\n";
  ProcP p = parse_file(text).back();
  StmtP loop = p->body[0];
  FactSet base = facts_of_proc(*p);
  // the call writes a[4i .. 4i+3]; a[8] write collides with iteration i'=2?
  // i ranges over [0,2): windows are [0,4) and [4,8): no overlap with cell 8
  EXPECT_EQ(dependence({loop->body[0]}, {loop->body[1]}, {loop}, base,
                       IterRel::Distinct),
            DepResult::Independent);

  // but cell 7 collides with the window of iteration i=1
  ProcP q = parse_proc(
      "proc q(n: size, a: f32[n]):\n"
      "  assert n >= 12\n"
      "  for i in seq(0, 2):\n"
      "    vst(a[4 * i : 4 * i + 4])\n"
      "    a[7] = 1.0\n",
      {parse_file(text).front()});
  StmtP loop2 = q->body[0];
  EXPECT_EQ(dependence({loop2->body[0]}, {loop2->body[1]}, {loop2},
                       facts_of_proc(*q), IterRel::Distinct),
            DepResult::MayDepend);
}

TEST(Idempotent, PlainAssignYes) {
  ProcP p = parse_proc(
      "proc p(x: f32[1], y: f32, z: f32):\n"
      "  x[0] = y + z\n");
  EXPECT_EQ(idempotent({p->body[0]}), Idem::Yes);
}

TEST(Idempotent, ReductionUnknown) {
  ProcP p = parse_proc("proc p(x: f32[1]):\n  x[0] += 1.0\n");
  EXPECT_EQ(idempotent({p->body[0]}), Idem::Unknown);
}

TEST(Idempotent, ReadOfWrittenBufferUnknown) {
  // oracle note: running this block twice happens to be equal here, but the
  // checker is conservative by design
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[n], b: f32[n], c: f32[n]):\n"
      "  assert n >= 2\n"
      "  for i in seq(0, n):\n"
      "    a[i] = b[i]\n"
      "    c[i] = a[i]\n");
  StmtP loop = p->body[0];
  EXPECT_EQ(idempotent(loop->body), Idem::Unknown);
}

TEST(Idempotent, IdempotentInstructionCallYes) {
  std::string text =
      "instr vbroadcast(dst: f32[8], val: f32):\n"
      "  for k in seq(0, 8):\n"
      "    dst[k] = val\n"
      "\n"
      "proc p(t: f32[8], a: f32):\n"
      "  vbroadcast(t[0:8], a)\n";
  ProcP p = parse_file(text).back();
  EXPECT_EQ(idempotent({p->body[0]}), Idem::Yes);
}

// ---------------------------------------------------------------------------
// Bounds inference.
// ---------------------------------------------------------------------------

TEST(Bounds, WorkedStencilExample) {
  // accesses within [32*io : 32*io + 34)
  ProcP p = parse_proc(
      "proc p(N: size, arr: f32[N + 2], x: f32[N]):\n"
      "  assert N % 32 == 0\n"
      "  for io in seq(0, N / 32):\n"
      "    for ii in seq(0, 32):\n"
      "      x[32 * io + ii] = arr[32 * io + ii] + arr[32 * io + ii + 1] + "
      "arr[32 * io + ii + 2]\n");
  Cursor io = find_loop(p, "io");
  Window w = bounds_infer(io, "arr");
  ASSERT_EQ(w.dims.size(), 1u);
  AffineForm want_lo = AffineForm::var("io", Rational(32));
  AffineForm want_hi = want_lo + AffineForm(Rational(34));
  EXPECT_TRUE(w.dims[0].lo == want_lo) << w.dims[0].lo.str();
  EXPECT_TRUE(w.dims[0].hi == want_hi) << w.dims[0].hi.str();
}

TEST(Bounds, SingleCell) {
  ProcP p = parse_proc(
      "proc p(a: f32[8], x: f32[1]):\n"
      "  x[0] = a[5]\n");
  Window w = bounds_infer(top_cursor(p, 0), "a");
  ASSERT_EQ(w.dims.size(), 1u);
  EXPECT_TRUE(w.dims[0].lo == AffineForm(Rational(5)));
  EXPECT_TRUE(w.dims[0].hi == AffineForm(Rational(6)));
}

TEST(Bounds, StencilWindowMatchesExhaustiveEnumeration) {
  // blur_x-style producer read under a consumer tile loop; cross-check the
  // inferred window by enumerating every access at a concrete size
  ProcP p = parse_proc(
      "proc p(W: size, src: f32[W + 2], dst: f32[W]):\n"
      "  assert W % 8 == 0\n"
      "  for xo in seq(0, W / 8):\n"
      "    for xi in seq(0, 8):\n"
      "      dst[8 * xo + xi] = src[8 * xo + xi] + src[8 * xo + xi + 1] + "
      "src[8 * xo + xi + 2]\n");
  Cursor xo = find_loop(p, "xo");
  Window w = bounds_infer(xo, "src");
  ASSERT_EQ(w.dims.size(), 1u);

  // enumeration oracle at W = 64: per xo, min access = 8*xo, max = 8*xo + 9
  for (long long xo_v = 0; xo_v < 8; ++xo_v) {
    long long mn = INT64_MAX, mx = INT64_MIN;
    for (long long xi = 0; xi < 8; ++xi)
      for (long long d = 0; d <= 2; ++d) {
        mn = std::min(mn, 8 * xo_v + xi + d);
        mx = std::max(mx, 8 * xo_v + xi + d);
      }
    EXPECT_EQ(mn, 8 * xo_v);
    EXPECT_EQ(mx, 8 * xo_v + 9);
  }
  EXPECT_TRUE(w.dims[0].lo == AffineForm::var("xo", Rational(8)));
  EXPECT_TRUE(w.dims[0].hi ==
              AffineForm::var("xo", Rational(8)) + AffineForm(Rational(10)));
}

TEST(Bounds, NonAffineAccessRaises) {
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[n], idx: f32[n]):\n"
      "  for i in seq(0, n):\n"
      "    a[i] = a[i / 2 % 3] + idx[i]\n");
  // div/mod atoms are fine; a genuinely non-affine case needs a product,
  // which the parser rejects. The error path instead triggers on a missing
  // buffer.
  EXPECT_THROW(bounds_infer(top_cursor(p, 0), "zz"), AnalysisError);
}

TEST(Bounds, EverySampledAccessInsideWindow) {
  // property: concrete accesses at an oracle-executed instance lie inside
  // the inferred window
  ProcP p = parse_proc(
      "proc p(N: size, arr: f32[N + 2], x: f32[N]):\n"
      "  assert N % 32 == 0\n"
      "  for io in seq(0, N / 32):\n"
      "    for ii in seq(0, 32):\n"
      "      x[32 * io + ii] = arr[32 * io + ii] + arr[32 * io + ii + 2]\n");
  Cursor io = find_loop(p, "io");
  Window w = bounds_infer(io, "arr");
  for (long long io_v = 0; io_v < 2; ++io_v) {
    long long lo = 32 * io_v;       // window lo at this io
    long long hi = 32 * io_v + 34;  // window hi
    for (long long ii = 0; ii < 32; ++ii)
      for (long long d : {0, 2}) {
        long long idx = 32 * io_v + ii + d;
        EXPECT_GE(idx, lo);
        EXPECT_LT(idx, hi);
      }
  }
}

TEST(FactsAt, CollectsLoopsGuardsAndAsserts) {
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[n]):\n"
      "  assert n % 4 == 0\n"
      "  for i in seq(0, n):\n"
      "    if i < 4:\n"
      "      a[i] = 0.0\n");
  Cursor assign = find(p, "a[i] = 0.0");
  FactSet facts = facts_at(*p, assign.path());
  ScopeEnv env{{"i", {Binding::SizeParam, ScalarKind::Index, 0}},
               {"n", {Binding::SizeParam, ScalarKind::Index, 0}}};
  EXPECT_EQ(prove(facts, parse_expr_text("i >= 0", env)).result,
            ProveResult::Valid);
  EXPECT_EQ(prove(facts, parse_expr_text("i <= 3", env)).result,
            ProveResult::Valid);
  EXPECT_EQ(prove(facts, parse_expr_text("n % 4 == 0", env)).result,
            ProveResult::Valid);
  EXPECT_EQ(prove(facts, parse_expr_text("i >= 1", env)).result,
            ProveResult::Unknown);
}

}  // namespace
}  // namespace exo2ir

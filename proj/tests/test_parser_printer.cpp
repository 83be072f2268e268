#include <gtest/gtest.h>

#include "exo2ir/ir.hpp"
#include "exo2ir/parser.hpp"
#include "exo2ir/printer.hpp"
#include "testutil.hpp"

namespace exo2ir {
namespace {

TEST(Parser, GemvStructure) {
  ProcP p = testutil::gemv();
  EXPECT_EQ(p->name, "gemv");
  ASSERT_EQ(p->params.size(), 5u);
  EXPECT_EQ(p->params[0].name, "M");
  EXPECT_EQ(p->params[0].type, ScalarKind::Index);
  EXPECT_FALSE(p->params[0].is_buffer());
  EXPECT_TRUE(p->params[2].is_buffer());
  EXPECT_EQ(p->params[2].dims.size(), 2u);
  EXPECT_EQ(p->params[2].mem, "DRAM");
  ASSERT_EQ(p->asserts.size(), 2u);
  ASSERT_EQ(p->body.size(), 1u);
  const StmtP& i_loop = p->body[0];
  EXPECT_EQ(i_loop->kind, StmtKind::For);
  EXPECT_EQ(i_loop->name, "i");
  ASSERT_EQ(i_loop->body.size(), 1u);
  const StmtP& j_loop = i_loop->body[0];
  EXPECT_EQ(j_loop->kind, StmtKind::For);
  ASSERT_EQ(j_loop->body.size(), 1u);
  EXPECT_EQ(j_loop->body[0]->kind, StmtKind::Reduce);
  EXPECT_EQ(j_loop->body[0]->name, "y");
}

TEST(Parser, MinimalPassProc) {
  ProcP p = parse_proc("proc p():\n  pass\n");
  EXPECT_TRUE(p->params.empty());
  ASSERT_EQ(p->body.size(), 1u);
  EXPECT_EQ(p->body[0]->kind, StmtKind::Pass);
}

TEST(Parser, UnboundNameIsWellFormednessError) {
  std::string text =
      "proc gemv(M: size, N: size, A: f32[M, N], x: f32[N], y: f32[M]):\n"
      "  for i in seq(0, M):\n"
      "    for j in seq(0, N):\n"
      "      y[k] += A[i, j] * x[j]\n";
  try {
    parse_proc(text);
    FAIL() << "expected WellFormednessError";
  } catch (const WellFormednessError& e) {
    EXPECT_NE(std::string(e.what()).find("k"), std::string::npos);
  }
}

TEST(Parser, SyntaxErrorCarriesLocation) {
  try {
    parse_proc("proc p(:\n  pass\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_GT(e.col(), 1);
  }
}

TEST(Parser, RejectsNonAffineIndex) {
  std::string text =
      "proc p(n: size, a: f32[n]):\n"
      "  for i in seq(0, n):\n"
      "    for j in seq(0, n):\n"
      "      a[i * j] = 1.0\n";
  EXPECT_THROW(parse_proc(text), WellFormednessError);
}

TEST(Parser, RejectsWriteToSizeParam) {
  EXPECT_THROW(parse_proc("proc p(n: size):\n  n = 1\n"), WellFormednessError);
}

TEST(Parser, ScalarAllocAndCall) {
  std::string text =
      "instr vset(dst: f32[4]):\n"
      "  intrin \"vset(&{0})\"\n"
      "  for k in seq(0, 4):\n"
      "    dst[k] = 0.0\n"
      "\n"
      "proc p(a: f32[8]):\n"
      "  t: f32\n"
      "  t = 1.0\n"
      "  vset(a[0:4])\n"
      "  a[7] = t\n";
  auto procs = parse_file(text);
  ASSERT_EQ(procs.size(), 2u);
  EXPECT_TRUE(procs[0]->is_instruction);
  EXPECT_EQ(procs[0]->intrinsic, "vset(&{0})");
  const StmtP& call = procs[1]->body[2];
  ASSERT_EQ(call->kind, StmtKind::Call);
  EXPECT_EQ(call->callee->name, "vset");
  ASSERT_EQ(call->args.size(), 1u);
  EXPECT_EQ(call->args[0]->kind, ExprKind::Slice);
}

TEST(Printer, RoundTripGemv) {
  ProcP p = testutil::gemv();
  std::string text = print_proc(p);
  ProcP q = parse_proc(text);
  EXPECT_TRUE(struct_eq(p, q)) << text;
  EXPECT_EQ(text, print_proc(q));
}

TEST(Printer, RoundTripTiledGolden) {
  ProcP p = testutil::load_fixture("gemv_tiled.golden.exo2ir");
  ProcP q = parse_proc(print_proc(p));
  EXPECT_TRUE(struct_eq(p, q));
}

TEST(Printer, PassOnlyCanonicalText) {
  ProcP p = parse_proc("proc p():\n  pass\n");
  EXPECT_EQ(print_proc(p), "proc p():\n  pass\n");
}

TEST(Printer, ExpressionShapesSurviveRoundTrip) {
  std::string text =
      "proc p(n: size, a: f32[n]):\n"
      "  assert n >= 4\n"
      "  for i in seq(0, n - (2 - 1)):\n"
      "    a[i] = a[i] * 0.25 + (a[i] - 1.0) * (1.0 / 3.0)\n"
      "    a[i] += a[(i + n) % 4 / 2]\n";
  ProcP p = parse_proc(text);
  ProcP q = parse_proc(print_proc(p));
  EXPECT_TRUE(struct_eq(p, q)) << print_proc(p);
}

TEST(Printer, RationalLiteralForms) {
  EXPECT_EQ(Printer::rational_text(Rational(1, 4), ScalarKind::F32), "0.25");
  EXPECT_EQ(Printer::rational_text(Rational(5), ScalarKind::F32), "5.0");
  EXPECT_EQ(Printer::rational_text(Rational(-1, 2), ScalarKind::F64), "-0.5");
  EXPECT_EQ(Printer::rational_text(Rational(1, 3), ScalarKind::F32),
            "(1.0 / 3.0)");
  EXPECT_EQ(Printer::rational_text(Rational(7), ScalarKind::Index), "7");
}

TEST(Printer, LiteralDivisionFoldsExactly) {
  ProcP p = parse_proc("proc p(a: f32[4]):\n  a[0] = 1.0 / 3.0\n");
  const ExprP& rhs = p->body[0]->rhs;
  ASSERT_EQ(rhs->kind, ExprKind::Literal);
  EXPECT_EQ(rhs->value, Rational(1, 3));
  ProcP q = parse_proc(print_proc(p));
  EXPECT_TRUE(struct_eq(p, q));
}

TEST(Printer, ParallelLoopRoundTrips) {
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[n]):\n"
      "  for i in par(0, n):\n"
      "    a[i] = 0.0\n");
  EXPECT_TRUE(p->body[0]->parallel);
  ProcP q = parse_proc(print_proc(p));
  EXPECT_TRUE(struct_eq(p, q));
}

TEST(Printer, RandomProceduresRoundTrip) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testutil::ProgramGen gen(seed);
    ProcP p = gen.proc();
    ASSERT_TRUE(check_wellformed(p).empty()) << print_proc(p);
    ProcP q = parse_proc(print_proc(p));
    EXPECT_TRUE(struct_eq(p, q)) << "seed " << seed << "\n" << print_proc(p);
  }
}

}  // namespace
}  // namespace exo2ir

#include <gtest/gtest.h>

#include "exo2ir/interp.hpp"
#include "exo2ir/parser.hpp"
#include "testutil.hpp"

namespace exo2ir {
namespace {

Instance gemv_instance(long long m, long long n, Rational a_val, Rational x_val,
                       Rational y_val) {
  Instance inst;
  inst.sizes = {{"M", m}, {"N", n}};
  BufferData A = BufferData::make({m, n});
  BufferData x = BufferData::make({n});
  BufferData y = BufferData::make({m});
  for (auto& v : A.vals) v = a_val;
  for (auto& v : x.vals) v = x_val;
  for (auto& v : y.vals) v = y_val;
  A.init.assign(A.init.size(), true);
  x.init.assign(x.init.size(), true);
  y.init.assign(y.init.size(), true);
  inst.inputs = {{"A", std::move(A)}, {"x", std::move(x)}, {"y", std::move(y)}};
  return inst;
}

TEST(Interp, GemvAllOnes) {
  ProcP p = testutil::gemv();
  Instance inst = gemv_instance(8, 8, Rational(1), Rational(1), Rational(0));

  // brute-force oracle, independent of the interpreter walk
  long long expected[8] = {};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) expected[i] += 1 * 1;

  BufferStore out = interpret(p, inst);
  const BufferData& y = out.at("y");
  for (int i = 0; i < 8; ++i) {
    EXPECT_TRUE(y.init[i]);
    EXPECT_EQ(y.vals[i], Rational(expected[i]));
  }
  EXPECT_EQ(y.vals[0], Rational(8));
}

TEST(Interp, PassProcEmptyStore) {
  ProcP p = parse_proc("proc p():\n  pass\n");
  BufferStore out = interpret(p, Instance{});
  EXPECT_TRUE(out.empty());
}

TEST(Interp, ExactThirds) {
  ProcP p = testutil::gemv();
  Instance inst =
      gemv_instance(8, 8, Rational(1, 3), Rational(1), Rational(0));
  // oracle: sum of eight 1/3 terms per output cell
  Rational expected(0);
  for (int j = 0; j < 8; ++j) expected += Rational(1, 3);
  ASSERT_EQ(expected, Rational(8, 3));

  BufferStore out = interpret(p, inst);
  for (const auto& v : out.at("y").vals) EXPECT_EQ(v, Rational(8, 3));
}

TEST(Interp, AssertViolationFaults) {
  ProcP p = testutil::gemv();
  Instance inst = gemv_instance(7, 8, Rational(1), Rational(1), Rational(0));
  EXPECT_THROW(interpret(p, inst), RuntimeFault);
}

TEST(Interp, OutOfBoundsFaultNamesPath) {
  ProcP p = parse_proc(
      "proc p(n: size, a: f32[n]):\n"
      "  for i in seq(0, n):\n"
      "    a[i + 1] = 0.0\n");
  Instance inst;
  inst.sizes = {{"n", 4}};
  BufferData a = BufferData::make({4});
  a.init.assign(4, true);
  inst.inputs = {{"a", std::move(a)}};
  try {
    interpret(p, inst);
    FAIL() << "expected RuntimeFault";
  } catch (const RuntimeFault& e) {
    EXPECT_NE(std::string(e.what()).find("out-of-bounds"), std::string::npos);
    EXPECT_FALSE(e.where().empty());
  }
}

TEST(Interp, UninitializedReadFaults) {
  ProcP p = parse_proc(
      "proc p(a: f32[4]):\n"
      "  t: f32[4]\n"
      "  a[0] = t[1]\n");
  Instance inst;
  BufferData a = BufferData::make({4});
  a.init.assign(4, true);
  inst.inputs = {{"a", std::move(a)}};
  EXPECT_THROW(interpret(p, inst), RuntimeFault);
}

TEST(Interp, AllocResetsPerIteration) {
  // t is re-allocated every iteration, so reading it before writing in the
  // second iteration faults even though the first iteration wrote it.
  ProcP p = parse_proc(
      "proc p(a: f32[4]):\n"
      "  for i in seq(0, 2):\n"
      "    t: f32\n"
      "    if i > 0:\n"
      "      a[i] = t\n"
      "    t = 1.0\n");
  Instance inst;
  BufferData a = BufferData::make({4});
  a.init.assign(4, true);
  inst.inputs = {{"a", std::move(a)}};
  EXPECT_THROW(interpret(p, inst), RuntimeFault);
}

TEST(Interp, CallThroughSliceViews) {
  std::string text =
      "instr vfill(dst: f32[4]):\n"
      "  for k in seq(0, 4):\n"
      "    dst[k] = 2.0\n"
      "\n"
      "proc p(a: f32[2, 8]):\n"
      "  vfill(a[1, 3:7])\n";
  ProcP p = parse_file(text).back();
  Instance inst;
  BufferData a = BufferData::make({2, 8});
  a.init.assign(16, true);
  inst.inputs = {{"a", std::move(a)}};
  BufferStore out = interpret(p, inst);
  const BufferData& r = out.at("a");
  for (int j = 0; j < 8; ++j) {
    Rational want = (j >= 3 && j < 7) ? Rational(2) : Rational(0);
    EXPECT_EQ(r.vals[8 + j], want) << "col " << j;
  }
  EXPECT_EQ(r.vals[3], Rational(0));  // row 0 untouched
}

TEST(Interp, ReassociationInvariance) {
  // same multiset of reduction terms, opposite accumulation order
  ProcP fwd = parse_proc(
      "proc p(n: size, x: f32[n], s: f32[1]):\n"
      "  s[0] = 0.0\n"
      "  for i in seq(0, n):\n"
      "    s[0] += x[i]\n");
  ProcP rev = parse_proc(
      "proc p(n: size, x: f32[n], s: f32[1]):\n"
      "  s[0] = 0.0\n"
      "  for i in seq(0, n):\n"
      "    s[0] += x[n - 1 - i]\n");
  EquivReport rep = check_equiv(fwd, rev, 20, 7);
  EXPECT_TRUE(rep.equal) << rep.detail;
}

TEST(Interp, Determinism) {
  ProcP p = testutil::gemv();
  Instance inst = random_instance(p, 3);
  BufferStore a = interpret(p, inst);
  BufferStore b = interpret(p, inst);
  EXPECT_TRUE(a == b);
}

TEST(RandomInstance, HonorsDivisibilityByRoundingUp) {
  ProcP p = testutil::gemv();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Instance inst = random_instance(p, seed);
    EXPECT_EQ(inst.sizes.at("M") % 8, 0);
    EXPECT_EQ(inst.sizes.at("N") % 8, 0);
    EXPECT_GE(inst.sizes.at("M"), 1);
  }
}

TEST(RandomInstance, ValuesAreSmallRationals) {
  ProcP p = testutil::gemv();
  Instance inst = random_instance(p, 11);
  for (const auto& v : inst.inputs.at("A").vals) {
    EXPECT_LE(v, Rational(8));
    EXPECT_GE(v, Rational(-8));
    EXPECT_LE(v.den(), 3);
  }
}

TEST(RandomInstance, UnsatisfiableRangeRaises) {
  ProcP p = parse_proc("proc p(n: size, a: f32[n]):\n  assert n == 13\n  a[0] = 0.0\n");
  EXPECT_THROW(random_instance(p, 0, {1, 12}), InstanceError);
}

TEST(CheckEquiv, Reflexive) {
  ProcP p = testutil::gemv();
  EquivReport rep = check_equiv(p, p, 5, 0);
  EXPECT_TRUE(rep.equal);
}

TEST(CheckEquiv, MutantDetected) {
  ProcP p = testutil::gemv();
  ProcP mutant = parse_proc(
      "proc gemv(M: size, N: size, A: f32[M, N] @DRAM, x: f32[N] @DRAM, y: "
      "f32[M] @DRAM):\n"
      "  assert M % 8 == 0\n"
      "  assert N % 8 == 0\n"
      "  for i in seq(0, M):\n"
      "    for j in seq(0, N):\n"
      "      y[i] += A[i, j] * x[j]\n"
      "    y[i] += 1.0\n");
  EquivReport rep = check_equiv(p, mutant, 20, 0);
  EXPECT_FALSE(rep.equal);
  EXPECT_GE(rep.first_bad_trial, 0);
  EXPECT_NE(rep.detail.find("y"), std::string::npos);
}

TEST(CheckEquiv, SignatureMismatchRejected) {
  ProcP a = parse_proc("proc p(n: size, x: f32[n]):\n  x[0] = 0.0\n");
  ProcP b = parse_proc("proc p(n: size, y: f32[n]):\n  y[0] = 0.0\n");
  EquivReport rep = check_equiv(a, b, 5, 0);
  EXPECT_FALSE(rep.equal);
  EXPECT_NE(rep.detail.find("signature"), std::string::npos);
}

}  // namespace
}  // namespace exo2ir

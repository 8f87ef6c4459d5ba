#include <gtest/gtest.h>

#include "prophic/errors.hpp"
#include "prophic/model.hpp"
#include "prophic/smt.hpp"
#include "random_terms.hpp"

using namespace prophic;
using prophic::test::TermGen;

namespace {

struct Vocab
{
  TermStore st;
  Sort I = st.int_sort();
  Sort A = st.array_sort(st.int_sort(), st.int_sort());
  Term x = st.mk_var("x", I);
  Term dr = st.mk_var("dr", I);
  Term a = st.mk_var("a", A);
};

}  // namespace

TEST(Terms, InterningReturnsSameHandle)
{
  Vocab v;
  Term t1 = v.st.mk_lt(v.x, v.st.mk_int(200));
  Term t2 = v.st.mk_lt(v.x, v.st.mk_int(200));
  EXPECT_EQ(t1, t2);
  EXPECT_EQ(t1.id(), t2.id());
  EXPECT_NE(t1, v.st.mk_lt(v.x, v.st.mk_int(201)));
  EXPECT_EQ(v.st.mk_var("x", v.I), v.x);
}

TEST(Terms, ReadHasElementSort)
{
  Vocab v;
  Term r = v.st.mk_read(v.a, v.x);
  EXPECT_EQ(r.sort(), v.I);
  EXPECT_EQ(v.st.mk_write(v.a, v.x, r).sort(), v.A);
}

TEST(Terms, SortMismatchReportsChild)
{
  Vocab v;
  try {
    v.st.mk_term(Op::And, { v.x, v.st.mk_true() });
    FAIL() << "expected SortMismatch";
  } catch (const SortMismatch & e) {
    EXPECT_EQ(e.child(), 0);
  }
  try {
    v.st.mk_read(v.a, v.st.mk_true());
    FAIL() << "expected SortMismatch";
  } catch (const SortMismatch & e) {
    EXPECT_EQ(e.child(), 1);
  }
  EXPECT_THROW(v.st.mk_eq(v.x, v.a), SortMismatch);
}

TEST(Terms, SubstituteExamples)
{
  Vocab v;
  Term c = v.st.mk_int(200);
  Term t = v.st.mk_lt(v.x, c);
  EXPECT_EQ(substitute(v.st, t, { { v.x, v.dr } }), v.st.mk_lt(v.dr, c));
  EXPECT_EQ(substitute(v.st, t, {}), t);
  // keys may be compound subterms
  Term r = v.st.mk_read(v.a, v.x);
  EXPECT_EQ(substitute(v.st, v.st.mk_lt(r, c), { { r, v.dr } }), v.st.mk_lt(v.dr, c));
  EXPECT_THROW(substitute(v.st, t, { { v.x, v.a } }), SortMismatch);
}

TEST(Terms, SubstitutionComposes)
{
  // t{x->y}{y->z} == t{x->z, y->z} for random t over x, y
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  Term y = st.mk_var("y", st.int_sort());
  Term z = st.mk_var("z", st.int_sort());
  TermGen g(st, 11);
  g.ints = { x, y };
  for (int i = 0; i < 300; ++i) {
    Term t = g.bool_term(4);
    Term lhs = substitute(st, substitute(st, t, { { x, y } }), { { y, z } });
    Term rhs = substitute(st, t, { { x, z }, { y, z } });
    ASSERT_EQ(lhs, rhs) << t.to_string();
  }
}

TEST(Terms, TimesOf)
{
  Vocab v;
  Term ir = v.st.mk_var("ir", v.I);
  Term dw = v.st.mk_var("dw", v.I);
  EXPECT_EQ(times_of(v.st.timed(ir, 2)), (std::set<std::uint32_t>{ 2 }));
  Term f = v.st.mk_eq(v.st.mk_read(v.st.timed(v.a, 0), v.st.timed(ir, 2)), v.st.timed(dw, 0));
  EXPECT_EQ(times_of(f), (std::set<std::uint32_t>{ 0, 2 }));
  EXPECT_TRUE(times_of(v.st.mk_add(v.x, v.st.mk_int(1))).empty());
}

TEST(Terms, TimesOfDistributesOverChildren)
{
  Vocab v;
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    Term l = v.st.timed(v.x, rng() % 5);
    Term r = v.st.timed(v.dr, rng() % 5);
    Term t = v.st.mk_lt(v.st.mk_add(l, v.st.mk_int(1)), r);
    std::set<std::uint32_t> want = times_of(l);
    want.merge(times_of(r));
    EXPECT_EQ(times_of(t), want);
  }
}

TEST(Terms, EvaluateGround)
{
  Vocab v;
  CexModel m;
  Term t = v.st.mk_lt(v.st.mk_add(v.st.mk_int(1), v.st.mk_int(2)), v.st.mk_int(4));
  EXPECT_EQ(evaluate(t, m), Value(true));
}

TEST(Terms, EvaluateReadATable)
{
  TermStore st;
  Sort arr = st.uninterpreted_sort("Arr");
  const FuncDecl * rd = st.declare_fun("readA", { arr, st.int_sort() }, st.int_sort(), FuncDecl::Role::AbsRead, arr);
  Term a = st.mk_var("a", arr);
  Term i = st.mk_var("i", st.int_sort());
  CexModel m;
  UValue a0{ arr.id(), "Arr!val!0" };
  m.set(a, a0);
  m.set(i, BigInt(1));
  m.set_app(rd, { a0, BigInt(1) }, BigInt(3));
  EXPECT_EQ(evaluate(st.mk_app(rd, { a, i }), m), Value(BigInt(3)));
}

TEST(Terms, EvaluateUnassigned)
{
  Vocab v;
  CexModel m;
  try {
    evaluate(v.st.mk_lt(v.x, v.st.mk_int(0)), m);
    FAIL() << "expected UnassignedVariable";
  } catch (const UnassignedVariable & e) {
    EXPECT_EQ(e.variable(), "x");
  }
}

TEST(Terms, EvaluateAgreesWithSolver)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  Term y = st.mk_var("y", st.int_sort());
  TermGen g(st, 23);
  g.ints = { x, y };
  SolverSession ses{ SolverConfig{} };
  std::mt19937 rng(7);
  for (int i = 0; i < 40; ++i) {
    long long xv = static_cast<long long>(rng() % 9) - 4;
    long long yv = static_cast<long long>(rng() % 9) - 4;
    CexModel m;
    m.set(x, BigInt(xv));
    m.set(y, BigInt(yv));
    Term t = g.bool_term(4);
    Term n = g.int_term(3);
    ses.push();
    ses.assert_formula(st.mk_eq(x, st.mk_int(xv)));
    ses.assert_formula(st.mk_eq(y, st.mk_int(yv)));
    ASSERT_EQ(ses.check_sat(), CheckStatus::Sat);
    std::vector<Value> got = ses.get_values({ t, n });
    ses.pop();
    EXPECT_EQ(evaluate(t, m), got[0]) << t.to_string();
    EXPECT_EQ(evaluate(n, m), got[1]) << n.to_string();
  }
}

TEST(Terms, SimplifyExamples)
{
  Vocab v;
  TermStore & st = v.st;
  Term c = st.mk_int(200);
  EXPECT_EQ(simplify(st, st.mk_eq(v.x, v.x)), st.mk_true());
  EXPECT_EQ(simplify(st, st.mk_eq(st.mk_int(1), st.mk_int(2))), st.mk_false());
  EXPECT_EQ(simplify(st, st.mk_add(st.mk_int(1), st.mk_int(2))), st.mk_int(3));
  Term k = st.mk_const_array(v.A, st.mk_int(0));
  EXPECT_EQ(simplify(st, st.mk_read(k, v.x)), st.mk_int(0));
  EXPECT_EQ(simplify(st, st.mk_read(st.mk_write(v.a, v.x, v.dr), v.x)), v.dr);
  Term p = st.mk_lt(v.dr, c);
  EXPECT_EQ(simplify(st, st.mk_implies(st.mk_true(), p)), p);
  EXPECT_EQ(simplify(st, st.mk_ite(st.mk_true(), v.x, v.dr)), v.x);
}

TEST(Terms, SimplifyPreservesEquivalence)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  Term b = st.mk_var("b", st.bool_sort());
  TermGen g(st, 31);
  g.ints = { x };
  g.bools = { b };
  SolverSession ses{ SolverConfig{} };
  for (int i = 0; i < 60; ++i) {
    Term t = g.bool_term(5);
    Term s = simplify(st, t);
    CheckResult r = ses.check({ { "", st.mk_not(st.mk_eq(t, s)) } });
    ASSERT_EQ(r.status, CheckStatus::Unsat) << t.to_string() << " vs " << s.to_string();
  }
}

TEST(Terms, ConjunctsFlatten)
{
  Vocab v;
  Term p = v.st.mk_lt(v.x, v.dr);
  Term q = v.st.mk_lt(v.dr, v.x);
  Term r = v.st.mk_eq(v.x, v.dr);
  Term t = v.st.mk_term(Op::And, { p, v.st.mk_term(Op::And, { q, r }) });
  EXPECT_EQ(conjuncts(t), (std::vector<Term>{ p, q, r }));
}

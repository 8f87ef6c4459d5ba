#include <gtest/gtest.h>

#include <random>

#include "prophic/errors.hpp"
#include "prophic/smt.hpp"
#include "random_terms.hpp"

using namespace prophic;

TEST(Smt, ContradictionGivesCore)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  SolverSession ses{ SolverConfig{} };
  Term pos = st.mk_lt(st.mk_int(0), x);
  Term neg = st.mk_lt(x, st.mk_int(0));
  Term other = st.mk_le(x, st.mk_int(100));
  CheckResult r = ses.check({ { "pos", pos }, { "neg", neg }, { "other", other } }, Want::Core);
  ASSERT_EQ(r.status, CheckStatus::Unsat);
  std::set<std::string> core(r.core.begin(), r.core.end());
  EXPECT_TRUE(core.count("pos"));
  EXPECT_TRUE(core.count("neg"));
  // the core alone is unsat
  std::vector<std::pair<std::string, Term>> again;
  std::map<std::string, Term> by_label{ { "pos", pos }, { "neg", neg }, { "other", other } };
  for (const std::string & c : r.core) again.emplace_back(c, by_label.at(c));
  EXPECT_EQ(ses.check(again).status, CheckStatus::Unsat);
}

TEST(Smt, EmptyQueryIsSat)
{
  SolverSession ses{ SolverConfig{} };
  EXPECT_EQ(ses.check({}).status, CheckStatus::Sat);
}

TEST(Smt, ModelOfUninterpretedRead)
{
  TermStore st;
  Sort arr = st.uninterpreted_sort("Arr");
  const FuncDecl * rd = st.declare_fun("readA", { arr, st.int_sort() }, st.int_sort(), FuncDecl::Role::AbsRead, arr);
  Term a = st.mk_var("a", arr);
  Term i = st.mk_var("i", st.int_sort());
  Term app = st.mk_app(rd, { a, i });
  Term f = st.mk_eq(app, st.mk_int(3));
  SolverSession ses{ SolverConfig{} };
  CheckResult r = ses.check({ { "f", f } }, Want::Model);
  ASSERT_EQ(r.status, CheckStatus::Sat);
  EXPECT_EQ(evaluate(app, r.model), Value(BigInt(3)));
  EXPECT_TRUE(value_is_true(evaluate(f, r.model)));
}

TEST(Smt, ModelsSatisfyAssertions)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  Term y = st.mk_var("y", st.int_sort());
  Term b = st.mk_var("b", st.bool_sort());
  test::TermGen g(st, 41);
  g.ints = { x, y };
  g.bools = { b };
  SolverSession ses{ SolverConfig{} };
  int sat = 0;
  for (int i = 0; i < 60; ++i) {
    Term f1 = g.bool_term(4);
    Term f2 = g.bool_term(4);
    CheckResult r = ses.check({ { "f1", f1 }, { "f2", f2 } }, Want::Model);
    if (r.status != CheckStatus::Sat) continue;
    ++sat;
    EXPECT_TRUE(value_is_true(evaluate(f1, r.model))) << f1.to_string();
    EXPECT_TRUE(value_is_true(evaluate(f2, r.model))) << f2.to_string();
  }
  EXPECT_GT(sat, 10);
}

TEST(Smt, CoresAreUnsat)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  Term y = st.mk_var("y", st.int_sort());
  test::TermGen g(st, 43);
  g.ints = { x, y };
  SolverSession ses{ SolverConfig{} };
  int unsat = 0;
  for (int i = 0; i < 80; ++i) {
    std::vector<std::pair<std::string, Term>> q;
    std::map<std::string, Term> by;
    for (int j = 0; j < 4; ++j) {
      std::string n = "c" + std::to_string(j);
      Term f = g.bool_term(3);
      q.emplace_back(n, f);
      by[n] = f;
    }
    CheckResult r = ses.check(q, Want::Core);
    if (r.status != CheckStatus::Unsat) continue;
    ++unsat;
    std::vector<std::pair<std::string, Term>> core;
    for (const std::string & c : r.core) core.emplace_back(c, by.at(c));
    EXPECT_EQ(ses.check(core).status, CheckStatus::Unsat);
  }
  EXPECT_GT(unsat, 5);
}

TEST(Smt, VerdictsAreStable)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  test::TermGen g(st, 47);
  g.ints = { x };
  SolverSession ses{ SolverConfig{} };
  for (int i = 0; i < 30; ++i) {
    Term f = g.bool_term(4);
    CheckStatus s1 = ses.check({ { "", f } }).status;
    CheckStatus s2 = ses.check({ { "", f } }).status;
    EXPECT_EQ(s1, s2);
  }
}

TEST(Smt, PushPopRestoresScope)
{
  TermStore st;
  Term x = st.mk_var("x", st.int_sort());
  SolverSession ses{ SolverConfig{} };
  ses.assert_formula(st.mk_lt(x, st.mk_int(5)));
  ses.push();
  ses.assert_formula(st.mk_lt(st.mk_int(10), x));
  EXPECT_EQ(ses.check_sat(), CheckStatus::Unsat);
  ses.pop();
  EXPECT_EQ(ses.check_sat(), CheckStatus::Sat);
  EXPECT_EQ(ses.depth(), 0u);
}

TEST(Smt, MissingSolverBinary)
{
  SolverConfig cfg;
  cfg.command = "/nonexistent/solver-binary";
  EXPECT_THROW(
      {
        SolverSession ses(cfg);
        ses.check({});
      },
      SolverCrashed);
}

TEST(Smt, GarbageResponse)
{
  SolverConfig cfg;
  cfg.command = "sh -c 'while read l; do echo nonsense; done'";
  EXPECT_THROW(
      {
        SolverSession ses(cfg);
        ses.check({});
      },
      SolverError);
}

TEST(Smt, SilentSolverTimesOut)
{
  SolverConfig cfg;
  // acknowledges everything except check-sat, which never gets an answer
  cfg.command = "sh -c 'while read l; do case \"$l\" in *check-sat*) ;; *) echo success ;; esac; done'";
  cfg.query_timeout_s = 0.5;
  EXPECT_THROW(
      {
        SolverSession ses(cfg);
        ses.check({});
      },
      SolverTimeout);
}

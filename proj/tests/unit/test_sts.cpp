#include <gtest/gtest.h>

#include <algorithm>

#include "prophic/errors.hpp"
#include "support.hpp"

using namespace prophic;
using namespace prophic::test;

namespace {

struct Running
{
  TermStore st;
  VmtDocument doc = load_corpus(st, "running.vmt");
  TransitionSystem & s = doc.system;
  Property p = doc.properties.at(0);
  Term ir = st.find_var("ir");
  Term dr = st.find_var("dr");
};

bool has(const std::vector<Term> & v, Term t) { return std::find(v.begin(), v.end(), t) != v.end(); }

}  // namespace

TEST(Sts, DelayAddsHistoryChain)
{
  Running r;
  auto [s1, h] = delay(r.s, r.ir, 1);
  EXPECT_EQ(h.var_kind(), VarKind::History);
  EXPECT_TRUE(s1.is_state_var(h));
  EXPECT_TRUE(has(s1.trans_conjuncts(), r.st.mk_eq(s1.next(h), r.ir)));
  EXPECT_EQ(s1.state_vars().size(), r.s.state_vars().size() + 1);
  EXPECT_EQ(s1.count_kind(VarKind::History), 1u);
}

TEST(Sts, DelayIsIdempotent)
{
  Running r;
  auto [s1, h1] = delay(r.s, r.ir, 3);
  auto [s2, h2] = delay(s1, r.ir, 3);
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(s1.state_vars(), s2.state_vars());
  EXPECT_EQ(s1.trans_conjuncts(), s2.trans_conjuncts());
  // a shorter chain is a prefix of the longer one
  auto [s3, h3] = delay(s2, r.ir, 2);
  EXPECT_EQ(s3.state_vars().size(), s2.state_vars().size());
  EXPECT_EQ(h3.depth(), 2u);
}

TEST(Sts, DelayRejectsNextStateTerms)
{
  Running r;
  EXPECT_THROW(delay(r.s, r.s.next(r.dr), 1), ScopeError);
  EXPECT_THROW(delay(r.s, r.ir, 0), InvalidDepth);
}

TEST(Sts, ProphecizeWeakensProperty)
{
  Running r;
  auto [s1, p1, pv] = prophecize(r.s, r.p, r.ir, 1);
  EXPECT_EQ(pv.var_kind(), VarKind::Prophecy);
  EXPECT_TRUE(s1.is_frozen(pv));
  EXPECT_EQ(s1.state_vars().size(), r.s.state_vars().size() + 2);  // n + 1
  Term h = r.st.find_var(history_name(r.ir, 1));
  ASSERT_TRUE(h);
  EXPECT_EQ(p1.formula, r.st.mk_implies(r.st.mk_eq(pv, h), r.p.formula));
  EXPECT_EQ(p1.original, r.p.formula);
  for (Term c : s1.init_conjuncts())
    EXPECT_FALSE(contains(c, [&](Term u) { return u == pv; })) << c.to_string();
}

TEST(Sts, ProphecizeWithoutDelayAddsNoHistory)
{
  Running r;
  auto [s1, p1, pv] = prophecize(r.s, r.p, r.ir, 0);
  EXPECT_EQ(s1.count_kind(VarKind::History), 0u);
  EXPECT_EQ(s1.state_vars().size(), r.s.state_vars().size() + 1);
  EXPECT_EQ(p1.formula, r.st.mk_implies(r.st.mk_eq(pv, r.ir), r.p.formula));
}

TEST(Sts, ProphecizeIsMemoized)
{
  Running r;
  auto [s1, p1, v1] = prophecize(r.s, r.p, r.ir, 2);
  auto [s2, p2, v2] = prophecize(s1, p1, r.ir, 2);
  EXPECT_EQ(v1, v2);
  EXPECT_EQ(s1.state_vars(), s2.state_vars());
  EXPECT_EQ(p1.formula, p2.formula);
}

TEST(Sts, ProphecyOfHistoryTargetsUnderlyingTerm)
{
  Running r;
  auto [s1, h] = delay(r.s, r.ir, 1);
  auto [s2, p2, pv] = prophecize(s1, r.p, h, 1);
  EXPECT_EQ(pv.target(), r.ir);
  EXPECT_EQ(pv.depth(), 2u);
}

TEST(Sts, IsFrozen)
{
  Running r;
  auto [s1, p1, pv] = prophecize(r.s, r.p, r.ir, 1);
  EXPECT_TRUE(s1.is_frozen(pv));
  EXPECT_FALSE(s1.is_frozen(r.dr));
  Term ghost = r.st.mk_var("ghost", r.st.int_sort());
  EXPECT_THROW(s1.is_frozen(ghost), UnknownVariable);
}

TEST(Sts, FrozenVariablesHaveStutterConjunct)
{
  // every frozen v has v' = v among the transition conjuncts
  for (const std::string & f : corpus_files()) {
    TermStore st;
    VmtDocument d = load_corpus(st, f);
    TransitionSystem s = d.system;
    Property p = d.properties.at(0);
    for (Term v : std::vector<Term>(s.state_vars())) {
      if (v.sort().is_array()) continue;
      auto [s1, p1, pv] = prophecize(s, p, v, 1);
      s = s1;
      p = p1;
    }
    for (Term v : s.frozen())
      EXPECT_TRUE(has(s.trans_conjuncts(), st.mk_eq(s.next(v), v))) << f << " " << v.name();
  }
}

TEST(Sts, CheckCurrentState)
{
  Running r;
  EXPECT_NO_THROW(r.s.check_current_state(r.st.mk_lt(r.dr, r.ir), "test"));
  EXPECT_THROW(r.s.check_current_state(r.s.next(r.dr), "test"), ScopeError);
}

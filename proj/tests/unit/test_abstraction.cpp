#include <gtest/gtest.h>

#include <algorithm>

#include "prophic/abstraction.hpp"
#include "prophic/errors.hpp"
#include "support.hpp"

using namespace prophic;
using namespace prophic::test;

namespace {

bool mentions_fun(Term t, FuncDecl::Role role)
{
  return contains(t, [&](Term u) { return u.op() == Op::Apply && u.func()->role == role; });
}

std::vector<Term> all_conjuncts(const TransitionSystem & s, const Property & p)
{
  std::vector<Term> out = s.init_conjuncts();
  out.insert(out.end(), s.trans_conjuncts().begin(), s.trans_conjuncts().end());
  out.push_back(p.formula);
  return out;
}

}  // namespace

TEST(Abstraction, ArrayFreeSystemIsUnchanged)
{
  TermStore st;
  TransitionSystem s(st);
  Term x = st.mk_var("x", st.int_sort());
  s.add_state_var(x);
  s.add_init(st.mk_eq(x, st.mk_int(0)));
  s.add_trans(st.mk_eq(s.next(x), st.mk_add(x, st.mk_int(1))));
  Property p{ st.mk_le(st.mk_int(0), x), st.mk_le(st.mk_int(0), x) };
  for (AbsMode mode : { AbsMode::Strong, AbsMode::Weak }) {
    auto [a, ap, m] = abstract_arrays(s, p, mode);
    EXPECT_TRUE(m.empty());
    EXPECT_EQ(a.init_conjuncts(), s.init_conjuncts());
    EXPECT_EQ(a.trans_conjuncts(), s.trans_conjuncts());
    EXPECT_EQ(ap.formula, p.formula);
  }
}

TEST(Abstraction, StrongModeHasNoEqA)
{
  for (const std::string & f : corpus_files()) {
    TermStore st;
    VmtDocument d = load_corpus(st, f);
    auto [a, ap, m] = abstract_arrays(d.system, d.properties.at(0), AbsMode::Strong);
    for (const AbstractSort & s : m.sorts) EXPECT_EQ(s.eq, nullptr) << f;
    for (Term c : all_conjuncts(a, ap)) EXPECT_FALSE(mentions_fun(c, FuncDecl::Role::AbsEq)) << f;
  }
}

TEST(Abstraction, WeakModeUsesEqABetweenArrays)
{
  // the only `=` between abstract arrays left in weak mode are the stutter
  // conjuncts of frozen variables (constant arrays and arrays the input
  // system already keeps fixed)
  for (const std::string & f : corpus_files()) {
    TermStore st;
    VmtDocument d = load_corpus(st, f);
    auto [a, ap, m] = abstract_arrays(d.system, d.properties.at(0), AbsMode::Weak);
    for (Term c : all_conjuncts(a, ap)) {
      for (Term e : collect(c, [&](Term u) { return u.op() == Op::Eq && m.is_abstract_sort(u[0].sort()); })) {
        bool stutter = e[1].is_var() && a.frozen().count(e[1]) && e[0] == a.next(e[1]);
        EXPECT_TRUE(stutter) << f << ": " << e.to_string();
      }
    }
  }
}

TEST(Abstraction, ConcretizeInvertsAbstract)
{
  for (const std::string & f : corpus_files()) {
    for (AbsMode mode : { AbsMode::Strong, AbsMode::Weak }) {
      TermStore st;
      VmtDocument d = load_corpus(st, f);
      const Property & p = d.properties.at(0);
      auto [a, ap, m] = abstract_arrays(d.system, p, mode);
      std::vector<Term> orig = all_conjuncts(d.system, p);
      for (Term c : all_conjuncts(a, ap)) {
        Term back = concretize(st, m, c);
        bool trivial = back.op() == Op::Eq && back[0] == back[1];
        bool found = std::find(orig.begin(), orig.end(), back) != orig.end();
        EXPECT_TRUE(found || trivial) << f << ": " << back.to_string();
      }
      for (Term c : orig) EXPECT_EQ(concretize(st, m, m.abstract(st, c)), c) << f;
    }
  }
}

TEST(Abstraction, ConcretizeReadA)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running.vmt");
  auto [a, ap, m] = abstract_arrays(d.system, d.properties.at(0), AbsMode::Weak);
  Term arr = st.find_var("a");
  Term p = st.mk_var("p", st.int_sort());
  Term abs_a = m.var_to_abs.at(arr);
  Term lhs = st.mk_lt(st.mk_app(m.sorts[0].read, { abs_a, p }), st.mk_int(200));
  EXPECT_EQ(concretize(st, m, lhs), st.mk_lt(st.mk_read(arr, p), st.mk_int(200)));
  ASSERT_EQ(m.constarr_map.size(), 1u);
  Term k0 = m.constarr_map.begin()->first;
  Term eq = st.mk_app(m.sorts[0].eq, { abs_a, k0 });
  EXPECT_EQ(concretize(st, m, eq), st.mk_eq(arr, st.mk_const_array(arr.sort(), st.mk_int(0))));
}

TEST(Abstraction, UnmappedSymbol)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running.vmt");
  auto [a, ap, m] = abstract_arrays(d.system, d.properties.at(0), AbsMode::Weak);
  Term stray = st.mk_var("stray", m.sorts[0].abstract);
  EXPECT_THROW(concretize(st, m, st.mk_app(m.sorts[0].eq, { stray, stray })), UnmappedSymbol);
}

TEST(Abstraction, RejectsFiniteAndNestedSorts)
{
  {
    TermStore st;
    TransitionSystem s(st);
    Term b = st.mk_var("b", st.array_sort(st.bool_sort(), st.int_sort()));
    s.add_state_var(b);
    Term f = st.mk_le(st.mk_int(0), st.mk_read(b, st.mk_true()));
    EXPECT_THROW(abstract_arrays(s, Property{ f, f }, AbsMode::Weak), FiniteIndexSort);
  }
  {
    TermStore st;
    TransitionSystem s(st);
    Sort inner = st.array_sort(st.int_sort(), st.int_sort());
    Term n = st.mk_var("n", st.array_sort(st.int_sort(), inner));
    s.add_state_var(n);
    Term f = st.mk_le(st.mk_int(0), st.mk_read(st.mk_read(n, st.mk_int(0)), st.mk_int(1)));
    EXPECT_THROW(abstract_arrays(s, Property{ f, f }, AbsMode::Weak), NestedArray);
  }
}

TEST(Abstraction, AbstractBmcOverApproximates)
{
  // a concrete counterexample of length k survives the abstraction
  for (const std::string & f : corpus_files()) {
    for (AbsMode mode : { AbsMode::Strong, AbsMode::Weak }) {
      TermStore st;
      VmtDocument d = load_corpus(st, f);
      TransitionSystem conc = d.system;
      for (Term x : std::vector<Term>(conc.input_vars())) conc.promote_input(x);
      const Property & p = d.properties.at(0);
      auto [a, ap, m] = abstract_arrays(conc, p, mode);
      for (std::uint32_t k = 1; k <= 4; ++k) {
        std::string c = oracle_bmc(conc, p, k, false);
        std::string ab = oracle_bmc(a, ap, k, false);
        if (c == "sat") EXPECT_EQ(ab, "sat") << f << " k=" << k;
        if (ab == "unsat") EXPECT_EQ(c, "unsat") << f << " k=" << k;
      }
    }
  }
}

#include <gtest/gtest.h>

#include "prophic/abstraction.hpp"
#include "prophic/errors.hpp"
#include "prophic/vmt.hpp"
#include "support.hpp"

using namespace prophic;
using namespace prophic::test;

namespace {

const char * kHeader = R"(
(declare-fun x () Int)
(declare-fun x.next () Int)
(define-fun .x () Int (! x :next x.next))
)";

std::string with_body(const std::string & body) { return std::string(kHeader) + body; }

const std::string kSections = R"(
(define-fun .init () Bool (! (= x 0) :init true))
(define-fun .trans () Bool (! (= x.next (+ x 1)) :trans true))
(define-fun .prop () Bool (! (>= x 0) :invar-property 0))
)";

}  // namespace

TEST(Vmt, ParsesRunningExample)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running.vmt");
  EXPECT_EQ(d.system.state_vars().size(), 5u);
  EXPECT_TRUE(d.system.input_vars().empty());
  EXPECT_EQ(d.system.init_conjuncts().size(), 2u);
  EXPECT_EQ(d.system.trans_conjuncts().size(), 2u);
  ASSERT_EQ(d.properties.size(), 1u);
  Term dr = st.find_var("dr");
  EXPECT_EQ(d.properties.at(0).formula, st.mk_lt(dr, st.mk_int(200)));
}

TEST(Vmt, UndeclaredNextMakesInput)
{
  TermStore st;
  VmtDocument d = parse_vmt(st, with_body("(declare-fun i () Int)\n" + kSections));
  EXPECT_EQ(d.system.input_vars(), std::vector<Term>{ st.find_var("i") });
}

TEST(Vmt, Rejections)
{
  TermStore st;
  EXPECT_THROW(parse_vmt(st, with_body(R"(
(define-fun .init () Bool (! (= x 0) :init true))
(define-fun .trans () Bool (! (forall ((y Int)) (<= x.next y)) :trans true))
(define-fun .prop () Bool (! (>= x 0) :invar-property 0)))")),
               UnsupportedLogic);
  EXPECT_THROW(parse_vmt(st, with_body(kSections + "(define-fun .i2 () Bool (! (= x 1) :init true))")), MissingSection);
  EXPECT_THROW(parse_vmt(st, with_body(R"((define-fun .init () Bool (! (= x 0) :init true)))")), MissingSection);
  EXPECT_THROW(parse_vmt(st, "(declare-fun b () (Array (_ BitVec 8) Int))" + kSections), UnsupportedLogic);
  EXPECT_THROW(parse_vmt(st, "(declare-fun n () (Array Int (Array Int Int)))" + kSections), UnsupportedLogic);
}

TEST(Vmt, ParseErrorCarriesPosition)
{
  TermStore st;
  try {
    parse_vmt(st, "(declare-fun x () Int)\n(define-fun .init () Bool\n  (! (= x 0 :init true))");
    FAIL() << "expected ParseError";
  } catch (const ParseError & e) {
    EXPECT_GE(e.line(), 1);
    EXPECT_GE(e.col(), 1);
  }
}

TEST(Vmt, EmitsAbstractVocabulary)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running.vmt");
  auto [a, ap, m] = abstract_arrays(d.system, d.properties.at(0), AbsMode::Weak);
  std::string text = emit_vmt(a, ap);
  EXPECT_NE(text.find("(declare-sort"), std::string::npos);
  EXPECT_NE(text.find(m.sorts[0].read->name), std::string::npos);
  EXPECT_NE(text.find(":invar-property 0"), std::string::npos);
  TermStore st2;
  EXPECT_NO_THROW(parse_vmt(st2, text));
}

TEST(Vmt, RoundTripPreservesSystem)
{
  for (const std::string & f : corpus_files()) {
    TermStore st;
    VmtDocument d = load_corpus(st, f);
    const Property & p = d.properties.at(0);
    TermStore st2;
    VmtDocument e = parse_vmt(st2, emit_vmt(d.system, p));
    Renaming r;
    EXPECT_TRUE(alpha_equiv_sets(d.system.init_conjuncts(), e.system.init_conjuncts(), r)) << f;
    EXPECT_TRUE(alpha_equiv_sets(d.system.trans_conjuncts(), e.system.trans_conjuncts(), r)) << f;
    EXPECT_TRUE(alpha_equiv(p.formula, e.properties.at(0).formula, r)) << f;
    TransitionSystem s1 = d.system, s2 = e.system;
    for (Term x : std::vector<Term>(s1.input_vars())) s1.promote_input(x);
    for (Term x : std::vector<Term>(s2.input_vars())) s2.promote_input(x);
    for (std::uint32_t k = 1; k <= 3; ++k)
      EXPECT_EQ(oracle_bmc(s1, p, k, false), oracle_bmc(s2, e.properties.at(0), k, false)) << f << " k=" << k;
  }
}

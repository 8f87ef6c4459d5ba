#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <sys/stat.h>

#include "prophic/errors.hpp"
#include "prophic/prover.hpp"
#include "prophic/refiner.hpp"
#include "support.hpp"

using namespace prophic;
using namespace prophic::test;

namespace {

struct Prophesied
{
  TermStore st;
  VmtDocument doc = load_corpus(st, "running.vmt");
  std::tuple<TransitionSystem, Property, Term> pr =
      prophecize(doc.system, doc.properties.at(0), st.find_var("ir"), 1);
  TransitionSystem & s = std::get<0>(pr);
  Property & p = std::get<1>(pr);
  Term pv = std::get<2>(pr);
  Term a = st.find_var("a");
  Term dr = st.find_var("dr");
  Term c = st.mk_int(200);

  Term invariant()
  {
    Term h = st.find_var(history_name(st.find_var("ir"), 1));
    return st.mk_and({ st.mk_lt(st.mk_read(a, pv), c), st.mk_implies(st.mk_eq(pv, h), st.mk_lt(dr, c)) });
  }
};

std::string stub(const std::string & name, const std::string & body)
{
  auto path = std::filesystem::temp_directory_path() / ("prophic_stub_" + name + ".sh");
  std::ofstream(path) << "#!/bin/sh\n" << body;
  chmod(path.c_str(), 0755);
  return path.string();
}

}  // namespace

TEST(Prover, CertificateOfProphesiedSystem)
{
  Prophesied r;
  EXPECT_TRUE(check_certificate(r.s, r.p, r.invariant(), SolverConfig{}));
  // the property alone is not inductive
  EXPECT_FALSE(check_certificate(r.s, r.p, r.p.formula, SolverConfig{}));
  EXPECT_FALSE(check_certificate(r.s, r.p, r.st.mk_false(), SolverConfig{}));
  EXPECT_TRUE(oracle_induction(r.s, r.invariant(), {}, 1, false) == "unsat");
}

TEST(Prover, CertificateOfUnsafeSystem)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running_unsafe.vmt");
  EXPECT_FALSE(check_certificate(d.system, d.properties.at(0), st.mk_true(), SolverConfig{}));
}

TEST(Prover, FindsInvariantAfterRefinement)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running.vmt");
  auto [s0, p0, m] = abstract_arrays(d.system, d.properties.at(0), AbsMode::Strong);
  AxiomContext ctx;
  ctx.map = &m;
  TransitionSystem s = s0;
  Property p = p0;
  ProveOptions o;
  o.min_k = 4;
  o.max_k = 4;
  ProveResult before = prove(s, p, o);
  EXPECT_EQ(before.kind, ProveResult::Kind::Falsified);
  EXPECT_EQ(before.bound, 4u);
  for (std::uint32_t k = 1; k <= 4; ++k) {
    RefineOutcome out = refine_arrays(ctx, SolverConfig{}, s, p, k);
    ASSERT_TRUE(out.refined);
    s = out.system;
    p = out.property;
  }
  o.min_k = 5;
  o.max_k = 8;
  ProveResult after = prove(s, p, o);
  ASSERT_EQ(after.kind, ProveResult::Kind::Proven) << after.reason;
  EXPECT_TRUE(check_certificate(s, p, after.invariant, SolverConfig{}, after.depth, o.assume_prestate));
}

TEST(Prover, HoudiniResultIsInductive)
{
  Prophesied r;
  std::vector<Term> cands = mine_candidates(r.s, r.p, 2000);
  EXPECT_FALSE(cands.empty());
  EXPECT_LE(cands.size(), 2000u);
  SolverSession ses{ SolverConfig{} };
  std::vector<Term> kept = houdini(ses, r.s, r.p, cands, false);
  Term inv = r.st.mk_and(kept);
  EXPECT_EQ(oracle_bmc(r.s, Property{ inv, inv }, 1, false), "unsat");
  EXPECT_EQ(oracle_induction(r.s, inv, {}, 1, false), "unsat");
}

TEST(Prover, ReplayTrace)
{
  TermStore st;
  VmtDocument d = load_corpus(st, "running.vmt");
  Term dr = st.find_var("dr");
  std::vector<TraceStep> spurious{ { { dr, BigInt(0) } }, { { dr, BigInt(300) } } };
  EXPECT_FALSE(replay_trace(d.system, d.properties.at(0), spurious, SolverConfig{}));
  EXPECT_THROW(replay_trace(d.system, d.properties.at(0), {}, SolverConfig{}), InvalidTrace);

  TermStore st2;
  VmtDocument u = load_corpus(st2, "running_unsafe.vmt");
  ProveOptions o;
  o.engine = EngineKind::BmcOnly;
  o.max_k = 3;
  ProveResult r = prove(u.system, u.properties.at(0), o);
  ASSERT_EQ(r.kind, ProveResult::Kind::Falsified);
  std::vector<TraceStep> trace(r.bound);
  for (std::uint32_t i = 0; i < r.bound; ++i)
    for (Term v : u.system.state_vars()) {
      if (v.sort().is_array()) continue;
      if (const Value * val = r.model.find(st2.timed(v, i))) trace[i][v] = *val;
    }
  EXPECT_TRUE(replay_trace(u.system, u.properties.at(0), trace, SolverConfig{}));
}

TEST(Prover, ExternalEngineVerdicts)
{
  Prophesied r;
  ProveOptions o;
  o.engine = EngineKind::External;

  o.external_path = stub("safe", "echo safe\n");
  ProveResult safe = prove(r.s, r.p, o);
  EXPECT_EQ(safe.kind, ProveResult::Kind::Proven);
  EXPECT_FALSE(safe.invariant);

  o.external_path = stub("safe_inv", "echo safe\necho '(define-fun inv () Bool (< dr 200))'\n");
  ProveResult with_inv = prove(r.s, r.p, o);
  ASSERT_EQ(with_inv.kind, ProveResult::Kind::Proven);
  EXPECT_EQ(with_inv.invariant, r.st.mk_lt(r.dr, r.c));

  o.external_path = stub("unknown", "echo unknown\n");
  EXPECT_EQ(prove(r.s, r.p, o).kind, ProveResult::Kind::Unknown);

  o.external_path = stub("garbage", "echo banana\nexit 4\n");
  EXPECT_THROW(prove(r.s, r.p, o), EngineCrashed);

  // the claimed counterexample does not exist in a safe system
  o.external_path = stub("lying", "echo unsafe 2\n");
  EXPECT_THROW(prove(r.s, r.p, o), EngineCrashed);

  TermStore st;
  VmtDocument u = load_corpus(st, "running_unsafe.vmt");
  o.external_path = stub("unsafe", "echo unsafe 3\n");
  ProveResult bad = prove(u.system, u.properties.at(0), o);
  EXPECT_EQ(bad.kind, ProveResult::Kind::Falsified);
  EXPECT_EQ(bad.bound, 3u);
}

TEST(Prover, KInductionVerdictIsStableInBudget)
{
  Prophesied r;
  Property p{ r.p.formula, r.p.original };
  for (std::uint32_t max_k = 1; max_k <= 4; ++max_k) {
    ProveOptions o;
    o.max_k = max_k;
    ProveResult res = prove(r.s, p, o);
    EXPECT_NE(res.kind, ProveResult::Kind::Falsified);
  }
}

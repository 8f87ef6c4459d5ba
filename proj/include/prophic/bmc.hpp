#pragma once

#include <string>
#include <vector>

#include "prophic/smt.hpp"
#include "prophic/sts.hpp"

namespace prophic {

struct NamedTerm
{
  std::string name;
  Term formula;
};

/// BMC(S, P, k) for a path of k states s0..s(k-1).
struct Unrolling
{
  std::uint32_t k = 1;
  std::vector<NamedTerm> init;    // I(X@0)
  std::vector<NamedTerm> trans;   // T(X@i, X@(i+1)), i < k-1
  std::vector<NamedTerm> assume;  // P_original(X@i), i < k-1 (assume-prop-prestate)
  NamedTerm goal;                 // not P(X@(k-1))
  std::vector<NamedTerm> side;

  std::vector<NamedTerm> all() const;
  std::vector<Term> formulas() const;
};

/// Maps state variables to step, next-state variables to step+1 and inputs
/// to their copy at step.
Term timed_at(const TransitionSystem & s, Term t, std::uint32_t step);

/// Inverse of timed_at for a consecutive formula: X@base -> X,
/// X@(base+1) -> X'. Timed inputs map back to the input variable.
Term untime(const TransitionSystem & s, Term t, std::uint32_t base);

Unrolling unroll(const TransitionSystem & s,
                 const Property & p,
                 std::uint32_t k,
                 const std::vector<Term> & side = {},
                 bool assume_prestate = false);

struct BmcResult
{
  CheckStatus status = CheckStatus::Unknown;
  CexModel model;
  std::vector<std::string> core;
};

void assert_unrolling(SolverSession & ses, const Unrolling & u, bool named = true);

/// Checks the unrolling in a fresh scope of the session.
BmcResult bmc_check(SolverSession & ses, const Unrolling & u, Want want = Want::Model);

}  // namespace prophic

#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "prophic/abstraction.hpp"
#include "prophic/bmc.hpp"
#include "prophic/model.hpp"

namespace prophic {

enum class IndexOrigin
{
  ReadIdx,
  WriteIdx,
  StateIdx,  // current-state index term of the system, timed at every step
  Witness,
  Lambda,
  ProphecyAdded
};

const char * to_string(IndexOrigin o);

struct IndexEntry
{
  Term term;  // timed
  IndexOrigin origin;
};

struct IndexSet
{
  std::map<Sort, std::vector<IndexEntry>> entries;
  std::map<Sort, Term> lambda;  // untimed lambda variable per index sort
  std::vector<Term> side;       // lambda constraints for the BMC query

  std::size_t size() const;
  bool contains(Term t) const;
  std::vector<Term> terms() const;
  std::vector<Term> terms(Sort s) const;
};

/// Fresh variables that must stay stable across refinement rounds: one
/// witness per array-equality occurrence and one lambda per index sort.
struct AxiomContext
{
  const AbstractionMap * map = nullptr;
  std::map<Term, Term> witness;  // untimed equality -> witness variable
  std::map<Sort, Term> lambda;

  Term witness_for(TermStore & st, Term eq);
  Term lambda_for(TermStore & st, Sort s);
  bool is_array_eq(Term t) const;
  bool is_lambda(Term v) const;
  bool is_witness(Term v) const;
};

/// Index terms, witnesses, lambdas and prophecy copies for a k-state path.
IndexSet compute_indices(AxiomContext & ctx,
                         const TransitionSystem & s,
                         const Property & p,
                         std::uint32_t k,
                         const Unrolling * u = nullptr);

enum class Schema
{
  WriteCase,
  ConstCase,
  ExtWitness,
  CongruenceWA
};

const char * to_string(Schema s);

struct Classification
{
  bool consecutive = true;
  Term index;  // instantiating index (non-consecutive only)
  std::uint32_t n_i = 0;
};

struct AxiomInstance
{
  Schema schema;
  Term formula;  // timed
  Term trigger;
  Term inst_index;
  Classification cls;

  bool consecutive() const { return cls.consecutive; }
};

/// Consecutive iff the steps of f span at most one.
Classification classify(Term f, Term inst_index);

struct AxiomCheck
{
  std::vector<AxiomInstance> ca;
  std::vector<AxiomInstance> nca;
  std::size_t instantiated = 0;
  bool empty() const { return ca.empty() && nca.empty(); }
};

/// Instantiates the array axioms over the index set and keeps the instances
/// falsified by rho. With a live session, application values missing from
/// rho are fetched in one batch first.
AxiomCheck check_array_axioms(AxiomContext & ctx,
                              const TransitionSystem & s,
                              const IndexSet & idx,
                              const Unrolling & u,
                              CexModel & rho,
                              SolverSession * live = nullptr);

/// Builds every instance the checker would consider, violated or not.
std::vector<AxiomInstance> instantiate_axioms(AxiomContext & ctx,
                                              const TransitionSystem & s,
                                              const IndexSet & idx,
                                              const Unrolling & u,
                                              bool wide_congruence);

/// Moves timed copies of frozen variables (and lambdas) to one step so that
/// the instance spans as few steps as possible. Sound within an unrolling,
/// where all copies of a frozen variable are equal.
Term retime_frozen(const AxiomContext & ctx, const TransitionSystem & s, Term f);

}  // namespace prophic

#pragma once

#include <optional>
#include <vector>

#include "prophic/axioms.hpp"
#include "prophic/smt.hpp"

namespace prophic {

enum class Placement
{
  Init,
  Trans1,  // one-step fact, conjoined for X and X'
  Trans2   // two-step fact over X and X'
};

const char * to_string(Placement p);

struct Lemma
{
  Term formula;  // untimed, over X (and X' for Trans2)
  Placement placement;
  Schema schema;
  // conjuncts this lemma actually contributed (others were already present)
  std::vector<Term> init_parts;
  std::vector<Term> trans_parts;
};

struct RefineOptions
{
  bool proph_reduction = true;     // off: --no-proph-reduction
  bool unsatcore_reduction = true; // off: --no-unsatcore-reduction
  bool axiom_reduction = true;     // off: --no-axiom-reduction
  bool assume_prestate = true;
  std::size_t max_iters = 200;
};

struct RefineOutcome
{
  RefineOutcome(TransitionSystem s, Property p) : system(std::move(s)), property(std::move(p)) {}

  TransitionSystem system;
  Property property;
  bool refined = false;
  bool resource_out = false;  // iteration cap reached; neither verdict holds
  std::vector<AuxRecord> added_aux;
  std::vector<Lemma> added_lemmas;
  std::size_t iterations = 0;
  // every violated instance seen, timed (diagnostics and validity checks)
  std::vector<AxiomInstance> instances;
  // refined == false: the model of the final unrolling
  std::optional<CexModel> cex;
  std::optional<Unrolling> cex_unrolling;
};

/// One bound of the refinement loop. The context keeps witness and lambda
/// variables stable across calls.
RefineOutcome refine_arrays(AxiomContext & ctx,
                            const SolverConfig & solver,
                            const TransitionSystem & s,
                            const Property & p,
                            std::uint32_t k,
                            const RefineOptions & opts = {});

/// Conjoins a consecutive timed instance to the system. Variables of the
/// instance that the system does not track yet (witnesses, lambdas, inputs)
/// become unconstrained state variables first. Throws NotConsecutive.
TransitionSystem lift_consecutive(const TransitionSystem & s,
                                  Term timed_instance,
                                  std::uint32_t k,
                                  Lemma * out = nullptr);

inline TransitionSystem lift_consecutive(const TransitionSystem & s,
                                         const AxiomInstance & ax,
                                         std::uint32_t k,
                                         Lemma * out = nullptr)
{
  TransitionSystem r = lift_consecutive(s, ax.formula, k, out);
  if (out) out->schema = ax.schema;
  return r;
}

enum class ReduceKind
{
  NonConsecutive,
  Consecutive
};

/// Subset of candidates that keeps U (plus background) unsat. Deletion
/// based; non-consecutive candidates with earlier target steps are dropped
/// first. Returns all candidates when the full set is not unsat or the
/// solver fails.
std::vector<AxiomInstance> reduce_axioms(SolverSession & ses,
                                         const Unrolling & u,
                                         const std::vector<AxiomInstance> & candidates,
                                         ReduceKind kind,
                                         const std::vector<Term> & background = {});

}  // namespace prophic

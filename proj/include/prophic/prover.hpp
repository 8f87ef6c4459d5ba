#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prophic/bmc.hpp"
#include "prophic/smt.hpp"

namespace prophic {

enum class EngineKind
{
  KInduction,
  BmcOnly,
  External
};

struct ProveOptions
{
  EngineKind engine = EngineKind::KInduction;
  std::string external_path;
  std::uint32_t max_k = 25;
  std::uint32_t min_k = 1;  // bounds below are known to have no counterexample
  bool assume_prestate = true;
  double kind_timeout_s = 0;  // per query; 0 keeps the solver config value
  std::size_t max_candidates = 2000;
  SolverConfig solver;
};

struct ProveResult
{
  enum class Kind
  {
    Proven,
    Falsified,
    Unknown
  };
  Kind kind = Kind::Unknown;
  Term invariant;          // Proven; may be null for external engines
  std::uint32_t depth = 1; // Proven: induction depth the invariant needs
  std::uint32_t bound = 0; // Falsified: path length
  CexModel model;          // Falsified
  std::optional<Unrolling> unrolling;
  std::string reason;      // Unknown
};

const char * to_string(ProveResult::Kind k);

ProveResult prove(const TransitionSystem & s, const Property & p, const ProveOptions & opts);

/// Candidate lemmas the builtin engine feeds to Houdini.
std::vector<Term> mine_candidates(const TransitionSystem & s, const Property & p, std::size_t limit);

/// Largest inductive subset of the candidates (relative to T, and to the
/// original property in pre-states when assume_prestate holds).
std::vector<Term> houdini(SolverSession & ses,
                          const TransitionSystem & s,
                          const Property & p,
                          std::vector<Term> candidates,
                          bool assume_prestate);

/// I |= inv, inv /\ T |= inv', inv |= P. With depth d > 1 the first two
/// become: every path of d states from I satisfies inv, and d consecutive inv
/// states force inv in the next one. With assume_prestate, P.original is
/// assumed in every pre-state of the consecution query.
bool check_certificate(const TransitionSystem & s,
                       const Property & p,
                       Term inv,
                       const SolverConfig & cfg,
                       std::uint32_t depth = 1,
                       bool assume_prestate = false);

using TraceStep = std::map<Term, Value>;

/// True iff the trace extends to a path from I whose last state violates P.
/// Values are pinned per step; unmentioned variables (arrays) stay free.
bool replay_trace(const TransitionSystem & s,
                  const Property & p,
                  const std::vector<TraceStep> & trace,
                  const SolverConfig & cfg);

/// Literal for a pinned value; null for values of uninterpreted sorts.
Term value_term(TermStore & st, Sort s, const Value & v);

}  // namespace prophic

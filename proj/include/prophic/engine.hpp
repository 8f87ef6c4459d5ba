#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prophic/abstraction.hpp"
#include "prophic/prover.hpp"
#include "prophic/refiner.hpp"
#include "prophic/vmt.hpp"

namespace prophic {

struct EngineConfig
{
  AbsMode mode = AbsMode::Weak;
  ProveOptions prove;
  RefineOptions refine;
  bool value_abstraction = true;
  BigInt value_threshold = 10;
  std::size_t max_refinements = 50;
  double timeout_s = 0;  // wall clock for the whole run; 0: none
  int property = 0;
  std::string solver_command = SolverConfig::default_command();
  bool verbose = false;  // progress on stderr
};

struct EngineStats
{
  std::uint32_t bound = 0;
  std::size_t n_prophecy = 0;
  std::size_t n_history = 0;
  std::size_t n_lemmas = 0;
  std::size_t n_refine_rounds = 0;
  std::size_t n_solver_queries = 0;
  long long time_ms = 0;
  std::vector<std::uint32_t> refuted_bounds;  // in refinement order
  std::vector<std::size_t> prophecy_per_bound;  // prophecy count after each refinement
};

struct Verdict
{
  enum class Kind
  {
    Safe,
    Unsafe,
    Unknown
  };
  Kind kind = Kind::Unknown;
  std::string reason;
  EngineStats stats;

  // Safe: the concrete system extended with auxiliary variables and lemmas,
  // together with an invariant that check_certificate accepts on it
  std::optional<TransitionSystem> certificate_system;
  Property certificate_property;
  Term invariant;
  std::uint32_t depth = 1;
  bool assume_prestate = false;

  // Unsafe: values of the concrete non-array variables per step
  std::vector<TraceStep> trace;
};

const char * to_string(Verdict::Kind k);

/// The whole loop: value abstraction, array abstraction, then alternating
/// prove and refine until a verdict or a budget runs out. Safe and Unsafe
/// verdicts are checked before they are returned; a failed check throws.
Verdict run(const EngineConfig & cfg, TermStore & store, const VmtDocument & doc);

/// SMT-LIB text for Safe (invariant and auxiliary variables) or Unsafe
/// (one state block per step); empty for Unknown.
std::string emit_witness(const Verdict & v);

std::string stats_json(const Verdict & v);

struct ValueAbstraction
{
  TransitionSystem system;
  Property property;
  std::vector<std::pair<Term, BigInt>> constants;  // frozen variable -> literal
};

/// Replaces integer literals with |c| > threshold by frozen variables that
/// keep the literals' total order.
ValueAbstraction abstract_values(const TransitionSystem & s, const Property & p, const BigInt & threshold);

}  // namespace prophic

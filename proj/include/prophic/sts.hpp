#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "prophic/terms.hpp"

namespace prophic {

struct Property
{
  Term formula;
  Term original;  // the user property before any prophecy weakening
};

struct AuxRecord
{
  enum class Kind
  {
    HistoryChain,  // vars = h1..hn, h1' = target, hi' = h(i-1)
    ProphecyVar,   // vars = {p}, frozen, predicts target (or its history)
    Promoted       // vars = {v}, unconstrained state variable
  };
  Kind kind;
  Term target;
  std::uint32_t depth = 0;
  std::vector<Term> vars;
};

/// Symbolic transition system. Init and trans are kept as conjunct lists.
/// Copies share the term store.
class TransitionSystem
{
 public:
  explicit TransitionSystem(TermStore & store) : store_(&store) {}

  TermStore & store() const { return *store_; }

  /// Adds a state variable and creates its next-state partner.
  void add_state_var(Term v, const std::string & next_name = {});
  void add_input_var(Term v);
  /// Turns an input into an unconstrained state variable.
  void promote_input(Term v);
  void add_init(Term c);
  void add_trans(Term c);
  /// Marks v frozen and adds the conjunct v' = v.
  void add_frozen(Term v);
  /// Drops a conjunct previously added; no-op when absent.
  void remove_init(Term c);
  void remove_trans(Term c);
  void log_aux(AuxRecord r) { aux_log_.push_back(std::move(r)); }

  const std::vector<Term> & state_vars() const { return state_vars_; }
  const std::vector<Term> & input_vars() const { return inputs_; }
  const std::vector<Term> & init_conjuncts() const { return init_; }
  const std::vector<Term> & trans_conjuncts() const { return trans_; }
  const std::vector<AuxRecord> & aux_log() const { return aux_log_; }
  Term init() const;
  Term trans() const;

  bool is_state_var(Term v) const;
  bool is_input_var(Term v) const;
  /// Throws UnknownVariable when v is not a state variable.
  bool is_frozen(Term v) const;
  const TermSet & frozen() const { return frozen_; }

  Term next(Term v) const;
  /// Replaces every state variable by its next-state copy.
  Term prime(Term t) const;

  /// Throws ScopeError unless t only mentions state and input variables.
  void check_current_state(Term t, const char * what) const;

  std::size_t count_kind(VarKind k) const;

 private:
  TermStore * store_;
  std::vector<Term> state_vars_;
  TermSet state_set_;
  std::vector<Term> inputs_;
  TermSet input_set_;
  std::vector<Term> init_;
  std::vector<Term> trans_;
  TermSet init_set_;
  TermSet trans_set_;
  TermSet frozen_;
  std::vector<AuxRecord> aux_log_;
};

/// Stable short digest of a term, used in auxiliary variable names.
std::string term_digest(Term t);

std::string history_name(Term target, std::uint32_t depth);
std::string prophecy_name(Term target, std::uint32_t delay);

/// Adds the history chain for t of length n and returns the last element.
/// Memoized through the variable names: repeating a call adds nothing.
std::pair<TransitionSystem, Term> delay(const TransitionSystem & s, Term t, std::uint32_t n);

/// Introduces a frozen prophecy variable p for t delayed by n and weakens the
/// property to (p = target) => P. History-variable targets are rewritten to
/// their underlying term with a larger delay.
std::tuple<TransitionSystem, Property, Term> prophecize(const TransitionSystem & s,
                                                       const Property & p,
                                                       Term t,
                                                       std::uint32_t n);

}  // namespace prophic

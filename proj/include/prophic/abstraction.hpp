#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "prophic/sts.hpp"
#include "prophic/terms.hpp"

namespace prophic {

enum class AbsMode
{
  Strong,
  Weak
};

struct AbstractSort
{
  Sort concrete;
  Sort abstract;
  const FuncDecl * read = nullptr;
  const FuncDecl * write = nullptr;
  const FuncDecl * eq = nullptr;  // weak mode only
};

class AbstractionMap
{
 public:
  AbsMode mode = AbsMode::Weak;
  std::vector<AbstractSort> sorts;
  TermMap var_to_abs;  // concrete array var -> abstract var (state/input only)
  TermMap abs_to_var;
  std::map<Term, Term> constarr_map;  // abstract var -> concrete element
  std::map<Term, Term> constarr_var;  // concrete constarr term -> abstract var

  bool empty() const { return sorts.empty(); }
  const AbstractSort * by_concrete(Sort s) const;
  const AbstractSort * by_abstract(Sort s) const;
  bool is_abstract_sort(Sort s) const { return by_abstract(s) != nullptr; }
  bool is_constarr_var(Term v) const;

  /// Rewrites a concrete term over the recorded vocabulary. Constant arrays
  /// not yet mapped are rejected; use abstract_arrays to build the map.
  Term abstract(TermStore & st, Term t) const;
};

/// Replaces arrays by uninterpreted sorts and functions. Every constant array
/// becomes a fresh frozen state variable.
std::tuple<TransitionSystem, Property, AbstractionMap> abstract_arrays(
    const TransitionSystem & s, const Property & p, AbsMode mode);

/// Inverse rewriting into the array vocabulary. Throws UnmappedSymbol for
/// abstract-sorted variables the map does not know.
Term concretize(TermStore & st, const AbstractionMap & m, Term t);

}  // namespace prophic

#pragma once

#include <map>
#include <string>
#include <vector>

#include "prophic/prover.hpp"
#include "prophic/sts.hpp"
#include "prophic/vmt.hpp"

namespace prophic::test {

std::string corpus_dir();
std::vector<std::string> corpus_files();  // sorted basenames
std::string read_file(const std::string & path);
VmtDocument load_corpus(TermStore & st, const std::string & name);

/// Runs z3 on a script and returns its first output line.
std::string run_z3(const std::string & script);

/// Independent BMC oracle: unrolls by renaming variables into fresh
/// constants, prints the query as text and hands it to z3 directly.
/// Path of k states; with assume_prestate the original property holds in
/// every state but the last. Pins fix the listed variables per step.
/// Returns z3's answer ("sat", "unsat", ...).
std::string oracle_bmc(const TransitionSystem & s,
                       const Property & p,
                       std::uint32_t k,
                       bool assume_prestate,
                       const std::vector<TraceStep> * pins = nullptr);

/// depth states satisfying inv (and assume when assume_prestate), linked by
/// T, followed by a state violating inv. "unsat" means inv is d-inductive.
std::string oracle_induction(const TransitionSystem & s, Term inv, Term assume, std::uint32_t depth, bool assume_prestate);

/// z3 validity check of a closed formula over declared symbols.
bool oracle_valid(Term f);

/// Structural equality up to a consistent bijective renaming of variables
/// and function symbols.
struct Renaming
{
  std::map<Term, Term> vars, vars_back;
  std::map<const FuncDecl *, const FuncDecl *> funs, funs_back;
};
bool alpha_equiv(Term a, Term b, Renaming & r);

/// Same for two conjunct lists matched in any order.
bool alpha_equiv_sets(const std::vector<Term> & a, const std::vector<Term> & b, Renaming & r);

/// Declarations for every symbol in the terms, as SMT-LIB text.
std::string declarations(const std::vector<Term> & ts);

}  // namespace prophic::test

#include "prophic/bmc.hpp"

#include "prophic/errors.hpp"

namespace prophic {

std::vector<NamedTerm> Unrolling::all() const
{
  std::vector<NamedTerm> out = init;
  out.insert(out.end(), trans.begin(), trans.end());
  out.insert(out.end(), assume.begin(), assume.end());
  out.push_back(goal);
  out.insert(out.end(), side.begin(), side.end());
  return out;
}

std::vector<Term> Unrolling::formulas() const
{
  std::vector<Term> out;
  for (const auto & n : all()) out.push_back(n.formula);
  return out;
}

Term timed_at(const TransitionSystem & s, Term t, std::uint32_t step)
{
  TermStore & st = s.store();
  TermMap m;
  for (Term v : free_vars(t)) {
    if (v.is_timed()) continue;
    if (v.is_next()) {
      if (!s.is_state_var(v.base())) throw UnknownVariable("next of unknown variable " + v.name());
      m.emplace(v, st.timed(v.base(), step + 1));
    } else if (s.is_state_var(v) || s.is_input_var(v)) {
      m.emplace(v, st.timed(v, step));
    } else {
      throw UnknownVariable("variable " + v.name() + " is not part of the system");
    }
  }
  return substitute(st, t, m);
}

Term untime(const TransitionSystem & s, Term t, std::uint32_t base)
{
  TermStore & st = s.store();
  TermMap m;
  for (Term v : free_vars(t)) {
    if (!v.is_timed()) continue;
    Term b = v.base();
    if (v.step() == base) {
      m.emplace(v, b);
    } else if (v.step() == base + 1) {
      if (!s.is_state_var(b))
        throw ScopeError("cannot refer to the next value of " + b.name());
      m.emplace(v, s.next(b));
    } else {
      throw NotConsecutive("step " + std::to_string(v.step()) + " outside of [" + std::to_string(base)
                           + ", " + std::to_string(base + 1) + "]");
    }
  }
  return substitute(st, t, m);
}

Unrolling unroll(const TransitionSystem & s,
                 const Property & p,
                 std::uint32_t k,
                 const std::vector<Term> & side,
                 bool assume_prestate)
{
  if (k == 0) throw InvalidDepth("unrolling bound must be at least 1");
  TermStore & st = s.store();
  Unrolling u;
  u.k = k;
  std::size_t i = 0;
  for (Term c : s.init_conjuncts()) u.init.push_back({ "init:" + std::to_string(i++), timed_at(s, c, 0) });
  for (std::uint32_t step = 0; step + 1 < k; ++step) {
    i = 0;
    for (Term c : s.trans_conjuncts())
      u.trans.push_back({ "trans:" + std::to_string(step) + ":" + std::to_string(i++),
                          timed_at(s, c, step) });
    if (assume_prestate && p.original)
      u.assume.push_back({ "assume:" + std::to_string(step), timed_at(s, p.original, step) });
  }
  u.goal = { "goal", st.mk_not(timed_at(s, p.formula, k - 1)) };
  i = 0;
  for (Term c : side) u.side.push_back({ "side:" + std::to_string(i++), c });
  return u;
}

void assert_unrolling(SolverSession & ses, const Unrolling & u, bool named)
{
  for (const auto & n : u.all()) ses.assert_formula(n.formula, named ? n.name : std::string());
}

BmcResult bmc_check(SolverSession & ses, const Unrolling & u, Want want)
{
  std::vector<std::pair<std::string, Term>> as;
  for (const auto & n : u.all()) as.emplace_back(n.name, n.formula);
  CheckResult r = ses.check(as, want);
  return BmcResult{ r.status, std::move(r.model), std::move(r.core) };
}

}  // namespace prophic

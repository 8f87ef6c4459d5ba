#include "prophic/sts.hpp"

#include <cstdio>

#include "prophic/errors.hpp"

namespace prophic {

void TransitionSystem::add_state_var(Term v, const std::string & next_name)
{
  if (!v.is_var()) throw ScopeError("state variable must be a variable");
  if (state_set_.count(v)) return;
  if (input_set_.count(v)) throw ScopeError(v.name() + " is already an input variable");
  store_->mk_next(v, next_name);
  state_vars_.push_back(v);
  state_set_.insert(v);
}

void TransitionSystem::add_input_var(Term v)
{
  if (!v.is_var()) throw ScopeError("input variable must be a variable");
  if (input_set_.count(v)) return;
  if (state_set_.count(v)) throw ScopeError(v.name() + " is already a state variable");
  inputs_.push_back(v);
  input_set_.insert(v);
}

void TransitionSystem::promote_input(Term v)
{
  if (!input_set_.erase(v)) throw UnknownVariable("not an input: " + v.name());
  std::erase(inputs_, v);
  add_state_var(v);
  log_aux(AuxRecord{ AuxRecord::Kind::Promoted, Term(), 0, { v } });
}

void TransitionSystem::add_init(Term c)
{
  if (contains(c, [](Term u) { return u.is_next() || u.is_timed(); }))
    throw ScopeError("init constraint mentions next-state or timed variables");
  for (Term x : conjuncts(c))
    if (init_set_.insert(x).second) init_.push_back(x);
}

void TransitionSystem::add_trans(Term c)
{
  if (contains(c, [](Term u) { return u.is_timed(); }))
    throw ScopeError("transition constraint mentions timed variables");
  for (Term x : conjuncts(c))
    if (trans_set_.insert(x).second) trans_.push_back(x);
}

void TransitionSystem::remove_init(Term c)
{
  if (init_set_.erase(c)) std::erase(init_, c);
}

void TransitionSystem::remove_trans(Term c)
{
  if (trans_set_.erase(c)) std::erase(trans_, c);
}

void TransitionSystem::add_frozen(Term v)
{
  if (!state_set_.count(v)) throw UnknownVariable(v.name());
  frozen_.insert(v);
  add_trans(store_->mk_eq(next(v), v));
}

Term TransitionSystem::init() const { return store_->mk_and(init_); }
Term TransitionSystem::trans() const { return store_->mk_and(trans_); }

bool TransitionSystem::is_state_var(Term v) const { return state_set_.count(v) > 0; }
bool TransitionSystem::is_input_var(Term v) const { return input_set_.count(v) > 0; }

bool TransitionSystem::is_frozen(Term v) const
{
  if (!state_set_.count(v)) throw UnknownVariable(v ? v.name() : std::string("<null>"));
  return frozen_.count(v) > 0;
}

Term TransitionSystem::next(Term v) const
{
  Term n = store_->next_of(v);
  if (!n || !state_set_.count(v)) throw UnknownVariable("no next-state copy for " + v.name());
  return n;
}

Term TransitionSystem::prime(Term t) const
{
  TermMap m;
  for (Term v : free_vars(t)) {
    if (state_set_.count(v)) m.emplace(v, next(v));
    else if (v.is_next()) throw ScopeError("priming a term that already mentions " + v.name());
  }
  return substitute(*store_, t, m);
}

void TransitionSystem::check_current_state(Term t, const char * what) const
{
  for (Term v : free_vars(t)) {
    if (v.is_next()) throw ScopeError(std::string(what) + " mentions next-state variable " + v.name());
    if (!state_set_.count(v) && !input_set_.count(v))
      throw ScopeError(std::string(what) + " mentions " + v.name()
                       + ", which is not a variable of the system");
  }
}

std::size_t TransitionSystem::count_kind(VarKind k) const
{
  std::size_t n = 0;
  for (Term v : state_vars_) n += v.var_kind() == k;
  return n;
}

// ---- auxiliary variables ----------------------------------------------------

std::string term_digest(Term t)
{
  // FNV-1a over the printed form; stable across runs
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_smt(t)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
  return buf;
}

std::string history_name(Term target, std::uint32_t depth)
{
  return "__hist_" + term_digest(target) + "_" + std::to_string(depth);
}

std::string prophecy_name(Term target, std::uint32_t delay)
{
  return "__proph_" + term_digest(target) + "_" + std::to_string(delay);
}

namespace {

const AuxRecord * find_chain(const TransitionSystem & s, Term t)
{
  const AuxRecord * best = nullptr;
  for (const auto & r : s.aux_log())
    if (r.kind == AuxRecord::Kind::HistoryChain && r.target == t
        && (!best || r.depth > best->depth))
      best = &r;
  return best;
}

Term unique_aux(TermStore & st,
                const std::string & base,
                Sort sort,
                VarKind kind,
                Term target,
                std::uint32_t depth)
{
  std::string name = base;
  for (std::size_t i = 1;; ++i) {
    Term v = st.find_var(name);
    if (!v) return st.mk_aux_var(name, sort, kind, target, depth);
    // a variable that is not tracked by this system may be reused when it has
    // exactly the intended role (another copy of the system created it)
    if (v.var_kind() == kind && v.target() == target && v.depth() == depth && v.sort() == sort)
      return v;
    name = base + "_" + std::to_string(i);
  }
}

}  // namespace

std::pair<TransitionSystem, Term> delay(const TransitionSystem & s, Term t, std::uint32_t n)
{
  if (n == 0) throw InvalidDepth("delay depth must be at least 1");
  s.check_current_state(t, "delay target");
  const AuxRecord * have = find_chain(s, t);
  if (have && have->depth >= n) return { s, have->vars[n - 1] };

  TransitionSystem out = s;
  TermStore & st = out.store();
  std::vector<Term> chain = have ? have->vars : std::vector<Term>{};
  for (std::uint32_t d = static_cast<std::uint32_t>(chain.size()) + 1; d <= n; ++d) {
    Term h = unique_aux(st, history_name(t, d), t.sort(), VarKind::History, t, d);
    out.add_state_var(h);
    Term src = d == 1 ? t : chain.back();
    out.add_trans(st.mk_eq(out.next(h), src));
    chain.push_back(h);
  }
  out.log_aux(AuxRecord{ AuxRecord::Kind::HistoryChain, t, n, chain });
  return { out, chain.back() };
}

std::tuple<TransitionSystem, Property, Term> prophecize(const TransitionSystem & s,
                                                       const Property & prop,
                                                       Term t,
                                                       std::uint32_t n)
{
  s.check_current_state(t, "prophecy target");
  if (contains(t, [](Term u) { return u.is_var() && u.var_kind() == VarKind::Prophecy; }))
    throw ScopeError("prophecy target mentions a prophecy variable");
  while (t.is_var() && t.var_kind() == VarKind::History) {
    n += t.depth();
    t = t.target();
  }

  TransitionSystem out = s;
  Term target = t;
  if (n > 0) std::tie(out, target) = delay(out, t, n);
  TermStore & st = out.store();

  Term p;
  for (const auto & r : out.aux_log())
    if (r.kind == AuxRecord::Kind::ProphecyVar && r.target == t && r.depth == n) p = r.vars[0];
  if (!p) {
    p = unique_aux(st, prophecy_name(t, n), t.sort(), VarKind::Prophecy, t, n);
    out.add_state_var(p);
    out.add_frozen(p);
    out.log_aux(AuxRecord{ AuxRecord::Kind::ProphecyVar, t, n, { p } });
  }

  Term guard = st.mk_eq(p, target);
  // already weakened by this guard: nothing to do
  for (Term f = prop.formula; f.op() == Op::Implies; f = f[1])
    if (f[0] == guard) return { out, prop, p };
  Property weakened{ st.mk_implies(guard, prop.formula), prop.original };
  return { out, weakened, p };
}

}  // namespace prophic

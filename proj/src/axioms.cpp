#include "prophic/axioms.hpp"

#include <algorithm>

#include "prophic/errors.hpp"

namespace prophic {

const char * to_string(IndexOrigin o)
{
  switch (o) {
    case IndexOrigin::ReadIdx: return "read";
    case IndexOrigin::WriteIdx: return "write";
    case IndexOrigin::StateIdx: return "state";
    case IndexOrigin::Witness: return "witness";
    case IndexOrigin::Lambda: return "lambda";
    case IndexOrigin::ProphecyAdded: return "prophecy";
  }
  return "?";
}

const char * to_string(Schema s)
{
  switch (s) {
    case Schema::WriteCase: return "write";
    case Schema::ConstCase: return "const";
    case Schema::ExtWitness: return "ext";
    case Schema::CongruenceWA: return "congruence";
  }
  return "?";
}

std::size_t IndexSet::size() const
{
  std::size_t n = 0;
  for (const auto & [s, es] : entries) n += es.size();
  return n;
}

bool IndexSet::contains(Term t) const
{
  auto it = entries.find(t.sort());
  if (it == entries.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const IndexEntry & e) {
    return e.term == t;
  });
}

std::vector<Term> IndexSet::terms() const
{
  std::vector<Term> out;
  for (const auto & [s, es] : entries)
    for (const auto & e : es) out.push_back(e.term);
  return out;
}

std::vector<Term> IndexSet::terms(Sort s) const
{
  std::vector<Term> out;
  auto it = entries.find(s);
  if (it != entries.end())
    for (const auto & e : it->second) out.push_back(e.term);
  return out;
}

// ---- context ----------------------------------------------------------------

Term AxiomContext::witness_for(TermStore & st, Term eq)
{
  auto it = witness.find(eq);
  if (it != witness.end()) return it->second;
  Term a = eq[0];
  const AbstractSort * as = map ? map->by_abstract(a.sort()) : nullptr;
  if (!as) throw UnmappedSymbol("equality over a non-abstract sort: " + eq.to_string());
  std::string nm = st.fresh_name("w" + std::to_string(witness.size()));
  Term w = st.mk_var(nm, as->concrete.index(), VarKind::Witness);
  witness.emplace(eq, w);
  return w;
}

Term AxiomContext::lambda_for(TermStore & st, Sort s)
{
  auto it = lambda.find(s);
  if (it != lambda.end()) return it->second;
  std::string base = "lambda_" + (s.is_int() ? std::string("Int") : s.name());
  Term l = st.mk_var(st.fresh_name(base), s, VarKind::Lambda);
  lambda.emplace(s, l);
  return l;
}

bool AxiomContext::is_array_eq(Term t) const
{
  if (!map) return false;
  if (t.op() == Op::Eq) return map->is_abstract_sort(t[0].sort());
  return t.op() == Op::Apply && t.func()->role == FuncDecl::Role::AbsEq;
}

bool AxiomContext::is_lambda(Term v) const
{
  if (v.is_timed()) v = v.base();
  return v.is_var() && v.var_kind() == VarKind::Lambda;
}

bool AxiomContext::is_witness(Term v) const
{
  if (v.is_timed()) v = v.base();
  return v.is_var() && v.var_kind() == VarKind::Witness;
}

// ---- index set ----------------------------------------------------------------

namespace {

bool is_index_app(Term t)
{
  if (t.op() != Op::Apply) return false;
  auto r = t.func()->role;
  return r == FuncDecl::Role::AbsRead || r == FuncDecl::Role::AbsWrite;
}

class IndexBuilder
{
 public:
  explicit IndexBuilder(IndexSet & idx) : idx_(idx) {}
  void add(Term t, IndexOrigin o)
  {
    if (!seen_.insert(t).second) return;
    idx_.entries[t.sort()].push_back({ t, o });
  }

 private:
  IndexSet & idx_;
  TermSet seen_;
};

// Array equalities of the system whose truth value is not fixed by being a
// top-level conjunct of init.
std::vector<Term> equality_occurrences(const AxiomContext & ctx,
                                       const TransitionSystem & s,
                                       const Property & p)
{
  std::vector<Term> roots;
  for (Term c : s.init_conjuncts()) {
    if (ctx.is_array_eq(c)) continue;
    roots.push_back(c);
  }
  for (Term c : s.trans_conjuncts()) roots.push_back(c);
  roots.push_back(p.formula);
  if (p.original) roots.push_back(p.original);
  return collect(std::span<const Term>(roots), [&](Term u) { return ctx.is_array_eq(u); });
}

}  // namespace

IndexSet compute_indices(AxiomContext & ctx,
                         const TransitionSystem & s,
                         const Property & p,
                         std::uint32_t k,
                         const Unrolling * u)
{
  TermStore & st = s.store();
  IndexSet idx;
  if (!ctx.map || ctx.map->empty()) return idx;
  IndexBuilder b(idx);

  // indices occurring syntactically in the unrolling
  std::optional<Unrolling> own;
  if (!u) {
    own = unroll(s, p, k);
    u = &*own;
  }
  std::vector<Term> uf = u->formulas();
  for (Term a : collect(std::span<const Term>(uf), is_index_app))
    b.add(a[1], a.func()->role == FuncDecl::Role::AbsRead ? IndexOrigin::ReadIdx
                                                            : IndexOrigin::WriteIdx);

  // current-state index terms of the system at every step
  std::vector<Term> sys = s.init_conjuncts();
  sys.insert(sys.end(), s.trans_conjuncts().begin(), s.trans_conjuncts().end());
  sys.push_back(p.formula);
  std::vector<Term> state_idx;
  for (Term a : collect(std::span<const Term>(sys), is_index_app)) {
    Term i = a[1];
    if (contains(i, [](Term v) { return v.is_next(); })) continue;
    state_idx.push_back(i);
  }
  for (std::uint32_t n = 0; n < k; ++n)
    for (Term i : state_idx) b.add(timed_at(s, i, n), IndexOrigin::StateIdx);

  // witnesses, one per equality occurrence
  std::vector<Term> wit;
  for (Term e : equality_occurrences(ctx, s, p)) wit.push_back(ctx.witness_for(st, e));
  for (std::uint32_t n = 0; n < k; ++n)
    for (Term w : wit) b.add(st.timed(w, n), IndexOrigin::Witness);

  // prophecy variables
  for (Term v : s.state_vars()) {
    if (v.var_kind() != VarKind::Prophecy) continue;
    bool is_index = false;
    for (const auto & as : ctx.map->sorts) is_index |= as.concrete.index() == v.sort();
    if (!is_index) continue;
    for (std::uint32_t n = 0; n < k; ++n) b.add(st.timed(v, n), IndexOrigin::ProphecyAdded);
  }

  // one lambda per index sort, distinct from every other entry of its sort
  std::set<Sort> index_sorts;
  for (const auto & as : ctx.map->sorts) index_sorts.insert(as.concrete.index());
  for (Sort srt : index_sorts) {
    Term l = ctx.lambda_for(st, srt);
    idx.lambda.emplace(srt, l);
    for (std::uint32_t n = 0; n < k; ++n) b.add(st.timed(l, n), IndexOrigin::Lambda);
  }
  for (const auto & [srt, l] : idx.lambda) {
    Term l0 = st.timed(l, 0);
    for (std::uint32_t n = 1; n < k; ++n) idx.side.push_back(st.mk_eq(st.timed(l, n), l0));
    for (const auto & e : idx.entries[srt]) {
      if (ctx.is_lambda(e.term) || contains(e.term, [&](Term v) { return ctx.is_lambda(v); }))
        continue;
      idx.side.push_back(st.mk_not(st.mk_eq(l0, e.term)));
    }
  }
  return idx;
}

// ---- instances ------------------------------------------------------------------

Classification classify(Term f, Term inst_index)
{
  auto ts = times_of(f);
  Classification c;
  if (ts.empty() || *ts.rbegin() - *ts.begin() <= 1) return c;
  c.consecutive = false;
  c.index = inst_index;
  if (inst_index) {
    auto it = times_of(inst_index);
    if (!it.empty()) c.n_i = *it.rbegin();
  }
  return c;
}

namespace {

bool is_frozen_copy(const AxiomContext & ctx, const TransitionSystem & s, Term v)
{
  Term b = v.base();
  if (ctx.is_lambda(b)) return true;
  return s.is_state_var(b) && s.frozen().count(b) > 0;
}

}  // namespace

Term retime_frozen(const AxiomContext & ctx, const TransitionSystem & s, Term f)
{
  auto frozen = [&](Term v) { return is_frozen_copy(ctx, s, v); };
  std::vector<Term> tv = collect(f, [](Term u) { return u.is_timed(); });
  std::set<std::uint32_t> steps, all;
  for (Term v : tv) {
    all.insert(v.step());
    if (!frozen(v)) steps.insert(v.step());
  }
  if (all.empty()) return f;
  std::uint32_t anchor = steps.empty() ? *all.begin() : *steps.begin();
  TermStore & st = s.store();
  TermMap m;
  for (Term v : tv)
    if (frozen(v) && v.step() != anchor) m.emplace(v, st.timed(v.base(), anchor));
  return substitute(st, f, m);
}

namespace {

std::uint32_t min_step(Term t, std::uint32_t dflt)
{
  auto ts = times_of(t);
  return ts.empty() ? dflt : *ts.begin();
}

Term timed_elem(const TransitionSystem & s, Term elem, std::uint32_t n)
{
  TermStore & st = s.store();
  TermMap m;
  for (Term v : free_vars(elem)) m.emplace(v, st.timed(v, n));
  return substitute(st, elem, m);
}

}  // namespace

std::vector<AxiomInstance> instantiate_axioms(AxiomContext & ctx,
                                              const TransitionSystem & s,
                                              const IndexSet & idx,
                                              const Unrolling & u,
                                              bool wide_congruence)
{
  TermStore & st = s.store();
  std::vector<AxiomInstance> out;
  if (!ctx.map || ctx.map->empty()) return out;
  const AbstractionMap & m = *ctx.map;
  std::vector<Term> uf = u.formulas();
  TermSet seen_formula;

  auto push = [&](Schema sch, Term f, Term trigger, Term index) {
    f = retime_frozen(ctx, s, f);
    if (f.op() == Op::BoolLit) return;
    if (!seen_formula.insert(f).second) return;
    // an index built only from frozen variables moves with the formula and
    // never causes a non-consecutive instance
    bool movable = index && !contains(index, [&](Term v) {
      return v.is_timed() && !is_frozen_copy(ctx, s, v);
    });
    AxiomInstance ax{ sch, f, trigger, movable ? Term() : index, {} };
    ax.cls = classify(f, ax.inst_index);
    out.push_back(ax);
  };

  // const: read(c, i) = elem at a representative step
  for (const auto & [cv, elem] : m.constarr_map) {
    if (!s.is_state_var(cv)) continue;
    const AbstractSort * as = m.by_abstract(cv.sort());
    for (Term i : idx.terms(as->concrete.index())) {
      std::uint32_t n = min_step(i, 0);
      Term c = st.timed(cv, n);
      Term f = st.mk_eq(st.mk_app(as->read, { c, i }), timed_elem(s, elem, n));
      push(Schema::ConstCase, f, c, i);
    }
  }

  // ext: a false equality has a witness where the arrays differ
  std::vector<Term> eqs = collect(std::span<const Term>(uf), [&](Term t) { return ctx.is_array_eq(t); });
  for (Term e : eqs) {
    auto ts = times_of(e);
    if (ts.empty()) continue;
    std::uint32_t n = *ts.begin();
    Term origin;
    try {
      origin = untime(s, e, n);
    } catch (const Error &) {
      continue;
    }
    const AbstractSort * as = m.by_abstract(e[0].sort());
    Term w = st.timed(ctx.witness_for(st, origin), n);
    Term ra = st.mk_app(as->read, { e[0], w });
    Term rb = st.mk_app(as->read, { e[1], w });
    Term f = st.mk_implies(st.mk_not(e), st.mk_not(st.mk_eq(ra, rb)));
    push(Schema::ExtWitness, f, e, w);
  }

  // write: read(write(a, j, v), i) = ite(i = j, v, read(a, i))
  std::vector<Term> writes = collect(std::span<const Term>(uf), [](Term t) {
    return t.op() == Op::Apply && t.func()->role == FuncDecl::Role::AbsWrite;
  });
  std::vector<std::pair<Term, Term>> write_inst;
  for (Term w : writes)
    for (Term i : idx.terms(w[1].sort())) write_inst.emplace_back(w, i);
  // consecutive candidates first
  auto span_of = [](Term a, Term b) {
    auto ts = times_of(a);
    auto tb = times_of(b);
    ts.insert(tb.begin(), tb.end());
    return ts.empty() ? 0u : *ts.rbegin() - *ts.begin();
  };
  std::stable_sort(write_inst.begin(), write_inst.end(), [&](const auto & x, const auto & y) {
    return span_of(x.first, x.second) < span_of(y.first, y.second);
  });
  for (const auto & [w, i] : write_inst) {
    const AbstractSort * as = m.by_abstract(w.sort());
    Term lhs = st.mk_app(as->read, { w, i });
    Term rhs = st.mk_ite(st.mk_eq(i, w[1]), w[2], st.mk_app(as->read, { w[0], i }));
    push(Schema::WriteCase, st.mk_eq(lhs, rhs), w, i);
  }

  // congruence for the weak equality predicate
  if (m.mode == AbsMode::Weak) {
    for (Term e : eqs) {
      if (e.op() != Op::Apply) continue;
      const AbstractSort * as = m.by_abstract(e[0].sort());
      for (Term i : idx.terms(as->concrete.index())) {
        if (!wide_congruence && span_of(e, i) > 1) continue;
        Term f = st.mk_implies(e, st.mk_eq(st.mk_app(as->read, { e[0], i }),
                                           st.mk_app(as->read, { e[1], i })));
        push(Schema::CongruenceWA, f, e, i);
      }
    }
  }
  return out;
}

AxiomCheck check_array_axioms(AxiomContext & ctx,
                              const TransitionSystem & s,
                              const IndexSet & idx,
                              const Unrolling & u,
                              CexModel & rho,
                              SolverSession * live)
{
  AxiomCheck res;
  for (int round = 0; round < 2; ++round) {
    bool wide = round == 1;
    std::vector<AxiomInstance> all = instantiate_axioms(ctx, s, idx, u, wide);
    if (live) {
      std::vector<Term> fs;
      for (const auto & a : all) fs.push_back(a.formula);
      live->complete_model(rho, fs);
    }
    res = AxiomCheck{};
    res.instantiated = all.size();
    for (auto & a : all) {
      if (value_is_true(evaluate(a.formula, rho))) continue;
      (a.consecutive() ? res.ca : res.nca).push_back(a);
    }
    if (!res.empty()) break;
    if (ctx.map == nullptr || ctx.map->mode != AbsMode::Weak) break;
  }
  return res;
}

}  // namespace prophic

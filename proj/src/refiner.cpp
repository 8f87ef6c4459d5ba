#include "prophic/refiner.hpp"

#include <algorithm>
#include <map>

#include "prophic/errors.hpp"

namespace prophic {

const char * to_string(Placement p)
{
  switch (p) {
    case Placement::Init: return "init";
    case Placement::Trans1: return "trans1";
    case Placement::Trans2: return "trans2";
  }
  return "?";
}

namespace {

bool is_prophecy(Term v) { return v.is_var() && v.var_kind() == VarKind::Prophecy; }

// Makes every variable behind the timed copies in t a state variable.
void promote_untracked(TransitionSystem & s, Term t)
{
  for (Term v : free_vars(t)) {
    if (!v.is_timed()) continue;
    Term b = v.base();
    if (s.is_state_var(b)) continue;
    if (s.is_input_var(b)) {
      s.promote_input(b);
    } else {
      s.add_state_var(b);
      s.log_aux(AuxRecord{ AuxRecord::Kind::Promoted, Term(), 0, { b } });
    }
  }
}

std::size_t footprint(const TransitionSystem & s)
{
  return s.init_conjuncts().size() + s.trans_conjuncts().size() + s.aux_log().size()
         + s.state_vars().size();
}

std::uint32_t span(Term f)
{
  auto ts = times_of(f);
  return ts.empty() ? 0 : *ts.rbegin() - *ts.begin();
}

struct Applied
{
  TransitionSystem system;
  Property property;
  std::vector<Lemma> lemmas;
};

// Converts non-consecutive instances with prophecy variables and lifts
// everything that is consecutive afterwards.
Applied apply_instances(AxiomContext & ctx,
                        TransitionSystem s,
                        Property p,
                        const std::vector<AxiomInstance> & ca,
                        const std::vector<AxiomInstance> & nca,
                        std::uint32_t k)
{
  TermStore & st = s.store();
  std::vector<std::pair<Term, Schema>> lift;
  for (const auto & ax : ca) lift.emplace_back(ax.formula, ax.schema);

  for (const auto & ax : nca) {
    Term i = ax.cls.index;
    if (!i || contains(i, [](Term v) { return v.is_timed() && is_prophecy(v.base()); })) continue;
    std::uint32_t n_i = ax.cls.n_i;
    promote_untracked(s, i);
    Term target;
    try {
      target = untime(s, i, n_i);
    } catch (const Error &) {
      continue;
    }
    if (contains(target, [](Term v) { return v.is_next(); })) continue;
    Term pv;
    std::tie(s, p, pv) = prophecize(s, p, target, (k - 1) - n_i);

    auto ts = times_of(ax.formula);
    ts.erase(n_i);
    std::uint32_t n_min = ts.empty() ? n_i : *ts.begin();
    TermMap m{ { i, st.timed(pv, n_min) } };
    Term f = retime_frozen(ctx, s, substitute(st, ax.formula, m));
    if (span(f) > 1) continue;
    lift.emplace_back(f, ax.schema);
  }

  Applied out{ s, p, {} };
  for (const auto & [f, sch] : lift) {
    Lemma l;
    out.system = lift_consecutive(out.system, f, k, &l);
    l.schema = sch;
    if (!l.init_parts.empty() || !l.trans_parts.empty()) out.lemmas.push_back(std::move(l));
  }
  return out;
}

// Drops lemmas of this call that no bound-k unsat core needs.
void filter_lemmas(SolverSession & ses,
                   AxiomContext & ctx,
                   TransitionSystem & s,
                   const Property & p,
                   std::uint32_t k,
                   bool assume_prestate,
                   std::vector<Lemma> & lemmas)
{
  if (lemmas.empty()) return;
  std::map<Term, std::size_t> owner_init, owner_trans;
  for (std::size_t j = 0; j < lemmas.size(); ++j) {
    for (Term c : lemmas[j].init_parts) owner_init.emplace(c, j);
    for (Term c : lemmas[j].trans_parts) owner_trans.emplace(c, j);
  }
  Unrolling u = unroll(s, p, k, {}, assume_prestate);
  IndexSet idx = compute_indices(ctx, s, p, k, &u);

  std::vector<std::pair<std::string, Term>> as;
  for (std::size_t i = 0; i < s.init_conjuncts().size(); ++i) {
    auto it = owner_init.find(s.init_conjuncts()[i]);
    std::string lbl = it == owner_init.end() ? "base" : "L" + std::to_string(it->second);
    as.emplace_back(lbl, u.init[i].formula);
  }
  std::size_t nt = s.trans_conjuncts().size();
  for (std::size_t i = 0; i < u.trans.size(); ++i) {
    auto it = owner_trans.find(s.trans_conjuncts()[i % nt]);
    std::string lbl = it == owner_trans.end() ? "base" : "L" + std::to_string(it->second);
    as.emplace_back(lbl, u.trans[i].formula);
  }
  for (const auto & n : u.assume) as.emplace_back("base", n.formula);
  as.emplace_back("base", u.goal.formula);
  for (Term c : idx.side) as.emplace_back("base", c);

  CheckResult r;
  try {
    r = ses.check(as, Want::Core);
  } catch (const SolverTimeout &) {
    throw;
  } catch (const SolverError &) {
    return;
  }
  if (r.status != CheckStatus::Unsat) return;
  std::set<std::string> core(r.core.begin(), r.core.end());
  std::vector<Lemma> kept;
  for (std::size_t j = 0; j < lemmas.size(); ++j) {
    if (core.count("L" + std::to_string(j))) {
      kept.push_back(std::move(lemmas[j]));
      continue;
    }
    for (Term c : lemmas[j].init_parts) s.remove_init(c);
    for (Term c : lemmas[j].trans_parts) s.remove_trans(c);
  }
  lemmas = std::move(kept);
}

}  // namespace

TransitionSystem lift_consecutive(const TransitionSystem & s0, Term f, std::uint32_t k, Lemma * out)
{
  auto ts = times_of(f);
  if (!ts.empty() && *ts.rbegin() - *ts.begin() > 1)
    throw NotConsecutive("instance spans steps " + std::to_string(*ts.begin()) + ".."
                         + std::to_string(*ts.rbegin()));
  TransitionSystem s = s0;
  promote_untracked(s, f);
  std::uint32_t n_min = ts.empty() ? 0 : *ts.begin();
  std::uint32_t n_max = ts.empty() ? 0 : *ts.rbegin();
  Term g = untime(s, f, n_min);

  Lemma l;
  l.formula = g;
  auto add_init = [&](Term c) {
    for (Term x : conjuncts(c)) {
      if (std::find(s.init_conjuncts().begin(), s.init_conjuncts().end(), x) != s.init_conjuncts().end())
        continue;
      s.add_init(x);
      l.init_parts.push_back(x);
    }
  };
  auto add_trans = [&](Term c) {
    for (Term x : conjuncts(c)) {
      if (std::find(s.trans_conjuncts().begin(), s.trans_conjuncts().end(), x) != s.trans_conjuncts().end())
        continue;
      s.add_trans(x);
      l.trans_parts.push_back(x);
    }
  };

  if (k <= 1) {
    l.placement = Placement::Init;
    add_init(g);
  } else if (n_min == n_max) {
    l.placement = Placement::Trans1;
    add_trans(g);
    add_trans(s.prime(g));
    // a state fact: initial states satisfy it as well
    add_init(g);
  } else {
    l.placement = Placement::Trans2;
    add_trans(g);
  }
  if (out) *out = std::move(l);
  return s;
}

std::vector<AxiomInstance> reduce_axioms(SolverSession & ses,
                                         const Unrolling & u,
                                         const std::vector<AxiomInstance> & candidates,
                                         ReduceKind kind,
                                         const std::vector<Term> & background)
{
  if (candidates.empty()) return {};
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (kind == ReduceKind::NonConsecutive)
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return candidates[a].cls.n_i < candidates[b].cls.n_i;
    });

  std::vector<bool> keep(candidates.size(), true);
  auto unsat_with = [&](const std::vector<bool> & sel) {
    std::vector<std::pair<std::string, Term>> as;
    for (Term f : u.formulas()) as.emplace_back("", f);
    for (Term f : background) as.emplace_back("", f);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (sel[i]) as.emplace_back("c" + std::to_string(i), candidates[i].formula);
    return ses.check(as, Want::Core);
  };

  try {
    CheckResult r = unsat_with(keep);
    if (r.status != CheckStatus::Unsat) return candidates;
    std::set<std::string> core(r.core.begin(), r.core.end());
    for (std::size_t i = 0; i < candidates.size(); ++i) keep[i] = core.count("c" + std::to_string(i)) > 0;
    for (std::size_t i : order) {
      if (!keep[i]) continue;
      keep[i] = false;
      if (unsat_with(keep).status != CheckStatus::Unsat) keep[i] = true;
    }
  } catch (const SolverTimeout &) {
    throw;
  } catch (const SolverError &) {
    return candidates;
  }
  std::vector<AxiomInstance> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) out.push_back(candidates[i]);
  return out;
}

RefineOutcome refine_arrays(AxiomContext & ctx,
                            const SolverConfig & solver,
                            const TransitionSystem & s0,
                            const Property & p0,
                            std::uint32_t k,
                            const RefineOptions & opts)
{
  if (k == 0) throw InvalidDepth("refinement bound must be at least 1");
  RefineOutcome out{ s0, p0 };
  TransitionSystem s = s0;
  Property p = p0;
  SolverSession ses(solver);
  std::vector<Lemma> lemmas;

  auto finish = [&](bool refined) {
    out.system = s;
    out.property = p;
    out.refined = refined;
    out.added_lemmas = lemmas;
    out.added_aux.assign(s.aux_log().begin() + static_cast<std::ptrdiff_t>(s0.aux_log().size()),
                         s.aux_log().end());
    return out;
  };
  auto found_cex = [&](CexModel rho, const Unrolling & u) {
    out.cex = std::move(rho);
    out.cex_unrolling = u;
    return finish(false);
  };

  for (;;) {
    if (out.iterations >= opts.max_iters) {
      out.resource_out = true;
      return finish(false);
    }
    ++out.iterations;
    Unrolling u = unroll(s, p, k, {}, opts.assume_prestate);
    IndexSet idx = compute_indices(ctx, s, p, k, &u);
    for (std::size_t i = 0; i < idx.side.size(); ++i)
      u.side.push_back({ "side:" + std::to_string(i), idx.side[i] });
    std::vector<Term> uf = u.formulas();

    ses.push();
    for (Term f : uf) ses.assert_formula(f);
    CheckStatus stt = ses.check_sat();
    if (stt == CheckStatus::Unknown) throw SolverError("solver returned unknown on a BMC query");
    if (stt == CheckStatus::Unsat) {
      ses.pop();
      break;
    }
    CexModel rho = ses.get_model(uf);
    AxiomCheck ac = check_array_axioms(ctx, s, idx, u, rho, &ses);
    if (ac.empty()) {
      ses.pop();
      return found_cex(std::move(rho), u);
    }
    out.instances.insert(out.instances.end(), ac.ca.begin(), ac.ca.end());
    out.instances.insert(out.instances.end(), ac.nca.begin(), ac.nca.end());

    std::vector<AxiomInstance> ca, nca;
    if (!opts.unsatcore_reduction) {
      ses.pop();
      ca = ac.ca;
      nca = ac.nca;
    } else {
      // add instances until the unrolling becomes unsat, then keep the core
      std::vector<AxiomInstance> pool;
      std::vector<Term> roots = uf;
      for (;;) {
        const auto & batch = !ac.ca.empty() ? ac.ca : ac.nca;
        for (const auto & ax : batch) {
          ses.assert_formula(ax.formula, "ax" + std::to_string(pool.size()));
          pool.push_back(ax);
          roots.push_back(ax.formula);
        }
        CheckStatus r = ses.check_sat();
        if (r == CheckStatus::Unknown) throw SolverError("solver returned unknown on a BMC query");
        if (r == CheckStatus::Unsat) break;
        if (out.iterations >= opts.max_iters) {
          ses.pop();
          out.resource_out = true;
          return finish(false);
        }
        ++out.iterations;
        rho = ses.get_model(roots);
        ac = check_array_axioms(ctx, s, idx, u, rho, &ses);
        if (ac.empty()) {
          ses.pop();
          return found_cex(std::move(rho), u);
        }
        out.instances.insert(out.instances.end(), ac.ca.begin(), ac.ca.end());
        out.instances.insert(out.instances.end(), ac.nca.begin(), ac.nca.end());
      }
      std::vector<std::string> core = ses.unsat_core();
      ses.pop();
      for (const auto & lbl : core) {
        const AxiomInstance & ax = pool.at(std::stoul(lbl.substr(2)));
        (ax.consecutive() ? ca : nca).push_back(ax);
      }
      if (opts.proph_reduction && !nca.empty()) {
        std::vector<Term> bg;
        for (const auto & ax : ca) bg.push_back(ax.formula);
        nca = reduce_axioms(ses, u, nca, ReduceKind::NonConsecutive, bg);
      }
    }

    std::size_t before = footprint(s);
    Applied a = apply_instances(ctx, s, p, ca, nca, k);
    s = std::move(a.system);
    p = std::move(a.property);
    lemmas.insert(lemmas.end(), a.lemmas.begin(), a.lemmas.end());
    if (footprint(s) == before)
      throw RefinementStuck("refinement at bound " + std::to_string(k) + " added nothing");
  }

  if (opts.axiom_reduction) filter_lemmas(ses, ctx, s, p, k, opts.assume_prestate, lemmas);
  return finish(true);
}

}  // namespace prophic

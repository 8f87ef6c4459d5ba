#include "prophic/engine.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "prophic/errors.hpp"

namespace prophic {

const char * to_string(Verdict::Kind k)
{
  switch (k) {
    case Verdict::Kind::Safe: return "safe";
    case Verdict::Kind::Unsafe: return "unsafe";
    case Verdict::Kind::Unknown: return "unknown";
  }
  return "?";
}

namespace {

// Same variables, conjuncts rewritten by f; aux log carried over.
template <class F>
TransitionSystem rebuild(const TransitionSystem & s, F f, const TermSet & drop = {})
{
  TransitionSystem out(s.store());
  for (Term v : s.state_vars())
    if (!drop.count(v)) out.add_state_var(v);
  for (Term v : s.input_vars())
    if (!drop.count(v)) out.add_input_var(v);
  for (Term c : s.init_conjuncts()) out.add_init(f(c));
  for (Term c : s.trans_conjuncts()) out.add_trans(f(c));
  for (Term v : s.frozen())
    if (!drop.count(v) && out.is_state_var(v)) out.add_frozen(v);
  for (const auto & r : s.aux_log()) out.log_aux(r);
  return out;
}

}  // namespace

ValueAbstraction abstract_values(const TransitionSystem & s, const Property & p, const BigInt & threshold)
{
  TermStore & st = s.store();
  std::vector<Term> roots = s.init_conjuncts();
  roots.insert(roots.end(), s.trans_conjuncts().begin(), s.trans_conjuncts().end());
  roots.push_back(p.formula);
  if (p.original) roots.push_back(p.original);

  // literals used as coefficients must stay literal to keep arithmetic linear
  std::set<BigInt> keep;
  for (Term m : collect(std::span<const Term>(roots), [](Term u) { return u.op() == Op::Mul; }))
    for (Term c : m.children())
      if (c.op() == Op::IntLit) keep.insert(c.int_value());
  std::set<BigInt> large;
  for (Term l : collect(std::span<const Term>(roots), [](Term u) { return u.op() == Op::IntLit; })) {
    BigInt v = l.int_value();
    BigInt a = v < 0 ? BigInt(-v) : v;
    if (a > threshold && !keep.count(v)) large.insert(v);
  }

  ValueAbstraction va{ s, p, {} };
  if (large.empty()) return va;
  TermMap m;
  for (const BigInt & v : large) {
    std::string nm = st.fresh_name("__val_" + std::string(v < 0 ? "m" : "") + (v < 0 ? BigInt(-v) : v).str());
    Term x = st.mk_var(nm, st.int_sort());
    m.emplace(st.mk_int(v), x);
    va.constants.emplace_back(x, v);
  }
  auto sub = [&](Term t) { return substitute(st, t, m); };
  TransitionSystem out = rebuild(s, sub);
  for (const auto & [x, v] : va.constants) {
    out.add_state_var(x);
    out.add_frozen(x);
  }
  for (std::size_t i = 0; i + 1 < va.constants.size(); ++i)
    out.add_init(st.mk_lt(va.constants[i].first, va.constants[i + 1].first));
  va.system = std::move(out);
  va.property = Property{ sub(p.formula), p.original ? sub(p.original) : Term() };
  return va;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Concrete
{
  TransitionSystem system;
  Property property;
  Term invariant;
};

// The abstract system mapped back to arrays, value-abstraction variables
// replaced by their literals. Auxiliary variables and lifted lemmas stay.
Concrete concretize_certificate(const TransitionSystem & abs,
                                const Property & p,
                                Term inv,
                                const AbstractionMap & map,
                                const std::vector<std::pair<Term, BigInt>> & constants)
{
  TermStore & st = abs.store();
  TermMap vals;
  for (const auto & [x, v] : constants) vals.emplace(x, st.mk_int(v));
  auto conc = [&](Term t) { return substitute(st, concretize(st, map, t), vals); };

  TransitionSystem out(st);
  for (Term v : abs.state_vars()) {
    if (map.is_constarr_var(v) || vals.count(v)) continue;
    auto it = map.abs_to_var.find(v);
    out.add_state_var(it != map.abs_to_var.end() ? it->second : v);
  }
  for (Term v : abs.input_vars()) {
    auto it = map.abs_to_var.find(v);
    out.add_input_var(it != map.abs_to_var.end() ? it->second : v);
  }
  for (Term c : abs.init_conjuncts()) out.add_init(conc(c));
  for (Term c : abs.trans_conjuncts()) out.add_trans(conc(c));
  for (const auto & r : abs.aux_log()) out.log_aux(r);
  return Concrete{ std::move(out),
                   Property{ conc(p.formula), p.original ? conc(p.original) : Term() },
                   simplify(st, conc(inv)) };
}

std::vector<TraceStep> extract_trace(const TransitionSystem & concrete,
                                     const CexModel & m,
                                     std::uint32_t k)
{
  TermStore & st = concrete.store();
  std::vector<TraceStep> trace(k);
  std::vector<Term> vars = concrete.state_vars();
  vars.insert(vars.end(), concrete.input_vars().begin(), concrete.input_vars().end());
  for (std::uint32_t i = 0; i < k; ++i)
    for (Term v : vars) {
      if (v.sort().is_array()) continue;
      try {
        trace[i].emplace(v, evaluate(st.timed(v, i), m));
      } catch (const Error &) {
        // unconstrained in the unrolling: any value works
      }
    }
  return trace;
}

}  // namespace

Verdict run(const EngineConfig & cfg, TermStore & store, const VmtDocument & doc)
{
  (void)store;
  auto t0 = Clock::now();
  auto it = doc.properties.find(cfg.property);
  if (it == doc.properties.end()) throw MissingSection("no property with index " + std::to_string(cfg.property));

  SolverConfig solver;
  solver.command = cfg.solver_command;
  if (cfg.timeout_s > 0)
    solver.deadline = t0 + std::chrono::milliseconds(static_cast<long long>(cfg.timeout_s * 1000));
  solver.query_timeout_s = 0;

  // concrete system: inputs become unconstrained state variables
  TransitionSystem concrete = doc.system;
  for (Term v : std::vector<Term>(concrete.input_vars())) concrete.promote_input(v);
  Property prop = it->second;
  if (!prop.original) prop.original = prop.formula;

  Verdict verdict;
  bool use_values = cfg.value_abstraction;
  auto finish = [&](Verdict & v) {
    v.stats.n_solver_queries = solver.stats->queries;
    v.stats.time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    return v;
  };

  for (;;) {
    ValueAbstraction va = use_values ? abstract_values(concrete, prop, cfg.value_threshold)
                                     : ValueAbstraction{ concrete, prop, {} };
    auto [S, P, M] = abstract_arrays(va.system, va.property, cfg.mode);
    AxiomContext ctx;
    ctx.map = &M;

    ProveOptions po = cfg.prove;
    po.solver = solver;
    RefineOptions ro = cfg.refine;
    ro.assume_prestate = po.assume_prestate;
    EngineStats stats;
    bool restart = false;

    try {
      for (;;) {
        if (solver.deadline && Clock::now() >= *solver.deadline) {
          verdict = Verdict{};
          verdict.reason = "timeout";
          verdict.stats = stats;
          return finish(verdict);
        }
        ProveResult pr = prove(S, P, po);
        if (cfg.verbose)
          std::cerr << "[prophic] prove: " << to_string(pr.kind) << " bound " << pr.bound << " depth " << pr.depth
                    << (pr.reason.empty() ? "" : " (" + pr.reason + ")") << "\n";
        stats.n_prophecy = S.count_kind(VarKind::Prophecy);
        stats.n_history = S.count_kind(VarKind::History);

        if (pr.kind == ProveResult::Kind::Unknown) {
          if (cfg.verbose) std::cerr << emit_vmt(S, P);
          verdict = Verdict{};
          verdict.reason = pr.reason;
          verdict.stats = stats;
          return finish(verdict);
        }

        if (pr.kind == ProveResult::Kind::Proven) {
          if (!pr.invariant) {
            verdict = Verdict{};
            verdict.reason = "engine proved the property without an invariant to check";
            verdict.stats = stats;
            return finish(verdict);
          }
          SolverConfig check = solver;
          check.deadline.reset();
          if (!check_certificate(S, P, pr.invariant, check, pr.depth, po.assume_prestate))
            throw Error("abstract certificate rejected");
          Concrete c = concretize_certificate(S, P, pr.invariant, M, va.constants);
          if (!check_certificate(c.system, c.property, c.invariant, check, pr.depth, po.assume_prestate))
            throw Error("concrete certificate rejected");
          verdict = Verdict{};
          verdict.kind = Verdict::Kind::Safe;
          verdict.stats = stats;
          verdict.certificate_system = std::move(c.system);
          verdict.certificate_property = c.property;
          verdict.invariant = c.invariant;
          verdict.depth = pr.depth;
          verdict.assume_prestate = po.assume_prestate;
          return finish(verdict);
        }

        // abstract counterexample at pr.bound
        std::uint32_t k = pr.bound;
        stats.bound = k;
        if (stats.n_refine_rounds >= cfg.max_refinements) {
          verdict = Verdict{};
          verdict.reason = "refinement budget exhausted";
          verdict.stats = stats;
          return finish(verdict);
        }
        ++stats.n_refine_rounds;
        RefineOutcome out = refine_arrays(ctx, solver, S, P, k, ro);
        if (out.resource_out) {
          verdict = Verdict{};
          verdict.reason = "refinement iteration cap reached at bound " + std::to_string(k);
          verdict.stats = stats;
          return finish(verdict);
        }
        if (cfg.verbose) {
          NameScheme names;
          std::cerr << "[prophic] refine at " << k << ": " << (out.refined ? "refined" : "genuine") << ", "
                    << out.iterations << " iterations\n";
          for (const Lemma & l : out.added_lemmas)
            std::cerr << "  " << to_string(l.placement) << " " << to_smt(l.formula, names) << "\n";
        }
        if (out.refined) {
          S = out.system;
          P = out.property;
          stats.n_lemmas += out.added_lemmas.size();
          stats.refuted_bounds.push_back(k);
          stats.prophecy_per_bound.push_back(S.count_kind(VarKind::Prophecy));
          stats.n_prophecy = S.count_kind(VarKind::Prophecy);
          stats.n_history = S.count_kind(VarKind::History);
          po.min_k = k + 1;
          continue;
        }

        std::vector<TraceStep> trace = extract_trace(concrete, *out.cex, k);
        SolverConfig check = solver;
        check.deadline.reset();
        if (replay_trace(concrete, prop, trace, check)) {
          verdict = Verdict{};
          verdict.kind = Verdict::Kind::Unsafe;
          verdict.stats = stats;
          verdict.trace = std::move(trace);
          return finish(verdict);
        }
        if (!va.constants.empty()) {
          // the counterexample depends on abstracted constants
          use_values = false;
          restart = true;
          break;
        }
        throw Error("counterexample without array-axiom violations does not replay");
      }
    } catch (const SolverTimeout &) {
      verdict = Verdict{};
      verdict.reason = "timeout";
      verdict.stats = stats;
      return finish(verdict);
    }
    if (!restart) break;
  }
  return finish(verdict);
}

std::string emit_witness(const Verdict & v)
{
  std::ostringstream out;
  if (v.kind == Verdict::Kind::Safe) {
    const TransitionSystem & s = *v.certificate_system;
    NameScheme names;
    out << "; invariant over the system extended with auxiliary variables\n";
    std::vector<Term> roots = s.state_vars();
    roots.push_back(v.invariant);
    std::set<std::string> sorts;
    std::map<std::uint32_t, const FuncDecl *> funs;
    std::function<void(Sort)> decl_sort = [&](Sort srt) {
      if (srt.is_array()) {
        decl_sort(srt.index());
        decl_sort(srt.element());
      } else if (srt.is_uninterpreted() && sorts.insert(srt.name()).second) {
        out << "(declare-sort " << names.sort(srt) << " 0)\n";
      }
    };
    for (Term u : collect(std::span<const Term>(roots), [](Term) { return true; })) {
      decl_sort(u.sort());
      if (u.op() == Op::Apply && u.func()->role == FuncDecl::Role::User) {
        funs.emplace(u.func()->id, u.func());
        for (Sort a : u.func()->args) decl_sort(a);
      }
    }
    for (const auto & [id, f] : funs) {
      out << "(declare-fun " << names.fun(*f) << " (";
      for (std::size_t i = 0; i < f->args.size(); ++i) out << (i ? " " : "") << names.sort(f->args[i]);
      out << ") " << names.sort(f->result) << ")\n";
    }
    for (Term x : s.state_vars())
      out << "(declare-fun " << names.var(x) << " () " << names.sort(x.sort()) << ")\n";
    for (const auto & r : s.aux_log()) {
      switch (r.kind) {
        case AuxRecord::Kind::HistoryChain:
          for (std::size_t i = 0; i < r.vars.size(); ++i)
            out << "; history " << names.var(r.vars[i]) << " = " << to_smt(r.target, names) << " delayed by "
                << (i + 1) << "\n";
          break;
        case AuxRecord::Kind::ProphecyVar:
          out << "; prophecy " << names.var(r.vars[0]) << " predicts " << to_smt(r.target, names)
              << " delayed by " << r.depth << "\n";
          break;
        case AuxRecord::Kind::Promoted:
          out << "; unconstrained " << names.var(r.vars[0]) << "\n";
          break;
      }
    }
    out << "(define-fun invariant () Bool " << to_smt(v.invariant, names) << ")\n";
    if (v.depth > 1) out << "; induction depth " << v.depth << "\n";
    if (v.assume_prestate) out << "; property assumed in pre-states\n";
  } else if (v.kind == Verdict::Kind::Unsafe) {
    NameScheme names;
    for (std::size_t i = 0; i < v.trace.size(); ++i) {
      out << "(state " << i;
      for (const auto & [x, val] : v.trace[i]) out << " (" << names.var(x) << " " << value_to_string(val) << ")";
      out << ")\n";
    }
  }
  return out.str();
}

std::string stats_json(const Verdict & v)
{
  nlohmann::json j;
  j["verdict"] = to_string(v.kind);
  j["bound"] = v.stats.bound;
  j["n_prophecy"] = v.stats.n_prophecy;
  j["n_history"] = v.stats.n_history;
  j["n_lemmas"] = v.stats.n_lemmas;
  j["n_refine_rounds"] = v.stats.n_refine_rounds;
  j["n_solver_queries"] = v.stats.n_solver_queries;
  j["time_ms"] = v.stats.time_ms;
  j["refuted_bounds"] = v.stats.refuted_bounds;
  j["prophecy_per_bound"] = v.stats.prophecy_per_bound;
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j.dump(2);
}

}  // namespace prophic

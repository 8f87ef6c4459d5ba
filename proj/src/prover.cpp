#include "prophic/prover.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prophic/errors.hpp"
#include "prophic/sexpr.hpp"
#include "prophic/vmt.hpp"

namespace prophic {

const char * to_string(ProveResult::Kind k)
{
  switch (k) {
    case ProveResult::Kind::Proven: return "proven";
    case ProveResult::Kind::Falsified: return "falsified";
    case ProveResult::Kind::Unknown: return "unknown";
  }
  return "?";
}

Term value_term(TermStore & st, Sort s, const Value & v)
{
  if (const bool * b = std::get_if<bool>(&v)) return st.mk_bool(*b);
  if (const BigInt * i = std::get_if<BigInt>(&v)) {
    if (!s.is_int()) return Term();
    return st.mk_int(*i);
  }
  return Term();
}

// ---- candidate mining -----------------------------------------------------------

namespace {

bool is_atom(Term t)
{
  if (!t.sort().is_bool()) return false;
  switch (t.op()) {
    case Op::And:
    case Op::Or:
    case Op::Not:
    case Op::Implies:
    case Op::Ite:
    case Op::BoolLit: return false;
    case Op::Eq: return !t[0].sort().is_bool();
    default: return true;
  }
}

bool current_state(Term t)
{
  return !contains(t, [](Term u) { return u.is_next() || u.is_timed(); });
}

bool is_read(Term t)
{
  return (t.op() == Op::Apply && t.func()->role == FuncDecl::Role::AbsRead) || t.op() == Op::Read;
}

bool is_prophecy(Term v) { return v.is_var() && v.var_kind() == VarKind::Prophecy; }

class Candidates
{
 public:
  explicit Candidates(std::size_t limit) : limit_(limit) {}
  void add(Term t)
  {
    if (!t || t.op() == Op::BoolLit || full()) return;
    if (seen_.insert(t).second) out_.push_back(t);
  }
  bool full() const { return out_.size() >= limit_; }
  std::vector<Term> take() { return std::move(out_); }

 private:
  std::size_t limit_;
  TermSet seen_;
  std::vector<Term> out_;
};

// Guards of the prophecy-weakened property, outermost first.
std::vector<Term> property_guards(const Property & p)
{
  std::vector<Term> gs;
  for (Term f = p.formula; f && f.op() == Op::Implies; f = f[1]) gs.push_back(f[0]);
  return gs;
}

}  // namespace

std::vector<Term> mine_candidates(const TransitionSystem & s, const Property & p, std::size_t limit)
{
  TermStore & st = s.store();
  Candidates c(limit);
  c.add(p.formula);
  if (p.original && p.original != p.formula) c.add(p.original);

  std::vector<Term> roots = s.init_conjuncts();
  roots.insert(roots.end(), s.trans_conjuncts().begin(), s.trans_conjuncts().end());
  roots.push_back(p.formula);
  std::vector<Term> all_atoms = collect(std::span<const Term>(roots), is_atom);

  // definitions v' = e with e over the current state
  TermMap defs;
  for (Term t : s.trans_conjuncts()) {
    if (t.op() != Op::Eq) continue;
    for (int side = 0; side < 2; ++side) {
      Term l = t[side], r = t[1 - side];
      if (l.is_next() && current_state(r) && !s.is_frozen(l.base())) defs.emplace(l.base(), r);
    }
  }

  std::vector<Term> atoms;  // A0
  for (Term a : all_atoms)
    if (current_state(a)) atoms.push_back(a);
  std::vector<Term> pre;  // A1
  for (Term a : atoms) {
    Term b = substitute(st, a, defs);
    if (b != a && current_state(b)) pre.push_back(b);
  }
  std::vector<Term> prophs;
  for (Term v : s.state_vars())
    if (is_prophecy(v)) prophs.push_back(v);
  std::vector<Term> proph_atoms;  // A2
  std::vector<Term> base = atoms;
  base.insert(base.end(), pre.begin(), pre.end());
  for (Term a : base) {
    for (Term r : collect(a, is_read)) {
      Term i = r[1];
      if (is_prophecy(i)) continue;
      for (Term pv : prophs) {
        if (pv.sort() != i.sort()) continue;
        Term b = substitute(st, a, TermMap{ { i, pv } });
        if (b != a) proph_atoms.push_back(b);
      }
    }
  }
  // A3: prophecies against index terms and literals
  std::vector<Term> cmp;
  std::vector<Term> idx_terms;
  for (Term r : collect(std::span<const Term>(roots), [](Term u) {
         return is_read(u) || (u.op() == Op::Apply && u.func()->role == FuncDecl::Role::AbsWrite);
       }))
    if (current_state(r[1])) idx_terms.push_back(r[1]);
  std::vector<Term> lits = collect(std::span<const Term>(roots), [](Term u) { return u.op() == Op::IntLit; });
  for (Term pv : prophs) {
    for (Term i : idx_terms) {
      if (i.sort() != pv.sort() || i == pv) continue;
      cmp.push_back(st.mk_eq(pv, i));
      if (pv.sort().is_int()) {
        cmp.push_back(st.mk_lt(pv, i));
        cmp.push_back(st.mk_lt(i, pv));
      }
    }
    if (pv.sort().is_int())
      for (Term l : lits) {
        cmp.push_back(st.mk_le(pv, l));
        cmp.push_back(st.mk_le(l, pv));
      }
  }

  // C1: literals in both polarities, most specific first
  std::vector<Term> literals;
  for (const auto * group : { &proph_atoms, &pre, &atoms, &cmp })
    for (Term a : *group) {
      literals.push_back(a);
      literals.push_back(st.mk_not(a));
    }
  for (Term l : literals) c.add(l);

  // C4: prophecy atoms guarded by a range lo <= p < hi
  std::vector<Term> lows = lits, highs;
  for (Term i : idx_terms)
    if (i.sort().is_int() && !is_prophecy(i)) {
      lows.push_back(i);
      highs.push_back(i);
      for (Term l : lits) {
        c.add(st.mk_le(l, i));
        c.add(st.mk_le(i, l));
      }
    }
  for (Term pv : prophs) {
    if (!pv.sort().is_int()) continue;
    for (Term a : proph_atoms) {
      if (!contains(a, [&](Term u) { return u == pv; })) continue;
      for (Term lo : lows)
        for (Term hi : highs)
          if (lo != hi) c.add(st.mk_or({ st.mk_lt(pv, lo), st.mk_le(hi, pv), a }));
    }
  }

  // C2: pairs of literals over prophecy variables
  auto mentions_proph = [](Term a) {
    return contains(a, [](Term u) { return u.is_var() && u.var_kind() == VarKind::Prophecy; });
  };
  std::vector<Term> pl;
  for (const auto * group : { &proph_atoms, &atoms })
    for (Term a : *group)
      if (mentions_proph(a) && std::find(pl.begin(), pl.end(), a) == pl.end()) pl.push_back(a);
  for (std::size_t i = 0; i < pl.size(); ++i)
    for (std::size_t j = i + 1; j < pl.size(); ++j) {
      c.add(st.mk_or({ pl[i], pl[j] }));
      c.add(st.mk_or({ st.mk_not(pl[i]), pl[j] }));
      c.add(st.mk_or({ pl[i], st.mk_not(pl[j]) }));
    }

  // C3: clauses guarded by prophecy guards and comparisons
  std::vector<Term> guards = property_guards(p);
  guards.insert(guards.end(), cmp.begin(), cmp.end());
  for (Term a : all_atoms)
    if (current_state(a) && a.op() == Op::Apply && a.func()->role == FuncDecl::Role::AbsEq) guards.push_back(a);
  for (Term g : guards)
    for (const auto * group : { &proph_atoms, &pre, &atoms }) {
      for (Term a : *group) {
        if (a == g) continue;
        c.add(st.mk_or({ st.mk_not(g), a }));
        c.add(st.mk_or({ g, a }));
      }
    }
  return c.take();
}

// ---- Houdini --------------------------------------------------------------------

std::vector<Term> houdini(SolverSession & ses,
                          const TransitionSystem & s,
                          const Property & p,
                          std::vector<Term> cand,
                          bool assume_prestate)
{
  TermStore & st = s.store();
  auto drop_false = [&](std::vector<Term> & cs, std::uint32_t step) {
    std::vector<Term> timed;
    for (Term c : cs) timed.push_back(timed_at(s, c, step));
    std::vector<Value> vals = ses.get_values(timed);
    std::vector<Term> kept;
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (value_is_true(vals[i])) kept.push_back(cs[i]);
    bool progress = kept.size() < cs.size();
    cs = std::move(kept);
    return progress;
  };
  auto conj_at = [&](const std::vector<Term> & cs, std::uint32_t step) {
    std::vector<Term> ts;
    for (Term c : cs) ts.push_back(timed_at(s, c, step));
    return st.mk_and(ts);
  };

  // initiation
  while (!cand.empty()) {
    ses.push();
    for (Term c : s.init_conjuncts()) ses.assert_formula(timed_at(s, c, 0));
    ses.assert_formula(st.mk_not(conj_at(cand, 0)));
    CheckStatus r = ses.check_sat();
    if (r == CheckStatus::Unknown) {
      ses.pop();
      return {};
    }
    bool progress = r == CheckStatus::Sat && drop_false(cand, 0);
    ses.pop();
    if (r == CheckStatus::Unsat) break;
    if (!progress) return {};
  }
  // consecution
  while (!cand.empty()) {
    ses.push();
    for (Term c : s.trans_conjuncts()) ses.assert_formula(timed_at(s, c, 0));
    if (assume_prestate && p.original) ses.assert_formula(timed_at(s, p.original, 0));
    ses.assert_formula(conj_at(cand, 0));
    ses.assert_formula(st.mk_not(conj_at(cand, 1)));
    CheckStatus r = ses.check_sat();
    if (r == CheckStatus::Unknown) {
      ses.pop();
      return {};
    }
    bool progress = r == CheckStatus::Sat && drop_false(cand, 1);
    ses.pop();
    if (r == CheckStatus::Unsat) break;
    if (!progress) return {};
  }
  return cand;
}

namespace {

// Smallest closed subset found by following unsat cores from the property:
// every member's consecution needs only members.
std::vector<Term> inductive_core(SolverSession & ses,
                                 const TransitionSystem & s,
                                 const Property & p,
                                 const std::vector<Term> & surv,
                                 bool assume_prestate)
{
  TermStore & st = s.store();
  std::vector<bool> in(surv.size(), false);
  for (std::size_t i = 0; i < surv.size(); ++i) in[i] = surv[i] == p.formula;
  for (;;) {
    std::vector<std::pair<std::string, Term>> q;
    for (Term c : s.trans_conjuncts()) q.emplace_back("", timed_at(s, c, 0));
    if (assume_prestate && p.original) q.emplace_back("", timed_at(s, p.original, 0));
    std::vector<Term> goal;
    for (std::size_t i = 0; i < surv.size(); ++i) {
      q.emplace_back("s" + std::to_string(i), timed_at(s, surv[i], 0));
      if (in[i]) goal.push_back(timed_at(s, surv[i], 1));
    }
    q.emplace_back("", st.mk_not(st.mk_and(goal)));
    CheckResult r = ses.check(q, Want::Core);
    if (r.status != CheckStatus::Unsat) return surv;
    bool grew = false;
    for (const auto & lbl : r.core) {
      std::size_t i = std::stoul(lbl.substr(1));
      if (!in[i]) in[i] = grew = true;
    }
    if (!grew) break;
  }
  // deletion pass: a member may go when the rest stays inductive
  for (std::size_t j = surv.size(); j-- > 0;) {
    if (!in[j] || surv[j] == p.formula) continue;
    in[j] = false;
    std::vector<std::pair<std::string, Term>> q;
    for (Term c : s.trans_conjuncts()) q.emplace_back("", timed_at(s, c, 0));
    if (assume_prestate && p.original) q.emplace_back("", timed_at(s, p.original, 0));
    std::vector<Term> goal;
    for (std::size_t i = 0; i < surv.size(); ++i)
      if (in[i]) {
        q.emplace_back("", timed_at(s, surv[i], 0));
        goal.push_back(timed_at(s, surv[i], 1));
      }
    q.emplace_back("", st.mk_not(st.mk_and(goal)));
    if (ses.check(q).status != CheckStatus::Unsat) in[j] = true;
  }
  std::vector<Term> out;
  for (std::size_t i = 0; i < surv.size(); ++i)
    if (in[i]) out.push_back(surv[i]);
  return out;
}

}  // namespace

// ---- external engine ----------------------------------------------------------------

namespace {

struct ChildOutput
{
  bool timed_out = false;
  int status = 0;
  std::string out;
};

std::string shell_quote(const std::string & s)
{
  std::string r = "'";
  for (char ch : s) {
    if (ch == '\'') r += "'\\''";
    else r += ch;
  }
  return r + "'";
}

ChildOutput run_child(const std::string & cmd, std::optional<std::chrono::steady_clock::time_point> deadline)
{
  int fds[2];
  if (pipe(fds) != 0) throw EngineCrashed(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) throw EngineCrashed(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(fds[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, 2);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", ("exec " + cmd).c_str(), static_cast<char *>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  ChildOutput res;
  char buf[4096];
  for (;;) {
    int wait_ms = -1;
    if (deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        res.timed_out = true;
        break;
      }
      wait_ms = static_cast<int>(std::min<long long>(left.count(), 1 << 30));
    }
    pollfd pfd{ fds[0], POLLIN, 0 };
    int pr = poll(&pfd, 1, wait_ms);
    if (pr < 0 && errno == EINTR) continue;
    if (pr == 0) {
      res.timed_out = true;
      break;
    }
    ssize_t n = read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    res.out.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  if (res.timed_out) ::kill(pid, SIGKILL);
  waitpid(pid, &res.status, 0);
  return res;
}

}  // namespace

namespace {

ProveResult bmc_model_at(SolverSession & ses,
                         const TransitionSystem & s,
                         const Property & p,
                         std::uint32_t k,
                         bool assume)
{
  Unrolling u = unroll(s, p, k, {}, assume);
  ProveResult r;
  BmcResult b = bmc_check(ses, u, Want::Model);
  if (b.status != CheckStatus::Sat) return r;
  r.kind = ProveResult::Kind::Falsified;
  r.bound = k;
  r.model = std::move(b.model);
  r.unrolling = std::move(u);
  return r;
}

ProveResult prove_external(const TransitionSystem & s, const Property & p, const ProveOptions & opts)
{
  namespace fs = std::filesystem;
  std::string text = emit_vmt(s, p);
  std::string tmpl = (fs::temp_directory_path() / "prophic-XXXXXX.vmt").string();
  std::vector<char> name(tmpl.begin(), tmpl.end());
  name.push_back('\0');
  int fd = mkstemps(name.data(), 4);
  if (fd < 0) throw EngineCrashed("cannot create a temporary file");
  close(fd);
  std::string path(name.data());
  {
    std::ofstream f(path);
    f << text;
  }
  ChildOutput out;
  try {
    out = run_child(opts.external_path + " " + shell_quote(path), opts.solver.deadline);
  } catch (...) {
    fs::remove(path);
    throw;
  }
  fs::remove(path);

  ProveResult r;
  if (out.timed_out) {
    r.reason = "external engine timed out";
    return r;
  }
  std::istringstream in(out.out);
  std::string first;
  std::getline(in, first);
  std::istringstream words(first);
  std::string verdict;
  words >> verdict;
  if (verdict == "unknown") {
    r.reason = "external engine returned unknown";
    return r;
  }
  if (verdict == "unsafe") {
    long long k = 0;
    if (!(words >> k) || k < 0) throw EngineCrashed("malformed unsafe line: " + first);
    // recover a model with our own unrolling; engines differ on whether
    // the bound counts states or transitions
    SolverSession ses(opts.solver);
    for (long long kk : { k, k + 1 }) {
      if (kk < 1) continue;
      ProveResult f = bmc_model_at(ses, s, p, static_cast<std::uint32_t>(kk), opts.assume_prestate);
      if (f.kind == ProveResult::Kind::Falsified) return f;
    }
    throw EngineCrashed("external engine reported a counterexample of length " + std::to_string(k)
                        + " that does not exist");
  }
  if (verdict != "safe") {
    int code = WIFEXITED(out.status) ? WEXITSTATUS(out.status) : -1;
    throw EngineCrashed("external engine output not understood (exit " + std::to_string(code) + "): "
                        + first);
  }
  r.kind = ProveResult::Kind::Proven;
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (rest.find("define-fun") == std::string::npos) return r;
  try {
    for (const SExpr & e : parse_sexprs(rest)) {
      if (!e.head_is("define-fun") || e.size() != 5) continue;
      std::string script = text + "(define-fun .inv () Bool (! " + to_string(e[4]) + " :invar-property 1))\n";
      VmtDocument d = parse_vmt(s.store(), script);
      r.invariant = d.properties.at(1).formula;
      break;
    }
  } catch (const Error & e) {
    throw EngineCrashed(std::string("external invariant does not parse: ") + e.what());
  }
  return r;
}

}  // namespace

// ---- builtin engine ------------------------------------------------------------------

ProveResult prove(const TransitionSystem & s, const Property & p, const ProveOptions & opts)
{
  if (opts.engine == EngineKind::External) return prove_external(s, p, opts);
  TermStore & st = s.store();
  SolverConfig cfg = opts.solver;
  if (opts.kind_timeout_s > 0) cfg.query_timeout_s = opts.kind_timeout_s;

  ProveResult res;
  try {
    SolverSession ses(cfg);
    std::vector<Term> strengthening;
    if (opts.engine == EngineKind::KInduction) {
      std::vector<Term> surv = houdini(ses, s, p, mine_candidates(s, p, opts.max_candidates),
                                       opts.assume_prestate);
      if (std::find(surv.begin(), surv.end(), p.formula) != surv.end()) {
        res.kind = ProveResult::Kind::Proven;
        res.invariant = st.mk_and(inductive_core(ses, s, p, surv, opts.assume_prestate));
        res.depth = 1;
        return res;
      }
      strengthening = std::move(surv);
    }
    for (std::uint32_t k = 1; k <= opts.max_k; ++k) {
      if (k >= opts.min_k) {
        ProveResult f = bmc_model_at(ses, s, p, k, opts.assume_prestate);
        if (f.kind == ProveResult::Kind::Falsified) return f;
      }
      if (opts.engine == EngineKind::BmcOnly) continue;

      // k pre-states satisfying the property and the strengthening
      std::vector<std::pair<std::string, Term>> q;
      for (std::uint32_t i = 0; i < k; ++i) {
        for (Term c : s.trans_conjuncts()) q.emplace_back("", timed_at(s, c, i));
        q.emplace_back("", timed_at(s, p.formula, i));
        for (Term c : strengthening) q.emplace_back("", timed_at(s, c, i));
        if (opts.assume_prestate && p.original) q.emplace_back("", timed_at(s, p.original, i));
      }
      q.emplace_back("", st.mk_not(timed_at(s, p.formula, k)));
      if (ses.check(q).status == CheckStatus::Unsat) {
        std::vector<Term> inv = strengthening;
        inv.insert(inv.begin(), p.formula);
        res.kind = ProveResult::Kind::Proven;
        res.invariant = st.mk_and(inv);
        res.depth = k;
        return res;
      }
    }
    res.reason = "no proof up to bound " + std::to_string(opts.max_k);
  } catch (const SolverTimeout & e) {
    res = ProveResult{};
    res.reason = std::string("timeout: ") + e.what();
  }
  return res;
}

// ---- certificates and traces ---------------------------------------------------

bool check_certificate(const TransitionSystem & s,
                       const Property & p,
                       Term inv,
                       const SolverConfig & cfg,
                       std::uint32_t depth,
                       bool assume_prestate)
{
  if (depth == 0) throw InvalidDepth("certificate depth must be at least 1");
  TermStore & st = s.store();
  SolverSession ses(cfg);
  auto unsat = [&](const std::vector<Term> & fs) {
    std::vector<std::pair<std::string, Term>> q;
    for (Term f : fs) q.emplace_back("", f);
    CheckStatus r = ses.check(q).status;
    if (r == CheckStatus::Unknown) throw SolverError("solver returned unknown on a certificate query");
    return r == CheckStatus::Unsat;
  };

  // initiation: every path of up to depth states satisfies inv
  for (std::uint32_t j = 1; j <= depth; ++j) {
    Unrolling u = unroll(s, Property{ inv, p.original }, j, {}, assume_prestate);
    if (!unsat(u.formulas())) return false;
  }
  // consecution
  std::vector<Term> q;
  for (std::uint32_t i = 0; i < depth; ++i) {
    for (Term c : s.trans_conjuncts()) q.push_back(timed_at(s, c, i));
    q.push_back(timed_at(s, inv, i));
    if (assume_prestate && p.original) q.push_back(timed_at(s, p.original, i));
  }
  q.push_back(st.mk_not(timed_at(s, inv, depth)));
  if (!unsat(q)) return false;
  // safety
  return unsat({ timed_at(s, inv, 0), st.mk_not(timed_at(s, p.formula, 0)) });
}

bool replay_trace(const TransitionSystem & s,
                  const Property & p,
                  const std::vector<TraceStep> & trace,
                  const SolverConfig & cfg)
{
  if (trace.empty()) throw InvalidTrace("empty trace");
  TermStore & st = s.store();
  Unrolling u = unroll(s, p, static_cast<std::uint32_t>(trace.size()));
  std::vector<std::pair<std::string, Term>> q;
  for (Term f : u.formulas()) q.emplace_back("", f);
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (const auto & [v, val] : trace[i]) {
      if (!s.is_state_var(v) && !s.is_input_var(v))
        throw InvalidTrace("trace mentions " + v.name() + ", which is not a variable of the system");
      Term c = value_term(st, v.sort(), val);
      if (!c) continue;
      q.emplace_back("", st.mk_eq(st.timed(v, static_cast<std::uint32_t>(i)), c));
    }
  SolverSession ses(cfg);
  CheckStatus r = ses.check(q).status;
  if (r == CheckStatus::Unknown) throw SolverError("solver returned unknown while replaying a trace");
  return r == CheckStatus::Sat;
}

}  // namespace prophic

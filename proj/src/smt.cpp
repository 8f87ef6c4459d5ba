#include "prophic/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <iostream>

#include "prophic/errors.hpp"

namespace prophic {

std::string SolverConfig::default_command()
{
  if (const char * env = std::getenv("PROPHIC_SOLVER"); env && *env) return env;
  return "z3 -in";
}

const char * to_string(CheckStatus s)
{
  switch (s) {
    case CheckStatus::Sat: return "sat";
    case CheckStatus::Unsat: return "unsat";
    case CheckStatus::Unknown: return "unknown";
  }
  return "?";
}

// ---- process ---------------------------------------------------------------

SolverProcess::SolverProcess(const std::string & command) : command_(command)
{
  static bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  int in[2], out[2], err[2];
  if (::pipe(in) || ::pipe(out) || ::pipe(err))
    throw SolverCrashed(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = ::fork();
  if (pid < 0) throw SolverCrashed(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in[0], 0);
    ::dup2(out[1], 1);
    ::dup2(err[1], 2);
    for (int fd : { in[0], in[1], out[0], out[1], err[0], err[1] }) ::close(fd);
    std::string sh = "exec " + command;
    ::execl("/bin/sh", "sh", "-c", sh.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  ::close(err[1]);
  pid_ = pid;
  in_fd_ = in[1];
  out_fd_ = out[0];
  err_fd_ = err[0];
  ::fcntl(err_fd_, F_SETFL, ::fcntl(err_fd_, F_GETFL) | O_NONBLOCK);
}

SolverProcess::~SolverProcess() { kill(); }

void SolverProcess::kill()
{
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
  for (int * fd : { &in_fd_, &out_fd_, &err_fd_ }) {
    if (*fd >= 0) ::close(*fd);
    *fd = -1;
  }
}

std::string SolverProcess::drain_stderr()
{
  std::string s;
  if (err_fd_ < 0) return s;
  char tmp[4096];
  for (;;) {
    ssize_t n = ::read(err_fd_, tmp, sizeof tmp);
    if (n <= 0) break;
    s.append(tmp, static_cast<std::size_t>(n));
  }
  return s;
}

void SolverProcess::crashed(const std::string & what)
{
  std::string err = drain_stderr();
  kill();
  std::string msg = "solver '" + command_ + "' " + what;
  if (!err.empty()) msg += ": " + err;
  throw SolverCrashed(msg);
}

void SolverProcess::send(const std::string & line)
{
  if (pid_ <= 0) throw SolverCrashed("solver process is not running");
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      crashed("closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

SExpr SolverProcess::read_response(double timeout_s)
{
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  for (;;) {
    // skip leading whitespace so an empty buffer is recognisable
    std::size_t first = buf_.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && sexpr_complete(std::string_view(buf_).substr(first))) {
      std::string_view rest = std::string_view(buf_).substr(first);
      // find the end of the first expression by re-scanning prefixes
      std::size_t end = rest.size();
      int depth = 0;
      bool atom = false;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        char c = rest[i];
        if (c == '"' || c == '|') {
          char close = c;
          ++i;
          while (i < rest.size() && rest[i] != close) ++i;
          if (depth == 0) atom = true;
          continue;
        }
        if (c == '(') {
          ++depth;
        } else if (c == ')') {
          if (--depth == 0) {
            end = i + 1;
            break;
          }
        } else if (std::isspace(static_cast<unsigned char>(c))) {
          if (depth == 0 && atom) {
            end = i;
            break;
          }
        } else if (depth == 0) {
          atom = true;
        }
      }
      std::string text(rest.substr(0, end));
      buf_.erase(0, first + end);
      auto es = parse_sexprs(text);
      if (es.size() != 1) throw ProtocolError("unparseable solver response: " + text);
      return es[0];
    }
    int wait_ms = -1;
    if (timeout_s > 0) {
      double left = timeout_s - std::chrono::duration<double>(clock::now() - start).count();
      if (left <= 0) {
        kill();
        throw SolverTimeout("solver query timed out");
      }
      wait_ms = static_cast<int>(left * 1000) + 1;
    }
    pollfd p{ out_fd_, POLLIN, 0 };
    int r = ::poll(&p, 1, wait_ms);
    if (r < 0) {
      if (errno == EINTR) continue;
      crashed("poll failed");
    }
    if (r == 0) continue;  // re-evaluates the deadline
    char tmp[65536];
    ssize_t n = ::read(out_fd_, tmp, sizeof tmp);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) crashed("exited unexpectedly");
    buf_.append(tmp, static_cast<std::size_t>(n));
  }
}

// ---- names -------------------------------------------------------------------

std::string SessionNames::emit(const std::string & internal, const std::string & kind) const
{
  std::string key = kind + internal;
  auto it = table_.find(key);
  if (it != table_.end()) return it->second;
  std::string base = internal;
  for (char & c : base)
    if (c == '@') c = '.';
  std::string cand = base;
  for (std::size_t i = 1; used_.count(cand); ++i) cand = base + "!" + std::to_string(i);
  used_.insert(cand);
  std::string q = quote_symbol(cand);
  table_.emplace(key, q);
  return q;
}

std::string SessionNames::var(Term v) const { return emit(v.name(), "v"); }
std::string SessionNames::fun(const FuncDecl & f) const { return emit(f.name, "v"); }
std::string SessionNames::sort(Sort s) const
{
  if (s.is_uninterpreted()) return emit(s.name(), "s");
  return NameScheme::sort(s);
}

// ---- session -----------------------------------------------------------------

SolverSession::SolverSession(const SolverConfig & cfg, const std::string & logic)
    : cfg_(cfg), live_generation_(std::make_shared<std::size_t>(0))
{
  proc_ = std::make_unique<SolverProcess>(cfg_.command);
  if (cfg_.stats) ++cfg_.stats->sessions;
  command("(set-option :print-success true)");
  command("(set-option :produce-models true)");
  command("(set-option :produce-unsat-cores true)");
  command("(set-option :global-declarations true)");
  command("(set-logic " + logic + ")");
}

SolverSession::~SolverSession()
{
  if (proc_ && proc_->alive()) {
    try {
      proc_->send("(exit)");
    } catch (...) {
    }
  }
}

double SolverSession::time_budget() const
{
  double t = cfg_.query_timeout_s;
  if (cfg_.deadline) {
    double left =
        std::chrono::duration<double>(*cfg_.deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) throw SolverTimeout("global time budget exhausted");
    if (t <= 0 || left < t) t = left;
  }
  return t;
}

SExpr SolverSession::command(const std::string & cmd, bool timed)
{
  if (cfg_.trace) std::cerr << cmd << "\n";
  proc_->send(cmd);
  SExpr r = proc_->read_response(timed ? time_budget() : (cfg_.deadline ? time_budget() : 0));
  if (r.head_is("error")) {
    std::string msg = r.size() > 1 ? r[1].atom : to_string(r);
    throw ProtocolError("solver error on '" + cmd.substr(0, 200) + "': " + msg);
  }
  return r;
}

void SolverSession::push()
{
  command("(push 1)");
  ++depth_;
  ++*live_generation_;
}

void SolverSession::pop()
{
  if (depth_ == 0) throw ProtocolError("pop without matching push");
  command("(pop 1)");
  --depth_;
  ++*live_generation_;
}

void SolverSession::declare_symbols(Term t)
{
  auto declare_sort = [&](Sort s, auto & self) -> void {
    if (s.is_array()) {
      self(s.index(), self);
      self(s.element(), self);
    } else if (s.is_uninterpreted() && declared_sorts_.insert(s.id()).second) {
      command("(declare-sort " + names_.sort(s) + " 0)");
    }
  };
  Term roots[] = { t };
  for (Term u : collect(std::span<const Term>(roots), [](Term) { return true; })) {
    declare_sort(u.sort(), declare_sort);
    if (u.is_var()) {
      if (declared_terms_.insert(u.id()).second)
        command("(declare-fun " + names_.var(u) + " () " + names_.sort(u.sort()) + ")");
    } else if (u.op() == Op::Apply) {
      const FuncDecl * f = u.func();
      if (declared_funs_.insert(f->id).second) {
        std::string s = "(declare-fun " + names_.fun(*f) + " (";
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          declare_sort(f->args[i], declare_sort);
          s += (i ? " " : "") + names_.sort(f->args[i]);
        }
        s += ") " + names_.sort(f->result) + ")";
        command(s);
      }
    }
  }
}

void SolverSession::assert_formula(Term t, const std::string & label)
{
  if (!t.sort().is_bool()) throw SortMismatch("asserting a non-Boolean term", -1);
  declare_symbols(t);
  ++*live_generation_;
  if (label.empty()) {
    command("(assert " + to_smt(t, names_) + ")");
    return;
  }
  std::string nm = "a!" + std::to_string(next_label_++);
  label_of_.emplace(nm, label);
  command("(assert (! " + to_smt(t, names_) + " :named " + nm + "))");
}

CheckStatus SolverSession::check_sat()
{
  if (cfg_.stats) ++cfg_.stats->queries;
  ++*live_generation_;
  SExpr r = command("(check-sat)", true);
  if (r.is_symbol("sat")) return CheckStatus::Sat;
  if (r.is_symbol("unsat")) return CheckStatus::Unsat;
  if (r.is_symbol("unknown")) return CheckStatus::Unknown;
  throw ProtocolError("unexpected check-sat response: " + to_string(r));
}

Value SolverSession::parse_value(const SExpr & e, Sort s) const
{
  if (s.is_bool()) {
    if (e.is_symbol("true")) return true;
    if (e.is_symbol("false")) return false;
  } else if (s.is_int()) {
    try {
      if (e.is_atom() && !e.quoted && !e.string) return BigInt(e.atom);
      if (e.head_is("-") && e.size() == 2 && e[1].is_atom()) return BigInt(-BigInt(e[1].atom));
    } catch (const std::exception &) {
    }
  } else if (s.is_uninterpreted()) {
    return UValue{ s.id(), to_string(e) };
  }
  throw ProtocolError("cannot parse model value " + to_string(e) + " of sort " + s.to_string());
}

std::vector<Value> SolverSession::get_values(const std::vector<Term> & ts)
{
  std::vector<Value> out;
  if (ts.empty()) return out;
  for (Term t : ts) declare_symbols(t);
  // chunk large requests to keep lines manageable
  const std::size_t chunk = 200;
  for (std::size_t lo = 0; lo < ts.size(); lo += chunk) {
    std::size_t hi = std::min(ts.size(), lo + chunk);
    std::string cmd = "(get-value (";
    for (std::size_t i = lo; i < hi; ++i) cmd += (i > lo ? " " : "") + to_smt(ts[i], names_);
    cmd += "))";
    SExpr r = command(cmd, true);
    if (!r.is_list() || r.size() != hi - lo)
      throw ProtocolError("malformed get-value response: " + to_string(r).substr(0, 200));
    for (std::size_t i = lo; i < hi; ++i) {
      const SExpr & pair = r[i - lo];
      if (!pair.is_list() || pair.size() != 2) throw ProtocolError("malformed get-value pair");
      out.push_back(parse_value(pair[1], ts[i].sort()));
    }
  }
  return out;
}

std::optional<Value> SolverSession::try_value(Term t)
{
  try {
    return get_values({ t })[0];
  } catch (const SolverTimeout &) {
    throw;
  } catch (const SolverCrashed &) {
    throw;
  } catch (const Error &) {
    return std::nullopt;
  }
}

std::vector<std::string> SolverSession::unsat_core()
{
  SExpr r = command("(get-unsat-core)");
  if (!r.is_list()) throw ProtocolError("malformed unsat core: " + to_string(r));
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const SExpr & e : r.list) {
    auto it = label_of_.find(e.atom);
    if (it == label_of_.end()) throw ProtocolError("unknown core label " + e.atom);
    if (seen.insert(it->second).second) out.push_back(it->second);
  }
  return out;
}

CexModel SolverSession::get_model(const std::vector<Term> & roots)
{
  auto wanted = collect(std::span<const Term>(roots), [](Term u) {
    if (u.sort().is_array()) return false;
    return u.is_var() || u.op() == Op::Apply;
  });
  CexModel m;
  std::vector<Value> vals = get_values(wanted);
  // scalars first so that argument evaluation below can use them
  for (std::size_t i = 0; i < wanted.size(); ++i)
    if (wanted[i].is_var()) m.set(wanted[i], vals[i]);

  std::weak_ptr<std::size_t> live = live_generation_;
  std::size_t gen = *live_generation_;
  SolverSession * self = this;
  m.set_fallback([live, gen, self](Term t) -> std::optional<Value> {
    auto g = live.lock();
    if (!g || *g != gen) return std::nullopt;
    auto v = self->try_value(t);
    *g = gen;  // get-value does not change the solver state
    return v;
  });
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    Term t = wanted[i];
    if (t.op() != Op::Apply) continue;
    std::vector<Value> args;
    for (Term c : t.children()) args.push_back(evaluate(c, m));
    m.set_app(t.func(), std::move(args), vals[i]);
  }
  return m;
}

void SolverSession::complete_model(CexModel & m, const std::vector<Term> & roots)
{
  auto cands = collect(std::span<const Term>(roots), [](Term u) {
    if (u.sort().is_array()) return false;
    return u.is_var() || u.op() == Op::Apply;
  });
  CexModel::Fallback fb = m.fallback();
  m.set_fallback({});
  std::vector<Term> wanted;
  for (Term t : cands) {
    if (t.is_var()) {
      if (!m.find(t)) wanted.push_back(t);
      continue;
    }
    try {
      std::vector<Value> args;
      for (Term c : t.children()) args.push_back(evaluate(c, m));
      if (m.find_app(t.func(), args)) continue;
    } catch (const Error &) {
      // an argument is itself missing; it is requested in the same batch
    }
    wanted.push_back(t);
  }
  std::vector<Value> vals = get_values(wanted);
  for (std::size_t i = 0; i < wanted.size(); ++i)
    if (wanted[i].is_var()) m.set(wanted[i], vals[i]);
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    Term t = wanted[i];
    if (t.is_var()) continue;
    std::vector<Value> args;
    for (Term c : t.children()) args.push_back(evaluate(c, m));
    m.set_app(t.func(), std::move(args), vals[i]);
  }
  m.set_fallback(std::move(fb));
}

CheckResult SolverSession::check(const std::vector<std::pair<std::string, Term>> & assertions,
                                 Want want)
{
  push();
  CheckResult res;
  try {
    std::size_t i = 0;
    for (const auto & [name, t] : assertions) {
      std::string label = name;
      if (want == Want::Core && label.empty()) label = "#" + std::to_string(i);
      assert_formula(t, want == Want::Core ? label : std::string());
      ++i;
    }
    res.status = check_sat();
    if (res.status == CheckStatus::Sat && want == Want::Model) {
      std::vector<Term> roots;
      for (const auto & a : assertions) roots.push_back(a.second);
      res.model = get_model(roots);
      res.model.set_fallback({});
    } else if (res.status == CheckStatus::Unsat && want == Want::Core) {
      res.core = unsat_core();
    }
  } catch (...) {
    if (proc_->alive()) {
      try {
        pop();
      } catch (...) {
      }
    }
    throw;
  }
  pop();
  return res;
}

}  // namespace prophic

#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace prophic::test {

std::string corpus_dir() { return PROPHIC_CORPUS_DIR; }

std::vector<std::string> corpus_files()
{
  std::vector<std::string> out;
  for (const auto & e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".vmt") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_file(const std::string & path)
{
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

VmtDocument load_corpus(TermStore & st, const std::string & name)
{
  return parse_vmt(st, read_file(corpus_dir() + "/" + name));
}

std::string run_z3(const std::string & script)
{
  char path[] = "/tmp/prophic_oracle_XXXXXX.smt2";
  int fd = mkstemps(path, 5);
  if (fd < 0) throw std::runtime_error("mkstemps failed");
  {
    std::ofstream f(path);
    f << script;
  }
  close(fd);
  std::string cmd = std::string("z3 ") + path + " 2>&1";
  FILE * p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (p && fgets(buf, sizeof buf, p)) out += buf;
  if (p) pclose(p);
  std::remove(path);
  auto nl = out.find('\n');
  return nl == std::string::npos ? out : out.substr(0, nl);
}

std::string declarations(const std::vector<Term> & ts)
{
  std::ostringstream out;
  NameScheme names;
  std::set<std::string> sorts;
  std::map<std::string, const FuncDecl *> funs;
  std::function<void(Sort)> sort = [&](Sort s) {
    if (s.is_array()) {
      sort(s.index());
      sort(s.element());
    } else if (s.is_uninterpreted() && sorts.insert(s.name()).second) {
      out << "(declare-sort " << names.sort(s) << " 0)\n";
    }
  };
  std::vector<Term> vars;
  for (Term u : collect(std::span<const Term>(ts), [](Term) { return true; })) {
    sort(u.sort());
    if (u.is_var()) vars.push_back(u);
    if (u.op() == Op::Apply) {
      funs.emplace(u.func()->name, u.func());
      for (Sort a : u.func()->args) sort(a);
    }
  }
  for (const auto & [n, f] : funs) {
    out << "(declare-fun " << names.fun(*f) << " (";
    for (std::size_t i = 0; i < f->args.size(); ++i) out << (i ? " " : "") << names.sort(f->args[i]);
    out << ") " << names.sort(f->result) << ")\n";
  }
  for (Term v : vars) out << "(declare-fun " << names.var(v) << " () " << names.sort(v.sort()) << ")\n";
  return out.str();
}

namespace {

struct Steps
{
  const TransitionSystem & s;
  TermMap at(std::uint32_t i) const
  {
    TermStore & st = s.store();
    auto var = [&](Term v, std::uint32_t j) {
      return st.mk_var("oracle!" + v.name() + "!" + std::to_string(j), v.sort(), VarKind::State);
    };
    TermMap m;
    for (Term v : s.state_vars()) {
      m.emplace(v, var(v, i));
      m.emplace(s.next(v), var(v, i + 1));
    }
    for (Term v : s.input_vars()) m.emplace(v, var(v, i));
    return m;
  }
};

std::string solve(const std::vector<Term> & fs)
{
  std::ostringstream q;
  q << "(set-logic ALL)\n" << declarations(fs);
  for (Term f : fs) q << "(assert " << to_smt(f) << ")\n";
  q << "(check-sat)\n";
  return run_z3(q.str());
}

}  // namespace

std::string oracle_bmc(const TransitionSystem & s,
                       const Property & p,
                       std::uint32_t k,
                       bool assume_prestate,
                       const std::vector<TraceStep> * pins)
{
  TermStore & st = s.store();
  Steps steps{ s };
  Term original = p.original ? p.original : p.formula;
  std::vector<Term> fs;
  fs.push_back(substitute(st, s.init(), steps.at(0)));
  for (std::uint32_t i = 0; i + 1 < k; ++i) {
    TermMap m = steps.at(i);
    fs.push_back(substitute(st, s.trans(), m));
    if (assume_prestate) fs.push_back(substitute(st, original, m));
  }
  fs.push_back(st.mk_not(substitute(st, p.formula, steps.at(k - 1))));
  if (pins)
    for (std::uint32_t i = 0; i < pins->size() && i < k; ++i)
      for (const auto & [v, val] : (*pins)[i]) {
        Term lit = value_term(st, v.sort(), val);
        if (lit) fs.push_back(st.mk_eq(substitute(st, v, steps.at(i)), lit));
      }
  return solve(fs);
}

std::string oracle_induction(const TransitionSystem & s, Term inv, Term assume, std::uint32_t depth, bool assume_prestate)
{
  TermStore & st = s.store();
  Steps steps{ s };
  std::vector<Term> fs;
  for (std::uint32_t i = 0; i < depth; ++i) {
    TermMap m = steps.at(i);
    fs.push_back(substitute(st, inv, m));
    fs.push_back(substitute(st, s.trans(), m));
    if (assume_prestate && assume) fs.push_back(substitute(st, assume, m));
  }
  fs.push_back(st.mk_not(substitute(st, inv, steps.at(depth))));
  return solve(fs);
}

bool oracle_valid(Term f)
{
  std::ostringstream q;
  q << "(set-logic ALL)\n" << declarations({ f }) << "(assert (not " << to_smt(f) << "))\n(check-sat)\n";
  return run_z3(q.str()) == "unsat";
}

bool alpha_equiv(Term a, Term b, Renaming & r)
{
  if (a.op() != b.op() || a.num_children() != b.num_children()) return false;
  if (a.sort().kind() != b.sort().kind()) return false;
  switch (a.op()) {
    case Op::Var: {
      auto f = r.vars.find(a);
      auto g = r.vars_back.find(b);
      if (f != r.vars.end() || g != r.vars_back.end())
        return f != r.vars.end() && f->second == b && g != r.vars_back.end() && g->second == a;
      r.vars.emplace(a, b);
      r.vars_back.emplace(b, a);
      return true;
    }
    case Op::IntLit: return a.int_value() == b.int_value();
    case Op::BoolLit: return a.bool_value() == b.bool_value();
    case Op::Apply: {
      const FuncDecl * fa = a.func();
      const FuncDecl * fb = b.func();
      auto f = r.funs.find(fa);
      auto g = r.funs_back.find(fb);
      if (f != r.funs.end() || g != r.funs_back.end()) {
        if (!(f != r.funs.end() && f->second == fb && g != r.funs_back.end() && g->second == fa)) return false;
      } else {
        r.funs.emplace(fa, fb);
        r.funs_back.emplace(fb, fa);
      }
      break;
    }
    default: break;
  }
  for (std::size_t i = 0; i < a.num_children(); ++i)
    if (!alpha_equiv(a[i], b[i], r)) return false;
  return true;
}

namespace {

bool match_from(const std::vector<Term> & a,
                const std::vector<Term> & b,
                std::size_t i,
                std::vector<bool> & used,
                Renaming & r)
{
  if (i == a.size()) return true;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (used[j]) continue;
    Renaming trial = r;
    if (!alpha_equiv(a[i], b[j], trial)) continue;
    used[j] = true;
    if (match_from(a, b, i + 1, used, trial)) {
      r = std::move(trial);
      return true;
    }
    used[j] = false;
  }
  return false;
}

}  // namespace

bool alpha_equiv_sets(const std::vector<Term> & a, const std::vector<Term> & b, Renaming & r)
{
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  return match_from(a, b, 0, used, r);
}

}  // namespace prophic::test

#include "prophic/terms.hpp"

#include <algorithm>
#include <unordered_set>

#include "prophic/errors.hpp"

namespace prophic {

// ---- Sort / Term accessors ------------------------------------------------

SortKind Sort::kind() const { return n_->kind; }
Sort Sort::index() const { return n_->index; }
Sort Sort::element() const { return n_->element; }
const std::string & Sort::name() const { return n_->name; }
std::uint32_t Sort::id() const { return n_->id; }
std::string Sort::to_string() const { return sort_to_smt(*this); }

std::uint32_t Term::id() const { return n_->id; }
Op Term::op() const { return n_->op; }
Sort Term::sort() const { return n_->sort; }
std::span<const Term> Term::children() const { return n_->children; }
const BigInt & Term::int_value() const { return n_->value; }
bool Term::bool_value() const { return n_->bval; }
const FuncDecl * Term::func() const { return n_->func; }
const std::string & Term::name() const { return n_->name; }
VarKind Term::var_kind() const { return n_->kind; }
Term Term::base() const { return n_->base; }
std::uint32_t Term::step() const { return n_->step; }
Term Term::target() const { return n_->target; }
std::uint32_t Term::depth() const { return n_->depth; }
std::string Term::to_string() const { return n_ ? to_smt(*this) : "<null>"; }

const char * op_name(Op op)
{
  switch (op) {
    case Op::Var: return "var";
    case Op::IntLit: return "int";
    case Op::BoolLit: return "bool";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    case Op::Eq: return "=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Read: return "select";
    case Op::Write: return "store";
    case Op::ConstArr: return "const";
    case Op::Apply: return "apply";
  }
  return "?";
}

// ---- TermStore --------------------------------------------------------------

TermStore::TermStore()
{
  bool_ = intern_sort(SortNode{ 0, SortKind::Bool, {}, {}, "Bool" }, "Bool");
  int_ = intern_sort(SortNode{ 0, SortKind::Int, {}, {}, "Int" }, "Int");
}

Sort TermStore::intern_sort(SortNode && proto, const std::string & key)
{
  auto it = sort_index_.find(key);
  if (it != sort_index_.end()) return Sort(it->second);
  proto.id = static_cast<std::uint32_t>(sorts_.size() + 1);
  sorts_.push_back(std::move(proto));
  const SortNode * n = &sorts_.back();
  sort_index_.emplace(key, n);
  return Sort(n);
}

Sort TermStore::array_sort(Sort index, Sort element)
{
  if (!index || !element) throw SortMismatch("array sort over null sort", -1);
  std::string key = "A" + std::to_string(index.id()) + "," + std::to_string(element.id());
  return intern_sort(SortNode{ 0, SortKind::Array, index, element, {} }, key);
}

Sort TermStore::uninterpreted_sort(const std::string & name)
{
  if (name == "Bool" || name == "Int") throw SortMismatch("reserved sort name " + name, -1);
  return intern_sort(SortNode{ 0, SortKind::Uninterpreted, {}, {}, name }, "U" + name);
}

Term TermStore::intern(TermNode && proto, const std::string & key)
{
  auto it = term_index_.find(key);
  if (it != term_index_.end()) return Term(it->second);
  proto.id = static_cast<std::uint32_t>(terms_.size() + 1);
  terms_.push_back(std::move(proto));
  const TermNode * n = &terms_.back();
  term_index_.emplace(key, n);
  return Term(n);
}

bool TermStore::name_taken(const std::string & name) const
{
  return vars_.count(name) || func_index_.count(name);
}

std::string TermStore::fresh_name(const std::string & base) const
{
  if (!name_taken(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!name_taken(cand)) return cand;
  }
}

Term TermStore::mk_var(const std::string & name, Sort sort, VarKind kind)
{
  if (!sort) throw SortMismatch("variable " + name + " without sort", -1);
  auto it = vars_.find(name);
  if (it != vars_.end()) {
    if (it->second.sort() != sort)
      throw SortMismatch("variable " + name + " redeclared with a different sort", -1);
    return it->second;
  }
  if (func_index_.count(name))
    throw SortMismatch("name " + name + " already used by a function", -1);
  TermNode n{};
  n.op = Op::Var;
  n.sort = sort;
  n.name = name;
  n.kind = kind;
  Term t = intern(std::move(n), "V" + name);
  vars_.emplace(name, t);
  return t;
}

Term TermStore::find_var(const std::string & name) const
{
  auto it = vars_.find(name);
  return it == vars_.end() ? Term() : it->second;
}

Term TermStore::mk_aux_var(const std::string & name,
                           Sort sort,
                           VarKind kind,
                           Term target,
                           std::uint32_t depth)
{
  if (vars_.count(name)) return vars_.at(name);
  Term v = mk_var(name, sort, kind);
  auto * n = const_cast<TermNode *>(v.node());
  n->target = target;
  n->depth = depth;
  return v;
}

Term TermStore::mk_next(Term state, const std::string & name)
{
  if (!state.is_var()) throw ScopeError("next of a non-variable");
  auto it = next_.find(state.id());
  if (it != next_.end()) return it->second;
  VarKind k = state.var_kind();
  if (k == VarKind::Next || k == VarKind::Timed)
    throw ScopeError("variable " + state.name() + " cannot have a next-state copy");
  std::string nm = name.empty() ? fresh_name(state.name() + "'") : name;
  Term nx = mk_var(nm, state.sort(), VarKind::Next);
  const_cast<TermNode *>(nx.node())->base = state;
  next_.emplace(state.id(), nx);
  return nx;
}

Term TermStore::next_of(Term state) const
{
  auto it = next_.find(state.id());
  return it == next_.end() ? Term() : it->second;
}

Term TermStore::timed(Term var, std::uint32_t step)
{
  if (!var.is_var()) throw ScopeError("timed copy of a non-variable");
  if (var.var_kind() == VarKind::Timed) throw ScopeError("timed copy of a timed variable");
  if (var.var_kind() == VarKind::Next) return timed(var.base(), step + 1);
  auto key = std::make_pair(var.id(), step);
  auto it = timed_.find(key);
  if (it != timed_.end()) return it->second;
  std::string nm = var.name() + "@" + std::to_string(step);
  TermNode n{};
  n.op = Op::Var;
  n.sort = var.sort();
  n.name = nm;
  n.kind = VarKind::Timed;
  n.base = var;
  n.step = step;
  // timed names live in their own key space so they never clash with users
  Term t = intern(std::move(n), "T" + std::to_string(var.id()) + "@" + std::to_string(step));
  timed_.emplace(key, t);
  return t;
}

Term TermStore::mk_int(const BigInt & v)
{
  TermNode n{};
  n.op = Op::IntLit;
  n.sort = int_;
  n.value = v;
  return intern(std::move(n), "L" + v.str());
}

Term TermStore::mk_bool(bool b)
{
  TermNode n{};
  n.op = Op::BoolLit;
  n.sort = bool_;
  n.bval = b;
  return intern(std::move(n), b ? "Btrue" : "Bfalse");
}

namespace {

void need_sort(Term t, Sort s, int pos, const char * what)
{
  if (!t) throw SortMismatch(std::string(what) + ": null child", pos);
  if (t.sort() != s)
    throw SortMismatch(std::string(what) + ": child " + std::to_string(pos) + " has sort "
                           + t.sort().to_string() + ", expected " + s.to_string(),
                       pos);
}

void need_arity(const std::vector<Term> & cs, std::size_t lo, std::size_t hi, const char * what)
{
  if (cs.size() < lo || cs.size() > hi)
    throw SortMismatch(std::string(what) + ": wrong number of arguments ("
                           + std::to_string(cs.size()) + ")",
                       -1);
}

std::string key_of(Op op, Sort s, const std::vector<Term> & cs, const std::string & extra = {})
{
  std::string k = "A";
  k += std::to_string(static_cast<int>(op));
  k += ':';
  k += std::to_string(s.id());
  k += extra;
  for (Term c : cs) {
    k += ',';
    k += std::to_string(c.id());
  }
  return k;
}

}  // namespace

Term TermStore::mk_term(Op op, std::vector<Term> cs)
{
  const char * nm = op_name(op);
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!cs[i]) throw SortMismatch(std::string(nm) + ": null child", static_cast<int>(i));
  Sort result;
  switch (op) {
    case Op::Var:
    case Op::IntLit:
    case Op::BoolLit:
    case Op::Apply:
    case Op::ConstArr:
      throw SortMismatch(std::string("mk_term cannot build ") + nm, -1);
    case Op::Not:
      need_arity(cs, 1, 1, nm);
      need_sort(cs[0], bool_, 0, nm);
      result = bool_;
      break;
    case Op::And:
    case Op::Or:
      need_arity(cs, 1, SIZE_MAX, nm);
      for (std::size_t i = 0; i < cs.size(); ++i) need_sort(cs[i], bool_, static_cast<int>(i), nm);
      result = bool_;
      break;
    case Op::Implies:
      need_arity(cs, 2, 2, nm);
      need_sort(cs[0], bool_, 0, nm);
      need_sort(cs[1], bool_, 1, nm);
      result = bool_;
      break;
    case Op::Ite:
      need_arity(cs, 3, 3, nm);
      need_sort(cs[0], bool_, 0, nm);
      need_sort(cs[2], cs[1].sort(), 2, nm);
      result = cs[1].sort();
      break;
    case Op::Eq:
      need_arity(cs, 2, 2, nm);
      need_sort(cs[1], cs[0].sort(), 1, nm);
      result = bool_;
      break;
    case Op::Lt:
    case Op::Le:
      need_arity(cs, 2, 2, nm);
      need_sort(cs[0], int_, 0, nm);
      need_sort(cs[1], int_, 1, nm);
      result = bool_;
      break;
    case Op::Add:
      need_arity(cs, 2, SIZE_MAX, nm);
      for (std::size_t i = 0; i < cs.size(); ++i) need_sort(cs[i], int_, static_cast<int>(i), nm);
      result = int_;
      break;
    case Op::Sub:
      need_arity(cs, 2, 2, nm);
      need_sort(cs[0], int_, 0, nm);
      need_sort(cs[1], int_, 1, nm);
      result = int_;
      break;
    case Op::Mul:
      need_arity(cs, 2, 2, nm);
      need_sort(cs[0], int_, 0, nm);
      need_sort(cs[1], int_, 1, nm);
      if (cs[0].op() != Op::IntLit && cs[1].op() == Op::IntLit) std::swap(cs[0], cs[1]);
      if (cs[0].op() != Op::IntLit)
        throw UnsupportedLogic("nonlinear multiplication: " + cs[0].to_string() + " * "
                               + cs[1].to_string());
      result = int_;
      break;
    case Op::Read:
      need_arity(cs, 2, 2, nm);
      if (!cs[0].sort().is_array())
        throw SortMismatch("select: child 0 is not an array", 0);
      need_sort(cs[1], cs[0].sort().index(), 1, nm);
      result = cs[0].sort().element();
      break;
    case Op::Write:
      need_arity(cs, 3, 3, nm);
      if (!cs[0].sort().is_array())
        throw SortMismatch("store: child 0 is not an array", 0);
      need_sort(cs[1], cs[0].sort().index(), 1, nm);
      need_sort(cs[2], cs[0].sort().element(), 2, nm);
      result = cs[0].sort();
      break;
  }
  TermNode n{};
  n.op = op;
  n.sort = result;
  std::string key = key_of(op, result, cs);
  n.children = std::move(cs);
  return intern(std::move(n), key);
}

Term TermStore::mk_app(const FuncDecl * f, std::vector<Term> args)
{
  if (!f) throw SortMismatch("application of a null function", -1);
  if (args.size() != f->args.size())
    throw SortMismatch(f->name + ": expected " + std::to_string(f->args.size()) + " arguments",
                       -1);
  for (std::size_t i = 0; i < args.size(); ++i) need_sort(args[i], f->args[i], static_cast<int>(i), f->name.c_str());
  TermNode n{};
  n.op = Op::Apply;
  n.sort = f->result;
  n.func = f;
  std::string key = key_of(Op::Apply, f->result, args, "f" + std::to_string(f->id));
  n.children = std::move(args);
  return intern(std::move(n), key);
}

Term TermStore::mk_const_array(Sort array_sort, Term element)
{
  if (!array_sort.is_array()) throw SortMismatch("const array of a non-array sort", -1);
  need_sort(element, array_sort.element(), 0, "const");
  TermNode n{};
  n.op = Op::ConstArr;
  n.sort = array_sort;
  n.children = { element };
  return intern(std::move(n), key_of(Op::ConstArr, array_sort, { element }));
}

const FuncDecl * TermStore::declare_fun(const std::string & name,
                                        std::vector<Sort> args,
                                        Sort result,
                                        FuncDecl::Role role,
                                        Sort array_sort)
{
  auto it = func_index_.find(name);
  if (it != func_index_.end()) {
    const FuncDecl * f = it->second;
    if (f->args != args || f->result != result)
      throw SortMismatch("function " + name + " redeclared with a different signature", -1);
    return f;
  }
  if (vars_.count(name)) throw SortMismatch("name " + name + " already used by a variable", -1);
  funcs_.push_back(FuncDecl{ static_cast<std::uint32_t>(funcs_.size() + 1),
                             name,
                             std::move(args),
                             result,
                             role,
                             array_sort });
  const FuncDecl * f = &funcs_.back();
  func_index_.emplace(name, f);
  return f;
}

const FuncDecl * TermStore::find_fun(const std::string & name) const
{
  auto it = func_index_.find(name);
  return it == func_index_.end() ? nullptr : it->second;
}

Term TermStore::mk_and(std::vector<Term> cs)
{
  std::vector<Term> out;
  std::unordered_set<Term> seen;
  for (Term c : cs) {
    if (c.op() == Op::BoolLit) {
      if (!c.bool_value()) return mk_false();
      continue;
    }
    if (seen.insert(c).second) out.push_back(c);
  }
  if (out.empty()) return mk_true();
  if (out.size() == 1) return out[0];
  return mk_term(Op::And, std::move(out));
}

Term TermStore::mk_or(std::vector<Term> cs)
{
  std::vector<Term> out;
  std::unordered_set<Term> seen;
  for (Term c : cs) {
    if (c.op() == Op::BoolLit) {
      if (c.bool_value()) return mk_true();
      continue;
    }
    if (seen.insert(c).second) out.push_back(c);
  }
  if (out.empty()) return mk_false();
  if (out.size() == 1) return out[0];
  return mk_term(Op::Or, std::move(out));
}

Term TermStore::mk_not(Term t)
{
  if (t.op() == Op::BoolLit) return mk_bool(!t.bool_value());
  if (t.op() == Op::Not) return t[0];
  return mk_term(Op::Not, { t });
}

// ---- traversals ------------------------------------------------------------

Term substitute(TermStore & store, Term t, const TermMap & map)
{
  if (map.empty()) return t;
  for (const auto & [k, v] : map)
    if (k.sort() != v.sort())
      throw SortMismatch("substitution changes sort of " + k.to_string(), -1);

  std::unordered_map<Term, Term> memo;
  std::function<Term(Term)> go = [&](Term u) -> Term {
    auto m = map.find(u);
    if (m != map.end()) return m->second;
    if (u.num_children() == 0) return u;
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    std::vector<Term> cs;
    cs.reserve(u.num_children());
    bool changed = false;
    for (Term c : u.children()) {
      Term nc = go(c);
      changed |= nc != c;
      cs.push_back(nc);
    }
    Term r = u;
    if (changed) {
      switch (u.op()) {
        case Op::Apply: r = store.mk_app(u.func(), std::move(cs)); break;
        case Op::ConstArr: r = store.mk_const_array(u.sort(), cs[0]); break;
        default: r = store.mk_term(u.op(), std::move(cs)); break;
      }
    }
    memo.emplace(u, r);
    return r;
  };
  return go(t);
}

Term simplify(TermStore & store, Term t)
{
  std::unordered_map<Term, Term> memo;
  std::function<Term(Term)> go = [&](Term u) -> Term {
    if (u.num_children() == 0) return u;
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    std::vector<Term> cs;
    for (Term c : u.children()) cs.push_back(go(c));
    auto lit = [](Term x) { return x.op() == Op::IntLit; };
    auto is = [](Term x, bool b) { return x.op() == Op::BoolLit && x.bool_value() == b; };
    Term r;
    switch (u.op()) {
      case Op::Not: r = store.mk_not(cs[0]); break;
      case Op::And: r = store.mk_and(cs); break;
      case Op::Or: r = store.mk_or(cs); break;
      case Op::Implies:
        if (is(cs[0], true)) r = cs[1];
        else if (is(cs[0], false) || is(cs[1], true)) r = store.mk_true();
        else if (is(cs[1], false)) r = store.mk_not(cs[0]);
        break;
      case Op::Ite:
        if (is(cs[0], true) || cs[1] == cs[2]) r = cs[1];
        else if (is(cs[0], false)) r = cs[2];
        break;
      case Op::Eq:
        if (cs[0] == cs[1]) r = store.mk_true();
        else if (cs[0].is_value() && cs[1].is_value()) r = store.mk_false();
        break;
      case Op::Lt:
        if (lit(cs[0]) && lit(cs[1])) r = store.mk_bool(cs[0].int_value() < cs[1].int_value());
        break;
      case Op::Le:
        if (lit(cs[0]) && lit(cs[1])) r = store.mk_bool(cs[0].int_value() <= cs[1].int_value());
        break;
      case Op::Add:
        if (lit(cs[0]) && lit(cs[1])) r = store.mk_int(cs[0].int_value() + cs[1].int_value());
        break;
      case Op::Sub:
        if (lit(cs[0]) && lit(cs[1])) r = store.mk_int(cs[0].int_value() - cs[1].int_value());
        break;
      case Op::Read:
        if (cs[0].op() == Op::ConstArr) r = cs[0][0];
        else if (cs[0].op() == Op::Write && cs[0][1] == cs[1]) r = cs[0][2];
        break;
      default: break;
    }
    if (!r) {
      switch (u.op()) {
        case Op::Apply: r = store.mk_app(u.func(), std::move(cs)); break;
        case Op::ConstArr: r = store.mk_const_array(u.sort(), cs[0]); break;
        default: r = store.mk_term(u.op(), std::move(cs)); break;
      }
    }
    memo.emplace(u, r);
    return r;
  };
  return go(t);
}

namespace {

template <typename F>
void visit_once(std::span<const Term> roots, F && f)
{
  std::unordered_set<Term> seen;
  std::vector<std::pair<Term, bool>> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.emplace_back(*it, false);
  while (!stack.empty()) {
    auto [t, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      f(t);
      continue;
    }
    if (!seen.insert(t).second) continue;
    stack.emplace_back(t, true);
    auto cs = t.children();
    for (auto it = cs.rbegin(); it != cs.rend(); ++it)
      if (!seen.count(*it)) stack.emplace_back(*it, false);
  }
}

}  // namespace

std::set<std::uint32_t> times_of(Term t)
{
  std::set<std::uint32_t> out;
  Term roots[] = { t };
  visit_once(roots, [&](Term u) {
    if (u.is_timed()) out.insert(u.step());
  });
  return out;
}

std::vector<Term> free_vars(Term t)
{
  std::vector<Term> out = collect(t, [](Term u) { return u.is_var(); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Term> collect(std::span<const Term> ts, const std::function<bool(Term)> & pred)
{
  std::vector<Term> out;
  visit_once(ts, [&](Term u) {
    if (pred(u)) out.push_back(u);
  });
  return out;
}

std::vector<Term> collect(Term t, const std::function<bool(Term)> & pred)
{
  Term roots[] = { t };
  return collect(std::span<const Term>(roots), pred);
}

bool contains(Term t, const std::function<bool(Term)> & pred)
{
  std::unordered_set<Term> seen;
  std::vector<Term> stack{ t };
  while (!stack.empty()) {
    Term u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    if (pred(u)) return true;
    for (Term c : u.children()) stack.push_back(c);
  }
  return false;
}

std::vector<Term> conjuncts(Term t)
{
  std::vector<Term> out;
  std::vector<Term> stack{ t };
  while (!stack.empty()) {
    Term u = stack.back();
    stack.pop_back();
    if (u.op() == Op::And) {
      auto cs = u.children();
      for (auto it = cs.rbegin(); it != cs.rend(); ++it) stack.push_back(*it);
    } else if (!(u.op() == Op::BoolLit && u.bool_value())) {
      out.push_back(u);
    }
  }
  return out;
}

// ---- printing ----------------------------------------------------------------

std::string quote_symbol(const std::string & name)
{
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) {
      simple = false;
      break;
    }
  }
  if (simple) return name;
  std::string q = "|";
  for (char c : name) q += (c == '|' || c == '\\') ? '_' : c;
  q += '|';
  return q;
}

std::string NameScheme::sort(Sort s) const
{
  switch (s.kind()) {
    case SortKind::Bool: return "Bool";
    case SortKind::Int: return "Int";
    case SortKind::Uninterpreted: return quote_symbol(s.name());
    case SortKind::Array:
      return "(Array " + sort(s.index()) + " " + sort(s.element()) + ")";
  }
  return "?";
}

std::string sort_to_smt(Sort s, const NameScheme & names) { return names.sort(s); }

namespace {

std::string int_literal(const BigInt & v)
{
  if (v < 0) return "(- " + BigInt(-v).str() + ")";
  return v.str();
}

}  // namespace

std::string to_smt(Term t, const NameScheme & names)
{
  std::unordered_map<Term, std::string> memo;
  std::function<const std::string &(Term)> go = [&](Term u) -> const std::string & {
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    std::string s;
    switch (u.op()) {
      case Op::Var: s = names.var(u); break;
      case Op::IntLit: s = int_literal(u.int_value()); break;
      case Op::BoolLit: s = u.bool_value() ? "true" : "false"; break;
      case Op::ConstArr:
        s = "((as const " + names.sort(u.sort()) + ") " + go(u[0]) + ")";
        break;
      case Op::Apply: {
        if (u.num_children() == 0) {
          s = names.fun(*u.func());
          break;
        }
        s = "(" + names.fun(*u.func());
        for (Term c : u.children()) s += " " + go(c);
        s += ")";
        break;
      }
      default: {
        s = std::string("(") + op_name(u.op());
        for (Term c : u.children()) s += " " + go(c);
        s += ")";
      }
    }
    return memo.emplace(u, std::move(s)).first->second;
  };
  return go(t);
}

}  // namespace prophic

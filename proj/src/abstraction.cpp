#include "prophic/abstraction.hpp"

#include <functional>
#include <unordered_map>

#include "prophic/errors.hpp"

namespace prophic {

const AbstractSort * AbstractionMap::by_concrete(Sort s) const
{
  for (const auto & a : sorts)
    if (a.concrete == s) return &a;
  return nullptr;
}

const AbstractSort * AbstractionMap::by_abstract(Sort s) const
{
  for (const auto & a : sorts)
    if (a.abstract == s) return &a;
  return nullptr;
}

bool AbstractionMap::is_constarr_var(Term v) const
{
  if (v.is_timed()) v = v.base();
  if (v.is_next()) v = v.base();
  return constarr_map.count(v) > 0;
}

namespace {

void check_array_sort(Sort s)
{
  if (!s.is_array()) return;
  Sort i = s.index(), e = s.element();
  if (i.is_array() || e.is_array())
    throw NestedArray("nested array sort " + s.to_string() + " is not supported");
  if (i.is_bool())
    throw FiniteIndexSort("array index sort " + i.to_string()
                          + " has a finite domain; only Int and uninterpreted index sorts are "
                            "supported");
}

class Abstractor
{
 public:
  Abstractor(TermStore & st, AbstractionMap & m, TransitionSystem * out)
      : st_(st), m_(m), out_(out)
  {
  }

  const AbstractSort & sort_info(Sort s)
  {
    if (auto a = m_.by_concrete(s)) return *a;
    check_array_sort(s);
    std::string suffix = m_.sorts.empty() ? "" : std::to_string(m_.sorts.size());
    AbstractSort a;
    a.concrete = s;
    a.abstract = st_.uninterpreted_sort(unique_sort_name("ArrayA" + suffix));
    a.read = st_.declare_fun(st_.fresh_name("readA" + suffix),
                             { a.abstract, s.index() },
                             s.element(),
                             FuncDecl::Role::AbsRead,
                             a.abstract);
    a.write = st_.declare_fun(st_.fresh_name("writeA" + suffix),
                              { a.abstract, s.index(), s.element() },
                              a.abstract,
                              FuncDecl::Role::AbsWrite,
                              a.abstract);
    if (m_.mode == AbsMode::Weak)
      a.eq = st_.declare_fun(st_.fresh_name("eqA" + suffix),
                             { a.abstract, a.abstract },
                             st_.bool_sort(),
                             FuncDecl::Role::AbsEq,
                             a.abstract);
    m_.sorts.push_back(a);
    return m_.sorts.back();
  }

  Term abstract_var(Term v)
  {
    auto it = m_.var_to_abs.find(v);
    if (it != m_.var_to_abs.end()) return it->second;
    const AbstractSort & a = sort_info(v.sort());
    Term av = st_.mk_var(st_.fresh_name(v.name() + "^A"), a.abstract, v.var_kind());
    m_.var_to_abs.emplace(v, av);
    m_.abs_to_var.emplace(av, v);
    return av;
  }

  Term leaf(Term t)
  {
    if (t.sort().is_array()) sort_info(t.sort());
    switch (t.op()) {
      case Op::Var: {
        if (!t.sort().is_array()) return t;
        if (t.is_next()) {
          Term base = abstract_var(t.base());
          return st_.mk_next(base);
        }
        if (t.is_timed()) return st_.timed(abstract_var(t.base()), t.step());
        return abstract_var(t);
      }
      case Op::ConstArr: {
        auto it = m_.constarr_var.find(t);
        if (it != m_.constarr_var.end()) return it->second;
        if (!out_) throw UnmappedSymbol("constant array " + t.to_string() + " has no abstraction");
        Term elem = t[0];
        for (Term v : free_vars(elem))
          if (!out_->is_state_var(v) || !out_->is_frozen(v))
            throw UnsupportedLogic("constant array element must be ground: " + elem.to_string());
        const AbstractSort & a = sort_info(t.sort());
        std::string nm = st_.fresh_name("constarr" + std::to_string(m_.constarr_map.size()) + "^A");
        Term cv = st_.mk_var(nm, a.abstract, VarKind::State);
        out_->add_state_var(cv);
        out_->add_frozen(cv);
        m_.constarr_map.emplace(cv, elem);
        m_.constarr_var.emplace(t, cv);
        return cv;
      }
      default: break;
    }
    return Term();
  }

  Term run(Term t)
  {
    std::function<Term(Term)> go;
    go = [&](Term u) -> Term {
      auto it = memo_.find(u);
      if (it != memo_.end()) return it->second;
      Term r = leaf(u);
      if (!r) {
        std::vector<Term> cs;
        for (Term c : u.children()) cs.push_back(go(c));
        r = build(u, std::move(cs));
      }
      memo_.emplace(u, r);
      return r;
    };
    return go(t);
  }

 private:
  std::string unique_sort_name(const std::string & base)
  {
    // sorts have their own namespace; avoid clobbering user sorts of that name
    std::string n = base;
    for (std::size_t i = 1; used_sort_names_.count(n) || st_.has_sort(n); ++i)
      n = base + "_" + std::to_string(i);
    used_sort_names_.insert(n);
    return n;
  }

  Term build(Term u, std::vector<Term> cs)
  {
    switch (u.op()) {
      case Op::Read: {
        const AbstractSort & a = sort_info(u[0].sort());
        return st_.mk_app(a.read, std::move(cs));
      }
      case Op::Write: {
        const AbstractSort & a = sort_info(u[0].sort());
        return st_.mk_app(a.write, std::move(cs));
      }
      case Op::Eq:
        if (u[0].sort().is_array() && m_.mode == AbsMode::Weak) {
          const AbstractSort & a = sort_info(u[0].sort());
          return st_.mk_app(a.eq, std::move(cs));
        }
        return st_.mk_term(Op::Eq, std::move(cs));
      case Op::Apply: {
        for (Sort s : u.func()->args) check_array_sort(s);
        for (Sort s : u.func()->args)
          if (s.is_array())
            throw UnsupportedLogic("uninterpreted function " + u.func()->name
                                   + " takes an array argument");
        if (u.sort().is_array())
          throw UnsupportedLogic("uninterpreted function " + u.func()->name
                                 + " returns an array");
        return st_.mk_app(u.func(), std::move(cs));
      }
      case Op::ConstArr: return st_.mk_const_array(u.sort(), cs[0]);
      default: {
        bool changed = false;
        for (std::size_t i = 0; i < cs.size(); ++i) changed |= cs[i] != u[i];
        if (!changed) return u;
        return st_.mk_term(u.op(), std::move(cs));
      }
    }
  }

  TermStore & st_;
  AbstractionMap & m_;
  TransitionSystem * out_;
  std::unordered_map<Term, Term> memo_;
  std::set<std::string> used_sort_names_;
};

}  // namespace

Term AbstractionMap::abstract(TermStore & st, Term t) const
{
  AbstractionMap copy = *this;
  Abstractor ab(st, copy, nullptr);
  Term r = ab.run(t);
  if (copy.sorts.size() != sorts.size() || copy.var_to_abs.size() != var_to_abs.size())
    throw UnmappedSymbol("term uses array vocabulary unknown to the abstraction: " + t.to_string());
  return r;
}

std::tuple<TransitionSystem, Property, AbstractionMap> abstract_arrays(const TransitionSystem & s,
                                                                      const Property & p,
                                                                      AbsMode mode)
{
  TermStore & st = s.store();
  AbstractionMap m;
  m.mode = mode;
  TransitionSystem out(st);
  Abstractor ab(st, m, &out);

  for (Term v : s.state_vars()) {
    Term av = v.sort().is_array() ? ab.abstract_var(v) : v;
    out.add_state_var(av);
  }
  for (Term v : s.input_vars()) out.add_input_var(v.sort().is_array() ? ab.abstract_var(v) : v);
  for (Term v : s.frozen()) {
    Term av = v.sort().is_array() ? ab.abstract_var(v) : v;
    out.add_frozen(av);
  }
  for (Term c : s.init_conjuncts()) out.add_init(ab.run(c));
  for (Term c : s.trans_conjuncts()) out.add_trans(ab.run(c));
  for (const auto & r : s.aux_log()) out.log_aux(r);
  Property ap{ ab.run(p.formula), ab.run(p.original) };
  return { std::move(out), ap, std::move(m) };
}

Term concretize(TermStore & st, const AbstractionMap & m, Term t)
{
  if (m.empty()) return t;
  std::unordered_map<Term, Term> memo;
  std::function<Term(Term)> go = [&](Term u) -> Term {
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    Term r;
    if (u.is_var()) {
      const AbstractSort * a = m.by_abstract(u.sort());
      if (!a) {
        r = u;
      } else {
        Term base = u;
        int shift = 0;  // 0 current, 1 next, 2 timed
        if (u.is_next()) {
          base = u.base();
          shift = 1;
        } else if (u.is_timed()) {
          base = u.base();
          shift = 2;
        }
        if (auto c = m.constarr_map.find(base); c != m.constarr_map.end()) {
          r = st.mk_const_array(a->concrete, c->second);
        } else {
          auto v = m.abs_to_var.find(base);
          if (v == m.abs_to_var.end())
            throw UnmappedSymbol("abstract variable " + u.name() + " has no concrete counterpart");
          Term cv = v->second;
          if (shift == 1) r = st.mk_next(cv);
          else if (shift == 2) r = st.timed(cv, u.step());
          else r = cv;
        }
      }
    } else {
      std::vector<Term> cs;
      for (Term c : u.children()) cs.push_back(go(c));
      if (u.op() == Op::Apply) {
        const FuncDecl * f = u.func();
        switch (f->role) {
          case FuncDecl::Role::AbsRead: r = st.mk_term(Op::Read, std::move(cs)); break;
          case FuncDecl::Role::AbsWrite: r = st.mk_term(Op::Write, std::move(cs)); break;
          case FuncDecl::Role::AbsEq: r = st.mk_term(Op::Eq, std::move(cs)); break;
          case FuncDecl::Role::User: r = st.mk_app(f, std::move(cs)); break;
        }
        if (f->role != FuncDecl::Role::User && !m.by_abstract(f->array_sort))
          throw UnmappedSymbol("function " + f->name + " belongs to another abstraction");
      } else if (u.num_children() == 0) {
        r = u;
      } else if (u.op() == Op::ConstArr) {
        r = st.mk_const_array(u.sort(), cs[0]);
      } else {
        r = st.mk_term(u.op(), std::move(cs));
      }
    }
    memo.emplace(u, r);
    return r;
  };
  return go(t);
}

}  // namespace prophic

#include "prophic/vmt.hpp"

#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "prophic/errors.hpp"
#include "prophic/sexpr.hpp"

namespace prophic {

namespace {

[[noreturn]] void fail(const SExpr & at, const std::string & msg)
{
  throw ParseError(msg, at.line, at.col);
}

struct Macro
{
  std::vector<std::pair<std::string, Sort>> params;
  Sort result;
  const SExpr * body;
};

class VmtParser
{
 public:
  explicit VmtParser(TermStore & st) : st_(st) {}

  VmtDocument run(std::string_view text)
  {
    cmds_ = parse_sexprs(text);
    for (const SExpr & c : cmds_)
      if (!c.is_list() || c.size() == 0 || !c[0].is_atom())
        fail(c, "expected a command");

    // pass 1: sorts, declarations and :next pairings
    for (const SExpr & c : cmds_) {
      const std::string & head = c[0].atom;
      if (head == "declare-sort") {
        if (c.size() != 3 || !c[1].is_atom()) fail(c, "malformed declare-sort");
        if (!c[2].is_symbol("0")) throw UnsupportedLogic("sort constructors with arity are not supported");
        sort_alias_.emplace(c[1].atom, st_.uninterpreted_sort(c[1].atom));
      } else if (head == "define-sort") {
        if (c.size() != 4 || !c[1].is_atom() || !c[2].is_list() || c[2].size() != 0)
          fail(c, "only parameterless define-sort is supported");
        sort_alias_.emplace(c[1].atom, parse_sort(c[3]));
      } else if (head == "declare-fun" || head == "declare-const") {
        declare(c);
      } else if (head == "define-fun") {
        if (c.size() != 5) fail(c, "malformed define-fun");
        const SExpr & body = c[4];
        if (body.head_is("!")) scan_next(body);
      }
    }
    build_variables();

    // pass 2: macros and annotated sections
    std::optional<Term> init, trans;
    for (const SExpr & c : cmds_) {
      const std::string & head = c[0].atom;
      if (head == "define-fun") {
        define_fun(c, init, trans);
      } else if (head == "assert") {
        fail(c, "assert is not part of a VMT transition system");
      } else if (head == "declare-datatype" || head == "declare-datatypes") {
        throw UnsupportedLogic("datatypes are not supported");
      } else if (head == "set-logic" || head == "set-info" || head == "set-option"
                 || head == "declare-sort" || head == "define-sort" || head == "declare-fun"
                 || head == "declare-const" || head == "check-sat" || head == "exit"
                 || head == "get-model") {
        continue;
      } else {
        fail(c, "unsupported command " + head);
      }
    }
    if (!init) throw MissingSection("no :init section");
    if (!trans) throw MissingSection("no :trans section");
    if (doc_props_.empty()) throw MissingSection("no :invar-property section");

    TransitionSystem sys(st_);
    for (Term v : state_order_) sys.add_state_var(v);
    for (Term v : input_order_) sys.add_input_var(v);
    sys.add_init(*init);
    sys.add_trans(*trans);
    // frozen variables are recognised syntactically
    for (Term c : sys.trans_conjuncts()) {
      if (c.op() != Op::Eq) continue;
      for (int k = 0; k < 2; ++k) {
        Term a = c[k], b = c[1 - k];
        if (a.is_next() && a.base() == b && sys.is_state_var(b)) sys.add_frozen(b);
      }
    }
    VmtDocument doc{ std::move(sys), {} };
    for (auto & [idx, p] : doc_props_) {
      doc.system.check_current_state(p, "property");
      doc.properties.emplace(idx, Property{ p, p });
    }
    return doc;
  }

 private:
  Sort parse_sort(const SExpr & s)
  {
    if (s.is_atom()) {
      if (s.atom == "Int") return st_.int_sort();
      if (s.atom == "Bool") return st_.bool_sort();
      if (s.atom == "Real") throw UnsupportedLogic("real arithmetic is not supported");
      auto it = sort_alias_.find(s.atom);
      if (it == sort_alias_.end()) fail(s, "unknown sort " + s.atom);
      return it->second;
    }
    if (s.head_is("_") && s.size() >= 2 && s[1].is_symbol("BitVec"))
      throw UnsupportedLogic("bit-vector sorts are not supported (array indices must have an "
                             "infinite domain)");
    if (s.head_is("Array") && s.size() == 3) {
      Sort i = parse_sort(s[1]);
      Sort e = parse_sort(s[2]);
      if (i.is_array() || e.is_array()) throw UnsupportedLogic("nested arrays are not supported");
      if (i.is_bool())
        throw UnsupportedLogic("array index sort Bool has a finite domain; index sorts must be "
                               "infinite");
      return st_.array_sort(i, e);
    }
    fail(s, "unsupported sort " + to_string(s));
  }

  void declare(const SExpr & c)
  {
    bool is_const = c[0].atom == "declare-const";
    if ((is_const && c.size() != 3) || (!is_const && c.size() != 4) || !c[1].is_atom())
      fail(c, "malformed " + c[0].atom);
    const std::string & name = c[1].atom;
    if (decls_.count(name) || macros_.count(name)) fail(c[1], "duplicate declaration of " + name);
    if (is_const || c[2].size() == 0) {
      if (!is_const && !c[2].is_list()) fail(c[2], "expected an argument sort list");
      decls_.emplace(name, parse_sort(is_const ? c[2] : c[3]));
      decl_order_.push_back(name);
      return;
    }
    if (!c[2].is_list()) fail(c[2], "expected an argument sort list");
    std::vector<Sort> args;
    for (const SExpr & a : c[2].list) {
      Sort s = parse_sort(a);
      if (s.is_array()) throw UnsupportedLogic("uninterpreted functions over arrays are not supported");
      args.push_back(s);
    }
    Sort r = parse_sort(c[3]);
    if (r.is_array()) throw UnsupportedLogic("uninterpreted functions returning arrays are not supported");
    funs_.emplace(name, st_.declare_fun(name, std::move(args), r));
  }

  void scan_next(const SExpr & ann)
  {
    for (std::size_t i = 2; i + 1 < ann.size(); i += 2) {
      if (!ann[i].is_symbol(":next")) continue;
      if (!ann[1].is_atom()) fail(ann[1], ":next must annotate a declared symbol");
      if (!ann[i + 1].is_atom()) fail(ann[i + 1], ":next expects a symbol");
      const std::string & cur = ann[1].atom;
      const std::string & nx = ann[i + 1].atom;
      if (next_of_.count(cur)) fail(ann[1], "second :next partner for " + cur);
      if (cur_of_.count(nx)) fail(ann[i + 1], nx + " is already a next-state symbol");
      next_of_.emplace(cur, nx);
      cur_of_.emplace(nx, cur);
    }
  }

  void build_variables()
  {
    for (const auto & [cur, nx] : next_of_) {
      auto a = decls_.find(cur), b = decls_.find(nx);
      if (a == decls_.end()) throw ParseError(":next refers to undeclared " + cur, 1, 1);
      if (b == decls_.end()) throw ParseError(":next uses undeclared " + nx, 1, 1);
      if (a->second != b->second) throw ParseError("sort mismatch between " + cur + " and " + nx, 1, 1);
      if (next_of_.count(nx)) throw ParseError(nx + " is both a current and next symbol", 1, 1);
    }
    for (const std::string & name : decl_order_) {
      if (cur_of_.count(name)) continue;
      Sort s = decls_.at(name);
      auto nx = next_of_.find(name);
      if (nx != next_of_.end()) {
        Term v = st_.mk_var(name, s, VarKind::State);
        Term n = st_.mk_next(v, nx->second);
        if (n.name() != nx->second)
          throw ParseError("next-state symbol " + nx->second + " clashes with an existing name", 1, 1);
        syms_.emplace(name, v);
        syms_.emplace(nx->second, n);
        state_order_.push_back(v);
      } else {
        Term v = st_.mk_var(name, s, VarKind::Input);
        syms_.emplace(name, v);
        input_order_.push_back(v);
      }
    }
  }

  void define_fun(const SExpr & c, std::optional<Term> & init, std::optional<Term> & trans)
  {
    if (!c[1].is_atom() || !c[2].is_list()) fail(c, "malformed define-fun");
    const std::string & name = c[1].atom;
    if (decls_.count(name) || macros_.count(name) || funs_.count(name))
      fail(c[1], "duplicate definition of " + name);
    Macro m;
    for (const SExpr & p : c[2].list) {
      if (!p.is_list() || p.size() != 2 || !p[0].is_atom()) fail(p, "malformed parameter");
      m.params.emplace_back(p[0].atom, parse_sort(p[1]));
    }
    m.result = parse_sort(c[3]);
    m.body = &c[4];

    const SExpr & body = c[4];
    if (body.head_is("!")) {
      if (!m.params.empty()) fail(body, "annotated definitions cannot take parameters");
      Term t = parse_closed(body[1]);
      if (t.sort() != m.result) fail(body, "definition body does not match its declared sort");
      for (std::size_t i = 2; i < body.size(); ++i) {
        const SExpr & key = body[i];
        if (!key.is_atom()) fail(key, "expected an attribute");
        const SExpr * val = i + 1 < body.size() ? &body[i + 1] : nullptr;
        if (key.atom == ":next") {
          ++i;
        } else if (key.atom == ":init") {
          if (init) throw MissingSection("duplicate :init section (line " + std::to_string(key.line) + ")");
          need_bool(t, body);
          check_no_next(t, body, ":init");
          init = t;
          if (val && !val->is_symbol(":trans") && !val->is_symbol(":invar-property")) ++i;
        } else if (key.atom == ":trans") {
          if (trans) throw MissingSection("duplicate :trans section (line " + std::to_string(key.line) + ")");
          need_bool(t, body);
          trans = t;
          if (val && !val->is_symbol(":init") && !val->is_symbol(":invar-property")) ++i;
        } else if (key.atom == ":invar-property") {
          if (!val || !val->is_atom()) fail(key, ":invar-property expects an index");
          int idx;
          try {
            idx = std::stoi(val->atom);
          } catch (const std::exception &) {
            fail(*val, "invalid property index " + val->atom);
          }
          if (doc_props_.count(idx)) fail(*val, "duplicate property index " + val->atom);
          need_bool(t, body);
          check_no_next(t, body, ":invar-property");
          doc_props_.emplace(idx, t);
          ++i;
        } else if (key.atom == ":live-property") {
          throw UnsupportedLogic("liveness properties are not supported");
        } else if (key.atom == ":named") {
          ++i;
        } else {
          // unknown attribute: skip its value when present
          if (val && !(val->is_atom() && !val->atom.empty() && val->atom[0] == ':')) ++i;
        }
      }
    }
    macros_.emplace(name, m);
  }

  void need_bool(Term t, const SExpr & at)
  {
    if (!t.sort().is_bool()) fail(at, "annotated section must be Boolean");
  }

  void check_no_next(Term t, const SExpr & at, const char * what)
  {
    if (contains(t, [](Term u) { return u.is_next(); }))
      fail(at, std::string(what) + " mentions next-state variables");
  }

  using Env = std::vector<std::map<std::string, Term>>;

  Term parse_closed(const SExpr & e)
  {
    Env env;
    return parse_term(e, env);
  }

  Term lookup(const std::string & name, const Env & env, const SExpr & at)
  {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    auto s = syms_.find(name);
    if (s != syms_.end()) return s->second;
    auto m = macros_.find(name);
    if (m != macros_.end()) {
      if (!m->second.params.empty()) fail(at, name + " expects arguments");
      return expand(m->second, {}, at);
    }
    auto f = funs_.find(name);
    if (f != funs_.end()) fail(at, name + " expects arguments");
    fail(at, "unknown symbol " + name);
  }

  Term expand(const Macro & m, const std::vector<Term> & args, const SExpr & at)
  {
    if (args.size() != m.params.size()) fail(at, "wrong number of arguments");
    Env env(1);
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].sort() != m.params[i].second) fail(at, "argument sort mismatch");
      env[0][m.params[i].first] = args[i];
    }
    const SExpr & body = m.body->head_is("!") ? (*m.body)[1] : *m.body;
    return parse_term(body, env);
  }

  Term mk(Op op, std::vector<Term> cs, const SExpr & at)
  {
    try {
      return st_.mk_term(op, std::move(cs));
    } catch (const SortMismatch & e) {
      fail(at, e.what());
    }
  }

  Term chain(Op op, const std::vector<Term> & cs, bool swap, const SExpr & at)
  {
    if (cs.size() < 2) fail(at, "expected at least two arguments");
    std::vector<Term> parts;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i)
      parts.push_back(swap ? mk(op, { cs[i + 1], cs[i] }, at) : mk(op, { cs[i], cs[i + 1] }, at));
    return st_.mk_and(parts);
  }

  Term parse_term(const SExpr & e, Env & env)
  {
    if (e.is_atom()) {
      if (e.string) fail(e, "string literals are not supported");
      if (!e.quoted) {
        if (e.atom == "true") return st_.mk_true();
        if (e.atom == "false") return st_.mk_false();
        if (!e.atom.empty() && std::isdigit(static_cast<unsigned char>(e.atom[0]))) {
          for (char ch : e.atom)
            if (!std::isdigit(static_cast<unsigned char>(ch)))
              throw UnsupportedLogic("non-integer literal " + e.atom);
          return st_.mk_int(BigInt(e.atom));
        }
        if (e.atom.size() > 1 && e.atom[0] == '#')
          throw UnsupportedLogic("bit-vector literal " + e.atom + " is not supported");
      }
      return lookup(e.atom, env, e);
    }
    if (e.size() == 0) fail(e, "empty application");
    const SExpr & h = e[0];
    if (h.is_list()) {
      // ((as const (Array I E)) c)
      if (h.head_is("as") && h.size() == 3 && h[1].is_symbol("const")) {
        if (e.size() != 2) fail(e, "constant array takes one argument");
        Sort s = parse_sort(h[2]);
        if (!s.is_array()) fail(h, "constant array of a non-array sort");
        Term c = parse_term(e[1], env);
        try {
          return st_.mk_const_array(s, c);
        } catch (const SortMismatch & ex) {
          fail(e, ex.what());
        }
      }
      fail(h, "unsupported application head");
    }
    const std::string & op = h.atom;
    if (op == "forall" || op == "exists") throw UnsupportedLogic("quantifiers are not supported");
    if (op == "let") {
      if (e.size() != 3 || !e[1].is_list()) fail(e, "malformed let");
      std::map<std::string, Term> frame;
      for (const SExpr & b : e[1].list) {
        if (!b.is_list() || b.size() != 2 || !b[0].is_atom()) fail(b, "malformed let binding");
        frame[b[0].atom] = parse_term(b[1], env);
      }
      env.push_back(std::move(frame));
      Term r = parse_term(e[2], env);
      env.pop_back();
      return r;
    }
    if (op == "!") {
      if (e.size() < 2) fail(e, "malformed annotation");
      return parse_term(e[1], env);
    }
    std::vector<Term> cs;
    for (std::size_t i = 1; i < e.size(); ++i) cs.push_back(parse_term(e[i], env));
    if (op == "and") return cs.empty() ? st_.mk_true() : mk(Op::And, cs, e);
    if (op == "or") return cs.empty() ? st_.mk_false() : mk(Op::Or, cs, e);
    if (op == "not") return mk(Op::Not, cs, e);
    if (op == "=>") {
      if (cs.size() < 2) fail(e, "=> expects at least two arguments");
      Term r = cs.back();
      for (std::size_t i = cs.size() - 1; i-- > 0;) r = mk(Op::Implies, { cs[i], r }, e);
      return r;
    }
    if (op == "xor") {
      if (cs.size() != 2) fail(e, "xor expects two arguments");
      return st_.mk_not(mk(Op::Eq, cs, e));
    }
    if (op == "ite") return mk(Op::Ite, cs, e);
    if (op == "=") return chain(Op::Eq, cs, false, e);
    if (op == "distinct") {
      std::vector<Term> parts;
      for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
          parts.push_back(st_.mk_not(mk(Op::Eq, { cs[i], cs[j] }, e)));
      return st_.mk_and(parts);
    }
    if (op == "<") return chain(Op::Lt, cs, false, e);
    if (op == "<=") return chain(Op::Le, cs, false, e);
    if (op == ">") return chain(Op::Lt, cs, true, e);
    if (op == ">=") return chain(Op::Le, cs, true, e);
    if (op == "+") {
      if (cs.size() == 1) return cs[0];
      return mk(Op::Add, cs, e);
    }
    if (op == "-") {
      if (cs.size() == 1) {
        if (cs[0].op() == Op::IntLit) return st_.mk_int(BigInt(-cs[0].int_value()));
        return mk(Op::Mul, { st_.mk_int(-1), cs[0] }, e);
      }
      Term r = mk(Op::Sub, { cs[0], cs[1] }, e);
      for (std::size_t i = 2; i < cs.size(); ++i) r = mk(Op::Sub, { r, cs[i] }, e);
      return r;
    }
    if (op == "*") {
      if (cs.empty()) fail(e, "* expects arguments");
      BigInt k = 1;
      std::optional<Term> var;
      for (Term c : cs) {
        if (c.op() == Op::IntLit) {
          k *= c.int_value();
        } else if (var) {
          throw UnsupportedLogic("nonlinear multiplication is not supported");
        } else {
          var = c;
        }
      }
      if (!var) return st_.mk_int(k);
      if (k == 1) return *var;
      return mk(Op::Mul, { st_.mk_int(k), *var }, e);
    }
    if (op == "/" || op == "div" || op == "mod" || op == "abs" || op == "to_real"
        || op == "to_int")
      throw UnsupportedLogic("operator " + op + " is not supported");
    if (op == "select") return mk(Op::Read, cs, e);
    if (op == "store") return mk(Op::Write, cs, e);
    if (auto m = macros_.find(op); m != macros_.end()) return expand(m->second, cs, e);
    if (auto f = funs_.find(op); f != funs_.end()) {
      try {
        return st_.mk_app(f->second, cs);
      } catch (const SortMismatch & ex) {
        fail(e, ex.what());
      }
    }
    fail(h, "unknown function " + op);
  }

  TermStore & st_;
  std::vector<SExpr> cmds_;
  std::map<std::string, Sort> sort_alias_;
  std::map<std::string, Sort> decls_;
  std::vector<std::string> decl_order_;
  std::map<std::string, const FuncDecl *> funs_;
  std::map<std::string, std::string> next_of_;
  std::map<std::string, std::string> cur_of_;
  std::map<std::string, Term> syms_;
  std::map<std::string, Macro> macros_;
  std::vector<Term> state_order_;
  std::vector<Term> input_order_;
  std::map<int, Term> doc_props_;
};

}  // namespace

VmtDocument parse_vmt(TermStore & store, std::string_view text)
{
  VmtParser p(store);
  return p.run(text);
}

std::string emit_vmt(const TransitionSystem & s, const Property & p)
{
  NameScheme names;
  std::ostringstream out;
  std::vector<Term> roots = s.init_conjuncts();
  roots.insert(roots.end(), s.trans_conjuncts().begin(), s.trans_conjuncts().end());
  roots.push_back(p.formula);
  for (Term v : s.state_vars()) roots.push_back(v);
  for (Term v : s.input_vars()) roots.push_back(v);

  std::set<Sort> sorts;
  std::map<std::uint32_t, const FuncDecl *> funs;
  for (Term u : collect(std::span<const Term>(roots), [](Term) { return true; })) {
    sorts.insert(u.sort());
    if (u.op() == Op::Apply) {
      funs.emplace(u.func()->id, u.func());
      for (Sort a : u.func()->args) sorts.insert(a);
    }
  }
  std::set<std::string> declared_sorts;
  std::function<void(Sort)> decl_sort = [&](Sort srt) {
    if (srt.is_array()) {
      decl_sort(srt.index());
      decl_sort(srt.element());
    } else if (srt.is_uninterpreted() && declared_sorts.insert(srt.name()).second) {
      out << "(declare-sort " << names.sort(srt) << " 0)\n";
    }
  };
  for (Sort srt : sorts) decl_sort(srt);
  for (const auto & [id, f] : funs) {
    out << "(declare-fun " << names.fun(*f) << " (";
    for (std::size_t i = 0; i < f->args.size(); ++i) out << (i ? " " : "") << names.sort(f->args[i]);
    out << ") " << names.sort(f->result) << ")\n";
  }
  for (Term v : s.state_vars()) {
    out << "(declare-fun " << names.var(v) << " () " << names.sort(v.sort()) << ")\n";
    out << "(declare-fun " << names.var(s.next(v)) << " () " << names.sort(v.sort()) << ")\n";
  }
  for (Term v : s.input_vars())
    out << "(declare-fun " << names.var(v) << " () " << names.sort(v.sort()) << ")\n";
  std::size_t k = 0;
  for (Term v : s.state_vars()) {
    out << "(define-fun .sv" << k++ << " () " << names.sort(v.sort()) << " (! "
        << names.var(v) << " :next " << names.var(s.next(v)) << "))\n";
  }
  out << "(define-fun .init () Bool (! " << to_smt(s.init(), names) << " :init true))\n";
  out << "(define-fun .trans () Bool (! " << to_smt(s.trans(), names) << " :trans true))\n";
  out << "(define-fun .prop () Bool (! " << to_smt(p.formula, names)
      << " :invar-property 0))\n";
  return out.str();
}

}  // namespace prophic

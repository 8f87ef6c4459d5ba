#include "prophic/model.hpp"

#include <unordered_map>

#include "prophic/errors.hpp"

namespace prophic {

std::string value_to_string(const Value & v)
{
  if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (auto i = std::get_if<BigInt>(&v)) {
    if (*i < 0) return "(- " + BigInt(-*i).str() + ")";
    return i->str();
  }
  return std::get<UValue>(v).token;
}

bool value_is_true(const Value & v)
{
  auto b = std::get_if<bool>(&v);
  return b && *b;
}

const Value * CexModel::find(Term var) const
{
  auto it = scalars_.find(var);
  return it == scalars_.end() ? nullptr : &it->second;
}

void CexModel::set_app(const FuncDecl * f, std::vector<Value> args, Value v)
{
  tables_[f][std::move(args)] = std::move(v);
}

const Value * CexModel::find_app(const FuncDecl * f, const std::vector<Value> & args) const
{
  auto t = tables_.find(f);
  if (t == tables_.end()) return nullptr;
  auto it = t->second.find(args);
  return it == t->second.end() ? nullptr : &it->second;
}

const Value * CexModel::find_default(const FuncDecl * f) const
{
  auto it = defaults_.find(f);
  return it == defaults_.end() ? nullptr : &it->second;
}

std::size_t CexModel::num_app_entries() const
{
  std::size_t n = 0;
  for (const auto & [f, tab] : tables_) n += tab.size();
  return n;
}

namespace {

const BigInt & as_int(const Value & v, Term t)
{
  auto p = std::get_if<BigInt>(&v);
  if (!p) throw EvalError("expected an integer value for " + t.to_string());
  return *p;
}

bool as_bool(const Value & v, Term t)
{
  auto p = std::get_if<bool>(&v);
  if (!p) throw EvalError("expected a Boolean value for " + t.to_string());
  return *p;
}

class Evaluator
{
 public:
  explicit Evaluator(const CexModel & m) : m_(m) {}

  Value eval(Term t)
  {
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
    Value v = compute(t);
    memo_.emplace(t, v);
    return v;
  }

 private:
  Value compute(Term t)
  {
    switch (t.op()) {
      case Op::Var: {
        if (const Value * v = m_.find(t)) return *v;
        if (!t.sort().is_array() && m_.fallback()) {
          if (auto v = m_.fallback()(t)) return *v;
        }
        throw UnassignedVariable(t.name());
      }
      case Op::IntLit: return t.int_value();
      case Op::BoolLit: return t.bool_value();
      case Op::Not: return !as_bool(eval(t[0]), t);
      case Op::And: {
        bool r = true;
        for (Term c : t.children()) r = as_bool(eval(c), c) && r;
        return r;
      }
      case Op::Or: {
        bool r = false;
        for (Term c : t.children()) r = as_bool(eval(c), c) || r;
        return r;
      }
      case Op::Implies: {
        bool a = as_bool(eval(t[0]), t[0]);
        bool b = as_bool(eval(t[1]), t[1]);
        return !a || b;
      }
      case Op::Ite:
        return as_bool(eval(t[0]), t[0]) ? eval(t[1]) : eval(t[2]);
      case Op::Eq: {
        if (t[0].sort().is_array()) return via_fallback(t);
        return eval(t[0]) == eval(t[1]);
      }
      case Op::Lt: return as_int(eval(t[0]), t[0]) < as_int(eval(t[1]), t[1]);
      case Op::Le: return as_int(eval(t[0]), t[0]) <= as_int(eval(t[1]), t[1]);
      case Op::Add: {
        BigInt s = 0;
        for (Term c : t.children()) s += as_int(eval(c), c);
        return s;
      }
      case Op::Sub: return BigInt(as_int(eval(t[0]), t[0]) - as_int(eval(t[1]), t[1]));
      case Op::Mul: return BigInt(as_int(eval(t[0]), t[0]) * as_int(eval(t[1]), t[1]));
      case Op::Read:
      case Op::Write:
      case Op::ConstArr: return via_fallback(t);
      case Op::Apply: {
        std::vector<Value> args;
        args.reserve(t.num_children());
        for (Term c : t.children()) args.push_back(eval(c));
        if (const Value * v = m_.find_app(t.func(), args)) return *v;
        if (m_.fallback()) {
          if (auto v = m_.fallback()(t)) return *v;
        }
        if (const Value * v = m_.find_default(t.func())) return *v;
        throw EvalError("no value for application " + t.to_string());
      }
    }
    throw EvalError("unknown operator");
  }

  Value via_fallback(Term t)
  {
    if (!t.sort().is_array() && m_.fallback()) {
      if (auto v = m_.fallback()(t)) return *v;
    }
    throw EvalError("cannot evaluate array term " + t.to_string());
  }

  const CexModel & m_;
  std::unordered_map<Term, Value> memo_;
};

}  // namespace

Value evaluate(Term t, const CexModel & m)
{
  Evaluator ev(m);
  return ev.eval(t);
}

}  // namespace prophic

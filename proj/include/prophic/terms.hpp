#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace prophic {

using BigInt = boost::multiprecision::cpp_int;

enum class SortKind : std::uint8_t
{
  Bool,
  Int,
  Array,
  Uninterpreted
};

struct SortNode;

class Sort
{
 public:
  Sort() = default;
  explicit Sort(const SortNode * n) : n_(n) {}

  SortKind kind() const;
  bool is_bool() const { return n_ && kind() == SortKind::Bool; }
  bool is_int() const { return n_ && kind() == SortKind::Int; }
  bool is_array() const { return n_ && kind() == SortKind::Array; }
  bool is_uninterpreted() const { return n_ && kind() == SortKind::Uninterpreted; }
  Sort index() const;
  Sort element() const;
  const std::string & name() const;
  std::uint32_t id() const;
  std::string to_string() const;

  explicit operator bool() const { return n_ != nullptr; }
  friend bool operator==(Sort a, Sort b) { return a.n_ == b.n_; }
  friend std::strong_ordering operator<=>(Sort a, Sort b)
  {
    return a.id_or_zero() <=> b.id_or_zero();
  }

 private:
  std::uint32_t id_or_zero() const { return n_ ? id() : 0; }
  const SortNode * n_ = nullptr;
};

struct SortNode
{
  std::uint32_t id;
  SortKind kind;
  Sort index;
  Sort element;
  std::string name;
};

enum class Op : std::uint8_t
{
  Var,
  IntLit,
  BoolLit,
  Not,
  And,
  Or,
  Implies,
  Ite,
  Eq,
  Lt,
  Le,
  Add,
  Sub,
  Mul,  // first child is always an integer literal
  Read,
  Write,
  ConstArr,
  Apply
};

const char * op_name(Op op);

// Role of a variable. State/History/Prophecy/Witness/Lambda variables become
// state variables of a system once added to it; Next and Timed are derived.
enum class VarKind : std::uint8_t
{
  State,
  Next,
  Input,
  Timed,
  History,
  Prophecy,
  Witness,
  Lambda
};

struct FuncDecl
{
  enum class Role : std::uint8_t
  {
    User,
    AbsRead,
    AbsWrite,
    AbsEq
  };
  std::uint32_t id;
  std::string name;
  std::vector<Sort> args;
  Sort result;
  Role role = Role::User;
  Sort array_sort;  // abstract array sort, for the Abs* roles
};

struct TermNode;

class Term
{
 public:
  Term() = default;
  explicit Term(const TermNode * n) : n_(n) {}

  std::uint32_t id() const;
  Op op() const;
  Sort sort() const;
  std::span<const Term> children() const;
  Term operator[](std::size_t i) const { return children()[i]; }
  std::size_t num_children() const { return children().size(); }

  bool is_var() const { return n_ && op() == Op::Var; }
  bool is_value() const { return n_ && (op() == Op::IntLit || op() == Op::BoolLit); }
  const BigInt & int_value() const;
  bool bool_value() const;
  const FuncDecl * func() const;

  // variable data
  const std::string & name() const;
  VarKind var_kind() const;
  Term base() const;  // Next: its state var; Timed: the untimed var
  std::uint32_t step() const;
  Term target() const;  // History/Prophecy target term
  std::uint32_t depth() const;  // history depth or prophecy delay

  bool is_timed() const { return is_var() && var_kind() == VarKind::Timed; }
  bool is_next() const { return is_var() && var_kind() == VarKind::Next; }

  const TermNode * node() const { return n_; }
  explicit operator bool() const { return n_ != nullptr; }
  friend bool operator==(Term a, Term b) { return a.n_ == b.n_; }
  friend std::strong_ordering operator<=>(Term a, Term b)
  {
    return a.id_or_zero() <=> b.id_or_zero();
  }

  std::string to_string() const;

 private:
  std::uint32_t id_or_zero() const { return n_ ? id() : 0; }
  const TermNode * n_ = nullptr;
};

struct TermNode
{
  std::uint32_t id;
  Op op;
  Sort sort;
  std::vector<Term> children;
  BigInt value;
  bool bval = false;
  const FuncDecl * func = nullptr;
  // variables only
  std::string name;
  VarKind kind = VarKind::State;
  Term base;
  std::uint32_t step = 0;
  Term target;
  std::uint32_t depth = 0;
};

struct TermHash
{
  std::size_t operator()(Term t) const noexcept { return t.id(); }
};

using TermMap = std::unordered_map<Term, Term, TermHash>;
using TermSet = std::set<Term>;

/// Owns every sort, function symbol and term node. Terms are hash-consed:
/// constructing the same shape twice yields the same handle.
class TermStore
{
 public:
  TermStore();
  TermStore(const TermStore &) = delete;
  TermStore & operator=(const TermStore &) = delete;

  Sort bool_sort() const { return bool_; }
  Sort int_sort() const { return int_; }
  Sort array_sort(Sort index, Sort element);
  Sort uninterpreted_sort(const std::string & name);
  bool has_sort(const std::string & name) const { return sort_index_.count("U" + name) > 0; }

  Term mk_var(const std::string & name, Sort sort, VarKind kind = VarKind::State);
  Term find_var(const std::string & name) const;
  bool name_taken(const std::string & name) const;
  std::string fresh_name(const std::string & base) const;

  /// Variable with history/prophecy metadata attached.
  Term mk_aux_var(const std::string & name,
                  Sort sort,
                  VarKind kind,
                  Term target,
                  std::uint32_t depth);

  /// Returns the next-state partner of a state variable, creating it on first
  /// use. An explicit name is only honoured on creation.
  Term mk_next(Term state, const std::string & name = {});
  Term next_of(Term state) const;
  Term timed(Term var, std::uint32_t step);

  Term mk_int(const BigInt & v);
  Term mk_int(long long v) { return mk_int(BigInt(v)); }
  Term mk_bool(bool b);
  Term mk_true() { return mk_bool(true); }
  Term mk_false() { return mk_bool(false); }

  Term mk_term(Op op, std::vector<Term> children);
  Term mk_app(const FuncDecl * f, std::vector<Term> args);
  Term mk_const_array(Sort array_sort, Term element);

  const FuncDecl * declare_fun(const std::string & name,
                               std::vector<Sort> args,
                               Sort result,
                               FuncDecl::Role role = FuncDecl::Role::User,
                               Sort array_sort = {});
  const FuncDecl * find_fun(const std::string & name) const;

  // convenience constructors; the n-ary ones collapse trivial cases
  Term mk_and(std::vector<Term> cs);
  Term mk_or(std::vector<Term> cs);
  Term mk_not(Term t);
  Term mk_implies(Term a, Term b) { return mk_term(Op::Implies, { a, b }); }
  Term mk_eq(Term a, Term b) { return mk_term(Op::Eq, { a, b }); }
  Term mk_ite(Term c, Term a, Term b) { return mk_term(Op::Ite, { c, a, b }); }
  Term mk_lt(Term a, Term b) { return mk_term(Op::Lt, { a, b }); }
  Term mk_le(Term a, Term b) { return mk_term(Op::Le, { a, b }); }
  Term mk_add(Term a, Term b) { return mk_term(Op::Add, { a, b }); }
  Term mk_sub(Term a, Term b) { return mk_term(Op::Sub, { a, b }); }
  Term mk_read(Term a, Term i) { return mk_term(Op::Read, { a, i }); }
  Term mk_write(Term a, Term i, Term e) { return mk_term(Op::Write, { a, i, e }); }

  std::size_t num_terms() const { return terms_.size(); }

 private:
  Term intern(TermNode && proto, const std::string & key);
  Sort intern_sort(SortNode && proto, const std::string & key);

  std::deque<SortNode> sorts_;
  std::unordered_map<std::string, const SortNode *> sort_index_;
  std::deque<TermNode> terms_;
  std::unordered_map<std::string, const TermNode *> term_index_;
  std::unordered_map<std::string, Term> vars_;
  std::deque<FuncDecl> funcs_;
  std::unordered_map<std::string, const FuncDecl *> func_index_;
  std::unordered_map<std::uint32_t, Term> next_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Term> timed_;
  Sort bool_;
  Sort int_;
};

/// Simultaneous substitution. Keys may be arbitrary subterms; the result is
/// interned in the same store.
Term substitute(TermStore & store, Term t, const TermMap & map);

/// Equivalence-preserving cleanup: constant folding, boolean identities,
/// reads of constant arrays and of writes at the same index.
Term simplify(TermStore & store, Term t);

/// Steps of every timed variable occurring in t.
std::set<std::uint32_t> times_of(Term t);

/// Free variables in increasing id order.
std::vector<Term> free_vars(Term t);

/// All subterms (including t) satisfying pred, in post-order without
/// duplicates.
std::vector<Term> collect(Term t, const std::function<bool(Term)> & pred);
std::vector<Term> collect(std::span<const Term> ts, const std::function<bool(Term)> & pred);

bool contains(Term t, const std::function<bool(Term)> & pred);

/// Top-level conjuncts of t (flattening nested ands).
std::vector<Term> conjuncts(Term t);

// ---- printing ------------------------------------------------------------

std::string quote_symbol(const std::string & name);

class NameScheme
{
 public:
  virtual ~NameScheme() = default;
  virtual std::string var(Term v) const { return quote_symbol(v.name()); }
  virtual std::string fun(const FuncDecl & f) const { return quote_symbol(f.name); }
  virtual std::string sort(Sort s) const;
};

std::string to_smt(Term t, const NameScheme & names = NameScheme());
std::string sort_to_smt(Sort s, const NameScheme & names = NameScheme());

}  // namespace prophic

template <>
struct std::hash<prophic::Term>
{
  std::size_t operator()(prophic::Term t) const noexcept { return t.id(); }
};

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prophic/terms.hpp"

namespace prophic {

/// Element of an uninterpreted sort. Tokens are whatever the solver printed;
/// two values are equal iff their tokens are.
struct UValue
{
  std::uint32_t sort_id = 0;
  std::string token;
  friend auto operator<=>(const UValue &, const UValue &) = default;
};

using Value = std::variant<bool, BigInt, UValue>;

std::string value_to_string(const Value & v);
bool value_is_true(const Value & v);

class CexModel
{
 public:
  using Fallback = std::function<std::optional<Value>(Term)>;

  void set(Term var, Value v) { scalars_[var] = std::move(v); }
  const Value * find(Term var) const;

  void set_app(const FuncDecl * f, std::vector<Value> args, Value v);
  const Value * find_app(const FuncDecl * f, const std::vector<Value> & args) const;
  void set_default(const FuncDecl * f, Value v) { defaults_[f] = std::move(v); }
  const Value * find_default(const FuncDecl * f) const;

  /// Consulted for applications missing from the tables, before the default.
  /// Typically asks a live solver session for the value.
  void set_fallback(Fallback fb) { fallback_ = std::move(fb); }
  const Fallback & fallback() const { return fallback_; }

  const std::map<Term, Value> & scalars() const { return scalars_; }
  std::size_t num_app_entries() const;

 private:
  std::map<Term, Value> scalars_;
  std::map<const FuncDecl *, std::map<std::vector<Value>, Value>> tables_;
  std::map<const FuncDecl *, Value> defaults_;
  Fallback fallback_;
};

/// Throws UnassignedVariable for a variable missing from the model and
/// EvalError for array-valued terms or unknown application points.
Value evaluate(Term t, const CexModel & m);

/// Same as evaluate. Kept as a separate name to mirror the backend API.
inline Value model_value(const CexModel & m, Term t) { return evaluate(t, m); }

}  // namespace prophic

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace prophic {

struct SExpr
{
  enum class Kind
  {
    Atom,
    List
  };
  Kind kind = Kind::Atom;
  std::string atom;    // symbol text without |bars|, or string contents
  bool quoted = false; // written as |...|
  bool string = false; // written as "..."
  std::vector<SExpr> list;
  int line = 1;
  int col = 1;

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  bool is_symbol(std::string_view s) const { return is_atom() && !string && atom == s; }
  bool head_is(std::string_view s) const
  {
    return is_list() && !list.empty() && list[0].is_symbol(s);
  }
  std::size_t size() const { return list.size(); }
  const SExpr & operator[](std::size_t i) const { return list[i]; }
};

/// Parses a sequence of s-expressions. Throws ParseError with 1-based
/// line/column of the offending character.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// True when text holds at least one complete top-level s-expression or atom
/// (parentheses balanced outside strings, quoted symbols and comments).
bool sexpr_complete(std::string_view text);

std::string to_string(const SExpr & e);

}  // namespace prophic

#include "prophic/sexpr.hpp"

#include <cctype>

#include "prophic/errors.hpp"
#include "prophic/terms.hpp"

namespace prophic {

namespace {

class Lexer
{
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  bool at_end()
  {
    skip_ws();
    return pos_ >= s_.size();
  }

  SExpr parse()
  {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    SExpr e;
    e.line = line_;
    e.col = col_;
    char c = s_[pos_];
    if (c == '(') {
      advance();
      e.kind = SExpr::Kind::List;
      for (;;) {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unbalanced '('", e.line, e.col);
        if (s_[pos_] == ')') {
          advance();
          break;
        }
        e.list.push_back(parse());
      }
      return e;
    }
    if (c == ')') fail("unexpected ')'");
    if (c == '|') {
      advance();
      e.quoted = true;
      while (pos_ < s_.size() && s_[pos_] != '|') e.atom += advance();
      if (pos_ >= s_.size()) throw ParseError("unterminated quoted symbol", e.line, e.col);
      advance();
      return e;
    }
    if (c == '"') {
      advance();
      e.string = true;
      for (;;) {
        if (pos_ >= s_.size()) throw ParseError("unterminated string", e.line, e.col);
        char d = advance();
        if (d == '"') {
          if (pos_ < s_.size() && s_[pos_] == '"') {
            e.atom += advance();
            continue;
          }
          break;
        }
        e.atom += d;
      }
      return e;
    }
    while (pos_ < s_.size()) {
      char d = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '|'
          || d == '"' || d == ';')
        break;
      e.atom += advance();
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string & msg) { throw ParseError(msg, line_, col_); }

  char advance()
  {
    char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws()
  {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text)
{
  Lexer lx(text);
  std::vector<SExpr> out;
  while (!lx.at_end()) out.push_back(lx.parse());
  return out;
}

bool sexpr_complete(std::string_view text)
{
  int depth = 0;
  bool in_atom = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
      in_atom = false;
      continue;
    }
    if (c == '|' || c == '"') {
      char close = c;
      ++i;
      while (i < text.size() && text[i] != close) ++i;
      if (i >= text.size()) return false;
      continue;
    }
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
      if (depth == 0) return true;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (in_atom && depth == 0) return true;
      in_atom = false;
    } else {
      if (depth == 0) in_atom = true;
    }
  }
  // a bare atom is only complete once followed by whitespace
  return false;
}

std::string to_string(const SExpr & e)
{
  if (e.is_atom()) {
    if (e.string) {
      std::string s = "\"";
      for (char c : e.atom) {
        if (c == '"') s += '"';
        s += c;
      }
      return s + "\"";
    }
    if (e.quoted) return "|" + e.atom + "|";
    return e.atom;
  }
  std::string s = "(";
  for (std::size_t i = 0; i < e.list.size(); ++i) {
    if (i) s += ' ';
    s += to_string(e.list[i]);
  }
  return s + ")";
}

}  // namespace prophic

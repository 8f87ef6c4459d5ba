#pragma once
// Seeded generator of small integer/boolean terms for property tests.
#include <random>
#include <vector>

#include "prophic/terms.hpp"

namespace prophic::test {

struct TermGen
{
  TermStore & st;
  std::mt19937 rng;
  std::vector<Term> ints;
  std::vector<Term> bools;

  TermGen(TermStore & s, unsigned seed) : st(s), rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Term int_term(int depth)
  {
    if (depth == 0 || pick(3) == 0) {
      if (!ints.empty() && pick(2) == 0) return ints[pick(static_cast<int>(ints.size()))];
      return st.mk_int(pick(7) - 3);
    }
    switch (pick(3)) {
      case 0: return st.mk_add(int_term(depth - 1), int_term(depth - 1));
      case 1: return st.mk_sub(int_term(depth - 1), int_term(depth - 1));
      default: return st.mk_ite(bool_term(depth - 1), int_term(depth - 1), int_term(depth - 1));
    }
  }

  Term bool_term(int depth)
  {
    if (depth == 0 || pick(4) == 0) {
      if (!bools.empty() && pick(2) == 0) return bools[pick(static_cast<int>(bools.size()))];
      return st.mk_bool(pick(2) == 0);
    }
    switch (pick(7)) {
      case 0: return st.mk_term(Op::And, { bool_term(depth - 1), bool_term(depth - 1) });
      case 1: return st.mk_term(Op::Or, { bool_term(depth - 1), bool_term(depth - 1) });
      case 2: return st.mk_term(Op::Not, { bool_term(depth - 1) });
      case 3: return st.mk_implies(bool_term(depth - 1), bool_term(depth - 1));
      case 4: return st.mk_eq(int_term(depth - 1), int_term(depth - 1));
      case 5: return st.mk_lt(int_term(depth - 1), int_term(depth - 1));
      default: return st.mk_le(int_term(depth - 1), int_term(depth - 1));
    }
  }
};

}  // namespace prophic::test

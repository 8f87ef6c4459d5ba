#!/usr/bin/env python3
"""Small random array transition systems in VMT.

    python3 tools/gen_random_vmt.py --seed 3 > tests/corpus/rand_3.vmt

One integer array `a`, integer state variables `x`, `y`, inputs `i`, `v`.
"""
import argparse
import random


def gen(seed: int) -> str:
    r = random.Random(seed)
    lit = lambda: str(r.randint(0, 6))

    init = []
    if r.random() < 0.7:
        init.append(f"(= a ((as const (Array Int Int)) {lit()}))")
    init.append(f"(= x {lit()})")
    init.append(f"(= y {lit()})")

    idx = r.choice(["x", "y", "i"])
    val = r.choice(["v", "x", "(+ y 1)", "(select a y)", lit()])
    guard = r.choice(["true", "(< x y)", f"(< v {lit()})", f"(<= x {lit()})"])
    x_next = r.choice(["(+ x 1)", "x", "i", "(select a i)", "(ite (< x y) (+ x 1) x)"])
    y_next = r.choice(["y", "(+ y 1)", "(select a x)", "(ite (< v 3) v y)"])

    prop = r.choice([
        f"(<= (select a y) {r.randint(3, 9)})",
        "(=> (< x y) (<= (select a x) (select a y)))",
        f"(not (= (select a x) {r.randint(7, 12)}))",
        f"(>= (select a i) 0)",
    ])

    lines = [
        f"; generated by gen_random_vmt.py --seed {seed}",
        "(declare-fun a () (Array Int Int))",
        "(declare-fun a.next () (Array Int Int))",
        "(declare-fun x () Int)",
        "(declare-fun x.next () Int)",
        "(declare-fun y () Int)",
        "(declare-fun y.next () Int)",
        "(declare-fun i () Int)",
        "(declare-fun v () Int)",
        "(define-fun .a () (Array Int Int) (! a :next a.next))",
        "(define-fun .x () Int (! x :next x.next))",
        "(define-fun .y () Int (! y :next y.next))",
        f"(define-fun .init () Bool (! (and {' '.join(init)}) :init true))",
        "(define-fun .trans () Bool (! (and",
        f"  (= a.next (ite {guard} (store a {idx} {val}) a))",
        f"  (= x.next {x_next})",
        f"  (= y.next {y_next}))",
        "  :trans true))",
        f"(define-fun .prop () Bool (! {prop} :invar-property 0))",
    ]
    return "\n".join(lines) + "\n"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    print(gen(ap.parse_args().seed), end="")


if __name__ == "__main__":
    main()

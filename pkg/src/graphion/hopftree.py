"""Connes-Kreimer Hopf algebra of rooted trees and combinatorial DSEs.

A tree is its canonical nested-parenthesis string: ``()`` is a single
vertex and a tree is ``(`` + sorted child strings + ``)``.  A forest is a
sorted tuple of trees (the empty tuple is the unit 1).  Linear combinations
are dicts with Fraction coefficients.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

Tree = str
Forest = Tuple[Tree, ...]
Combination = Dict[Forest, Fraction]
Tensor = Dict[Tuple[Forest, Forest], Fraction]

VERTEX: Tree = "()"
GUARD = 8


def children(t: Tree) -> List[Tree]:
    """Split the top level of a tree string into child strings."""
    if len(t) < 2 or t[0] != "(" or t[-1] != ")":
        raise ValueError(f"not a tree: {t!r}")
    out, depth, start = [], 0, None
    for i, ch in enumerate(t[1:-1], 1):
        if ch == "(":
            if depth == 0:
                start = i
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                out.append(t[start:i + 1])
            if depth < 0:
                raise ValueError(f"unbalanced tree {t!r}")
        else:
            raise ValueError(f"bad character in tree {t!r}")
    if depth:
        raise ValueError(f"unbalanced tree {t!r}")
    return out


def canonical(t: Tree) -> Tree:
    return "(" + "".join(sorted(canonical(c) for c in children(t))) + ")"


def forest(*trees: Tree) -> Forest:
    return tuple(sorted(canonical(t) for t in trees))


def size(x) -> int:
    if isinstance(x, str):
        return x.count("(")
    return sum(t.count("(") for t in x)


def b_plus(f: Iterable[Tree]) -> Tree:
    return "(" + "".join(sorted(f)) + ")"


def ladder(n: int) -> Tree:
    return "(" * n + ")" * n


def fmul(a: Forest, b: Forest) -> Forest:
    return tuple(sorted(a + b))


def _add(acc: dict, key, c) -> None:
    acc[key] = acc.get(key, 0) + c
    if acc[key] == 0:
        del acc[key]


# ---------------------------------------------------------------------------
# Coproduct
# ---------------------------------------------------------------------------


def _cuts(t: Tree) -> List[Tuple[Forest, Tuple[Tree, ...]]]:
    """(pruned forest, root part) over admissible cuts; root part () means 1."""
    out = [((t,), ())]  # cut at the root
    kids = children(t)
    options = [_cuts(c) for c in kids]
    for combo in itertools.product(*options):
        pruned: Tuple[Tree, ...] = ()
        remain: List[Tree] = []
        for p, r in combo:
            pruned += p
            remain += list(r)
        out.append((tuple(sorted(pruned)), (b_plus(remain),)))
    return out


def coproduct(t: Tree) -> Tensor:
    out: Tensor = {}
    for p, r in _cuts(canonical(t)):
        _add(out, (p, r), 1)
    return out


def coproduct_forest(f: Forest) -> Tensor:
    out: Tensor = {((), ()): 1}
    for t in f:
        nxt: Tensor = {}
        for (a, b), c in out.items():
            for (p, r), d in coproduct(t).items():
                _add(nxt, (fmul(a, p), fmul(b, r)), c * d)
        out = nxt
    return out


def counit(f: Forest) -> int:
    return 1 if not f else 0


def cocycle_residual(f: Forest) -> Tensor:
    """Delta B+(F) - (id x B+) Delta(F) - B+(F) x 1."""
    f = tuple(sorted(f))
    out: Tensor = dict(coproduct(b_plus(f)))
    for (a, b), c in coproduct_forest(f).items():
        _add(out, (a, (b_plus(b),)), -c)
    _add(out, ((b_plus(f),), ()), -1)
    return out


def coassociativity_residual(t: Tree) -> Dict[Tuple[Forest, Forest, Forest], int]:
    left: Dict = {}
    right: Dict = {}
    for (a, b), c in coproduct(t).items():
        for (a1, a2), d in coproduct_forest(a).items():
            _add(left, (a1, a2, b), c * d)
        for (b1, b2), d in coproduct_forest(b).items():
            _add(right, (a, b1, b2), c * d)
    for k, v in right.items():
        _add(left, k, -v)
    return left


# ---------------------------------------------------------------------------
# Combinatorial Dyson-Schwinger equations
# ---------------------------------------------------------------------------


def _truncate(x: Combination, order: int) -> Combination:
    return {f: c for f, c in x.items() if size(f) <= order}


def cmul(x: Combination, y: Combination, order: int) -> Combination:
    out: Combination = {}
    for f, a in x.items():
        for g, b in y.items():
            if size(f) + size(g) <= order:
                _add(out, fmul(f, g), a * b)
    return out


def cpow(x: Combination, w: int, order: int) -> Combination:
    """x^w for x = 1 + (higher grading), any integer w, via the binomial series."""
    if x.get((), 0) != 1:
        raise ValueError("series must start with 1")
    rest = {f: c for f, c in x.items() if f}
    out: Combination = {(): Fraction(1)}
    power: Combination = {(): Fraction(1)}
    binom = Fraction(1)
    for j in range(1, order + 1):
        power = cmul(power, rest, order)
        if not power:
            break
        binom = binom * (w - j + 1) / j
        for f, c in power.items():
            _add(out, f, binom * c)
    return out


def solve_combinatorial(s: int, order: int, guard: int = GUARD) -> Combination:
    """X = 1 + sgn(s) x B+(X^(1+s)) to x^order; the x-degree equals the grading."""
    if order > guard:
        raise ValueError(f"tree guard: order {order} > {guard}")
    sign = -1 if s < 0 else 1
    X: Combination = {(): Fraction(1)}
    for m in range(1, order + 1):
        inner = cpow(_truncate(X, m - 1), 1 + s, m - 1)
        nxt: Combination = {(): Fraction(1)}
        for f, c in inner.items():
            _add(nxt, (b_plus(f),), sign * c)
        X = nxt
    return X


def by_order(X: Combination) -> Dict[int, Dict[Tree, Fraction]]:
    out: Dict[int, Dict[Tree, Fraction]] = defaultdict(dict)
    for f, c in X.items():
        if f:
            (t,) = f
            out[size(t)][t] = c
    return dict(out)


def plane_embeddings(t: Tree) -> int:
    """Number of distinct plane embeddings of a rooted tree."""
    kids = children(t)
    out = 1
    for k in kids:
        out *= plane_embeddings(k)
    from math import factorial

    perms = factorial(len(kids))
    for _, grp in itertools.groupby(sorted(kids)):
        perms //= factorial(len(list(grp)))
    return out * perms


def plane_trees(n: int) -> List[str]:
    """All plane rooted trees with n vertices, as ordered paren strings."""
    if n == 1:
        return ["()"]
    out = []

    def seqs(m: int) -> List[List[str]]:
        if m == 0:
            return [[]]
        res = []
        for first in range(1, m + 1):
            for t in plane_trees(first):
                for rest in seqs(m - first):
                    res.append([t] + rest)
        return res

    for kids in seqs(n - 1):
        out.append("(" + "".join(kids) + ")")
    return out

"""Rooted connected chord diagrams and the chord diagram expansion of G(x, L)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .dse import series_ring
from .poly import MPoly, Ring

GUARD = 8

# How the oriented intersection graph orients a crossing: from the chord
# that comes first in intersection order ("intersection") or first by
# smaller endpoint ("ccw").
ORIENTATION = "ccw"


@dataclass(frozen=True)
class ChordDiagram:
    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        points = sorted(x for p in pairs for x in p)
        if points != list(range(1, 2 * len(pairs) + 1)):
            raise ValueError("chords must match 1..2n exactly")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        return "".join(f"({a},{b})" for a, b in self.pairs)

    @classmethod
    def parse(cls, text: str) -> "ChordDiagram":
        pairs = [(int(a), int(b)) for a, b in re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)]
        if not pairs:
            raise ValueError(f"cannot parse chord diagram {text!r}")
        return cls(tuple(pairs))


def crosses(p: Tuple[int, int], q: Tuple[int, int]) -> bool:
    (a, b), (c, d) = sorted((p, q))
    return a < c < b < d


def _components(chords: Sequence[Tuple[int, int]]) -> List[List[Tuple[int, int]]]:
    left = list(chords)
    comps = []
    while left:
        comp = [left.pop(0)]
        grew = True
        while grew:
            grew = False
            for c in list(left):
                if any(crosses(c, d) for d in comp):
                    comp.append(c)
                    left.remove(c)
                    grew = True
        comps.append(sorted(comp))
    return comps


def is_connected(C: ChordDiagram) -> bool:
    return len(_components(C.pairs)) <= 1


def all_matchings(n: int) -> Iterator[ChordDiagram]:
    def rec(free: List[int], acc):
        if not free:
            yield ChordDiagram(tuple(acc))
            return
        a = free[0]
        for i in range(1, len(free)):
            yield from rec(free[1:i] + free[i + 1:], acc + [(a, free[i])])

    yield from rec(list(range(1, 2 * n + 1)), [])


def generate_connected(n: int, guard: int = GUARD) -> List[ChordDiagram]:
    """All rooted connected diagrams with n chords, in lexicographic pair order.

    Points are matched smallest-first; a branch dies as soon as the matched
    points form a proper closed prefix {1..t}, which would split off.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > guard:
        raise ValueError(f"chord guard: n={n} > {guard}")
    out: List[ChordDiagram] = []
    total = 2 * n

    def rec(free: List[int], acc, maxpt: int):
        if not free:
            C = ChordDiagram(tuple(acc))
            if is_connected(C):
                out.append(C)
            return
        a = free[0]
        # all points below a are matched; if none reaches past a, a prefix closed
        if acc and maxpt < a:
            return
        for i in range(1, len(free)):
            b = free[i]
            rec(free[1:i] + free[i + 1:], acc + [(a, b)], max(maxpt, b))

    rec(list(range(1, total + 1)), [], 0)
    return out


def intersection_order(C: ChordDiagram) -> List[Tuple[int, int]]:
    """Root first, then each component of the rest (by first point), recursively."""
    if not is_connected(C):
        raise ValueError("intersection order needs a connected diagram")

    def order(chords: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        chords = sorted(chords)
        root, rest = chords[0], chords[1:]
        out = [root]
        for comp in sorted(_components(rest), key=lambda c: c[0][0]):
            out += order(comp)
        return out

    return order(list(C.pairs))


def intersection_graph(C: ChordDiagram, orientation: Optional[str] = None) -> Dict[Tuple[int, int], List[Tuple[int, int]]]:
    """Oriented intersection graph as chord -> list of out-neighbours."""
    orientation = orientation or ORIENTATION
    if orientation == "intersection":
        rank = {c: i for i, c in enumerate(intersection_order(C))}
    elif orientation == "ccw":
        rank = {c: i for i, c in enumerate(C.pairs)}
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    out = {c: [] for c in C.pairs}
    for i, p in enumerate(C.pairs):
        for q in C.pairs[i + 1:]:
            if crosses(p, q):
                lo, hi = (p, q) if rank[p] < rank[q] else (q, p)
                out[lo].append(hi)
    return out


@dataclass(frozen=True)
class DiagramStats:
    terminals: Tuple[int, ...]
    b: int
    delta: Tuple[int, ...]

    def weight(self, ring: Ring) -> MPoly:
        out = ring.one
        for d in self.delta:
            out = out * ring.var(f"f{d}")
        return out


def stats(C: ChordDiagram, orientation: Optional[str] = None) -> DiagramStats:
    order = intersection_order(C)
    graph = intersection_graph(C, orientation)
    terminals = tuple(i + 1 for i, c in enumerate(order) if not graph[c])
    diffs = [b - a for a, b in zip(terminals, terminals[1:])]
    delta = tuple([0] * (C.n - len(terminals)) + diffs)
    return DiagramStats(terminals, terminals[0], delta)


def green_expansion(n_max: int, ring: Optional[Ring] = None, orientation: Optional[str] = None,
                    guard: int = GUARD) -> MPoly:
    """1 - sum_{i>=1} (-L)^i/i! sum_{C, b(C) >= i} x^|C| f_C f_{b(C)-i}, to x^n_max."""
    ring = ring or series_ring(n_max)
    x, L = ring.var("x"), ring.var("L")
    G = ring.one
    for n in range(1, n_max + 1):
        for C in generate_connected(n, guard):
            st = stats(C, orientation)
            fc = st.weight(ring)
            for i in range(1, st.b + 1):
                term = Fraction((-1) ** i, factorial(i)) * L ** i * x ** n * fc * ring.var(f"f{st.b - i}")
                G = G - term
    return G


def beta_gamma1(n_max: int, ring: Optional[Ring] = None) -> MPoly:
    """beta(x) = -2 x gamma_1(x) with G = 1 - sum gamma_n L^n."""
    from .dse import L_coeff, truncate

    G = green_expansion(n_max, ring)
    gamma1 = -L_coeff(G, 1)
    return truncate(-2 * G.ring.var("x") * gamma1, n_max + 1)

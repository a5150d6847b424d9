"""Point counts of affine varieties over prime fields, and the c2 invariant.

Two counting routes:

* ``count_points``: exhaustive evaluation over F_q^n with numpy, in blocks.
* ``count_points_split``: eliminate a variable that occurs linearly.  For
  g = g1 x + g0 the points with g1 != 0 fix x uniquely, so another equation
  h = h1 x + h0 becomes g1 h0 - g0 h1 = 0; points with g1 = 0 keep x free.
  Falls back to exhaustive evaluation when no linear variable is left.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .denred import ENDED_STUCK, reduce_sequence
from .graph import GraphError, Multigraph
from .poly import MPoly, is_prime, reduce_mod, split_var

DEFAULT_BOUND = 10 ** 8
_BLOCK = 1 << 18
_BRUTE_SMALL = 4096


class CountError(ValueError):
    pass


@dataclass(frozen=True)
class CountResult:
    q: int
    n: int
    count: int
    method: str


def _check_q(q: int) -> None:
    if not is_prime(q):
        raise CountError(f"q={q} is not prime; only prime fields are supported")


def _variables(polys: Sequence[MPoly], variables: Optional[Sequence[str]]) -> List[str]:
    if variables is not None:
        return list(variables)
    seen: List[str] = []
    for p in polys:
        for v in p.variables():
            if v not in seen:
                seen.append(v)
    return seen


def _brute(polys: Sequence[MPoly], q: int, variables: Sequence[str], threads: int = 1) -> int:
    n = len(variables)
    mods = [reduce_mod(p, q, variables) for p in polys]
    mods = [m for m in mods if not m.is_zero()]
    if not mods:
        return q ** n
    total = q ** n
    if n == 0:
        return int(all(int(m.evaluate([])[0]) == 0 for m in mods))
    # blocks over the leading variables; the trailing ones form a numpy grid
    inner = 0
    while inner < n and q ** (inner + 1) <= _BLOCK:
        inner += 1
    inner = max(inner, 1)
    outer = n - inner
    grid_size = q ** inner
    idx = np.arange(grid_size, dtype=np.int64)
    inner_cols = []
    for k in range(inner):
        inner_cols.append((idx // q ** (inner - 1 - k)) % q)

    def block(b: int) -> int:
        cols = []
        for k in range(outer):
            cols.append(np.full(grid_size, (b // q ** (outer - 1 - k)) % q, dtype=np.int64))
        cols += inner_cols
        mask = np.ones(grid_size, dtype=bool)
        for m in mods:
            mask &= m.evaluate(cols) == 0
        return int(mask.sum())

    nblocks = total // grid_size
    if threads > 1 and nblocks > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(block, range(nblocks)))
    else:
        parts = [block(b) for b in range(nblocks)]
    return sum(parts)


def count_points(polys, q: int, variables: Optional[Sequence[str]] = None,
                 bound: int = DEFAULT_BOUND, threads: int = 1) -> CountResult:
    """Number of common zeros in F_q^n, n = number of ``variables``."""
    _check_q(q)
    polys = [polys] if isinstance(polys, MPoly) else list(polys)
    variables = _variables(polys, variables)
    if q ** len(variables) > bound:
        raise CountError(f"q^n = {q}^{len(variables)} exceeds the brute-force bound {bound}; "
                         "use count_points_split")
    return CountResult(q, len(variables), _brute(polys, q, variables, threads), "brute")


# ---------------------------------------------------------------------------
# Linear elimination
# ---------------------------------------------------------------------------


def _modq(p: MPoly, q: int) -> MPoly:
    terms = {}
    for m, c in p.terms.items():
        if isinstance(c, Fraction):
            if c.denominator % q == 0:
                raise CountError("coefficient denominator divisible by q")
            c = c.numerator * pow(c.denominator, -1, q)
        c %= q
        if c:
            terms[m] = c
    return MPoly(p.ring, terms)


class _Splitter:
    def __init__(self, q: int, bound: int):
        self.q = q
        self.bound = bound
        self.memo: Dict[Tuple, int] = {}

    def count(self, polys: List[MPoly], variables: Tuple[str, ...]) -> int:
        q = self.q
        clean: List[MPoly] = []
        for p in polys:
            p = _modq(p, q)
            if p.is_zero():
                continue
            if p.is_constant():
                return 0
            if p not in clean:
                clean.append(p)
        used = set()
        for p in clean:
            used.update(p.variables())
        free = [v for v in variables if v not in used]
        live = tuple(v for v in variables if v in used)
        factor = q ** len(free)
        if not clean:
            return factor
        key = (frozenset(clean), live)
        if key in self.memo:
            return factor * self.memo[key]
        value = self._count_live(clean, live)
        self.memo[key] = value
        return factor * value

    def _pivot(self, polys: List[MPoly], live: Tuple[str, ...]) -> Optional[str]:
        best = None
        for v in live:
            degs = [p.degree_in(v) for p in polys]
            if max(degs) != 1:
                continue
            key = (sum(1 for d in degs if d), sum(len(p) for p, d in zip(polys, degs) if d), live.index(v))
            if best is None or key < best[0]:
                best = (key, v)
        return None if best is None else best[1]

    def _count_live(self, polys: List[MPoly], live: Tuple[str, ...]) -> int:
        q = self.q
        if q ** len(live) <= _BRUTE_SMALL:
            return _brute(polys, q, live)
        x = self._pivot(polys, live)
        if x is None:
            if q ** len(live) > self.bound:
                raise CountError(f"no linear variable and {q}^{len(live)} points exceed the bound")
            return _brute(polys, q, live)
        rest = tuple(v for v in live if v != x)
        with_x = [p for p in polys if p.degree_in(x)]
        others = [p for p in polys if not p.degree_in(x)]
        zero = polys[0].ring.zero
        g = min(with_x, key=len)
        parts = split_var(g, x)
        g1, g0 = parts.get(1, zero), parts.get(0, zero)
        eliminated = []
        for h in with_x:
            if h is g:
                continue
            hp = split_var(h, x)
            eliminated.append(g1 * hp.get(0, zero) - g0 * hp.get(1, zero))
        # g1 != 0: x determined
        base = others + eliminated
        total = self.count(base, rest) - self.count(base + [g1], rest)
        # g1 == 0: g0 must vanish; x stays a variable for the other equations
        total += self.count(others + [g1, g0] + [h for h in with_x if h is not g], live)
        return total


def count_points_split(f, q: int, variables: Optional[Sequence[str]] = None,
                       bound: int = DEFAULT_BOUND) -> CountResult:
    """Exact zero count by recursive linear elimination (brute force where needed)."""
    _check_q(q)
    polys = [f] if isinstance(f, MPoly) else list(f)
    variables = _variables(polys, variables)
    missing = {v for p in polys for v in p.variables()} - set(variables)
    if missing:
        raise CountError(f"polynomial uses variables outside the count: {sorted(missing)}")
    count = _Splitter(q, bound).count(polys, tuple(variables))
    return CountResult(q, len(variables), count, "linear-split")


def count(polys, q: int, variables: Optional[Sequence[str]] = None) -> CountResult:
    """Brute force when cheap, otherwise linear elimination."""
    polys = [polys] if isinstance(polys, MPoly) else list(polys)
    variables = _variables(polys, variables)
    if q ** len(variables) <= 10 ** 6:
        return count_points(polys, q, variables)
    return count_points_split(polys, q, variables)


# ---------------------------------------------------------------------------
# c2 invariant
# ---------------------------------------------------------------------------


def c2_from_psi(g: Multigraph, q: int, method: str = "auto") -> Tuple[int, CountResult]:
    """c2(G)_q = [Psi_G]_q / q^2 mod q."""
    from .graphpoly import kirchhoff

    if not g.is_connected() or len(g.vertices) < 3:
        raise GraphError("c2 needs a connected graph with at least 3 vertices")
    variables = [g.var(l) for l in g.labels]
    psi = kirchhoff(g)
    if method == "brute":
        res = count_points(psi, q, variables)
    elif method == "split":
        res = count_points_split(psi, q, variables)
    else:
        res = count(psi, q, variables)
    if res.count % (q * q):
        raise ArithmeticError(f"[Psi]_{q} = {res.count} is not divisible by q^2")
    return (res.count // (q * q)) % q, res


def c2_from_denominator(g: Multigraph, order: Sequence[str], q: int) -> Tuple[int, CountResult]:
    """c2(G)_q = (-1)^n [D^n]_q mod q, counted over the unreduced edge variables.

    Needs 5 <= n < |E|: at least one edge must stay unreduced.
    """
    if not 5 <= len(order) < len(g.edges):
        raise GraphError(f"denominator c2 needs 5 <= n < |E| = {len(g.edges)}, got n = {len(order)}")
    states = reduce_sequence(g, order)
    last = states[-1]
    if last.j != len(order) or last.status == ENDED_STUCK:
        raise ArithmeticError(f"reduction stopped at step {last.j} ({last.status})")
    n = len(order)
    variables = [g.var(l) for l in g.labels if l not in set(map(str, order))]
    res = count(last.poly, q, variables)
    return ((-1) ** n * res.count) % q, res

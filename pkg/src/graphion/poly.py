"""Exact sparse multivariate polynomials.

A polynomial lives in a :class:`Ring`, an ordered tuple of variable names.
Terms are stored in a dict mapping a *packed monomial* to a nonzero
coefficient (``int`` or ``Fraction``).

Packing: every exponent occupies a 16-bit field.  Variable 0 sits in the most
significant exponent field and the total degree sits above all of them, so

  * multiplying monomials is integer addition, and
  * graded-lexicographic order (by variable id) is plain integer order.

Exponents are limited to 2**15 - 1; nothing in this package gets close.
"""

from __future__ import annotations

import heapq
import math
import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

BITS = 16
FIELD = (1 << BITS) - 1
GUARD_BIT = 1 << (BITS - 1)

Coeff = Union[int, Fraction]


class NotASquare(ArithmeticError):
    """Raised by :func:`poly_sqrt` when the input is not a perfect square."""


class NotDivisible(ArithmeticError):
    """Raised by :func:`divide_exact` when the division leaves a remainder."""


def _norm(c: Coeff) -> Coeff:
    if type(c) is int:
        return c
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Ring:
    """An ordered set of variables.  Rings with equal names are the same object."""

    _cache: Dict[Tuple[str, ...], "Ring"] = {}

    def __new__(cls, names: Iterable[str]):
        names = tuple(names)
        ring = cls._cache.get(names)
        if ring is not None:
            return ring
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        ring = super().__new__(cls)
        ring.names = names
        ring.nvars = len(names)
        ring.index = {n: i for i, n in enumerate(names)}
        n = len(names)
        ring._offsets = [BITS * (n - 1 - i) for i in range(n)]
        ring._deg_offset = BITS * n
        ring._deg_unit = 1 << ring._deg_offset
        ring._units = [(1 << off) + ring._deg_unit for off in ring._offsets]
        ring._guard = sum(GUARD_BIT << (BITS * i) for i in range(n + 1))
        cls._cache[names] = ring
        return ring

    def __repr__(self) -> str:
        return f"Ring({', '.join(self.names)})"

    def __reduce__(self):
        return (Ring, (self.names,))

    # -- monomials ---------------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        m = 0
        deg = 0
        for e, off in zip(exps, self._offsets):
            m |= e << off
            deg += e
        return m | (deg << self._deg_offset)

    def unpack(self, m: int) -> Tuple[int, ...]:
        return tuple((m >> off) & FIELD for off in self._offsets)

    def mono_degree(self, m: int) -> int:
        return m >> self._deg_offset

    def divides(self, small: int, big: int) -> bool:
        g = self._guard
        return ((big | g) - small) & g == g

    # -- constructors ------------------------------------------------------

    def var(self, name: str) -> "MPoly":
        return MPoly(self, {self._units[self.index[name]]: 1})

    def gens(self) -> List["MPoly"]:
        return [self.var(n) for n in self.names]

    def const(self, c: Coeff) -> "MPoly":
        c = _norm(c)
        return MPoly(self, {0: c} if c else {})

    @property
    def zero(self) -> "MPoly":
        return MPoly(self, {})

    @property
    def one(self) -> "MPoly":
        return MPoly(self, {0: 1})

    def monomial(self, exps: Mapping[str, int], coeff: Coeff = 1) -> "MPoly":
        vec = [0] * self.nvars
        for name, e in exps.items():
            vec[self.index[name]] = e
        return MPoly(self, {self.pack(vec): coeff} if coeff else {})

    def parse(self, text: str) -> "MPoly":
        return _Parser(self, text).parse()

    def extend(self, names: Iterable[str]) -> "Ring":
        extra = [n for n in names if n not in self.index]
        return Ring(self.names + tuple(extra))


class MPoly:
    """An immutable sparse polynomial over a :class:`Ring`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Dict[int, Coeff]):
        self.ring = ring
        self.terms = terms

    # -- basic protocol ----------------------------------------------------

    def _check(self, other: "MPoly") -> None:
        if other.ring is not self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring.names, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MPoly({self})"

    def __str__(self) -> str:
        return to_str(self)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "MPoly":
        return MPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __add__(self, other) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        res = dict(big)
        for m, c in small.items():
            v = res.get(m, 0) + c
            if v:
                res[m] = _norm(v)
            else:
                del res[m]
        return MPoly(self.ring, res)

    __radd__ = __add__

    def __sub__(self, other) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        res = dict(self.terms)
        for m, c in other.terms.items():
            v = res.get(m, 0) - c
            if v:
                res[m] = _norm(v)
            else:
                del res[m]
        return MPoly(self.ring, res)

    def __rsub__(self, other) -> "MPoly":
        return (-self).__add__(other)

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            other = _norm(other)
            if not other:
                return MPoly(self.ring, {})
            return MPoly(self.ring, {m: _norm(c * other) for m, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        res: Dict[int, Coeff] = {}
        get = res.get
        if len(a) * len(b) >= _NUMPY_MIN:
            fast = _mul_numpy(self.ring, a, b)
            if fast is not None:
                return MPoly(self.ring, fast)
        bitems = list(b.items())
        for m1, c1 in a.items():
            for m2, c2 in bitems:
                k = m1 + m2
                res[k] = get(k, 0) + c1 * c2
        if all(type(c) is int for c in a.values()) and all(type(c) is int for _, c in bitems):
            return MPoly(self.ring, {m: c for m, c in res.items() if c})
        return MPoly(self.ring, {m: _norm(c) for m, c in res.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        if isinstance(other, MPoly):
            return divide_exact(self, other)
        return NotImplemented

    # -- inspection --------------------------------------------------------

    def items(self) -> Iterator[Tuple[Tuple[int, ...], Coeff]]:
        """(exponent tuple, coefficient) pairs in descending graded-lex order."""
        unpack = self.ring.unpack
        for m in sorted(self.terms, reverse=True):
            yield unpack(m), self.terms[m]

    def leading_term(self) -> Tuple[int, Coeff]:
        m = max(self.terms)
        return m, self.terms[m]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return self.ring.mono_degree(max(self.terms))

    def is_homogeneous(self) -> bool:
        degs = {self.ring.mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    def degree_in(self, name: str) -> int:
        off = self.ring._offsets[self.ring.index[name]]
        if not self.terms:
            return -1
        return max((m >> off) & FIELD for m in self.terms)

    def variables(self) -> List[str]:
        if not self.terms:
            return []
        acc = 0
        for m in self.terms:
            acc |= m
        ring = self.ring
        return [n for n, off in zip(ring.names, ring._offsets) if (acc >> off) & FIELD]

    def is_constant(self) -> bool:
        return all(m == 0 for m in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get(0, 0)

    def content(self) -> Coeff:
        """Gcd of the integer coefficients (1 for rational coefficients)."""
        g = 0
        for c in self.terms.values():
            if isinstance(c, Fraction):
                return 1
            g = math.gcd(g, c)
        return g

    def canonical_sign(self) -> "MPoly":
        """Return +p or -p, whichever has a positive leading coefficient."""
        if not self.terms:
            return self
        return -self if self.leading_term()[1] < 0 else self

    # -- evaluation --------------------------------------------------------

    def evaluate(self, values: Mapping[str, Coeff]) -> Coeff:
        ring = self.ring
        vals = [values[n] for n in ring.names]
        total: Coeff = 0
        for m, c in self.terms.items():
            term = c
            for v, off in zip(vals, ring._offsets):
                e = (m >> off) & FIELD
                if e:
                    term = term * v ** e
            total += term
        return _norm(total)

    def to_ring(self, ring: Ring) -> "MPoly":
        """Re-express in a ring containing all variables that occur."""
        if ring is self.ring:
            return self
        src = self.ring
        idx = [ring.index[n] for n in src.names]
        res: Dict[int, Coeff] = {}
        for m, c in self.terms.items():
            vec = [0] * ring.nvars
            for i, e in zip(idx, src.unpack(m)):
                vec[i] = e
            res[ring.pack(vec)] = c
        return MPoly(ring, res)


Number = Union[int, Fraction, MPoly]


# ---------------------------------------------------------------------------
# Operations named in the module contract
# ---------------------------------------------------------------------------


def add(p: MPoly, q: MPoly) -> MPoly:
    return p + q


def mul(p: MPoly, q: MPoly) -> MPoly:
    return p * q


def pow(p: MPoly, n: int) -> MPoly:  # noqa: A001 - mirrors the algebraic name
    return p ** n


def split_var(p: MPoly, name: str) -> Dict[int, MPoly]:
    """Map exponent k of ``name`` to the coefficient polynomial of name**k."""
    ring = p.ring
    i = ring.index[name]
    off = ring._offsets[i]
    unit = ring._units[i]
    parts: Dict[int, Dict[int, Coeff]] = {}
    for m, c in p.terms.items():
        e = (m >> off) & FIELD
        parts.setdefault(e, {})[m - e * unit] = c
    return {e: MPoly(ring, t) for e, t in parts.items()}


def coeffs_in(p: MPoly, name: str) -> Tuple[MPoly, MPoly, MPoly, bool]:
    """Coefficients (of v^2, v^1, v^0) of ``p`` in variable ``name``.

    The last entry flags a degree in ``name`` above 2, in which case the
    three coefficients are incomplete.
    """
    parts = split_var(p, name)
    zero = p.ring.zero
    higher = any(e > 2 for e in parts)
    return parts.get(2, zero), parts.get(1, zero), parts.get(0, zero), higher


def substitute(p: MPoly, bindings: Mapping[str, MPoly]) -> MPoly:
    """Simultaneous substitution of variables by polynomials (same ring)."""
    ring = p.ring
    if not bindings:
        return p
    names = list(bindings)
    idx = [ring.index[n] for n in names]
    offs = [ring._offsets[i] for i in idx]
    units = [ring._units[i] for i in idx]
    for q in bindings.values():
        if q.ring is not ring:
            raise ValueError("substitution values must live in the same ring")
    # group terms by the exponent vector of the substituted variables
    groups: Dict[Tuple[int, ...], Dict[int, Coeff]] = {}
    for m, c in p.terms.items():
        key = tuple((m >> off) & FIELD for off in offs)
        rest = m - sum(e * u for e, u in zip(key, units))
        groups.setdefault(key, {})[rest] = c
    power_cache: Dict[Tuple[int, int], MPoly] = {}

    def power(j: int, e: int) -> MPoly:
        k = (j, e)
        if k not in power_cache:
            power_cache[k] = bindings[names[j]] ** e
        return power_cache[k]

    result = ring.zero
    for key, terms in groups.items():
        factor = MPoly(ring, terms)
        for j, e in enumerate(key):
            if e:
                factor = factor * power(j, e)
        result = result + factor
    return result


# ---------------------------------------------------------------------------
# Large integer products in numpy
# ---------------------------------------------------------------------------

_NUMPY_MIN = 40000
_CHUNK_PAIRS = 1 << 22


def _exponent_matrix(ring: "Ring", monos: Sequence[int]) -> np.ndarray:
    out = np.zeros((len(monos), ring.nvars), dtype=np.int64)
    for i, off in enumerate(ring._offsets):
        out[:, i] = [(m >> off) & FIELD for m in monos]
    return out


def _combine(keys_parts, vals_parts):
    """Concatenate, sort and add up values with equal keys."""
    keys = np.concatenate(keys_parts)
    vals = np.concatenate(vals_parts)
    if len(keys) == 0:
        return keys, vals
    order = np.argsort(keys)
    keys, vals = keys[order], vals[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    return keys[starts], np.add.reduceat(vals, starts)


def _mul_numpy(ring: "Ring", a: Dict[int, Coeff], b: Dict[int, Coeff]):
    """Product of two integer polynomials via int64 keys; None when it does not fit."""
    ca = list(a.values())
    cb = list(b.values())
    if not all(type(c) is int for c in ca) or not all(type(c) is int for c in cb):
        return None
    bound = max(map(abs, ca)) * max(map(abs, cb)) * min(len(ca), len(cb))
    if bound >= 1 << 62:
        return None
    ea = _exponent_matrix(ring, list(a))
    eb = _exponent_matrix(ring, list(b))
    top = ea.max(axis=0) + eb.max(axis=0)
    widths = [int(t).bit_length() for t in top]
    if sum(widths) > 62:
        return None
    shifts = np.cumsum([0] + widths[:-1]).astype(np.int64)
    ka = (ea << shifts).sum(axis=1)
    kb = (eb << shifts).sum(axis=1)
    va = np.array(ca, dtype=np.int64)
    vb = np.array(cb, dtype=np.int64)
    acc_k = np.empty(0, dtype=np.int64)
    acc_v = np.empty(0, dtype=np.int64)
    parts_k, parts_v, pending = [], [], 0
    step = max(1, _CHUNK_PAIRS // len(kb))
    for i in range(0, len(ka), step):
        k, v = _combine([(ka[i:i + step, None] + kb[None, :]).ravel()],
                        [(va[i:i + step, None] * vb[None, :]).ravel()])
        parts_k.append(k)
        parts_v.append(v)
        pending += len(k)
        # merge often enough that memory stays near the size of the result
        if pending > max(_CHUNK_PAIRS, len(acc_k)):
            acc_k, acc_v = _combine([acc_k] + parts_k, [acc_v] + parts_v)
            parts_k, parts_v, pending = [], [], 0
    keys, vals = _combine([acc_k] + parts_k, [acc_v] + parts_v)
    nz = vals != 0
    keys, vals = keys[nz], vals[nz]
    exps = np.zeros((len(keys), ring.nvars), dtype=np.int64)
    for i, (sh, w) in enumerate(zip(shifts, widths)):
        exps[:, i] = (keys >> sh) & ((1 << w) - 1)
    # packed layout: big-endian 16-bit fields, total degree first
    fields = np.empty((len(keys), ring.nvars + 1), dtype=">u2")
    fields[:, 0] = exps.sum(axis=1)
    fields[:, 1:] = exps
    raw = fields.tobytes()
    width = 2 * (ring.nvars + 1)
    frombytes = int.from_bytes
    packed = [frombytes(raw[i:i + width], "big") for i in range(0, len(raw), width)]
    return dict(zip(packed, vals.tolist()))


def poly_sqrt(p: MPoly) -> MPoly:
    """Exact square root with positive leading coefficient.

    Leading-term recursion in graded-lex order; raises :class:`NotASquare`.
    """
    ring = p.ring
    if not p.terms:
        return p
    m0, c0 = p.leading_term()
    exps = ring.unpack(m0)
    if any(e % 2 for e in exps):
        raise NotASquare("leading monomial has an odd exponent")
    r0 = _rational_sqrt(c0)
    s_m0 = ring.pack([e // 2 for e in exps])
    root: Dict[int, Coeff] = {s_m0: r0}
    # remainder R = p - s^2, maintained incrementally
    rem = dict(p.terms)
    _sub_product(rem, {s_m0: r0}, {s_m0: r0})
    two_lead = 2 * r0
    integral = isinstance(r0, int) and all(isinstance(c, int) for c in p.terms.values())
    # lazy max-heap over the remainder's monomials
    heap = [-m for m in rem]
    heapq.heapify(heap)
    while rem:
        m = -heapq.heappop(heap)
        if m not in rem:
            continue
        if not ring.divides(s_m0, m):
            raise NotASquare("remainder leading term not divisible")
        t_m = m - s_m0
        if t_m >= s_m0:
            raise NotASquare("remainder above the root's leading term")
        num = rem[m]
        if integral:
            # Gauss: an integer square has an integer root
            if num % two_lead:
                raise NotASquare("non-integral root coefficient")
            t_c = num // two_lead
        else:
            t_c = _norm(Fraction(num) / two_lead)
        # R -= 2*s*t + t^2
        _sub_product(rem, root, {t_m: 2 * t_c}, heap)
        _sub_product(rem, {t_m: t_c}, {t_m: t_c}, heap)
        root[t_m] = t_c
    return MPoly(ring, root)


def _sub_product(acc: Dict[int, Coeff], a: Dict[int, Coeff], b: Dict[int, Coeff], heap=None) -> None:
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            k = m1 + m2
            old = acc.get(k)
            v = (old or 0) - c1 * c2
            if v:
                acc[k] = _norm(v)
                if old is None and heap is not None:
                    heapq.heappush(heap, -k)
            else:
                acc.pop(k, None)


def _rational_sqrt(c: Coeff) -> Coeff:
    if c < 0:
        raise NotASquare("negative leading coefficient")
    c = Fraction(c)
    n, d = c.numerator, c.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise NotASquare("leading coefficient is not a rational square")
    return _norm(Fraction(rn, rd))


def divide_exact(p: MPoly, q: MPoly) -> MPoly:
    """Exact quotient p / q; raises :class:`NotDivisible` on a remainder."""
    p._check(q)
    if not q.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    ring = p.ring
    qm, qc = q.leading_term()
    qrest = [(m, c) for m, c in q.terms.items() if m != qm]
    rem = dict(p.terms)
    quo: Dict[int, Coeff] = {}
    while rem:
        m = max(rem)
        if not ring.divides(qm, m):
            raise NotDivisible("leading term not divisible")
        c = rem.pop(m)
        if isinstance(c, int) and isinstance(qc, int) and c % qc == 0:
            t = c // qc
        else:
            t = _norm(Fraction(c) / qc)
        tm = m - qm
        quo[tm] = t
        for m2, c2 in qrest:
            k = tm + m2
            v = rem.get(k, 0) - t * c2
            if v:
                rem[k] = _norm(v)
            else:
                rem.pop(k, None)
    return MPoly(ring, quo)


def det_bareiss(matrix: Sequence[Sequence[MPoly]], ring: Ring) -> MPoly:
    """Fraction-free determinant of a square matrix of polynomials.

    Pivots prefer unit constants, then the sparsest nonzero entry, which keeps
    incidence-style matrices cheap.
    """
    n = len(matrix)
    if n == 0:
        return ring.one
    a = [[x if isinstance(x, MPoly) else ring.const(x) for x in row] for row in matrix]
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                x = a[i][j]
                if not x.terms:
                    continue
                score = (0 if x.is_constant() and abs(x.constant_value()) == 1 else 1, len(x.terms))
                if best is None or score < best[0]:
                    best = (score, i, j)
        if best is None:
            return ring.zero
        _, pi, pj = best
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            sign = -sign
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = piv * a[i][j] - aik * a[k][j]
                a[i][j] = divide_exact(num, prev) if prev != 1 else num
            a[i][k] = ring.zero
        prev = piv
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


# ---------------------------------------------------------------------------
# Rendering and parsing
# ---------------------------------------------------------------------------


def _mono_str(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def to_str(p: MPoly) -> str:
    """Canonical text: graded-lex descending, explicit ``*`` and ``^``."""
    if not p.terms:
        return "0"
    names = p.ring.names
    out: List[str] = []
    for exps, c in p.items():
        mono = _mono_str(names, exps)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive-descent parser for ``+ - * / ^ ( )`` over ring variables.

    ``/`` is only allowed with a constant divisor.
    """

    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.tokens: List[Tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if not mt or mt.end() == pos:
                raise ValueError(f"cannot parse {text[pos:]!r}")
            num, ident, op = mt.groups()
            if num is not None:
                self.tokens.append(("num", num))
            elif ident is not None:
                self.tokens.append(("id", ident))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = mt.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> MPoly:
        p = self.expr()
        if self.i != len(self.tokens):
            raise ValueError(f"trailing input at token {self.peek()}")
        return p

    def expr(self) -> MPoly:
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            acc = self.term()
            if val == "-":
                acc = -acc
        else:
            acc = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self) -> MPoly:
        acc = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.power()
            elif kind == "op" and val == "/":
                self.take()
                d = self.power()
                if not d.is_constant() or not d.terms:
                    raise ValueError("only division by nonzero constants is supported")
                acc = acc * (Fraction(1) / Fraction(d.constant_value()))
            elif kind in ("id", "num") or (kind == "op" and val == "("):
                acc = acc * self.power()  # juxtaposition
            else:
                return acc

    def power(self) -> MPoly:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, e = self.take()
            if k != "num":
                raise ValueError("exponent must be an integer literal")
            base = base ** int(e)
        return base

    def atom(self) -> MPoly:
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(int(val))
        if kind == "id":
            if val not in self.ring.index:
                raise ValueError(f"unknown variable {val!r}")
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            k, v = self.take()
            if v != ")":
                raise ValueError("missing ')'")
            return p
        if kind == "op" and val == "-":
            return -self.power()
        raise ValueError(f"unexpected token {val!r}")


# ---------------------------------------------------------------------------
# Reduction modulo a prime
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class ModPoly:
    """A polynomial reduced mod a prime, compiled to a Horner evaluation tree.

    ``evaluate(columns)`` takes one integer numpy array per variable (values
    in [0, q)) and returns the polynomial's values mod q.
    """

    def __init__(self, p: MPoly, q: int, variables: Sequence[str]):
        if not is_prime(q):
            raise ValueError(f"q={q} is not a prime; only prime fields are supported")
        for c in p.terms.values():
            if isinstance(c, Fraction) and c.denominator != 1:
                raise ValueError("reduce_mod requires integer coefficients")
        self.q = q
        self.variables = list(variables)
        missing = set(p.variables()) - set(self.variables)
        if missing:
            raise ValueError(f"polynomial uses variables outside the count: {sorted(missing)}")
        pos = {n: i for i, n in enumerate(self.variables)}
        ring = p.ring
        cols = [pos[n] for n in ring.names if n in pos]
        ring_idx = [ring.index[n] for n in ring.names if n in pos]
        terms = []
        for m, c in p.terms.items():
            exps = ring.unpack(m)
            c = int(c) % q
            if c:
                terms.append((tuple((cols[k], exps[i]) for k, i in enumerate(ring_idx) if exps[i]), c))
        self.tree = _horner(terms)

    def is_zero(self) -> bool:
        return self.tree == 0

    def evaluate(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        size = len(columns[0]) if columns else 1
        out = _eval_tree(self.tree, columns, self.q)
        if isinstance(out, int):
            return np.full(size, out % self.q, dtype=np.int64)
        return out


def _horner(terms):
    """Build a nested tree: int constant, or (var, [(exp, subtree), ...], const)."""
    if not terms:
        return 0
    const = 0
    rest = []
    for mono, c in terms:
        if mono:
            rest.append((mono, c))
        else:
            const += c
    if not rest:
        return const
    counts: Dict[int, int] = {}
    for mono, _ in rest:
        for v, _e in mono:
            counts[v] = counts.get(v, 0) + 1
    pivot = max(counts, key=lambda v: (counts[v], -v))
    by_exp: Dict[int, list] = {}
    free = []
    for mono, c in rest:
        e = next((e for v, e in mono if v == pivot), 0)
        if e:
            by_exp.setdefault(e, []).append((tuple(x for x in mono if x[0] != pivot), c))
        else:
            free.append((mono, c))
    free_tree = _horner(free + ([((), const)] if const else []))
    branches = sorted((e, _horner(ts)) for e, ts in by_exp.items())
    return (pivot, branches, free_tree)


def _eval_tree(tree, columns, q):
    if isinstance(tree, int):
        return tree
    pivot, branches, free_tree = tree
    x = columns[pivot]
    acc = _eval_tree(free_tree, columns, q)
    xp = None
    last = 0
    for e, sub in branches:
        while last < e:
            xp = x if xp is None else (xp * x) % q
            last += 1
        val = _eval_tree(sub, columns, q)
        acc = (acc + val * xp) % q
    return acc


def reduce_mod(p: MPoly, q: int, variables: Sequence[str] | None = None) -> ModPoly:
    """Reduce integer coefficients mod the prime ``q`` into an evaluable form."""
    if variables is None:
        variables = p.variables()
    return ModPoly(p, q, variables)

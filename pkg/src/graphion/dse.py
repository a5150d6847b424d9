"""Truncated solver for analytic Dyson-Schwinger equations.

    G(x,L) = 1 + sgn(s) sum_k x^k G(x, d/d(-rho))^(1+sk) (e^{-L rho} - 1) F_k(rho) |_{rho=0}
    F_k(rho) = sum_{i>=-1} f_{k,i+1} rho^i

Everything lives in one polynomial ring with variables x, L, D and the f
symbols; D stands for d/d(-rho).  Since (-d/drho)^n rho^m at rho = 0 is
(-1)^n n! when n = m and 0 otherwise, D^n acting on sum_m h_m(L) rho^m gives
(-1)^n n! h_n(L).  sgn(0) is taken to be +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Union

from .poly import MPoly, Ring, split_var, substitute

Scalar = Union[int, Fraction]


def sgn(s: int) -> int:
    return -1 if s < 0 else 1


def fsym(k: int, i: int, kmax: int = 1) -> str:
    """Symbol for f_{k,i}; a single primitive uses plain f0, f1, ..."""
    return f"f{i}" if kmax == 1 else f"f{k}_{i}"


def series_ring(order: int, kmax: int = 1) -> Ring:
    names = ["x", "L", "D"]
    for k in range(1, kmax + 1):
        names += [fsym(k, i, kmax) for i in range(order + 1)]
    return Ring(names)


def _binom(w: int, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out = out * (w - i) / (i + 1)
    return out


def truncate(p: MPoly, order: int, var: str = "x") -> MPoly:
    ring = p.ring
    i = ring.index[var]
    return MPoly(ring, {m: c for m, c in p.terms.items() if ring.unpack(m)[i] <= order})


def x_coeff(p: MPoly, j: int) -> MPoly:
    return split_var(p, "x").get(j, p.ring.zero)


def L_coeff(p: MPoly, n: int) -> MPoly:
    return split_var(p, "L").get(n, p.ring.zero)


@dataclass
class MellinInput:
    """f_{k,j} for 1 <= k <= kmax and 0 <= j <= order, as polynomials in the ring."""

    ring: Ring
    order: int
    coeffs: Dict[int, List[MPoly]]

    @classmethod
    def symbolic(cls, order: int, kmax: int = 1) -> "MellinInput":
        ring = series_ring(order, kmax)
        coeffs = {k: [ring.var(fsym(k, i, kmax)) for i in range(order + 1)] for k in range(1, kmax + 1)}
        return cls(ring, order, coeffs)

    @classmethod
    def from_laurent(cls, ring: Ring, order: int, per_k: Dict[int, Sequence]) -> "MellinInput":
        """``per_k[k]`` lists f_{k,0}, f_{k,1}, ... (scalars or polynomials)."""
        coeffs = {}
        for k, seq in per_k.items():
            row = []
            for j in range(order + 1):
                c = seq[j] if j < len(seq) else 0
                row.append(c if isinstance(c, MPoly) else ring.const(c))
            coeffs[k] = row
        return cls(ring, order, coeffs)

    def f(self, k: int, j: int) -> MPoly:
        row = self.coeffs.get(k)
        if row is None:
            return self.ring.zero
        if j >= len(row):
            raise ValueError(f"Mellin input truncated below f_{{{k},{j}}}")
        return row[j]

    def h(self, k: int, m: int) -> MPoly:
        """rho^m coefficient of (e^{-L rho} - 1) F_k(rho)."""
        L = self.ring.var("L")
        out = self.ring.zero
        for a in range(1, m + 2):
            out = out + (Fraction((-1) ** a, factorial(a)) * self.f(k, m - a + 1)) * L ** a
        return out


def apply_operator(G: MPoly, w: int, h: Sequence[MPoly], order: int) -> MPoly:
    """G(x, D)^w applied to sum_m h[m] rho^m, evaluated at rho = 0, to x^order."""
    ring = G.ring
    D = ring.var("D")
    O1 = truncate(substitute(G - 1, {"L": D}), order)
    total = ring.one
    power = ring.one
    for j in range(1, order + 1):
        power = truncate(power * O1, order)
        if power.is_zero():
            break
        total = total + _binom(w, j) * power
    out = ring.zero
    for n, c in split_var(total, "D").items():
        if n >= len(h):
            raise ValueError("rho truncation too short for the operator")
        out = out + c * (Fraction((-1) ** n * factorial(n)) * h[n])
    return truncate(out, order)


@dataclass
class GreenSeries:
    G: MPoly
    s: int
    order: int

    @property
    def ring(self) -> Ring:
        return self.G.ring

    def gamma(self, n: int) -> MPoly:
        """gamma_n(x) with G = 1 + sgn(s) sum gamma_n L^n."""
        return sgn(self.s) * L_coeff(self.G, n)

    def gamma_coeff(self, n: int, j: int) -> MPoly:
        return x_coeff(self.gamma(n), j)


def solve(s: int, mellin: MellinInput, order: int) -> GreenSeries:
    """Order-by-order solution; the x^m part of the right side only needs G below x^m."""
    ring = mellin.ring
    x = ring.var("x")
    sg = sgn(s)
    G = ring.one
    for m in range(1, order + 1):
        rhs = ring.zero
        for k in sorted(mellin.coeffs):
            if k > m:
                continue
            h = [mellin.h(k, j) for j in range(m - k + 1)]
            rhs = rhs + x ** k * apply_operator(truncate(G, m - k), 1 + s * k, h, m - k)
        G = truncate(ring.one + sg * rhs, m)
    return GreenSeries(G, s, order)


def _x_derivative(p: MPoly) -> MPoly:
    """x d/dx."""
    parts = split_var(p, "x")
    x = p.ring.var("x")
    out = p.ring.zero
    for e, c in parts.items():
        out = out + e * c * x ** e
    return out


def gamma_recursion_residual(G: GreenSeries, s: Optional[int] = None) -> List[MPoly]:
    """k gamma_k - gamma_1 (sgn(s) + |s| x d/dx) gamma_{k-1} for k = 2..order."""
    s = G.s if s is None else s
    g1 = G.gamma(1)
    out = []
    for k in range(2, G.order + 1):
        prev = G.gamma(k - 1)
        rhs = g1 * (sgn(s) * prev + abs(s) * _x_derivative(prev))
        out.append(truncate(k * G.gamma(k) - rhs, G.order))
    return out


# ---------------------------------------------------------------------------
# Reduction to geometric series
# ---------------------------------------------------------------------------

# Laurent coefficients c_{-1}, c_0, c_1, ... of the standard choices of g
G_CHOICES = {
    "1/(rho(1-rho))": lambda j: 1,
    "1/(rho(1+rho))": lambda j: (-1) ** (j + 1),
}


class GeometricMismatch(ArithmeticError):
    def __init__(self, message: str, r: List[MPoly], diffs: Dict[int, MPoly]):
        super().__init__(message)
        self.r = r
        self.diffs = diffs


def _g_coefficients(g: Union[str, Sequence[Scalar]], order: int) -> List[Scalar]:
    """[c_{-1}, c_0, ..., c_{order-1}] for g(rho) = sum c_j rho^j."""
    if isinstance(g, str):
        key = g.replace(" ", "").replace("ρ", "rho")
        if key not in G_CHOICES:
            raise ValueError(f"unknown g choice {g!r}; known: {sorted(G_CHOICES)} or a coefficient list")
        return [G_CHOICES[key](j) for j in range(-1, order)]
    coeffs = list(g)
    if not coeffs or coeffs[0] != 1:
        raise ValueError("g must be 1/rho + O(1): leading coefficient 1")
    return (coeffs + [0] * (order + 1))[: order + 1]


def r_from_gamma1(G: GreenSeries) -> List[MPoly]:
    """r_i = -gamma_{1,i} - sum_j gamma_{1,j} (sgn(s) + |s|(i-j)) gamma_{1,i-j}."""
    s = G.s
    g1 = [None] + [G.gamma_coeff(1, i) for i in range(1, G.order + 1)]
    r = []
    for i in range(1, G.order + 1):
        acc = -g1[i]
        for j in range(1, i):
            acc = acc - g1[j] * (sgn(s) + abs(s) * (i - j)) * g1[i - j]
        r.append(acc)
    return r


def geometric_input(ring: Ring, order: int, r: Sequence[MPoly], g) -> MellinInput:
    c = _g_coefficients(g, order)
    return MellinInput.from_laurent(ring, order, {k: [rk * cj for cj in c] for k, rk in enumerate(r, 1)})


def reduce_to_geometric(s: int, mellin: MellinInput, g="1/(rho(1-rho))", order: int = 5,
                        verify: bool = True) -> List[MPoly]:
    """r_1..r_order; optionally check that F_k := r_k g_k reproduces gamma_1."""
    G = solve(s, mellin, order)
    r = r_from_gamma1(G)
    if verify:
        G2 = solve(s, geometric_input(mellin.ring, order, r, g), order)
        diffs = {}
        for i in range(1, order + 1):
            d = G.gamma_coeff(1, i) - G2.gamma_coeff(1, i)
            if not d.is_zero():
                diffs[i] = d
        if diffs:
            raise GeometricMismatch(f"gamma_1 differs at orders {sorted(diffs)}", r, diffs)
    return r


def fit_geometric(s: int, mellin: MellinInput, g, order: int = 5) -> List[MPoly]:
    """r_1..r_order with F_k := r_k g_k reproducing gamma_1, for any g = 1/rho + O(1).

    Order by order: gamma'_{1,i} = -r_i + (terms in r_1..r_{i-1}), so r_i is
    read off after solving with r_i = 0.
    """
    G = solve(s, mellin, order)
    ring = mellin.ring
    r: List[MPoly] = []
    for i in range(1, order + 1):
        trial = geometric_input(ring, i, r + [ring.zero], g)
        Gi = solve(s, trial, i)
        r.append(Gi.gamma_coeff(1, i) - G.gamma_coeff(1, i))
    return r


def P_series(G: GreenSeries) -> MPoly:
    """P(x) = -gamma_1(x) - 2 gamma_2(x)."""
    return truncate(-G.gamma(1) - 2 * G.gamma(2), G.order)

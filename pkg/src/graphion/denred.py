"""Denominator reduction, free factorization shapes and the change of variables.

A reduction step eliminates one edge variable a from D = alpha a^2 + beta a + gamma.
When D = (A a + B)(C a + D') the next denominator is AD' - BC, whose square
is the discriminant beta^2 - 4 alpha gamma, so the step is a square root.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .graph import GraphError, Multigraph, adjacent_three_valent_pairs, betti, three_valent_vertices, triangles
from .graphpoly import Partition, dodgson, five_invariant, forest_poly, spec
from .poly import MPoly, NotASquare, NotDivisible, coeffs_in, divide_exact, poly_sqrt, substitute

RUNNING = "running"
ENDED_ZERO = "ended_zero"
ENDED_STUCK = "ended_stuck"


@dataclass(frozen=True)
class ReductionState:
    graph: Multigraph
    reduced: Tuple[str, ...]
    poly: MPoly
    status: str = RUNNING
    note: str = ""

    @property
    def j(self) -> int:
        return len(self.reduced)

    @property
    def running(self) -> bool:
        return self.status == RUNNING


def _status_for(p: MPoly) -> str:
    return ENDED_ZERO if p.is_zero() else RUNNING


def d5(g: Multigraph, edges: Sequence[str]) -> ReductionState:
    edges = tuple(str(e) for e in edges)
    if len(edges) != 5:
        raise GraphError("d5 needs exactly five edges")
    if len(g.edges) < 5:
        raise GraphError("denominator reduction needs at least five edges")
    p = five_invariant(g, *edges)
    return ReductionState(g, edges, p, _status_for(p))


def d4_choices(g: Multigraph, i: str, j: str, k: str, l: str) -> List[MPoly]:
    """The three products of Dodgson polynomials that can serve as D^4."""
    p_ij_kl = dodgson(g, spec({i, j}, {k, l}))
    p_ik_jl = dodgson(g, spec({i, k}, {j, l}))
    p_il_jk = dodgson(g, spec({i, l}, {j, k}))
    return [p_ij_kl * p_ik_jl, p_ij_kl * p_il_jk, p_ik_jl * p_il_jk]


_PRIME = (1 << 61) - 1


def _mod_value(p: MPoly, point: Sequence[int]) -> int:
    ring = p.ring
    acc = 0
    for m, c in p.terms.items():
        t = c % _PRIME if isinstance(c, int) else c.numerator * pow(c.denominator, -1, _PRIME)
        for i, e in enumerate(ring.unpack(m)):
            if e:
                t = t * pow(point[i], e, _PRIME) % _PRIME
        acc += t
    return acc % _PRIME


def _surely_not_square(alpha: MPoly, beta: MPoly, gamma: MPoly, trials: int = 3) -> bool:
    """True when the discriminant is a non-residue at some point mod a prime."""
    rng = random.Random(len(beta.terms) * 7919 + len(alpha.terms))
    n = alpha.ring.nvars
    for _ in range(trials):
        pt = [rng.randrange(1, _PRIME) for _ in range(n)]
        a, b, c = (_mod_value(x, pt) for x in (alpha, beta, gamma))
        d = (b * b - 4 * a * c) % _PRIME
        if d and pow(d, (_PRIME - 1) // 2, _PRIME) == _PRIME - 1:
            return True
    return False


def reduce_poly(p: MPoly, var: str) -> Tuple[str, MPoly]:
    """One elimination of ``var`` from ``p``; returns (status, next polynomial)."""
    alpha, beta, gamma, higher = coeffs_in(p, var)
    if higher:
        return ENDED_STUCK, p
    if alpha.is_zero() or gamma.is_zero():
        nxt = beta
    else:
        if _surely_not_square(alpha, beta, gamma):
            return ENDED_STUCK, p
        try:
            nxt = poly_sqrt(beta * beta - 4 * alpha * gamma)
        except NotASquare:
            return ENDED_STUCK, p
    nxt = nxt.canonical_sign()
    return _status_for(nxt), nxt


def reduce_step(state: ReductionState, label: str) -> ReductionState:
    label = str(label)
    if not state.running:
        raise GraphError(f"cannot reduce from status {state.status}")
    if label in state.reduced:
        raise GraphError(f"edge {label} already reduced")
    status, nxt = reduce_poly(state.poly, state.graph.var(label))
    if status == ENDED_STUCK:
        return replace(state, status=ENDED_STUCK, note=f"no factorization in {label}")
    return ReductionState(state.graph, state.reduced + (label,), nxt, status)


def reduce_sequence(g: Multigraph, order: Sequence[str]) -> List[ReductionState]:
    order = [str(x) for x in order]
    states = [d5(g, order[:5])]
    for label in order[5:]:
        if not states[-1].running:
            break
        states.append(reduce_step(states[-1], label))
    return states


def isolated_vertices(g: Multigraph, reduced: Sequence[str]) -> List:
    rest = set(g.labels) - set(reduced)
    return [v for v in g.vertices if g.incident(v) and not any(e.label in rest for e in g.incident(v))]


def colour_count(state: ReductionState) -> int:
    """Colours of D^j with isolated vertices discarded: 7 + (j-5) - 2*(isolated)."""
    return 7 + (state.j - 5) - 2 * len(isolated_vertices(state.graph, state.reduced))


# ---------------------------------------------------------------------------
# Edge order heuristic
# ---------------------------------------------------------------------------


@dataclass
class OrderSuggestion:
    order: List[str]
    tags: List[str]
    states: List[ReductionState] = field(default_factory=list)

    @property
    def reached(self) -> int:
        return self.states[-1].j if self.states else 0


def _shape_groups(g: Multigraph) -> List[Tuple[str, Tuple[str, ...]]]:
    """Edge groups that come with guaranteed free factorizations."""
    groups: List[Tuple[str, Tuple[str, ...]]] = []
    tv = set(three_valent_vertices(g))
    for tri in triangles(g):
        groups.append(("triangle", tri))
    for v in sorted(tv, key=str):
        groups.append(("3-valent", tuple(e.label for e in g.incident(v))))
    for u, v, lab in adjacent_three_valent_pairs(g):
        shape = {e.label for e in g.incident(u)} | {e.label for e in g.incident(v)}
        groups.append(("adjacent-3-valent", tuple(sorted(shape))))
    return groups


def _free_tag(g: Multigraph, done: Sequence[str], label: str) -> Optional[str]:
    done = set(done)
    for kind, group in _shape_groups(g):
        if label in group:
            others = set(group) - {label}
            if kind in ("triangle", "3-valent") and len(others & done) >= 2:
                return kind
            if kind == "adjacent-3-valent" and len(others & done) >= 3:
                return kind
    return None


def _initial_candidates(g: Multigraph) -> List[Tuple[str, ...]]:
    labels = list(g.labels)
    seeds: List[Tuple[str, ...]] = []
    groups = [grp for kind, grp in _shape_groups(g) if kind != "adjacent-3-valent"]
    for a, b in itertools.combinations(groups, 2):
        for pa in itertools.combinations(a, 2):
            for pb in itertools.combinations(b, 2):
                base = list(dict.fromkeys(pa + pb))
                if len(base) != 4:
                    continue
                for extra in labels:
                    if extra not in base:
                        seeds.append(tuple(base + [extra]))
    seeds += list(itertools.combinations(labels, 5))[:200]
    return list(dict.fromkeys(seeds))


def suggest_order(g: Multigraph, max_seeds: int = 60) -> OrderSuggestion:
    """Greedy edge order seeded by triangles and 3-valent vertices.

    After the first five, edges forced by a shape are tried first (tagged by
    the shape); otherwise every remaining edge is tried and the first one
    giving a factorization is taken (tagged "search").  Heuristic only.
    """
    if len(g.edges) < 5:
        raise GraphError("denominator reduction needs at least five edges")
    best: Optional[OrderSuggestion] = None
    for seed in _initial_candidates(g)[:max_seeds]:
        state = d5(g, seed)
        if not state.running:
            continue
        order = list(seed)
        tags = ["seed"] * 5
        states = [state]
        while state.running and len(order) < len(g.edges):
            rest = [l for l in g.labels if l not in order]
            ranked = sorted(rest, key=lambda l: (_free_tag(g, order, l) is None, g.labels.index(l)))
            for label in ranked:
                nxt = reduce_step(state, label)
                if nxt.status != ENDED_STUCK:
                    tags.append(_free_tag(g, order, label) or "search")
                    order.append(label)
                    state = nxt
                    states.append(nxt)
                    break
            else:
                break
        cand = OrderSuggestion(order, tags, states)
        if best is None or cand.reached > best.reached:
            best = cand
        if len(order) == len(g.edges) or state.status == ENDED_ZERO:
            break
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Adjacent 3-valent vertices
# ---------------------------------------------------------------------------


def free_shape_labels(g: Multigraph, e1: str) -> Dict[str, str]:
    """For an edge joining two 3-valent vertices, name its shape edges 1..5.

    1 is the joining edge, 2 and 3 meet the lower vertex v1, 4 and 5 meet v2.
    """
    e = g.edge(e1)
    tv = set(three_valent_vertices(g))
    if e.u not in tv or e.v not in tv or e.is_loop:
        raise GraphError(f"edge {e1} does not join two 3-valent vertices")
    idx = g.vertex_index()
    v1, v2 = sorted((e.u, e.v), key=idx.__getitem__)
    at1 = [f.label for f in g.incident(v1) if f.label != e1]
    at2 = [f.label for f in g.incident(v2) if f.label != e1]
    return {"1": e1, "2": at1[0], "3": at1[1], "4": at2[0], "5": at2[1], "v1": v1, "v2": v2}


def free_d7(g: Multigraph, shape: Dict[str, str], i: str, j: str) -> Tuple[MPoly, MPoly]:
    """The two factors of D^7(1,2,3,4,5,i,j) for the adjacent 3-valent shape.

    First factor Psi^{234,4ij}_{G,15} -/+ Psi^{235,ij5}_{G,14}, second Psi^{i,j}_H
    with H the graph without v1, v2.  The relative sign of the two Dodgson
    terms depends on the matrix sign convention; it is fixed here by matching
    the directly reduced D^7.
    """
    s = {k: str(shape[k]) for k in "12345"}
    i, j = str(i), str(j)
    if len({*s.values(), i, j}) != 7:
        raise GraphError("free_d7 needs seven distinct edges")
    p1 = dodgson(g, spec({s["2"], s["3"], s["4"]}, {s["4"], i, j}, {s["1"], s["5"]}))
    p2 = dodgson(g, spec({s["2"], s["3"], s["5"]}, {i, j, s["5"]}, {s["1"], s["4"]}))
    h = g.remove_vertices([shape["v1"], shape["v2"]])
    second = dodgson(h, spec({i}, {j}))
    direct = d7_direct(g, shape, i, j)
    for first in (p1 - p2, p1 + p2):
        if (first * second).canonical_sign() == direct:
            return first.canonical_sign(), second.canonical_sign()
    raise ArithmeticError("no sign choice reproduces the reduced D^7")


def d7_direct(g: Multigraph, shape: Dict[str, str], i: str, j: str) -> MPoly:
    s = shape
    states = reduce_sequence(g, [s["2"], s["3"], s["5"], i, j, s["1"], s["4"]])
    last = states[-1]
    if last.j != 7 or last.status == ENDED_STUCK:
        raise ArithmeticError(f"direct reduction stopped at j={last.j} ({last.status})")
    return last.poly


# ---------------------------------------------------------------------------
# Change of variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CovPartition:
    g1: FrozenSet[str]
    g2: FrozenSet[str]
    g3: FrozenSet[str]
    shared: Tuple = ()
    isolated: int = 0

    @classmethod
    def build(cls, g: Multigraph, g1, g2, g3) -> "CovPartition":
        g1, g2, g3 = (frozenset(str(x) for x in part) for part in (g1, g2, g3))
        if (g1 & g2) or (g1 & g3) or (g2 & g3) or (g1 | g2 | g3) != set(g.labels):
            raise GraphError("G1, G2, G3 must partition the edges")
        sub23 = g.edge_subgraph(g2 | g3)
        if not sub23.is_connected():
            raise GraphError("G2 u G3 must be connected")
        v12 = g.edge_vertices(g1 | g2)
        v3 = g.edge_vertices(g3)
        idx = g.vertex_index()
        shared = tuple(sorted(v12 & v3, key=idx.__getitem__))
        isolated = len(g.edge_vertices(g1) - g.edge_vertices(g2 | g3))
        return cls(g1, g2, g3, shared, isolated)


@dataclass
class CovResult:
    Q: MPoly
    R: MPoly
    terms: List[Tuple[str, int]]
    value: int

    def render_terms(self) -> str:
        nums = [v for _, v in self.terms]
        signs = [1, -1, 1, -1, -1, -1, 1]
        text = str(nums[0])
        for s, v in zip(signs[1:], nums[1:]):
            text += f" {'+' if s > 0 else '-'} {v}"
        return f"{text} = {self.value}"


def cov_terms(g: Multigraph, part: CovPartition) -> List[Tuple[str, int]]:
    l23 = betti(g.edge_subgraph(part.g2 | part.g3))
    l3 = betti(g.edge_subgraph(part.g3))
    return [
        ("2l(G2uG3)", 2 * l23),
        ("2l(G3)", 2 * l3),
        ("|G1|", len(part.g1)),
        ("|G2|", len(part.g2)),
        ("2v", 2 * part.isolated),
        ("2n", 2 * len(part.shared)),
        ("3", 3),
    ]


class CovError(ArithmeticError):
    def __init__(self, message: str, terms=None):
        super().__init__(message)
        self.terms = terms


def change_of_variables(state: ReductionState, part: CovPartition) -> CovResult:
    """Scale the G2 variables by Q and divide out Q^(|G2|+1)."""
    g = state.graph
    if set(state.reduced) != set(part.g1):
        raise GraphError("the state must have reduced exactly the edges of G1")
    terms = cov_terms(g, part)
    t = [v for _, v in terms]
    value = t[0] - t[1] + t[2] - t[3] - t[4] - t[5] + t[6]
    if value < 0:
        raise CovError(f"hypothesis inequality fails ({value} < 0)", terms)
    host = g.edge_subgraph(part.g3)
    Q = forest_poly(host, Partition(tuple(frozenset([v]) for v in part.shared)))
    bindings = {g.var(l): g.ring.var(g.var(l)) * Q for l in part.g2}
    scaled = substitute(state.poly, bindings)
    try:
        R = divide_exact(scaled, Q ** (len(part.g2) + 1))
    except NotDivisible as exc:
        raise CovError("anomalous factorization: Q power does not divide", terms) from exc
    return CovResult(Q, R, terms, value)

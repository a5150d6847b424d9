"""Kirchhoff, Dodgson and spanning-forest polynomials, and the 5-invariant.

Sign convention for the expanded matrix
    M = [[Lambda, E~^T], [-E~, 0]]
rows and columns are the edges in graph order followed by the vertices in
graph order with the last vertex dropped.  An edge is oriented from its
endpoint earlier in the vertex order (+1) to the later one (-1); a loop has a
zero incidence column.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .graph import GraphError, Multigraph, Vertex, edge_var
from .poly import MPoly, coeffs_in, det_bareiss

FOREST_GUARD = 24
_CHUNK = 4096


@dataclass(frozen=True)
class EdgeSpec:
    I: FrozenSet[str] = frozenset()
    J: FrozenSet[str] = frozenset()
    K: FrozenSet[str] = frozenset()

    def __post_init__(self):
        for name in ("I", "J", "K"):
            object.__setattr__(self, name, frozenset(str(x) for x in getattr(self, name)))
        if len(self.I) != len(self.J):
            raise GraphError("|I| must equal |J|")
        if self.I & self.K or self.J & self.K:
            raise GraphError("K must be disjoint from I and J")

    def check(self, g: Multigraph) -> None:
        known = set(g.labels)
        bad = (self.I | self.J | self.K) - known
        if bad:
            raise GraphError(f"unknown edge labels {sorted(bad)}")


def spec(I: Iterable = (), J: Iterable = (), K: Iterable = ()) -> EdgeSpec:
    return EdgeSpec(frozenset(I), frozenset(J), frozenset(K))


@dataclass(frozen=True)
class Partition:
    parts: Tuple[FrozenSet[Vertex], ...]

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        if any(not p for p in parts):
            raise GraphError("partition parts must be nonempty")
        seen: set = set()
        for p in parts:
            if seen & p:
                raise GraphError("partition parts must be disjoint")
            seen |= p
        object.__setattr__(self, "parts", tuple(sorted(parts, key=lambda p: sorted(map(str, p)))))

    def check(self, g: Multigraph) -> None:
        bad = set().union(*self.parts) - set(g.vertices)
        if bad:
            raise GraphError(f"unknown vertices {sorted(map(str, bad))}")

    def __str__(self) -> str:
        return "|".join(",".join(sorted(map(str, p))) for p in self.parts)


def partition(*parts: Iterable[Vertex]) -> Partition:
    return Partition(tuple(frozenset(p) for p in parts))


# ---------------------------------------------------------------------------
# Spanning forests
# ---------------------------------------------------------------------------


def spanning_forests(g: Multigraph, parts: Sequence[FrozenSet[Vertex]]) -> Iterator[FrozenSet[str]]:
    """Edge sets of spanning forests with one tree per part, each tree holding its part."""
    idx = g.vertex_index()
    n = len(g.vertices)
    k = len(parts)
    need = n - k
    owner = [-1] * n
    for pi, p in enumerate(parts):
        for v in p:
            owner[idx[v]] = pi
    edges = [(e.label, idx[e.u], idx[e.v]) for e in g.edges if not e.is_loop]
    m = len(edges)
    if need < 0 or need > m:
        return

    # persistent union-find by copying small arrays (graphs are desk scale)
    def find(par, x):
        while par[x] != x:
            x = par[x]
        return x

    chosen: List[str] = []

    def rec(i, par, own, count):
        if count == need:
            for p in parts:
                roots = {find(par, idx[v]) for v in p}
                if len(roots) != 1:
                    return
            yield frozenset(chosen)
            return
        if m - i < need - count:
            return
        label, a, b = edges[i]
        ra, rb = find(par, a), find(par, b)
        if ra != rb and not (own[ra] >= 0 and own[rb] >= 0 and own[ra] != own[rb]):
            par2 = list(par)
            own2 = list(own)
            par2[ra] = rb
            if own2[rb] < 0:
                own2[rb] = own2[ra]
            chosen.append(label)
            yield from rec(i + 1, par2, own2, count + 1)
            chosen.pop()
        yield from rec(i + 1, par, own, count)

    yield from rec(0, list(range(n)), owner, 0)


def _complement_poly(g: Multigraph, forests: Iterable[FrozenSet[str]]) -> MPoly:
    ring = g.ring
    present = [ring.index[edge_var(e.label)] for e in g.edges]
    labels = g.labels
    terms: Dict[int, int] = {}
    for f in forests:
        vec = [0] * ring.nvars
        for lab, i in zip(labels, present):
            if lab not in f:
                vec[i] += 1
        m = ring.pack(vec)
        terms[m] = terms.get(m, 0) + 1
    return MPoly(ring, terms)


def forest_poly(g: Multigraph, P: Partition, guard: int = FOREST_GUARD) -> MPoly:
    """Sum over spanning forests consistent with ``P`` of the complement monomials."""
    P.check(g)
    if len(g.edges) > guard:
        raise GraphError(f"forest_poly guard: {len(g.edges)} edges > {guard}")
    return _complement_poly(g, spanning_forests(g, P.parts))


def spanning_trees(g: Multigraph) -> List[FrozenSet[str]]:
    if not g.vertices:
        return [frozenset()]
    return list(spanning_forests(g, [frozenset([g.vertices[0]])]))


def kirchhoff(g: Multigraph) -> MPoly:
    """Psi_G by spanning-tree enumeration; zero for a disconnected graph."""
    if not g.is_connected():
        return g.ring.zero
    return _complement_poly(g, spanning_trees(g))


# ---------------------------------------------------------------------------
# Expanded matrix and Dodgson polynomials
# ---------------------------------------------------------------------------


def incidence(g: Multigraph) -> np.ndarray:
    """Signed incidence matrix (vertices x edges) under the orientation convention."""
    idx = g.vertex_index()
    inc = np.zeros((len(g.vertices), len(g.edges)), dtype=np.int64)
    for j, e in enumerate(g.edges):
        if e.is_loop:
            continue
        a, b = sorted((idx[e.u], idx[e.v]))
        inc[a, j] = 1
        inc[b, j] = -1
    return inc


def _layout(g: Multigraph, s: EdgeSpec):
    labels = g.labels
    nv = len(g.vertices) - 1
    row_edges = [i for i, l in enumerate(labels) if l not in s.I]
    col_edges = [i for i, l in enumerate(labels) if l not in s.J]
    inc = incidence(g)[:nv] if nv >= 0 else np.zeros((0, len(labels)), dtype=np.int64)
    nr = len(row_edges) + nv
    nc = len(col_edges) + nv
    base = np.zeros((nr, nc), dtype=np.int64)
    for r, ei in enumerate(row_edges):
        base[r, len(col_edges):] = inc[:, ei]
    for c, ei in enumerate(col_edges):
        base[len(row_edges):, c] = -inc[:, ei]
    rpos = {labels[ei]: r for r, ei in enumerate(row_edges)}
    cpos = {labels[ei]: c for c, ei in enumerate(col_edges)}
    return base, rpos, cpos


def cofactor_sign(g: Multigraph, s: EdgeSpec, label: str) -> int:
    """Sign of the a_l cofactor in M(I,J), l free.

    With it the contraction-deletion identity is exact:
    Psi^{I,J}_K = sign * a_l * Psi^{Il,Jl}_K + Psi^{I,J}_{K,l}.
    """
    s.check(g)
    label = str(label)
    if label in s.I or label in s.J or label in s.K:
        raise GraphError(f"edge {label} is not free: it lies in I, J or K")
    _, rpos, cpos = _layout(g, s)
    return -1 if (rpos[label] + cpos[label]) % 2 else 1


def expanded_matrix(g: Multigraph, s: EdgeSpec = EdgeSpec()) -> List[List[MPoly]]:
    """M(I,J) with K-variables set to zero, as a matrix of polynomials."""
    s.check(g)
    base, rpos, cpos = _layout(g, s)
    ring = g.ring
    mat = [[ring.const(int(x)) for x in row] for row in base]
    for lab, r in rpos.items():
        if lab in cpos and lab not in s.K:
            mat[r][cpos[lab]] = ring.var(edge_var(lab))
    return mat


def kirchhoff_matrix(g: Multigraph) -> MPoly:
    """Psi_G as the determinant of the expanded matrix (fraction-free elimination)."""
    if not g.is_connected():
        return g.ring.zero
    return det_bareiss(expanded_matrix(g), g.ring)


def dodgson_bareiss(g: Multigraph, s: EdgeSpec) -> MPoly:
    """Dodgson polynomial by symbolic determinant; slower reference route."""
    return det_bareiss(expanded_matrix(g, s), g.ring)


def _batched_det(mats: np.ndarray) -> np.ndarray:
    if mats.shape[1] == 0:
        return np.ones(mats.shape[0], dtype=np.int64)
    d = np.linalg.det(mats.astype(np.float64))
    r = np.rint(d)
    if np.any(np.abs(d - r) > 1e-6):
        raise ArithmeticError("non-integral minor in Dodgson evaluation")
    return r.astype(np.int64)


def _dodgson_terms(g: Multigraph, s: EdgeSpec) -> Tuple[List[str], List[Tuple[FrozenSet[str], int]]]:
    """Nonzero (variable set, coefficient) pairs of the Dodgson polynomial."""
    base, rpos, cpos = _layout(g, s)
    free = [l for l in g.labels if l not in s.I and l not in s.J and l not in s.K]
    d = len(g.edges) - len(s.I) - (len(g.vertices) - 1)
    out: List[Tuple[FrozenSet[str], int]] = []
    if d < 0 or d > len(free):
        return free, out
    rows = np.array([rpos[l] for l in free], dtype=np.int64)
    cols = np.array([cpos[l] for l in free], dtype=np.int64)
    combos = itertools.combinations(range(len(free)), d)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        sel = np.array(chunk, dtype=np.int64).reshape(len(chunk), d)
        mats = np.broadcast_to(base, (len(chunk),) + base.shape).copy()
        if d:
            rr = rows[sel]
            cc = cols[sel]
            b = np.arange(len(chunk))[:, None]
            mats[b, rr, :] = 0
            mats[b, rr, cc] = 1
        dets = _batched_det(mats)
        for t in np.nonzero(dets)[0]:
            out.append((frozenset(free[i] for i in sel[t]), int(dets[t])))
    return free, out


def dodgson(g: Multigraph, s: EdgeSpec = EdgeSpec()) -> MPoly:
    """Psi^{I,J}_{G,K}: det M(I,J) with a_k = 0 for k in K.

    The determinant is multilinear in the edge variables, so the coefficient
    of a_S is the integer minor obtained by replacing the rows of S with unit
    rows; those minors are evaluated in numpy batches.
    """
    s.check(g)
    ring = g.ring
    _, terms = _dodgson_terms(g, s)
    out: Dict[int, int] = {}
    for varset, c in terms:
        vec = [0] * ring.nvars
        for l in varset:
            vec[ring.index[edge_var(l)]] = 1
        out[ring.pack(vec)] = c
    return MPoly(ring, out)


# ---------------------------------------------------------------------------
# Dodgson polynomials as signed sums of forest polynomials
# ---------------------------------------------------------------------------


def _set_partitions(items: List) -> Iterator[List[List]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def _is_tree_on_parts(g: Multigraph, parts: Sequence[FrozenSet[Vertex]], labels: Iterable[str]) -> bool:
    where = {v: i for i, p in enumerate(parts) for v in p}
    parent = list(range(len(parts)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    count = 0
    for l in labels:
        e = g.edge(l)
        a, b = find(where[e.u]), find(where[e.v])
        if a == b:
            return False
        parent[a] = b
        count += 1
    return count == len(parts) - 1


def dodgson_as_forest_sum(g: Multigraph, s: EdgeSpec) -> List[Tuple[int, Partition]]:
    """Signed partitions P with Psi^{I,J}_{G,K} = sum sign * Phi^P_{G \\ (I u J u K)}.

    P ranges over partitions of the endpoints of (I u J u K) minus (I n J)
    such that (J u K) \\ I and (I u K) \\ J each form a spanning tree on the
    parts.  Each sign is read off from one representative forest.
    """
    s.check(g)
    support = (s.I | s.J | s.K) - (s.I & s.J)
    verts = sorted(g.edge_vertices(support), key=g.vertex_index().__getitem__)
    host = g.delete_edges(sorted(s.I | s.J | s.K))
    base, rpos, cpos = _layout(g, s)
    free = [l for l in g.labels if l not in s.I and l not in s.J and l not in s.K]
    out: List[Tuple[int, Partition]] = []
    candidates = _set_partitions(verts) if verts else iter([[[g.vertices[0]]]])
    for blocks in candidates:
        parts = [frozenset(b) for b in blocks]
        if not _is_tree_on_parts(g, parts, sorted((s.J | s.K) - s.I)):
            continue
        if not _is_tree_on_parts(g, parts, sorted((s.I | s.K) - s.J)):
            continue
        forest = next(spanning_forests(host, parts), None)
        if forest is None:
            continue
        chosen = [l for l in free if l not in forest]
        mat = base.copy()
        for l in chosen:
            mat[rpos[l], :] = 0
            mat[rpos[l], cpos[l]] = 1
        sign = int(_batched_det(mat[None])[0])
        if sign == 0:
            raise ArithmeticError(f"partition {parts} has a vanishing representative minor")
        out.append((sign, Partition(tuple(parts))))
    return out


def forest_sum_value(g: Multigraph, s: EdgeSpec) -> MPoly:
    host = g.delete_edges(sorted(s.I | s.J | s.K))
    total = g.ring.zero
    for sign, P in dodgson_as_forest_sum(g, s):
        total = total + sign * _complement_poly(host, spanning_forests(host, P.parts))
    return total


# ---------------------------------------------------------------------------
# 5-invariant
# ---------------------------------------------------------------------------


def five_invariant(g: Multigraph, i: str, j: str, k: str, l: str, m: str) -> MPoly:
    """5Psi_G(i,j,k,l,m) with positive leading coefficient.

    Psi^{ij,kl} = A a_m + B and Psi^{ik,jl} = C a_m + D; the invariant is AD - BC.
    """
    labs = [str(x) for x in (i, j, k, l, m)]
    if len(set(labs)) != 5:
        raise GraphError("five_invariant needs five distinct edges")
    i, j, k, l, m = labs
    var = g.var(m)
    p1 = dodgson(g, spec({i, j}, {k, l}))
    p2 = dodgson(g, spec({i, k}, {j, l}))
    a, b = _linear_parts(p1, var)
    c, d = _linear_parts(p2, var)
    return (a * d - b * c).canonical_sign()


def _linear_parts(p: MPoly, var: str) -> Tuple[MPoly, MPoly]:
    alpha, beta, gamma, higher = coeffs_in(p, var)
    if higher or alpha:
        raise ArithmeticError(f"polynomial not linear in {var}")
    return beta, gamma

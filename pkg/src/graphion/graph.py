"""Labelled multigraphs: minors, connectivity, primitivity and width measures.

Vertices are kept in a fixed order (``Multigraph.vertices``); that order is
the "vertex id" used by the sign conventions in :mod:`graphion.graphpoly`.
Edges are ``(label, u, v)`` triples, parallel edges and self-loops allowed.
The edge order fixes the variable order of the edge ring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np

from .poly import Ring

Vertex = Hashable


class GraphError(ValueError):
    """Bad graph input (unknown label, disconnected where connected is required...)."""


class GuardExceeded(RuntimeError):
    """An exponential search was asked to run beyond its configured size guard."""


class Edge(NamedTuple):
    label: str
    u: Vertex
    v: Vertex

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


def edge_var(label: str) -> str:
    """Variable name of an edge: ``a<label>`` for numeric labels, else the label."""
    return f"a{label}" if label[0].isdigit() else label


@dataclass(frozen=True)
class Multigraph:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]
    ring: Ring = field(compare=False)
    name: str = field(default="", compare=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple], vertices: Optional[Iterable[Vertex]] = None,
                   ring: Optional[Ring] = None, name: str = "") -> "Multigraph":
        es = []
        for item in edges:
            label, u, v = item
            es.append(Edge(str(label), u, v))
        labels = [e.label for e in es]
        if len(set(labels)) != len(labels):
            raise GraphError("edge labels must be unique")
        verts: List[Vertex] = list(vertices) if vertices is not None else []
        seen = set(verts)
        for e in es:
            for x in (e.u, e.v):
                if x not in seen:
                    seen.add(x)
                    verts.append(x)
        if vertices is None and all(isinstance(x, int) for x in verts):
            verts.sort()
        if ring is None:
            ring = Ring(edge_var(l) for l in labels)
        return cls(tuple(verts), tuple(es), ring, name)

    # -- basic queries -----------------------------------------------------

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.edges)

    def edge(self, label: str) -> Edge:
        for e in self.edges:
            if e.label == label:
                return e
        raise GraphError(f"unknown edge label {label!r}")

    def var(self, label: str) -> str:
        self.edge(label)
        return edge_var(label)

    def vertex_index(self) -> Dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def degree(self, v: Vertex) -> int:
        return sum((e.u == v) + (e.v == v) for e in self.edges)

    def incident(self, v: Vertex) -> List[Edge]:
        return [e for e in self.edges if v in (e.u, e.v)]

    def neighbours(self, v: Vertex) -> Set[Vertex]:
        out = set()
        for e in self.edges:
            if e.u == v:
                out.add(e.v)
            if e.v == v:
                out.add(e.u)
        out.discard(v)
        return out

    def edge_vertices(self, labels: Iterable[str]) -> Set[Vertex]:
        out: Set[Vertex] = set()
        for l in labels:
            e = self.edge(l)
            out.update((e.u, e.v))
        return out

    def components(self) -> List[Set[Vertex]]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.u), find(e.v)
            if a != b:
                parent[a] = b
        comps: Dict[Vertex, Set[Vertex]] = {}
        for v in self.vertices:
            comps.setdefault(find(v), set()).add(v)
        return list(comps.values())

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    # -- minors ------------------------------------------------------------

    def delete(self, label: str) -> "Multigraph":
        self.edge(label)
        return Multigraph(self.vertices, tuple(e for e in self.edges if e.label != label),
                          self.ring, self.name)

    def contract(self, label: str) -> "Multigraph":
        e = self.edge(label)
        if e.is_loop:
            return self.delete(label)
        idx = self.vertex_index()
        keep, gone = (e.u, e.v) if idx[e.u] < idx[e.v] else (e.v, e.u)
        edges = []
        for f in self.edges:
            if f.label == label:
                continue
            u = keep if f.u == gone else f.u
            v = keep if f.v == gone else f.v
            edges.append(Edge(f.label, u, v))
        verts = tuple(x for x in self.vertices if x != gone)
        return Multigraph(verts, tuple(edges), self.ring, self.name)

    def delete_edges(self, labels: Iterable[str]) -> "Multigraph":
        g = self
        for l in labels:
            g = g.delete(l)
        return g

    def contract_edges(self, labels: Iterable[str]) -> "Multigraph":
        g = self
        for l in labels:
            g = g.contract(l)
        return g

    def edge_subgraph(self, labels: Iterable[str], keep_vertices: bool = False) -> "Multigraph":
        labels = set(labels)
        es = tuple(e for e in self.edges if e.label in labels)
        if keep_vertices:
            verts = self.vertices
        else:
            used = {x for e in es for x in (e.u, e.v)}
            verts = tuple(v for v in self.vertices if v in used)
        return Multigraph(verts, es, self.ring, self.name)

    def remove_vertices(self, vs: Iterable[Vertex]) -> "Multigraph":
        vs = set(vs)
        return Multigraph(tuple(v for v in self.vertices if v not in vs),
                          tuple(e for e in self.edges if e.u not in vs and e.v not in vs),
                          self.ring, self.name)

    # -- text format -------------------------------------------------------

    def to_text(self, header: Sequence[str] = ()) -> str:
        lines = [f"# {h}" for h in header]
        lines += [f"v {v}" for v in self.vertices]
        lines += [f"e {e.label} {e.u} {e.v}" for e in self.edges]
        return "\n".join(lines) + "\n"


def parse_graph(text: str, name: str = "") -> Multigraph:
    """Parse the line format ``v <id>`` / ``e <label> <u> <v>`` / ``# comment``."""
    verts: List[str] = []
    edges: List[Tuple[str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 2:
            verts.append(parts[1])
        elif parts[0] == "e" and len(parts) == 4:
            edges.append((parts[1], parts[2], parts[3]))
        else:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}")
    tokens = verts + [x for _, u, v in edges for x in (u, v)]
    if tokens and all(t.lstrip("-").isdigit() for t in tokens):
        conv = int
    else:
        conv = str
    vlist = [conv(v) for v in verts]
    for _, u, v in edges:
        for x in (conv(u), conv(v)):
            if x not in vlist:
                vlist.append(x)
    if conv is int:
        vlist.sort()
    return Multigraph.from_edges([(l, conv(u), conv(v)) for l, u, v in edges], vlist, name=name)


def load_graph(path) -> Multigraph:
    """Read a graph file; a bare name such as ``gbs`` falls back to the bundled data."""
    path = Path(path)
    if not path.exists() and path.suffix == "" and path.parent == Path("."):
        bundled = resources.files("graphion").joinpath("data", f"{path.name}.graph")
        if bundled.is_file():
            return parse_graph(bundled.read_text(), name=path.name)
    return parse_graph(path.read_text(), name=path.stem)


# ---------------------------------------------------------------------------
# Stock graphs
# ---------------------------------------------------------------------------


def hat_graph() -> Multigraph:
    """c, d parallel between u and v; a: u-w; b: v-w."""
    return Multigraph.from_edges([("a", "u", "w"), ("b", "v", "w"), ("c", "u", "v"), ("d", "u", "v")],
                                 ["u", "v", "w"], name="hat")


def cycle_graph(n: int, labels: Optional[Sequence[str]] = None) -> Multigraph:
    labels = labels or [str(i + 1) for i in range(n)]
    return Multigraph.from_edges([(labels[i], i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def triangle() -> Multigraph:
    return Multigraph.from_edges([("a", 0, 1), ("b", 1, 2), ("c", 0, 2)], name="triangle")


def complete_graph(n: int) -> Multigraph:
    edges = [(str(k + 1), u, v) for k, (u, v) in enumerate(itertools.combinations(range(n), 2))]
    return Multigraph.from_edges(edges, range(n), name=f"K{n}")


def complete_bipartite(m: int, n: int) -> Multigraph:
    edges = [(str(k + 1), u, m + v) for k, (u, v) in enumerate(itertools.product(range(m), range(n)))]
    return Multigraph.from_edges(edges, range(m + n), name=f"K{m},{n}")


def decomplete(k: Multigraph, v: Vertex) -> Multigraph:
    """Remove vertex ``v`` (and its edges) from a completed graph."""
    g = k.remove_vertices([v])
    return Multigraph.from_edges(g.edges, g.vertices, name=f"{k.name}-{v}")


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def betti(g: Multigraph) -> int:
    return len(g.edges) - len(g.vertices) + len(g.components())


def delete(g: Multigraph, label: str) -> Multigraph:
    return g.delete(label)


def contract(g: Multigraph, label: str) -> Multigraph:
    return g.contract(label)


def _induced_edge_count(g: Multigraph, verts: FrozenSet[Vertex]) -> Tuple[int, bool]:
    es = [e for e in g.edges if e.u in verts and e.v in verts]
    sub = Multigraph.from_edges(es, [v for v in g.vertices if v in verts], ring=g.ring)
    return len(es), sub.is_connected()


def primitivity_witness(g: Multigraph) -> Optional[Tuple[FrozenSet[Vertex], int]]:
    """A connected proper subgraph with |E| <= 2*loops, or None.

    For a fixed vertex set the induced subgraph maximises |E| - 2*loops
    violations, so it is enough to scan vertex subsets; the full vertex set
    is scanned with one non-bridge edge removed.
    """
    if not g.is_connected():
        raise GraphError("is_primitive_4point needs a connected graph")
    nv = len(g.vertices)
    for size in range(1, nv + 1):
        for vs in itertools.combinations(g.vertices, size):
            vs = frozenset(vs)
            ne, conn = _induced_edge_count(g, vs)
            if ne == 0 or not conn:
                continue
            if size == nv:
                # proper: drop one edge that keeps the subgraph connected
                if not any(g.delete(e.label).is_connected() for e in g.edges) or ne < 2:
                    continue
                ne -= 1
            if 2 * size - 2 - ne <= 0:
                return vs, ne
    return None


def is_primitive_4point(g: Multigraph) -> bool:
    """Every proper subgraph gamma with an edge has |E(gamma)| > 2 loops(gamma)."""
    return primitivity_witness(g) is None


def internally_k_edge_connected(h: Multigraph, k: int) -> bool:
    """For every edge set S with |S| <= k-1, H\\S is connected or splits off one vertex.

    Equivalently: H is connected up to isolated vertices being allowed only
    when H is a single vertex plus the rest, and every vertex bipartition
    with at least two vertices on each side is crossed by at least k edges.
    """
    verts = list(h.vertices)
    n = len(verts)
    if n <= 3 or n > 24:
        return _internally_k_edge_connected_brute(h, k)
    comps = h.components()
    if len(comps) > 2 or (len(comps) == 2 and min(len(c) for c in comps) > 1):
        return False
    idx = {v: i for i, v in enumerate(verts)}
    ends = [(1 << idx[e.u], 1 << idx[e.v]) for e in h.edges if e.u != e.v]
    # fix vertex 0 on the inside so each bipartition is seen once
    for size in range(2, n - 1):
        for rest in itertools.combinations(range(1, n), size - 1):
            mask = 1
            for i in rest:
                mask |= 1 << i
            cut = 0
            for a, b in ends:
                if bool(mask & a) != bool(mask & b):
                    cut += 1
                    if cut >= k:
                        break
            if cut < k:
                return False
    return True


def _internally_k_edge_connected_brute(h: Multigraph, k: int) -> bool:
    labels = h.labels
    for size in range(0, min(k - 1, len(labels)) + 1):
        for s in itertools.combinations(range(len(labels)), size):
            keep = set(range(len(labels))) - set(s)
            sub = Multigraph(h.vertices, tuple(h.edges[i] for i in sorted(keep)), h.ring)
            comps = sub.components()
            if len(comps) == 1:
                continue
            if len(comps) == 2 and min(len(c) for c in comps) == 1:
                continue
            return False
    return True


def is_four_regular(k: Multigraph) -> bool:
    return all(k.degree(v) == 4 for v in k.vertices)


# ---------------------------------------------------------------------------
# Widths
# ---------------------------------------------------------------------------


def _popcount(arr: np.ndarray) -> np.ndarray:
    out = np.zeros(arr.shape, dtype=np.int64)
    a = arr.copy()
    while a.any():
        out += a & 1
        a >>= 1
    return out


def vertex_width(g: Multigraph, guard: int = 14) -> Tuple[int, List[str]]:
    """Exact vertex width and an edge order achieving it.

    Width of an order is max_i |V(first i edges) & V(remaining edges)|.
    Dynamic programme over used-edge subsets (2^|E| states); parallel edges
    are interchangeable and explored in one fixed order only.
    """
    m = len(g.edges)
    if m < 1:
        raise GraphError("vertex width needs at least one edge")
    if m > guard:
        raise GuardExceeded(f"vertex width guard: {m} edges > {guard}")
    idx = g.vertex_index()
    vmask = np.array([(1 << idx[e.u]) | (1 << idx[e.v]) for e in g.edges], dtype=np.int64)
    full = (1 << m) - 1
    size = 1 << m
    masks = np.arange(size, dtype=np.int64)
    # V(L) for every edge subset L, built one edge bit at a time
    vl = np.zeros(size, dtype=np.int64)
    for i in range(m):
        bit = 1 << i
        sel = (masks & bit) != 0
        vl[sel] |= vmask[i]
    vr = vl[full ^ masks]
    cost = _popcount(vl & vr)
    # parallel-edge classes: edge i may only be used after its class predecessor
    prev_in_class = [-1] * m
    seen: Dict[FrozenSet, int] = {}
    for i, e in enumerate(g.edges):
        key = frozenset((e.u, e.v))
        if key in seen:
            prev_in_class[i] = seen[key]
        seen[key] = i
    pop = _popcount(masks)
    best = np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
    best[full] = cost[full]
    for layer in range(m - 1, -1, -1):
        layer_masks = masks[pop == layer]
        acc = np.full(len(layer_masks), np.iinfo(np.int64).max, dtype=np.int64)
        for i in range(m):
            bit = 1 << i
            ok = (layer_masks & bit) == 0
            if prev_in_class[i] >= 0:
                ok &= (layer_masks & (1 << prev_in_class[i])) != 0
            cand = np.where(ok, best[layer_masks | bit], np.iinfo(np.int64).max)
            np.minimum(acc, cand, out=acc)
        best[layer_masks] = np.maximum(cost[layer_masks], acc)
    # witness order
    order: List[str] = []
    cur = 0
    while cur != full:
        target = best[cur]
        for i in range(m):
            bit = 1 << i
            if cur & bit:
                continue
            if prev_in_class[i] >= 0 and not cur & (1 << prev_in_class[i]):
                continue
            if max(cost[cur], best[cur | bit]) == target:
                order.append(g.edges[i].label)
                cur |= bit
                break
    return int(best[0]), order


def order_width(g: Multigraph, order: Sequence[str]) -> int:
    """max_i |V(L_i) & V(R_i)| for a given total edge order."""
    width = 0
    for i in range(len(order) + 1):
        left = g.edge_vertices(order[:i])
        right = g.edge_vertices(order[i:])
        width = max(width, len(left & right))
    return width


def path_width(g: Multigraph, guard: int = 10) -> Tuple[int, List[Vertex]]:
    """Exact path width via the vertex separation number over vertex orders."""
    n = len(g.vertices)
    if n > guard:
        raise GuardExceeded(f"path width guard: {n} vertices > {guard}")
    if n == 0:
        return 0, []
    idx = g.vertex_index()
    nbr = [0] * n
    for e in g.edges:
        a, b = idx[e.u], idx[e.v]
        if a != b:
            nbr[a] |= 1 << b
            nbr[b] |= 1 << a
    full = (1 << n) - 1
    boundary = [0] * (1 << n)
    for s in range(1, 1 << n):
        cnt = 0
        for i in range(n):
            if s >> i & 1 and nbr[i] & ~s & full:
                cnt += 1
        boundary[s] = cnt
    best = [0] * (1 << n)
    choice = [-1] * (1 << n)
    for s in range(1, 1 << n):
        val = None
        for i in range(n):
            if s >> i & 1:
                cand = best[s & ~(1 << i)]
                if val is None or cand < val:
                    val, choice[s] = cand, i
        best[s] = max(boundary[s], val)
    order = []
    s = full
    while s:
        i = choice[s]
        order.append(g.vertices[i])
        s &= ~(1 << i)
    order.reverse()
    return best[full], order


def path_decomposition_width(g: Multigraph, bags: Sequence[Iterable[Vertex]]) -> int:
    """Validate a path decomposition and return its width."""
    bags = [set(b) for b in bags]
    for e in g.edges:
        if not any(e.u in b and e.v in b for b in bags):
            raise GraphError(f"edge {e.label} not covered")
    for v in g.vertices:
        hits = [i for i, b in enumerate(bags) if v in b]
        if hits and hits != list(range(hits[0], hits[-1] + 1)):
            raise GraphError(f"vertex {v} bags not contiguous")
    return max(len(b) for b in bags) - 1


# ---------------------------------------------------------------------------
# Local shapes used by the reduction heuristics
# ---------------------------------------------------------------------------


def triangles(g: Multigraph) -> List[Tuple[str, str, str]]:
    out = []
    es = [e for e in g.edges if not e.is_loop]
    for a, b, c in itertools.combinations(es, 3):
        vs = {a.u, a.v, b.u, b.v, c.u, c.v}
        if len(vs) != 3:
            continue
        pairs = {frozenset((x.u, x.v)) for x in (a, b, c)}
        if len(pairs) == 3:
            out.append((a.label, b.label, c.label))
    return out


def three_valent_vertices(g: Multigraph) -> List[Vertex]:
    return [v for v in g.vertices if g.degree(v) == 3 and not any(e.is_loop for e in g.incident(v))]


def adjacent_three_valent_pairs(g: Multigraph) -> List[Tuple[Vertex, Vertex, str]]:
    tv = set(three_valent_vertices(g))
    out = []
    for e in g.edges:
        if e.u in tv and e.v in tv and e.u != e.v:
            out.append((e.u, e.v, e.label))
    return out

"""Immutable simple graphs on integer labels and the surgeries used by the
recursions: deletion, neighbourhood saturation, components, cut vertices."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import BeiError, UnknownVertex


def _edge(a: int, b: int) -> tuple:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: frozenset

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable = ()):
        es = set()
        vs = set(vertices)
        for a, b in edges:
            if a == b:
                raise BeiError(f"loop at vertex {a}")
            es.add(_edge(a, b))
            vs.update((a, b))
        object.__setattr__(self, "vertices", tuple(sorted(vs)))
        object.__setattr__(self, "edges", frozenset(es))

    def __len__(self):
        return len(self.vertices)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def degree(self, v: int) -> int:
        return len(neighbors(self, v))

    def serialize(self) -> str:
        vs = ",".join(map(str, self.vertices))
        es = ",".join(f"({a},{b})" for a, b in self.sorted_edges())
        return f"V:{vs};E:{es}"

    @classmethod
    def parse(cls, text: str) -> "Graph":
        m = re.fullmatch(r"V:([0-9,\-]*);E:(.*)", text.strip())
        if not m:
            raise BeiError(f"not a graph serialization: {text!r}")
        vs = [int(x) for x in m.group(1).split(",") if x]
        es = [(int(a), int(b)) for a, b in re.findall(r"\((-?\d+),(-?\d+)\)", m.group(2))]
        return cls(vs, es)

    def relabel(self, mapping: dict) -> "Graph":
        return Graph((mapping[v] for v in self.vertices),
                     ((mapping[a], mapping[b]) for a, b in self.edges))

    def dense_labels(self) -> dict:
        """Map from labels to 1..|V| in increasing label order."""
        return {v: i + 1 for i, v in enumerate(self.vertices)}

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        return Graph(keep, (e for e in self.edges if e[0] in keep and e[1] in keep))


def _check(g: Graph, vs) -> None:
    have = set(g.vertices)
    for v in vs:
        if v not in have:
            raise UnknownVertex(f"vertex {v} not in graph", vertex=v)


def neighbors(g: Graph, v: int, closed: bool = False) -> frozenset:
    _check(g, [v])
    out = {b if a == v else a for a, b in g.edges if v in (a, b)}
    if closed:
        out.add(v)
    return frozenset(out)


def delete_vertices(g: Graph, A: Iterable[int]) -> Graph:
    A = set(A)
    _check(g, A)
    return g.induced(v for v in g.vertices if v not in A)


def saturate_neighborhood(g: Graph, v: int) -> Graph:
    nb = sorted(neighbors(g, v))
    extra = [(a, b) for i, a in enumerate(nb) for b in nb[i + 1:]]
    return Graph(g.vertices, list(g.edges) + extra)


def connected_components(g: Graph) -> list:
    adj = g.adjacency()
    seen = set()
    comps = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def num_components(g: Graph) -> int:
    return len(connected_components(g))


def leaves(g: Graph) -> frozenset:
    adj = g.adjacency()
    return frozenset(v for v in g.vertices if len(adj[v]) == 1)


def is_internal(g: Graph, v: int) -> bool:
    return len(neighbors(g, v)) >= 2


def is_cut_vertex(g: Graph, v: int) -> bool:
    _check(g, [v])
    return num_components(delete_vertices(g, [v])) > num_components(g)


def is_bipartite(g: Graph):
    """Two-colouring (side1, side2) or None; each component's minimal label is on side 1."""
    adj = g.adjacency()
    colour = {}
    for comp in connected_components(g):
        start = min(comp)
        colour[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return None
    side1 = frozenset(v for v, c in colour.items() if c == 0)
    side2 = frozenset(v for v, c in colour.items() if c == 1)
    return side1, side2


def clique_number(g: Graph) -> int:
    """Size of a largest clique (exhaustive; graphs here are small)."""
    adj = g.adjacency()
    best = 1 if g.vertices else 0

    def grow(clique_size, cands):
        nonlocal best
        if clique_size > best:
            best = clique_size
        if clique_size + len(cands) <= best:
            return
        cands = sorted(cands)
        for i, v in enumerate(cands):
            grow(clique_size + 1, set(cands[i + 1:]) & adj[v])

    grow(0, set(g.vertices))
    return best


def complete_graph(vertices: Iterable[int]) -> Graph:
    vs = sorted(set(vertices))
    return Graph(vs, [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]])


def path_order(g: Graph):
    """Vertices of g in path order if g is a path P_t (t >= 1), else None."""
    if not g.vertices:
        return None
    adj = g.adjacency()
    if len(g.edges) != len(g) - 1 or any(len(s) > 2 for s in adj.values()):
        return None
    ends = [v for v in g.vertices if len(adj[v]) <= 1]
    start = ends[0]
    order, prev = [start], None
    while len(order) < len(g):
        nxt = [w for w in adj[order[-1]] if w != prev]
        if not nxt:
            return None
        prev = order[-1]
        order.append(nxt[0])
    return tuple(order)


def is_complete(g: Graph) -> bool:
    n = len(g)
    return len(g.edges) == n * (n - 1) // 2

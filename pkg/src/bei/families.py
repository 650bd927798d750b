"""Graph families (complete graphs, paths, F_p, fan graphs) and the marked-leaf
composition operations circ and star.

A fan F_k^W(K_n) is K_n on 1..n with, for every part W_i = (w_i1, ..., w_ir)
and every j, a clique K_{a_ij} meeting K_n in the prefix {w_i1..w_ij}.  The
h_ij = a_ij - j new vertices of each branch get fresh labels n+1, n+2, ... in
(i, j, local) order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import CompositionError, InvalidSpec
from .graph import Graph, complete_graph, leaves, neighbors


@dataclass(frozen=True)
class FanSpec:
    n: int
    partition: tuple = ()
    branch_sizes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "partition", tuple(tuple(w) for w in self.partition))
        object.__setattr__(self, "branch_sizes", tuple(tuple(a) for a in self.branch_sizes))
        self.validate()

    def validate(self):
        if self.n < 2:
            raise InvalidSpec("fan base clique needs n >= 2", kind="invalid-partition")
        if len(self.partition) != len(self.branch_sizes):
            raise InvalidSpec("one branch-size list per part is required")
        seen = set()
        for part, sizes in zip(self.partition, self.branch_sizes):
            if not part:
                raise InvalidSpec("partition parts must be nonempty")
            for w in part:
                if not 1 <= w <= self.n or w in seen:
                    raise InvalidSpec(f"invalid partition element {w}")
                seen.add(w)
            if len(sizes) != len(part):
                raise InvalidSpec("|a_i| must equal |W_i|")
            for j, a in enumerate(sizes, start=1):
                if a <= j:
                    raise InvalidSpec(f"branch size a={a} must exceed its index {j}")

    @property
    def k(self) -> int:
        return len(self.partition)

    @property
    def W(self) -> frozenset:
        return frozenset(w for part in self.partition for w in part)

    @property
    def h(self) -> tuple:
        return tuple(tuple(a - j for j, a in enumerate(sizes, start=1))
                     for sizes in self.branch_sizes)

    @property
    def delta(self) -> int:
        return sum(1 for row in self.h for x in row if x >= 2)

    @property
    def pure(self) -> bool:
        return all(x == 1 for row in self.h for x in row)

    @property
    def nvertices(self) -> int:
        return self.n + sum(x for row in self.h for x in row)

    @property
    def cl(self) -> int:
        if self.k == 1 and len(self.W) == self.n:
            return len(self.W)
        return len(self.W) + 1

    def branch_vertices(self) -> dict:
        """(i, j) -> tuple of the new labels of branch K_{a_ij} (0-based i, j)."""
        out = {}
        nxt = self.n + 1
        for i, row in enumerate(self.h):
            for j, hij in enumerate(row):
                out[(i, j)] = tuple(range(nxt, nxt + hij))
                nxt += hij
        return out

    def part_leaf(self, i: int) -> Optional[int]:
        """The leaf hanging off w_i1 when its branch is pure, else None."""
        if self.h[i][0] == 1:
            return self.branch_vertices()[(i, 0)][0]
        return None

    def default_marks(self) -> tuple:
        if self.k == 0:
            return ()
        firsts = [self.part_leaf(0)]
        if self.k >= 2:
            firsts.append(self.part_leaf(self.k - 1))
        return tuple(f for f in firsts if f is not None)


@dataclass
class MarkedGraph:
    """A graph with available marked leaves.

    ``origin`` maps each vertex to (atom index, atom-local label); ``glued``
    lists the identified vertices in composition order.
    """

    graph: Graph
    marks: tuple = ()
    origin: dict = field(default_factory=dict)
    glued: tuple = ()
    removed: tuple = ()
    natoms: int = 1

    def __post_init__(self):
        lv = leaves(self.graph)
        for f in self.marks:
            if f not in lv:
                raise CompositionError(f"mark {f} is not a leaf", kind="marks-not-leaves")
        if not self.origin:
            self.origin = {v: (0, v) for v in self.graph.vertices}


def realize_complete(n: int) -> MarkedGraph:
    if n < 1:
        raise InvalidSpec("complete graph needs n >= 1")
    return MarkedGraph(complete_graph(range(1, n + 1)))


def realize_path(t: int) -> MarkedGraph:
    if t < 1:
        raise InvalidSpec("path needs t >= 1")
    g = Graph(range(1, t + 1), [(i, i + 1) for i in range(1, t)])
    return MarkedGraph(g, (1, t) if t >= 2 else ())


def fp_edges(p: int) -> list:
    return sorted((min(2 * i, 2 * j - 1), max(2 * i, 2 * j - 1))
                  for i in range(1, p + 1) for j in range(i, p + 1))


def realize_fp(p: int) -> MarkedGraph:
    if p < 1:
        raise InvalidSpec("F_p needs p >= 1")
    return MarkedGraph(Graph(range(1, 2 * p + 1), fp_edges(p)), (1, 2 * p))


def fan_graph(spec: FanSpec) -> Graph:
    edges = [(a, b) for a in range(1, spec.n + 1) for b in range(a + 1, spec.n + 1)]
    verts = list(range(1, spec.n + 1))
    for (i, j), new in spec.branch_vertices().items():
        clique = list(spec.partition[i][: j + 1]) + list(new)
        verts.extend(new)
        edges.extend((a, b) for x, a in enumerate(clique) for b in clique[x + 1:])
    return Graph(verts, edges)


def realize_fan(spec: FanSpec, marks: Optional[tuple] = None) -> MarkedGraph:
    g = fan_graph(spec)
    marks = tuple(spec.default_marks() if marks is None else marks)
    if len(marks) > 2 or len(set(marks)) != len(marks):
        raise CompositionError("a fan carries at most two distinct marked leaves",
                               kind="marks-not-leaves")
    return MarkedGraph(g, marks)


# expression trees

@dataclass(frozen=True)
class KAtom:
    n: int


@dataclass(frozen=True)
class PathAtom:
    t: int


@dataclass(frozen=True)
class FpAtom:
    p: int


@dataclass(frozen=True)
class FanAtom:
    spec: FanSpec
    marks: Optional[tuple] = None


Atom = Union[KAtom, PathAtom, FpAtom, FanAtom]


@dataclass(frozen=True)
class MarkRef:
    """A leaf named by its atom-local label; ``atom`` (1-based, counted inside
    the operand) disambiguates when several atoms share the label."""

    label: int
    atom: Optional[int] = None


@dataclass(frozen=True)
class Circ:
    left: "GraphExpr"
    right: "GraphExpr"
    lmark: MarkRef
    rmark: MarkRef


@dataclass(frozen=True)
class Star:
    left: "GraphExpr"
    right: "GraphExpr"
    lmark: MarkRef
    rmark: MarkRef


GraphExpr = Union[KAtom, PathAtom, FpAtom, FanAtom, Circ, Star]
ATOMS = (KAtom, PathAtom, FpAtom, FanAtom)


def atoms(expr) -> list:
    if isinstance(expr, ATOMS):
        return [expr]
    return atoms(expr.left) + atoms(expr.right)


def ffc_upper(expr) -> int:
    """Upper bound for the number of FFan components: the atom count."""
    return len(atoms(expr))


def realize_atom(a) -> MarkedGraph:
    if isinstance(a, KAtom):
        return realize_complete(a.n)
    if isinstance(a, PathAtom):
        return realize_path(a.t)
    if isinstance(a, FpAtom):
        return realize_fp(a.p)
    if isinstance(a, FanAtom):
        return realize_fan(a.spec, a.marks)
    raise TypeError(f"not an atom: {a!r}")


def _resolve_mark(mg: MarkedGraph, ref: MarkRef, side: str) -> int:
    hits = [f for f in mg.marks
            if mg.origin[f][1] == ref.label and (ref.atom is None or mg.origin[f][0] == ref.atom - 1)]
    if len(hits) == 1:
        return hits[0]
    if len(hits) > 1:
        raise CompositionError(
            f"{side} mark {ref.label} is ambiguous; qualify it with an atom index",
            kind="mark-ambiguous")
    present = [v for v, o in mg.origin.items()
               if o[1] == ref.label and (ref.atom is None or o[0] == ref.atom - 1)]
    if present and all(v not in leaves(mg.graph) for v in present):
        raise CompositionError(f"{side} mark {ref.label} is not a leaf", kind="mark-not-leaf")
    raise CompositionError(f"{side} mark {ref.label} is not an available marked leaf",
                           kind="mark-consumed")


def _disjoint(a: MarkedGraph, b: MarkedGraph):
    """Shift b's labels past a's and its atom indices past a's atoms."""
    off = max(a.graph.vertices, default=0)
    natoms = a.natoms
    for v in a.removed:
        off = max(off, v)
    mp = {v: v + off for v in b.graph.vertices}
    g = b.graph.relabel(mp)
    origin = {v + off: (o[0] + natoms, o[1]) for v, o in b.origin.items()}
    return g, tuple(mp[f] for f in b.marks), origin, off


def compose_circ(a: MarkedGraph, fa: int, b: MarkedGraph, fb: int) -> MarkedGraph:
    """Remove leaves fa, fb and identify their neighbours (b's labels shifted)."""
    for mg, f, side in ((a, fa, "left"), (b, fb, "right")):
        _check_mark(mg, f, side)
        if len(mg.graph) == 2 and len(mg.graph.edges) == 1:
            raise CompositionError(f"{side} operand of circ is P_2", kind="operand-is-P2")
    gb, marks_b, origin_b, off = _disjoint(a, b)
    fb2 = fb + off
    (va,) = neighbors(a.graph, fa)
    (vb,) = neighbors(gb, fb2)
    verts = [v for v in a.graph.vertices if v != fa] + [v for v in gb.vertices if v not in (fb2, vb)]
    edges = [e for e in a.graph.edges if fa not in e]
    for x, y in gb.edges:
        if fb2 in (x, y):
            continue
        edges.append((va if x == vb else x, va if y == vb else y))
    g = Graph(verts, edges)
    marks = tuple(f for f in a.marks if f != fa) + tuple(f for f in marks_b if f != fb2)
    origin = {v: o for v, o in a.origin.items() if v in g.vertices}
    origin.update({v: o for v, o in origin_b.items() if v in g.vertices})
    return MarkedGraph(g, marks, origin, a.glued + tuple(x + off for x in b.glued) + (va,),
                       a.removed + (fa, fb2, vb) + tuple(x + off for x in b.removed),
                       a.natoms + b.natoms)


def compose_star(a: MarkedGraph, fa: int, b: MarkedGraph, fb: int) -> MarkedGraph:
    """Identify leaf fa of a with leaf fb of b."""
    for mg, f, side in ((a, fa, "left"), (b, fb, "right")):
        _check_mark(mg, f, side)
    gb, marks_b, origin_b, off = _disjoint(a, b)
    fb2 = fb + off
    verts = list(a.graph.vertices) + [v for v in gb.vertices if v != fb2]
    edges = list(a.graph.edges) + [(fa if x == fb2 else x, fa if y == fb2 else y)
                                   for x, y in gb.edges]
    g = Graph(verts, edges)
    marks = tuple(f for f in a.marks if f != fa) + tuple(f for f in marks_b if f != fb2)
    origin = dict(a.origin)
    origin.update({v: o for v, o in origin_b.items() if v in g.vertices})
    return MarkedGraph(g, marks, origin, a.glued + tuple(x + off for x in b.glued) + (fa,),
                       a.removed + (fb2,) + tuple(x + off for x in b.removed),
                       a.natoms + b.natoms)


def _check_mark(mg: MarkedGraph, f: int, side: str):
    if f not in mg.graph.vertices or f not in leaves(mg.graph):
        raise CompositionError(f"{side} mark {f} is not a leaf", kind="mark-not-leaf")
    if f not in mg.marks:
        raise CompositionError(f"{side} mark {f} is not an available marked leaf",
                               kind="mark-consumed")


@dataclass(frozen=True)
class GlueStep:
    """One composition: ``op`` is "circ" or "star"; atoms are 0-based indices
    into ``atoms(expr)`` and labels are atom-local leaf labels."""

    op: str
    atom_a: int
    label_a: int
    atom_b: int
    label_b: int


def _realize(expr):
    if isinstance(expr, ATOMS):
        return realize_atom(expr), []
    left, lsteps = _realize(expr.left)
    right, rsteps = _realize(expr.right)
    fa = _resolve_mark(left, expr.lmark, "left")
    fb = _resolve_mark(right, expr.rmark, "right")
    ia, la = left.origin[fa]
    ib, lb = right.origin[fb]
    shift = left.natoms
    steps = lsteps + [GlueStep(s.op, s.atom_a + shift, s.label_a, s.atom_b + shift, s.label_b)
                      for s in rsteps]
    if isinstance(expr, Circ):
        mg = compose_circ(left, fa, right, fb)
        steps.append(GlueStep("circ", ia, la, ib + shift, lb))
    else:
        mg = compose_star(left, fa, right, fb)
        steps.append(GlueStep("star", ia, la, ib + shift, lb))
    return mg, steps


def realize(expr) -> MarkedGraph:
    return _realize(expr)[0]


def realize_with_plan(expr):
    """(MarkedGraph, list of GlueStep in composition order)."""
    return _realize(expr)


def atom_vertex_ranges(expr) -> list:
    """For reporting: per atom, the realized labels that came from it."""
    mg = realize(expr)
    out = [[] for _ in atoms(expr)]
    for v, (i, _) in sorted(mg.origin.items()):
        out[i].append(v)
    return out

"""Closed-form dimension, depth and regularity of S/J_{K_m,G} for fans, F_p,
paths and their marked-leaf compositions.

Each rule checks its own hypotheses and either contributes a bound (a
``Fire``) or stays silent.  ``predict`` intersects everything that fired for an
expression; two rules that disagree raise ``Contradiction``, which always
means a bug somewhere, never a property of the graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .cutsets import DEFAULT_ENUM_CAP, cut_point_sets
from .errors import Contradiction, GraphTooLarge, InvalidSpec, ShapeNotCovered
from .families import (
    ATOMS, Circ, FanAtom, FanSpec, FpAtom, KAtom, PathAtom, Star, atoms, realize_atom,
    realize_with_plan,
)
from .graph import clique_number, is_complete, neighbors, num_components, path_order

# predict() only enumerates cut sets when this many candidate vertices or fewer
DEFAULT_CANDIDATE_CAP = 16


@dataclass(frozen=True)
class Fire:
    """One rule's contribution: lo <= value <= hi (hi None means unbounded)."""

    rule: str
    lo: int
    hi: Optional[int]
    exact: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return {"rule": self.rule, "lo": self.lo, "hi": self.hi,
                "exact": self.exact, "note": self.note}


def exact(rule: str, value: int, note: str = "") -> Fire:
    return Fire(rule, value, value, True, note)


def upper(rule: str, hi: int, note: str = "", lo: int = 0) -> Fire:
    return Fire(rule, lo, hi, False, note)


def lower(rule: str, lo: int, note: str = "") -> Fire:
    return Fire(rule, lo, None, False, note)


@dataclass(frozen=True)
class InvariantValue:
    """Exact(value) or Interval(lo, hi) together with the rules behind it.

    ``exact`` is set only when some rule certifies equality; bounds that happen
    to meet still count as an interval.
    """

    lo: int
    hi: Optional[int]
    exact: bool
    fires: tuple = ()

    @property
    def kind(self) -> str:
        return "exact" if self.exact else "interval"

    @property
    def value(self) -> Optional[int]:
        return self.lo if self.exact else None

    def contains(self, x: int) -> bool:
        return self.lo <= x and (self.hi is None or x <= self.hi)

    def rules(self) -> list:
        return [f.rule for f in self.fires]

    def to_json(self) -> dict:
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi,
                "value": self.value, "fires": [f.to_json() for f in self.fires]}

    @classmethod
    def combine(cls, name: str, fires) -> "InvariantValue":
        fires = tuple(fires)
        if not fires:
            return cls(0, None, False, ())
        exacts = {f.lo for f in fires if f.exact}
        lo = max(f.lo for f in fires)
        his = [f.hi for f in fires if f.hi is not None]
        hi = min(his) if his else None
        if len(exacts) > 1 or (hi is not None and lo > hi):
            raise Contradiction(
                f"rules disagree on {name}: " + "; ".join(
                    f"{f.rule} [{f.lo}, {f.hi}]" for f in fires),
                invariant=name, fires=[f.to_json() for f in fires])
        return cls(lo, hi, bool(exacts), fires)


@dataclass(frozen=True)
class InvariantReport:
    m: int
    expr: object
    nvertices: int
    dim: InvariantValue
    depth: InvariantValue
    reg: InvariantValue
    cm: Optional[bool] = None
    unmixed: Optional[bool] = None
    cm_rules: tuple = ()
    skipped: tuple = ()            # (rule family, reason)
    cutset_dim: Optional[tuple] = None  # (dim, witness T) when enumerated

    def to_json(self) -> dict:
        out = {
            "m": self.m,
            "nvertices": self.nvertices,
            "dim": self.dim.to_json(),
            "depth": self.depth.to_json(),
            "reg": self.reg.to_json(),
            "cm": self.cm,
            "unmixed": self.unmixed,
            "cm_rules": [list(x) for x in self.cm_rules],
            "skipped": [list(x) for x in self.skipped],
        }
        if self.cutset_dim is not None:
            out["cutset_dim"] = {"dim": self.cutset_dim[0], "witness": list(self.cutset_dim[1])}
        return out


def _check_m(m: int):
    if m < 2:
        raise InvalidSpec("m must be at least 2")


# ---------------------------------------------------------------- single atoms

def fan_reg_fires(spec: FanSpec, m: int) -> list:
    V, k, n = spec.nvertices, spec.k, spec.n
    W = spec.W
    hs = [x for row in spec.h for x in row]
    out = []
    if m >= V:
        out.append(exact("fan.reg.large-m", V - 1, f"m={m} >= |V|={V}"))
    else:
        out.append(upper("fan.reg.branch-bound", k + (spec.delta + 1) * (m - 1),
                         f"k={k}, delta={spec.delta}"))
    out.append(upper("fan.reg.clique-count", spec.cl * (m - 1), f"cl={spec.cl}"))
    if n > 1 + len(W) and all(h >= m for h in hs):
        val = (spec.cl - 1) * (m - 1) + min(m - 1, n - len(W) - 1)
        out.append(exact("fan.reg.long-branches", val, f"n={n} > 1+|W|, all h >= m"))
    if spec.pure:
        out.append(exact("fan.reg.pure", min(V - 1, m + k - 1), f"|V|={V}, k={k}"))
        out.append(upper("fan.reg.pure-bound", k + m - 1))
        if all(len(p) == 1 for p in spec.partition):
            out.append(exact("fan.reg.whiskers", min(m, n) + k - 1, "all r_i = 1"))
    else:
        core = FanSpec(n, spec.partition,
                       tuple(tuple(j + 1 for j in range(1, len(p) + 1)) for p in spec.partition))
        out.append(lower("fan.reg.pure-core", min(core.nvertices - 1, m + k - 1),
                         "induced pure fan keeping one vertex per branch"))
    omega = max([n] + [a for row in spec.branch_sizes for a in row])
    out.append(lower("lower.clique", min(m - 1, omega - 1), f"clique K_{omega}"))
    return out


def fan_dim(spec: FanSpec, m: int) -> int:
    s = min(len(spec.W), spec.n - 1)
    return m + spec.nvertices - 1 + s * (m - 2)


def fan_invariants(spec: FanSpec, m: int) -> InvariantReport:
    _check_m(m)
    V = spec.nvertices
    dim = InvariantValue.combine("dim", [exact("fan.dim", fan_dim(spec, m),
                                               f"s=min(|W|, n-1)={min(len(spec.W), spec.n - 1)}")])
    depth = InvariantValue.combine("depth", [exact("fan.depth", V + m - 1)])
    reg = InvariantValue.combine("reg", fan_reg_fires(spec, m))
    cm = m == 2 or not spec.W
    return InvariantReport(m, FanAtom(spec), V, dim, depth, reg, cm,
                           cm_rules=(("fan.cm", cm),))


def fp_reg(p: int, m: int) -> int:
    return min(2 * p - 1, m + 1)


def fp_invariants(p: int, m: int) -> InvariantReport:
    _check_m(m)
    if p < 1:
        raise InvalidSpec("F_p needs p >= 1")
    dim = InvariantValue.combine("dim", [exact("fp.dim", m + 2 * p - 1 + (p - 1) * (m - 2))])
    depth = InvariantValue.combine("depth", [exact("fp.depth", m + 2 * p - 1)])
    reg = InvariantValue.combine("reg", [exact("fp.reg", fp_reg(p, m))])
    cm = p == 1 or m == 2
    return InvariantReport(m, FpAtom(p), 2 * p, dim, depth, reg, cm, cm_rules=(("fp.cm", cm),))


def path_invariants(t: int, m: int, enum_cap: int = DEFAULT_ENUM_CAP) -> InvariantReport:
    _check_m(m)
    if t < 2:
        raise InvalidSpec("path invariants need t >= 2")
    g = realize_atom(PathAtom(t)).graph
    fam = cut_point_sets(g, enum_cap)
    d, witness = _cutset_dim(fam, t, m)
    dim = InvariantValue.combine("dim", [exact("path.dim", d, f"witness T={list(witness)}")])
    depth = InvariantValue.combine("depth", [exact("path.depth", m + t - 1)])
    reg = InvariantValue.combine("reg", [exact("path.reg", t - 1)])
    cm = dim.value == depth.value
    return InvariantReport(m, PathAtom(t), t, dim, depth, reg, cm,
                           unmixed=len({_prime_dim(cs, t, m) for cs in fam.sets}) == 1,
                           cm_rules=(("path.depth-vs-dim", cm),), cutset_dim=(d, witness))


def complete_invariants(n: int, m: int) -> InvariantReport:
    _check_m(m)
    v = m + n - 1
    dim = InvariantValue.combine("dim", [exact("kn.dim", v)])
    depth = InvariantValue.combine("depth", [exact("kn.depth", v)])
    reg = InvariantValue.combine("reg", [exact("kn.reg", min(m - 1, n - 1))])
    return InvariantReport(m, KAtom(n), n, dim, depth, reg, True, unmixed=True,
                           cm_rules=(("kn.cm", True),))


def atom_invariants(atom, m: int) -> InvariantReport:
    if isinstance(atom, FanAtom):
        return fan_invariants(atom.spec, m)
    if isinstance(atom, FpAtom):
        return fp_invariants(atom.p, m)
    if isinstance(atom, PathAtom):
        if atom.t == 1:
            return complete_invariants(1, m)
        return path_invariants(atom.t, m)
    if isinstance(atom, KAtom):
        return complete_invariants(atom.n, m)
    raise TypeError(f"not an atom: {atom!r}")


def _cutset_dim(fam, nv, m):
    best, witness = None, ()
    for cs in fam.sets:
        d = _prime_dim(cs, nv, m)
        if best is None or d > best:
            best, witness = d, cs.T
    return best, witness


def _prime_dim(cs, nv, m):
    return cs.c * (m - 1) + nv - len(cs.T)


# ------------------------------------------------ pieces left after deletions
#
# A piece is what remains of an atom after deleting a marked leaf together
# with its neighbour, possibly at both marks: ("K", n), ("path", t), ("fp", p)
# or ("fan", FanSpec).

def pseudo_fan_k(atom) -> Optional[int]:
    """k when the atom is a k-pure pseudo fan (pure fan or F_p with k = 2)."""
    if isinstance(atom, FpAtom):
        return 2
    if isinstance(atom, FanAtom) and atom.spec.pure:
        return atom.spec.k
    return None


def atom_nvertices(atom) -> int:
    if isinstance(atom, FpAtom):
        return 2 * atom.p
    if isinstance(atom, PathAtom):
        return atom.t
    if isinstance(atom, KAtom):
        return atom.n
    return atom.spec.nvertices


def fan_leaf_part(spec: FanSpec, label: int) -> Optional[int]:
    """Index i of the part whose first branch is the single leaf ``label``."""
    for i in range(spec.k):
        if spec.part_leaf(i) == label:
            return i
    return None


def _drop_first(n, parts, sizes, i):
    w = parts[i][0]
    relabel = {x: (x if x < w else x - 1) for x in range(1, n + 1) if x != w}
    new_parts, new_sizes, index = [], [], {}
    for idx, (part, sz) in enumerate(zip(parts, sizes)):
        if idx == i:
            part, sz = part[1:], tuple(a - 1 for a in sz[1:])
        if part:
            index[idx] = len(new_parts)
            new_parts.append(tuple(relabel[x] for x in part))
            new_sizes.append(tuple(sz))
    return n - 1, new_parts, new_sizes, index


def _fan_piece(spec: FanSpec, labels) -> Optional[tuple]:
    idx = []
    for f in labels:
        i = fan_leaf_part(spec, f)
        if i is None:
            return None
        idx.append(i)
    n, parts, sizes = spec.n, list(spec.partition), list(spec.branch_sizes)
    pending = list(idx)
    while pending:
        i = pending.pop(0)
        n, parts, sizes, index = _drop_first(n, parts, sizes, i)
        pending = [index[j] for j in pending]
    if n >= 2:
        return ("fan", FanSpec(n, tuple(parts), tuple(sizes)))
    if n == 1 and parts:
        return ("K", sizes[0][0])
    return ("K", n)


def atom_minus_pairs(atom, labels) -> Optional[tuple]:
    """The atom with each marked leaf in ``labels`` and its neighbour deleted."""
    labels = sorted(set(labels))
    c = len(labels)
    if isinstance(atom, PathAtom):
        if not set(labels) <= {1, atom.t}:
            return None
        return ("path", max(atom.t - 2 * c, 0))
    if isinstance(atom, FpAtom):
        if not set(labels) <= {1, 2 * atom.p}:
            return None
        return ("fp", max(atom.p - c, 0))
    if isinstance(atom, FanAtom):
        return _fan_piece(atom.spec, labels)
    if isinstance(atom, KAtom):
        return ("K", atom.n) if not labels else None
    return None


def piece_nvertices(piece) -> int:
    kind, x = piece
    if kind == "fan":
        return x.nvertices
    if kind == "fp":
        return 2 * x
    return x


def piece_reg(piece, m: int) -> InvariantValue:
    kind, x = piece
    if kind == "fan":
        return InvariantValue.combine("reg", fan_reg_fires(x, m))
    if kind == "fp":
        return InvariantValue.combine("reg", [exact("fp.reg", fp_reg(x, m) if x else 0)])
    if kind == "path":
        return InvariantValue.combine("reg", [exact("path.reg", max(x - 1, 0))])
    return InvariantValue.combine("reg", [exact("kn.reg", min(m - 1, x - 1) if x else 0)])


def piece_pseudo_k(piece) -> Optional[int]:
    kind, x = piece
    if kind == "fan":
        return x.k if x.pure else None
    if kind == "fp":
        return 2 if x >= 1 else None
    if kind == "K" and x >= 2:
        return 0
    return None


def pseudo_fan_reg(nv: int, k: int, m: int) -> int:
    """reg of a k-pure pseudo fan on nv vertices."""
    return min(nv - 1, m + k - 1)


# ------------------------------------------------------------- composition

def _plan(expr):
    mg, steps = realize_with_plan(expr)
    return mg, steps, atoms(expr)


def chain_order(n_atoms: int, steps) -> Optional[list]:
    """Atom indices along the chain, or None if the atoms do not form a path."""
    if n_atoms == 1:
        return [0]
    adj = {i: [] for i in range(n_atoms)}
    for s in steps:
        adj[s.atom_a].append(s.atom_b)
        adj[s.atom_b].append(s.atom_a)
    if any(len(v) > 2 for v in adj.values()) or len(steps) != n_atoms - 1:
        return None
    ends = [i for i, v in adj.items() if len(v) == 1]
    if len(ends) != 2:
        return None
    order, prev = [min(ends)], None
    while len(order) < n_atoms:
        nxt = [j for j in adj[order[-1]] if j != prev]
        prev = order[-1]
        order.append(nxt[0])
    return order


def _glue_labels(steps, n_atoms) -> list:
    out = [[] for _ in range(n_atoms)]
    for s in steps:
        out[s.atom_a].append(s.label_a)
        out[s.atom_b].append(s.label_b)
    return out


def _operand(atom, label, m, need_fan_n3=True):
    """(k, nv, piece, q) for a pseudo-fan operand glued at ``label``, or None
    with the reason the hypotheses fail."""
    k = pseudo_fan_k(atom)
    nv = atom_nvertices(atom)
    if k is None:
        return None, "operand is not a pure pseudo fan"
    if k < 1 or nv - k < 3:
        return None, f"needs k >= 1 and |V|-k >= 3 (k={k}, |V|={nv})"
    if isinstance(atom, FanAtom):
        if need_fan_n3 and atom.spec.n < 3:
            return None, "fan operands need n >= 3"
        if fan_leaf_part(atom.spec, label) is None:
            return None, f"mark {label} is not the leaf of a first branch"
    piece = atom_minus_pairs(atom, [label])
    q = None if piece is None else piece_pseudo_k(piece)
    if q is None:
        return None, "deleting the mark and its neighbour leaves no pure pseudo fan"
    return (k, nv, piece, q), ""


def circ_reg_fires(a1, l1, a2, l2, m) -> list:
    """Rules for (a1, l1) circ (a2, l2) with both operands atoms."""
    fires = []
    o1, why1 = _operand(a1, l1, m)
    o2, why2 = _operand(a2, l2, m)
    if o1 and o2:
        (k1, n1, p1, q1), (k2, n2, p2, q2) = o1, o2
        V = n1 + n2 - 3
        t1 = min(n1 - 3, m + q1 - 1) + min(n2 - 3, m + q2 - 1)
        hi = max(t1, min(V - 1, m + k1 + k2 - 3), min(V - 1, m + k1 + k2 - 2))
        note = f"k=({k1},{k2}) q=({q1},{q2}) |V|={V}"
        if q1 == k1 and q2 == k2:
            fires.append(exact("circ.three-way", hi, note))
        else:
            fires.append(upper("circ.three-way", hi, note))
        qb = (m + q1 - 1) + (m + q2 - 1)
        if m <= min(n1 - q1 - 2, n2 - q2 - 2):
            fires.append(exact("circ.q-bound", qb, "m <= min(|V_i|-q_i-2)"))
        else:
            fires.append(upper("circ.q-bound", qb))
        r1 = pseudo_fan_reg(n1 - 2, q1, m)
        r2 = pseudo_fan_reg(n2 - 2, q2, m)
        if q1 == k1 and q2 == k2 and any(
                nb - kb >= 4 and m <= na - ka
                for (na, ka), (nb, kb) in (((n1, k1), (n2, k2)), ((n2, k2), (n1, k1)))):
            fires.append(exact("circ.split-equality", r1 + r2, "q_i = k_i"))
        fires.append(Fire("circ.sandwich", r1 + r2,
                          pseudo_fan_reg(n1, k1, m) + pseudo_fan_reg(n2, k2, m)))
        return fires
    for (fa, lf), (pa, _) in (((a1, l1), (a2, l2)), ((a2, l2), (a1, l1))):
        if (isinstance(fa, FanAtom) and fa.spec.pure and fa.spec.n >= 3
                and fan_leaf_part(fa.spec, lf) is not None and isinstance(pa, PathAtom)):
            t = pa.t
            r = pseudo_fan_reg(fa.spec.nvertices, fa.spec.k, m)
            if t == 3:
                fires.append(exact("circ.fan-path", r, "gluing P_3 returns the fan"))
            else:
                s = 1 if t == 2 else 2
                fires.append(upper("circ.fan-path", r + (t - 1) - s, f"t={t}"))
                if t >= 4 and m >= fa.spec.k:
                    fires.append(exact("circ.fan-path", r + t - 3,
                                       f"equals fan * P_{t - 2} with m >= k"))
            return fires
    raise ShapeNotCovered(f"circ operands not covered: {why1 or why2}",
                          kind="operand-shape-unsupported")


def star_reg_fires(a1, l1, a2, l2, m) -> list:
    fires = []
    pairs = (((a1, l1), (a2, l2)), ((a2, l2), (a1, l1)))
    for (x, lx), (y, _) in pairs:
        if isinstance(x, FpAtom) and isinstance(y, PathAtom) and y.t >= 2:
            fires.append(exact("star.fp-path", fp_reg(x.p, m) + y.t - 1, f"p={x.p}, t={y.t}"))
            return fires
    for (x, lx), (y, _) in pairs:
        if isinstance(y, PathAtom) and y.t >= 2:
            t = y.t
            o, _ = _operand(x, lx, m, need_fan_n3=False)
            if o:
                k, nv = o[0], o[1]
                val = pseudo_fan_reg(nv, k, m) + t - 1
                fires.append(exact("star.fan-path", val, f"m={m} >= k={k}") if m >= k
                             else upper("star.fan-path", val))
            if isinstance(x, FanAtom) and x.spec.pure and x.spec.k >= 1:
                i = fan_leaf_part(x.spec, lx)
                if i is not None and len(x.spec.partition[i]) == 1:
                    nv, k = x.spec.nvertices, x.spec.k
                    val = min(nv - 2, m + k - 2) + t
                    fires.append(exact("star.clique-sum-path", val, f"m >= k={k}") if m >= k
                                 else upper("star.clique-sum-path", val))
            if fires:
                return fires
    o1, why1 = _operand(a1, l1, m, need_fan_n3=False)
    o2, why2 = _operand(a2, l2, m, need_fan_n3=False)
    if not (o1 and o2):
        raise ShapeNotCovered(f"star operands not covered: {why1 or why2}",
                              kind="operand-shape-unsupported")
    (k1, n1, p1, q1), (k2, n2, p2, q2) = o1, o2
    g1, g2 = pseudo_fan_reg(n1, k1, m), pseudo_fan_reg(n2, k2, m)
    r1, r2 = pseudo_fan_reg(n1 - 2, q1, m), pseudo_fan_reg(n2 - 2, q2, m)
    fires.append(Fire("star.sandwich", r1 + r2, g1 + g2))
    fires.append(upper("star.fan-fan-bound", 2 * m + k1 + k2 - 2))
    fires.append(lower("star.induced-split", max(g1 + r2, g2 + r1),
                       "delete the neighbour of the shared leaf on one side"))
    if isinstance(a1, FpAtom) and isinstance(a2, FpAtom):
        p, r = a1.p, a2.p
        if min(p, r) >= 3 and (m <= min(2 * p - 2, 2 * r - 4) or m <= min(2 * r - 2, 2 * p - 4)):
            fires.append(exact("star.fp-fp-additive", 2 * m + 2, f"p=({p},{r})"))
        if p == r == 3 and m in (3, 4):
            fires.append(upper("star.f3-f3", 8, "F_3 * F_3 with m in {3,4}"))
    return fires


def circ_reg_bounds(node, m: int) -> InvariantValue:
    _check_m(m)
    if not (isinstance(node, Circ) and isinstance(node.left, ATOMS)
            and isinstance(node.right, ATOMS)):
        raise ShapeNotCovered("circ_reg_bounds needs a circ of two atoms",
                              kind="operand-shape-unsupported")
    _, steps, ats = _plan(node)
    s = steps[0]
    return InvariantValue.combine("reg", circ_reg_fires(ats[0], s.label_a, ats[1], s.label_b, m))


def star_reg_bounds(node, m: int) -> InvariantValue:
    _check_m(m)
    if not (isinstance(node, Star) and isinstance(node.left, ATOMS)
            and isinstance(node.right, ATOMS)):
        raise ShapeNotCovered("star_reg_bounds needs a star of two atoms",
                              kind="operand-shape-unsupported")
    _, steps, ats = _plan(node)
    s = steps[0]
    return InvariantValue.combine("reg", star_reg_fires(ats[0], s.label_a, ats[1], s.label_b, m))


def atom_ell(atom, m: int) -> int:
    """Weight of an atom in the sum-of-weights regularity bound."""
    opts = []
    g = realize_atom(atom).graph
    po = path_order(g)
    if po is not None and len(po) >= 2:
        opts.append(len(po) - 1)
    k = pseudo_fan_k(atom)
    if k is None and isinstance(atom, KAtom):
        k = 0
    if k is not None and atom_nvertices(atom) >= 3:
        opts.append(m + k - 1)
    if not opts:
        raise ShapeNotCovered(f"atom {atom!r} is neither a path nor a pure pseudo fan",
                              kind="atom-shape-unsupported")
    return min(opts)


def split_lower_bound(ats, steps, m: int) -> Optional[tuple]:
    """Best lower bound from deleting, at every gluing, a vertex that splits the
    graph into per-atom pieces with known regularity.  Returns (lo, note)."""
    stars = [i for i, s in enumerate(steps) if s.op == "star"]
    nbrs = [realize_atom(a).graph for a in ats]
    best = None
    for choice in itertools.product((0, 1), repeat=len(stars)):
        cut = {}
        side = dict(zip(stars, choice))
        removed = [set() for _ in ats]
        kept = [set() for _ in ats]
        for i, s in enumerate(steps):
            if s.op == "circ":
                removed[s.atom_a].add(s.label_a)
                removed[s.atom_b].add(s.label_b)
            elif side[i] == 0:
                removed[s.atom_a].add(s.label_a)
                kept[s.atom_b].add(s.label_b)
            else:
                removed[s.atom_b].add(s.label_b)
                kept[s.atom_a].add(s.label_a)
        ok = True
        for j, g in enumerate(nbrs):
            gone = set()
            for f in removed[j]:
                gone |= {f} | set(neighbors(g, f))
            for f in kept[j]:
                if ({f} | set(neighbors(g, f))) & gone:
                    ok = False
        if not ok:
            continue
        total = 0
        for j, a in enumerate(ats):
            piece = atom_minus_pairs(a, removed[j])
            if piece is None:
                ok = False
                break
            total += piece_reg(piece, m).lo
        if ok and (best is None or total > best[0]):
            cut = "".join("ab"[c] for c in choice)
            best = (total, f"star sides {cut or '-'}")
    return best


def composite_reg_upper(expr, m: int) -> InvariantValue:
    _check_m(m)
    mg, steps, ats = _plan(expr)
    return InvariantValue.combine("reg", _composite_fires(ats, steps, m))


def _composite_fires(ats, steps, m) -> list:
    ells = [atom_ell(a, m) for a in ats]
    fires = [upper("chain.sum-ell", sum(ells), "+".join(map(str, ells)))]
    lb = split_lower_bound(ats, steps, m)
    if lb is not None and steps:
        fires.append(lower("lower.induced-split", lb[0], lb[1]))
    eq = _multiple_circ_equality(ats, steps, m)
    if eq is not None:
        fires.append(eq)
    return fires


def _multiple_circ_equality(ats, steps, m) -> Optional[Fire]:
    N = len(ats)
    if N < 2 or any(s.op != "circ" for s in steps):
        return None
    order = chain_order(N, steps)
    if order is None:
        return None
    labels = _glue_labels(steps, N)
    info = []
    for j, a in enumerate(ats):
        k = pseudo_fan_k(a)
        if k is None or atom_nvertices(a) - k < 1:
            return None
        if isinstance(a, FanAtom) and any(fan_leaf_part(a.spec, f) is None for f in labels[j]):
            return None
        piece = atom_minus_pairs(a, labels[j])
        if piece is None or piece_pseudo_k(piece) != k:
            return None
        info.append((k, atom_nvertices(a), piece))
    for seq in (order, order[::-1]):
        good = True
        for pos, j in enumerate(seq):
            a = ats[j]
            k, nv, _ = info[j]
            end = pos in (0, N - 1)
            if isinstance(a, FanAtom) and nv - k < (4 if end else 6):
                good = False
            if isinstance(a, FpAtom):
                need = 2 if pos == 0 else (3 if pos == N - 1 else 4)
                if a.p < need:
                    good = False
            r = nv - k if end else nv - k - 4
            if m > r:
                good = False
        if good:
            total = sum(piece_reg(info[j][2], m).lo for j in seq)
            return exact("chain.circ-equality", total, "all circ, k_i = q_i, size and m conditions")
    return None


# ------------------------------------------------------------------ dimension

def chain_dim(expr, m: int) -> InvariantValue:
    _check_m(m)
    _, steps, ats = _plan(expr)
    return InvariantValue.combine("dim", [_chain_dim_fire(ats, steps, m)])


def _atom_dim(atom, m) -> int:
    if isinstance(atom, FpAtom):
        return m + 2 * atom.p - 1 + (atom.p - 1) * (m - 2)
    return fan_dim(atom.spec, m)


def _chain_dim_fire(ats, steps, m) -> Fire:
    N = len(ats)
    if N < 2 or any(s.op != "circ" for s in steps):
        raise ShapeNotCovered("chain_dim needs a chain of circ gluings", kind="shape-not-covered")
    order = chain_order(N, steps)
    if order is None:
        raise ShapeNotCovered("atoms do not form a chain", kind="shape-not-covered")
    labels = _glue_labels(steps, N)
    t = N - 1
    for seq in (order, order[::-1]):
        head, tail = seq[:-1], seq[-1]
        if not all(isinstance(ats[j], FpAtom) and ats[j].p >= 3 for j in head):
            continue
        ta = ats[tail]
        if isinstance(ta, FpAtom) and ta.p >= 2:
            s = 2 * m * (t // 2) + (m + 2) * ((t + 1) // 2)
        elif isinstance(ta, FanAtom) and ta.spec.n >= 3:
            spec = ta.spec
            (lab,) = labels[tail]
            i = fan_leaf_part(spec, lab)
            if i is None:
                continue
            if not (len(spec.W) < spec.n or len(spec.partition[i]) >= 2):
                continue
            s = 2 * m * ((t + 1) // 2) + (m + 2) * (t // 2)
        else:
            continue
        total = sum(_atom_dim(ats[j], m) for j in seq)
        return exact("chain.dim", total - s, f"t={t}, sum of atom dims {total}, s={s}")
    raise ShapeNotCovered("chain shape not covered", kind="shape-not-covered")


# ---------------------------------------------------------------------- depth

def is_ffan(expr) -> bool:
    for a in atoms(expr):
        if isinstance(a, FpAtom):
            continue
        if isinstance(a, PathAtom) and a.t >= 2:
            continue
        if isinstance(a, KAtom) and a.n == 2:
            continue
        if isinstance(a, FanAtom) and a.spec.k >= 1:
            continue
        return False
    return True


def ffan_depth(expr, m: int) -> InvariantValue:
    _check_m(m)
    if not is_ffan(expr):
        raise ShapeNotCovered("not an FFan expression", kind="not-an-ffan-expression")
    nv = len(realize_with_plan(expr)[0].graph)
    return InvariantValue.combine("depth", [exact("ffan.depth", m + nv - 1, f"|V|={nv}")])


# -------------------------------------------------------------------- predict

def predict(expr, m: int, enum_cap: int = DEFAULT_ENUM_CAP,
            candidate_cap: int = DEFAULT_CANDIDATE_CAP) -> InvariantReport:
    """Fire every applicable rule for ``expr`` and intersect the results."""
    _check_m(m)
    mg, steps, ats = _plan(expr)
    g = mg.graph
    V = len(g)
    dim_f, depth_f, reg_f = [], [], []
    cm_rules, skipped = [], []

    if len(ats) == 1:
        rep = atom_invariants(ats[0], m)
        dim_f += rep.dim.fires
        depth_f += rep.depth.fires
        reg_f += rep.reg.fires
        cm_rules += rep.cm_rules

    if V >= 1 and num_components(g) == 1:
        reg_f.append(upper("generic.connected", V - 1))
        if m >= V >= 2:
            reg_f.append(exact("generic.large-m", V - 1, f"m >= |V| = {V}"))
        dim_f.append(lower("dim.empty-cut-set", m + V - 1))
    dim_f.append(upper("dim.nvars", m * V - (1 if g.edges else 0)))
    omega = clique_number(g)
    reg_f.append(lower("lower.clique", min(m - 1, omega - 1) if omega else 0, f"omega={omega}"))
    po = path_order(g)
    if po is not None and len(po) >= 2:
        reg_f.append(exact("graph.path", V - 1, "realized graph is a path"))
        depth_f.append(exact("graph.path", m + V - 1))
    if V >= 1 and is_complete(g):
        reg_f.append(exact("graph.complete", min(m - 1, V - 1)))
        depth_f.append(exact("graph.complete", m + V - 1))
        dim_f.append(exact("graph.complete", m + V - 1))

    if is_ffan(expr):
        depth_f.append(exact("ffan.depth", m + V - 1, f"|V|={V}"))
    else:
        skipped.append(("ffan.depth", "not an FFan expression"))

    if isinstance(expr, (Circ, Star)) and isinstance(expr.left, ATOMS) \
            and isinstance(expr.right, ATOMS):
        s = steps[0]
        fn = circ_reg_fires if isinstance(expr, Circ) else star_reg_fires
        try:
            reg_f += fn(ats[0], s.label_a, ats[1], s.label_b, m)
        except ShapeNotCovered as e:
            skipped.append((s.op, str(e)))

    if steps:
        try:
            reg_f += _composite_fires(ats, steps, m)
        except ShapeNotCovered as e:
            skipped.append(("chain.sum-ell", str(e)))
            lb = split_lower_bound(ats, steps, m)
            if lb is not None:
                reg_f.append(lower("lower.induced-split", lb[0], lb[1]))
        try:
            dim_f.append(_chain_dim_fire(ats, steps, m))
        except ShapeNotCovered as e:
            skipped.append(("chain.dim", str(e)))

    cutset = None
    unmixed = None
    try:
        fam = _enumerate(g, enum_cap, candidate_cap)
        d, witness = _cutset_dim(fam, V, m)
        cutset = (d, witness)
        dim_f.append(exact("dim.cut-sets", d, f"witness T={list(witness)}"))
        unmixed = len({_prime_dim(cs, V, m) for cs in fam.sets}) == 1
    except GraphTooLarge as e:
        skipped.append(("dim.cut-sets", str(e)))

    depth = InvariantValue.combine("depth", depth_f)
    dim_f.append(lower("generic.depth-le-dim", depth.lo))
    dim = InvariantValue.combine("dim", dim_f)
    if dim.hi is not None:
        depth = InvariantValue.combine("depth", depth_f + [upper("generic.depth-le-dim", dim.hi)])
    reg = InvariantValue.combine("reg", reg_f)

    cm = None
    if depth.exact and dim.exact:
        cm = depth.value == dim.value
    elif depth.hi is not None and depth.hi < dim.lo:
        cm = False
    for rule, flag in cm_rules:
        if cm is not None and flag != cm:
            raise Contradiction(f"{rule} says cm={flag} but depth/dim give {cm}")
        cm = flag
    return InvariantReport(m, expr, V, dim, depth, reg, cm, unmixed, tuple(cm_rules),
                           tuple(skipped), cutset)


def _enumerate(g, enum_cap, candidate_cap):
    from .cutsets import _simplicial

    cand = [v for v in g.vertices if not _simplicial(g, v)]
    if len(cand) > candidate_cap:
        raise GraphTooLarge(f"{len(cand)} candidate cut vertices exceed {candidate_cap}")
    return cut_point_sets(g, enum_cap)

"""Generalized binomial edge ideals J_{K_m,G}, the primes P_T, and Krull
dimension through initial ideals."""

from __future__ import annotations

import itertools
from functools import lru_cache

from ..errors import BeiError, ResourceCapExceeded
from ..graph import Graph
from .groebner import Ideal, groebner_basis, ideal_intersection, initial_ideal
from .ring import RingContext

DEFAULT_GB_CAP = 24


def grid_ring(g: Graph, m: int, char: int = 32003, order: str = "degrevlex") -> RingContext:
    return RingContext.grid(m, len(g), char, order)


def _minor(ctx: RingContext, i: int, j: int, t: int, l: int) -> tuple:
    """[i,j|t,l] = x_it x_jl - x_il x_jt on dense column indices t, l."""
    N = ctx.nvars
    e1 = [0] * N
    e2 = [0] * N
    e1[ctx.var_index(i, t)] += 1
    e1[ctx.var_index(j, l)] += 1
    e2[ctx.var_index(i, l)] += 1
    e2[ctx.var_index(j, t)] += 1
    return ctx.poly([(e1, 1), (e2, -1)])


def _dense(g: Graph, ctx: RingContext, labels=None) -> dict:
    if labels is not None:
        return labels
    if len(g) > ctx.n:
        raise BeiError(f"graph has {len(g)} vertices but the ring has {ctx.n} columns",
                       kind="label-overflow")
    return g.dense_labels()


def build_ideal_generators(g: Graph, ctx: RingContext, labels=None) -> Ideal:
    """One 2-minor per row pair i<j and edge {t<l} of g.

    ``labels`` maps vertices to ring columns; by default the columns are
    1..|V| in label order.  Pass the parent graph's map to place a subgraph's
    ideal in the parent's ring.
    """
    if ctx.m < 2:
        raise BeiError("m must be at least 2")
    dense = _dense(g, ctx, labels)
    gens = []
    for i, j in itertools.combinations(range(1, ctx.m + 1), 2):
        for a, b in g.sorted_edges():
            gens.append(_minor(ctx, i, j, dense[a], dense[b]))
    return Ideal(ctx, tuple(gens))


def build_PT_ideal(g: Graph, T, ctx: RingContext, components=None) -> Ideal:
    from ..cutsets import minimal_prime_components

    dense = _dense(g, ctx)
    if components is None:
        components = minimal_prime_components(g, T, ctx.m).components
    gens = []
    for v in sorted(T):
        for i in range(1, ctx.m + 1):
            e = [0] * ctx.nvars
            e[ctx.var_index(i, dense[v])] = 1
            gens.append(ctx.poly([(e, 1)]))
    for comp in components:
        cols = sorted(dense[v] for v in comp)
        for i, j in itertools.combinations(range(1, ctx.m + 1), 2):
            for t, l in itertools.combinations(cols, 2):
                gens.append(_minor(ctx, i, j, t, l))
    return Ideal(ctx, tuple(gens))


def monomial_dim(I: Ideal) -> int:
    """Krull dimension of S/I for a monomial ideal: nvars minus the minimum
    size of a variable set meeting every generator's support."""
    ring = I.ring
    if not I.is_monomial():
        raise BeiError("monomial_dim needs a monomial ideal")
    supports = {ring.support_mask(g[0][0]) for g in I.gens}
    if 0 in supports:
        return -1  # unit ideal: the ring S/I is zero
    return ring.nvars - min_hitting_set(frozenset(supports))


def _minimalize(sets):
    out = []
    for s in sorted(sets, key=lambda x: bin(x).count("1")):
        if not any(t & s == t for t in out):
            out.append(s)
    return out


def min_hitting_set(sets: frozenset) -> int:
    """Minimum number of bits meeting every mask (branch and bound)."""
    sets = _minimalize(sets)

    @lru_cache(maxsize=None)
    def solve(family: frozenset) -> int:
        if not family:
            return 0
        fam = list(family)
        # disjoint packing lower bound is implicit in branching on a smallest set
        pick = min(fam, key=lambda s: bin(s).count("1"))
        best = None
        bits = pick
        excluded = 0
        while bits:
            b = bits & -bits
            bits ^= b
            rest = []
            dead = False
            for s in fam:
                if s & b:
                    continue
                s2 = s & ~excluded
                if not s2:
                    dead = True
                    break
                rest.append(s2)
            excluded |= b
            if dead:
                continue
            val = 1 + solve(frozenset(_minimalize(rest)))
            if best is None or val < best:
                best = val
        return best

    return solve(frozenset(sets))


def hilbert_numerator(I: Ideal) -> list:
    """Numerator of the Hilbert series of S/I (denominator (1-t)^nvars) for a
    monomial ideal, by pivoting on variables."""
    ring = I.ring
    if not I.is_monomial():
        raise BeiError("hilbert_numerator needs a monomial ideal")
    gens = frozenset(ring.packed(g[0][0]) for g in I.gens)

    def minimal(gs):
        gs = sorted(gs, key=ring.pdeg)
        out = []
        for x in gs:
            if not any(ring.pdivides(y, x) for y in out):
                out.append(x)
        return out

    @lru_cache(maxsize=None)
    def hn(gs: frozenset) -> tuple:
        gs = minimal(gs)
        if not gs:
            return (1,)
        if 0 in gs:
            return (0,)
        # pairwise coprime generators: product of (1 - t^deg)
        if all(ring.pgcd(a, b) == 0 for a, b in itertools.combinations(gs, 2)):
            poly = [1]
            for x in gs:
                d = ring.pdeg(x)
                nxt = [0] * (len(poly) + d)
                for i, c in enumerate(poly):
                    nxt[i] += c
                    nxt[i + d] -= c
                poly = nxt
            return tuple(poly)
        counts = {}
        for x in gs:
            for v, e in enumerate(ring.unpack(x)):
                if e:
                    counts[v] = counts.get(v, 0) + 1
        v = max(counts, key=lambda u: (counts[u], -u))
        xv = 1 << (8 * v)
        # 0 -> S/(M:x)(-1) -> S/M -> S/(M+x) -> 0
        plus = frozenset([x for x in gs if not ring.pdivides(xv, x)] + [xv])
        colon = frozenset(_colon_var(ring, x, v) for x in gs)
        a = hn(plus)
        b = hn(colon)
        out = [0] * max(len(a), len(b) + 1)
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i + 1] += c
        return tuple(out)

    res = list(hn(gens))
    while len(res) > 1 and res[-1] == 0:
        res.pop()
    return res


def _colon_var(ring, x, v):
    e = list(ring.unpack(x))
    if e[v]:
        e[v] -= 1
    return ring.pack(e)


def oracle_dim(g: Graph, m: int, char: int = 32003, cap: int = DEFAULT_GB_CAP,
               gb: Ideal | None = None, order: str = "degrevlex") -> int:
    """dim S/J_{K_m,g} via reduced GB, initial ideal and monomial_dim."""
    nv = m * len(g)
    if nv > cap:
        raise ResourceCapExceeded(f"{nv} variables exceed the GB cap {cap}", nvars=nv, cap=cap)
    if gb is None:
        gb = groebner_basis(build_ideal_generators(g, grid_ring(g, m, char, order)))
    return monomial_dim(initial_ideal(gb))


def intersect_all(ideals) -> Ideal:
    ideals = list(ideals)
    out = groebner_basis(ideals[0])
    for J in ideals[1:]:
        out = ideal_intersection(out, J)
    return out


def vertex_split(g: Graph, v: int, ctx: RingContext) -> tuple:
    """(J_{G_v}, (x_iv : i) + J_{G minus v}) in the ring of g; for an internal
    vertex v their intersection is J_G."""
    from ..graph import delete_vertices, saturate_neighborhood

    dense = g.dense_labels()
    sat = build_ideal_generators(saturate_neighborhood(g, v), ctx, dense)
    rest = build_ideal_generators(delete_vertices(g, [v]), ctx, dense)
    xs = []
    for i in range(1, ctx.m + 1):
        e = [0] * ctx.nvars
        e[ctx.var_index(i, dense[v])] = 1
        xs.append(ctx.poly([(e, 1)]))
    return sat, Ideal(ctx, tuple(xs) + rest.gens)

"""Buchberger's algorithm with Gebauer-Moeller pair pruning, plus the ideal
operations built on it (membership, equality, intersection, initial ideals)."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from ..errors import BeiError, ResourceCapExceeded
from .ring import RingContext

DEFAULT_MAX_PAIRS = 200_000
DEFAULT_MAX_BASIS = 20_000


@dataclass(frozen=True)
class Ideal:
    ring: RingContext
    gens: tuple

    def __post_init__(self):
        gens = tuple(g for g in self.gens if g)
        object.__setattr__(self, "gens", gens)

    def to_text(self) -> str:
        return "".join(self.ring.format_poly(g) + "\n" for g in self.gens)

    @classmethod
    def from_text(cls, ring: RingContext, text: str) -> "Ideal":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        return cls(ring, tuple(ring.parse_poly(ln) for ln in lines))

    def is_monomial(self) -> bool:
        return all(len(g) == 1 for g in self.gens)


class _Reducer:
    """Lead data of the current basis, scanned linearly for a divisor."""

    __slots__ = ("ring", "items")

    def __init__(self, ring):
        self.ring = ring
        self.items = []  # (lead packed, lead key, poly)

    def add(self, f):
        self.items.append((self.ring.packed(f[0][0]), f[0][0], f))

    def find(self, P):
        g = self.ring._c["guard"]
        for Pa, K, f in self.items:
            if ((P | g) - Pa) & g == g:
                return K, f
        return None


def normal_form(ring: RingContext, f, reducer) -> tuple:
    """Fully reduce ``f`` (dict or polynomial tuple) by the monic polynomials
    held in ``reducer``."""
    p = ring.char
    acc = dict(f)
    heap = [-k for k in acc]
    heapq.heapify(heap)
    out = []
    packed = ring.packed
    find = reducer.find
    while heap:
        K = -heapq.heappop(heap)
        c = acc.pop(K, 0)
        if not c:
            continue
        hit = find(packed(K))
        if hit is None:
            out.append((K, c))
            continue
        gK, g = hit
        q = K - gK
        for tK, tc in g[1:]:
            nk = tK + q
            old = acc.get(nk)
            if old is None:
                acc[nk] = (-c * tc) % p
                heapq.heappush(heap, -nk)
            else:
                acc[nk] = (old - c * tc) % p
    return tuple(out)


def _reducer_for(ring, polys):
    r = _Reducer(ring)
    for f in polys:
        r.add(f)
    return r


def groebner_basis(I: Ideal, max_pairs: int = DEFAULT_MAX_PAIRS,
                   max_basis: int = DEFAULT_MAX_BASIS) -> Ideal:
    """Reduced Groebner basis of ``I`` with respect to its ring's order."""
    ring = I.ring
    polys = []       # every basis element ever added, by index
    leads = []       # packed lead monomials
    active = []      # indices currently in G
    pairs = []       # heap of (deg lcm, lcm key, i, j)
    plcm, pdivides = ring.plcm, ring.pdivides
    kfp = ring.key_from_packed

    def coprime(Pa, Pb):
        return ring.pgcd(Pa, Pb) == 0

    def update(h):
        nonlocal active, pairs
        Ph = leads[h]
        cand = [(g, plcm(Ph, leads[g])) for g in active]
        # M: drop pairs whose lcm is strictly divisible by another new lcm
        cand = [(g, L) for g, L in cand
                if not any(L2 != L and pdivides(L2, L) for _, L2 in cand)]
        # F and product criterion: one pair per lcm, none if any is coprime
        groups = {}
        for g, L in cand:
            groups.setdefault(L, []).append(g)
        survivors = []
        for item in pairs:
            _, _, i, j, L = item
            if pdivides(Ph, L) and plcm(leads[i], Ph) != L and plcm(leads[j], Ph) != L:
                continue
            survivors.append(item)
        for L, gs in groups.items():
            if any(coprime(Ph, leads[g]) for g in gs):
                continue
            survivors.append((ring.pdeg(L), kfp(L), gs[0], h, L))
        heapq.heapify(survivors)
        pairs = survivors
        active = [g for g in active if not pdivides(Ph, leads[g])] + [h]

    def add(f):
        idx = len(polys)
        polys.append(f)
        leads.append(ring.packed(f[0][0]))
        update(idx)
        if len(active) > max_basis:
            raise ResourceCapExceeded("Groebner basis size cap exceeded", basis=len(active))

    start = sorted((ring.monic(g) for g in I.gens if g), key=lambda f: f[0][0])
    for f in start:
        red = normal_form(ring, f, _reducer_for(ring, [polys[i] for i in active]))
        if red:
            add(ring.monic(red))

    processed = 0
    while pairs:
        _, _, i, j, L = heapq.heappop(pairs)
        processed += 1
        if processed > max_pairs:
            raise ResourceCapExceeded("Groebner pair cap exceeded", pairs=processed)
        s = spoly(ring, polys[i], polys[j])
        if not s:
            continue
        red = normal_form(ring, s, _reducer_for(ring, [polys[k] for k in active]))
        if red:
            add(ring.monic(red))

    return Ideal(ring, interreduce(ring, [polys[k] for k in active]))


def spoly(ring: RingContext, f, g) -> dict:
    p = ring.char
    L = ring.lcm(f[0][0], g[0][0])
    qf = L - f[0][0]
    qg = L - g[0][0]
    acc = {}
    for k, c in f[1:]:
        acc[k + qf] = c
    for k, c in g[1:]:
        nk = k + qg
        v = (acc.get(nk, 0) - c) % p
        if v:
            acc[nk] = v
        else:
            acc.pop(nk, None)
    return acc


def interreduce(ring: RingContext, polys) -> tuple:
    """Minimal, fully reduced, monic basis sorted by ascending lead monomial."""
    polys = [ring.monic(f) for f in polys if f]
    polys.sort(key=lambda f: f[0][0])
    minimal = []
    for f in polys:
        Pf = ring.packed(f[0][0])
        if any(ring.pdivides(ring.packed(g[0][0]), Pf) for g in minimal):
            continue
        minimal.append(f)
    out = []
    for i, f in enumerate(minimal):
        others = _reducer_for(ring, minimal[:i] + minimal[i + 1:])
        tail = normal_form(ring, dict(f[1:]), others)
        out.append((f[0],) + tail)
    return tuple(out)


def reduce_poly(gb: Ideal, f) -> tuple:
    return normal_form(gb.ring, f, _reducer_for(gb.ring, gb.gens))


def contains(gb: Ideal, f) -> bool:
    return not reduce_poly(gb, f)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    if I.ring != J.ring:
        raise BeiError("ideals live in different rings")
    return groebner_basis(I).gens == groebner_basis(J).gens


def initial_ideal(gb: Ideal) -> Ideal:
    return Ideal(gb.ring, tuple(((g[0][0], 1),) for g in gb.gens))


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    return Ideal(I.ring, I.gens + J.gens)


def _embed(src: RingContext, dst: RingContext, f, t_power: int) -> dict:
    """Map f into dst (one extra first variable t), multiplied by t^t_power."""
    out = {}
    for k, c in f:
        e = (t_power,) + src.exps(k)
        out[dst.mono(e)] = c
    return out


def ideal_intersection(I: Ideal, J: Ideal, max_pairs: int = DEFAULT_MAX_PAIRS) -> Ideal:
    """I ∩ J by eliminating t from t*I + (1-t)*J."""
    ring = I.ring
    if ring != J.ring:
        raise BeiError("ideals live in different rings")
    big = RingContext(ring.nvars + 1, ring.char, "elim", ("t",) + ring.names, 1)
    p = ring.char
    gens = []
    for f in I.gens:
        gens.append(big.from_dict(_embed(ring, big, f, 1)))
    for f in J.gens:
        a = _embed(ring, big, f, 0)
        b = _embed(ring, big, f, 1)
        d = dict(a)
        for k, c in b.items():
            d[k] = (d.get(k, 0) - c) % p
        gens.append(big.from_dict(d))
    gb = groebner_basis(Ideal(big, tuple(gens)), max_pairs=max_pairs)
    kept = []
    for g in gb.gens:
        if big.exps(g[0][0])[0] == 0:
            kept.append(ring.from_dict({ring.mono(big.exps(k)[1:]): c for k, c in g}))
    return groebner_basis(Ideal(ring, tuple(kept)))

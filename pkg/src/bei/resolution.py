"""Minimal graded Betti numbers of S/I from a Schreyer frame.

The frame is the (usually non-minimal) free resolution whose level-1 basis is
the reduced Groebner basis and whose level-(k+1) basis is the Schreyer
Groebner basis of the syzygies of level k.  Each frame element carries its
total monomial; in the Schreyer order a term x^a e_b is compared through
x^a * tm(b) first and the rank of b second, which lets a module term be packed
into a single int ``S = key(x^a * tm(b)) * R + rank(b)``.

Minimal Betti numbers are the homology of frame (x) K: a scalar entry of a
differential only joins two frame elements with the same total monomial, so
the ranks are computed block by block over those monomials.
"""

from __future__ import annotations

import bisect
import heapq
from collections import defaultdict
from dataclasses import dataclass, field

from .algebra.groebner import Ideal, groebner_basis
from .errors import BeiError, NonHomogeneousInput, ResourceCapExceeded

RANK_BITS = 40
DEFAULT_MAX_FRAME = 3_000_000


@dataclass(frozen=True)
class BettiTable:
    """Graded Betti numbers beta_{i,j} of S/I (only nonzero entries kept)."""

    nvars: int
    betti: tuple  # sorted ((i, j, beta), ...)
    frame_size: int = field(default=0, compare=False)

    @classmethod
    def from_dict(cls, nvars, d, frame_size=0):
        items = tuple(sorted((i, j, b) for (i, j), b in d.items() if b))
        return cls(nvars, items, frame_size)

    def as_dict(self) -> dict:
        return {(i, j): b for i, j, b in self.betti}

    def __getitem__(self, ij):
        return self.as_dict().get(ij, 0)

    @property
    def pd(self) -> int:
        return max(i for i, _, _ in self.betti)

    @property
    def reg(self) -> int:
        return max(j - i for i, j, _ in self.betti)

    @property
    def depth(self) -> int:
        return self.nvars - self.pd

    def totals(self) -> list:
        out = [0] * (self.pd + 1)
        for i, _, b in self.betti:
            out[i] += b
        return out

    def to_text(self) -> str:
        """Grid with rows j-i and columns i, "-" for zero entries."""
        d = self.as_dict()
        cols = range(self.pd + 1)
        grid = [["total:"] + [str(t) for t in self.totals()]]
        for r in range(self.reg + 1):
            grid.append([f"{r}:"] + [str(d.get((i, i + r), 0) or "-") for i in cols])
        lab = max(len(row[0]) for row in grid)
        width = max(len(c) for row in grid for c in row[1:] + [str(self.pd)])
        lines = [" " * lab + "".join(" " + str(i).rjust(width) for i in cols)]
        for row in grid:
            lines.append(row[0].rjust(lab) + "".join(" " + c.rjust(width) for c in row[1:]))
        return "\n".join(lines) + "\n"

    def hilbert_numerator(self) -> list:
        """Coefficients of sum_{i,j} (-1)^i beta_{i,j} t^j."""
        top = max(j for _, j, _ in self.betti)
        out = [0] * (top + 1)
        for i, j, b in self.betti:
            out[j] += (-1) ** i * b
        return out


def invariants_from_betti(t: BettiTable, dim: int | None = None) -> dict:
    depth = t.depth
    return {
        "depth": depth,
        "reg": t.reg,
        "pd": t.pd,
        "cm": None if dim is None else depth == dim,
    }


class _Level:
    __slots__ = ("tm", "deg", "par", "mu", "mup", "phi", "children", "memo")

    def __init__(self):
        self.tm = []
        self.deg = []
        self.par = []
        self.mu = []
        self.mup = []
        self.phi = []
        self.children = []
        self.memo = {}


def _rank_mod_p(rows: list, p: int) -> int:
    """Rank of a small dense matrix given as list of dicts col->value."""
    rank = 0
    pivots = {}
    for row in rows:
        r = dict(row)
        while r:
            col = min(r)
            if col in pivots:
                prow = pivots[col]
                f = r[col]
                for c2, v2 in prow.items():
                    nv = (r.get(c2, 0) - f * v2) % p
                    if nv:
                        r[c2] = nv
                    else:
                        r.pop(c2, None)
            else:
                inv = pow(r[col], -1, p)
                pivots[col] = {c2: v2 * inv % p for c2, v2 in r.items()}
                rank += 1
                break
    return rank


def minimal_graded_resolution(I: Ideal, max_vars: int | None = None,
                              max_frame: int = DEFAULT_MAX_FRAME,
                              max_degree: int | None = None,
                              gb: Ideal | None = None) -> BettiTable:
    """Graded Betti numbers of S/I for a homogeneous ideal I.

    ``max_degree`` truncates the frame to total degree <= max_degree; the table
    is then exact in those degrees only.  Raises ResourceCapExceeded when the
    ring has more than ``max_vars`` variables or the frame grows past
    ``max_frame`` elements.
    """
    ring = I.ring
    N = ring.nvars
    if ring.order != "degrevlex":
        ring = ring.with_order("degrevlex")
        I = Ideal(ring, tuple(ring.from_dict({ring.mono(I.ring.exps(k)): c for k, c in f})
                              for f in I.gens))
        gb = None
    if max_vars is not None and N > max_vars:
        raise ResourceCapExceeded(f"{N} variables exceed the resolution cap {max_vars}",
                                  nvars=N, cap=max_vars)
    for f in I.gens:
        if not ring.is_homogeneous(f):
            raise NonHomogeneousInput("resolution needs homogeneous generators")
    if gb is None:
        gb = groebner_basis(I)
    G = sorted(gb.gens, key=lambda f: f[0][0])
    if not G:
        return BettiTable.from_dict(N, {(0, 0): 1})
    if any(ring.deg(f[0][0]) == 0 for f in G):
        return BettiTable(N, ())

    p = ring.char
    R = 1 << RANK_BITS
    low = ring._c["low"]
    guard = ring._c["guard"]
    deg = ring.deg

    base = _Level()
    base.tm.append(0)
    base.deg.append(0)
    base.par.append(-1)
    base.mu.append(0)
    base.mup.append(0)
    base.phi.append(())
    levels = [base]

    lvl1 = _Level()
    for f in G:
        lk = f[0][0]
        if max_degree is not None and deg(lk) > max_degree:
            continue
        lvl1.tm.append(lk)
        lvl1.deg.append(deg(lk))
        lvl1.par.append(0)
        lvl1.mu.append(lk)
        lvl1.mup.append((-lk) & low)
        lvl1.phi.append(tuple((k * R, c) for k, c in f))
    base.children.append(list(range(len(lvl1.tm))))
    levels.append(lvl1)
    frame = len(lvl1.tm)

    while True:
        prev = levels[-2]
        cur = levels[-1]
        nxt = _Level()
        cur.children = [[] for _ in cur.tm]
        for b in range(len(cur.tm)):
            a = cur.par[b]
            sibs = prev.children[a]
            pos = bisect.bisect_left(sibs, b)
            if pos == 0:
                continue
            Pb = cur.mup[b]
            cands = {}
            for c in sibs[:pos]:
                Pc = cur.mup[c]
                L = ring.plcm(Pb, Pc)
                nu = L - Pb
                if nu not in cands:
                    cands[nu] = c
            keys = list(cands)
            minimal = []
            for nu in keys:
                dominated = False
                for other in keys:
                    if other != nu and ((nu | guard) - other) & guard == guard:
                        dominated = True
                        break
                if not dominated:
                    minimal.append(nu)
            made = []
            for nu in minimal:
                nk = ring.key_from_packed(nu)
                d = deg(nk) + cur.deg[b]
                if max_degree is not None and d > max_degree:
                    continue
                made.append((nk, nu, cands[nu]))
            made.sort()
            for nk, nu, c in made:
                idx = len(nxt.tm)
                nxt.tm.append(nk + cur.tm[b])
                nxt.deg.append(deg(nk) + cur.deg[b])
                nxt.par.append(b)
                nxt.mu.append(nk)
                nxt.mup.append(nu)
                nxt.phi.append((b, c))  # placeholder, filled below
                cur.children[b].append(idx)
        if not nxt.tm:
            break
        frame += len(nxt.tm)
        if frame > max_frame:
            raise ResourceCapExceeded("resolution frame cap exceeded", frame=frame)
        for e in range(len(nxt.tm)):
            b, c = nxt.phi[e]
            nxt.phi[e] = _syzygy(ring, prev, cur, b, c, nxt.mu[e], R, p, low, guard)
        levels.append(nxt)

    # minimal Betti numbers from the scalar parts of the differentials
    f_count = defaultdict(int)
    for k, lv in enumerate(levels):
        for d in lv.deg:
            f_count[(k, d)] += 1
    rank_at = defaultdict(int)  # (k, tm) -> rank of scalar block of d_k
    for k in range(1, len(levels)):
        lv, lo = levels[k], levels[k - 1]
        blocks = defaultdict(list)
        for e, phi in enumerate(lv.phi):
            row = {}
            for S, c in phi:
                a = S % R
                if S // R == lo.tm[a]:  # multiplier 1, so a unit entry
                    row[a] = c
            if row:
                blocks[lv.deg[e]].append(row)
        for d, rows in blocks.items():
            rank_at[(k, d)] += _rank_mod_p(rows, p)
    betti = {}
    for (k, d), f in f_count.items():
        b = f - rank_at.get((k, d), 0) - rank_at.get((k + 1, d), 0)
        if b:
            betti[(k, d)] = b
    return BettiTable.from_dict(N, betti, frame)


def _syzygy(ring, lo, cur, b, c, nu, R, p, low, guard):
    """phi of the frame element with lead nu*e_b built from sibling c < b.

    The S-vector nu*phi(b) - (nu*mu_b/mu_c)*phi(c) lives in the module one
    level down; it reduces to zero against the current level's elements and
    the quotients give the remaining terms of the syzygy.
    """
    shift_b = nu * R
    qc = nu + cur.mu[b] - cur.mu[c]
    shift_c = qc * R
    acc = {}
    for S, v in cur.phi[b][1:]:
        acc[S + shift_b] = v
    for S, v in cur.phi[c][1:]:
        k = S + shift_c
        nv = (acc.get(k, 0) - v) % p
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    out = [((nu + cur.tm[b]) * R + b, 1), ((qc + cur.tm[c]) * R + c, p - 1)]
    memo = cur.memo
    children = lo.children
    lo_tm = lo.tm
    mup = cur.mup
    mu = cur.mu
    tm = cur.tm
    phis = cur.phi
    heap = [-S for S in acc]
    heapq.heapify(heap)
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        S = -pop(heap)
        v = acc.pop(S, 0)
        if not v:
            continue
        hit = memo.get(S)
        if hit is None:
            a = S % R
            mono = S // R - lo_tm[a]
            P = (-mono) & low
            for d in children[a]:
                if ((P | guard) - mup[d]) & guard == guard:
                    break
            else:
                raise BeiError("Schreyer reduction stalled: frame is inconsistent")
            q = mono - mu[d]
            hit = (d, q * R, (q + tm[d]) * R + d)
            memo[S] = hit
        d, shift, qkey = hit
        out.append((qkey, (-v) % p))
        for S2, c2 in phis[d][1:]:
            k = S2 + shift
            old = acc.get(k)
            if old is None:
                acc[k] = (-v * c2) % p
                push(heap, -k)
            else:
                acc[k] = (old - v * c2) % p
    out.sort(reverse=True)
    return tuple(out)

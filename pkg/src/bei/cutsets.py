"""Sets with the cut point property, the minimal primes P_T they index, and
the combinatorial Krull dimension max_T c(T)(m-1) + |V| - |T|."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BeiError, GraphTooLarge
from .families import FanSpec, fan_graph
from .graph import Graph, connected_components, delete_vertices, neighbors

DEFAULT_ENUM_CAP = 20


@dataclass(frozen=True)
class CutSet:
    T: tuple            # sorted labels
    c: int              # number of components of G \ T
    components: tuple   # tuple of sorted label tuples, by minimal label


@dataclass(frozen=True)
class CutSetFamily:
    sets: tuple

    def Ts(self) -> list:
        return [cs.T for cs in self.sets]

    def __len__(self):
        return len(self.sets)


def _order_key(T):
    return (len(T), tuple(sorted(T)))


def _components(g: Graph, T) -> tuple:
    comps = connected_components(delete_vertices(g, T))
    return tuple(sorted(tuple(sorted(c)) for c in comps))


def has_cut_point_property(g: Graph, T) -> bool:
    T = set(T)
    if not T:
        return True
    base = len(connected_components(delete_vertices(g, T)))
    for v in T:
        if len(connected_components(delete_vertices(g, T - {v}))) >= base:
            return False
    return True


def _simplicial(g: Graph, v: int) -> bool:
    nb = sorted(neighbors(g, v))
    return all((a, b) in g.edges for i, a in enumerate(nb) for b in nb[i + 1:])


def cut_point_sets(g: Graph, cap: int = DEFAULT_ENUM_CAP) -> CutSetFamily:
    if len(g) > cap:
        raise GraphTooLarge(f"{len(g)} vertices exceed the enumeration cap {cap}",
                            nvertices=len(g), cap=cap)
    # simplicial vertices stay simplicial in induced subgraphs, so are never cut vertices
    cand = [v for v in g.vertices if not _simplicial(g, v)]
    out = []
    for size in range(len(cand) + 1):
        for T in itertools.combinations(cand, size):
            if has_cut_point_property(g, T):
                comps = _components(g, T)
                out.append(CutSet(tuple(T), len(comps), comps))
    out.sort(key=lambda cs: _order_key(cs.T))
    return CutSetFamily(tuple(out))


def fan_cut_point_sets(spec: FanSpec) -> CutSetFamily:
    """Closed form: unions of prefix sets of the parts, other than all of [n]."""
    g = fan_graph(spec)
    choices = [[()] + [tuple(part[: j + 1]) for j in range(len(part))]
               for part in spec.partition]
    base = set(range(1, spec.n + 1))
    out = []
    for pick in itertools.product(*choices):
        T = tuple(sorted(v for piece in pick for v in piece))
        if set(T) == base:
            continue
        comps = _components(g, T)
        out.append(CutSet(T, len(comps), comps))
    out.sort(key=lambda cs: _order_key(cs.T))
    return CutSetFamily(tuple(out))


@dataclass(frozen=True)
class PrimeRecipe:
    """P_T = (x_ij : j in T) + sum of J_{K_m, complete(C)} over components C."""

    m: int
    T: tuple
    components: tuple

    def dim(self, nvertices: int) -> int:
        return len(self.components) * (self.m - 1) + nvertices - len(self.T)


def minimal_prime_components(g: Graph, T, m: int) -> PrimeRecipe:
    T = tuple(sorted(set(T)))
    bad = [v for v in T if v not in g.vertices]
    if bad or not has_cut_point_property(g, T):
        raise BeiError(f"{T} does not have the cut point property", kind="T-not-in-family")
    return PrimeRecipe(m, T, _components(g, T))


def combinatorial_dim(g: Graph, m: int, cap: int = DEFAULT_ENUM_CAP, family=None):
    """(dim, witness): max over T of c(T)(m-1)+|V|-|T|; ties go to the first T
    in (size, lex) order."""
    if m < 2:
        raise BeiError("m must be at least 2")
    fam = family if family is not None else cut_point_sets(g, cap)
    best, witness = None, None
    nv = len(g)
    for cs in fam.sets:
        d = cs.c * (m - 1) + nv - len(cs.T)
        if best is None or d > best:
            best, witness = d, cs.T
    return best, witness

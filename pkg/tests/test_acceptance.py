"""Acceptance criteria, one test each.  Every test prints a single
``ACCEPTANCE <n> PASS|FAIL <summary>`` line (also when run with capture on).

    pytest tests/test_acceptance.py -v
    python3 tests/test_acceptance.py        # the same, as a plain script
"""

import random
import sys
import time
from functools import lru_cache

import pytest

from bei.algebra.groebner import ideal_equal
from bei.algebra.ideals import (
    build_ideal_generators, build_PT_ideal, grid_ring, intersect_all, oracle_dim, vertex_split,
)
from bei.cutsets import combinatorial_dim, cut_point_sets
from bei.dsl import parse_expr
from bei.errors import Contradiction, ShapeNotCovered
from bei.families import ATOMS, Circ, FanAtom, FpAtom, Star, realize
from bei.formulas import (
    chain_dim, circ_reg_bounds, composite_reg_upper, fan_dim, predict, star_reg_bounds,
)
from bei.graph import complete_graph, is_internal
from bei.harness import composite_exprs, fan_specs
from bei.resolution import minimal_graded_resolution

from strategies import random_expr

SECOND_PRIME = 10007


@pytest.fixture
def report(capsys):
    def emit(n, ok, summary, t0):
        line = f"ACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'} {summary} ({time.time() - t0:.1f}s)"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


@lru_cache(maxsize=None)
def betti(ser, m, char=32003):
    g = _graphs[ser]
    I = build_ideal_generators(g, grid_ring(g, m, char))
    return minimal_graded_resolution(I, max_vars=18)


_graphs = {}


def res(g, m, char=32003):
    _graphs[g.serialize()] = g
    return betti(g.serialize(), m, char)


def _fans(pure_only):
    return [s for s in fan_specs(4, 2, 2, pure_only)]


def test_01_determinantal_baseline(report):
    t0, bad = time.time(), []
    for m in (2, 3):
        for n in (2, 3):
            g = complete_graph(range(1, n + 1))
            t = res(g, m)
            got = (oracle_dim(g, m), t.depth, t.reg)
            if got != (m + n - 1, m + n - 1, min(m - 1, n - 1)):
                bad.append((m, n, got))
    report(1, not bad, f"K_n oracle, 4 instances, mismatches={bad}", t0)


def test_02_fan_dimension_triple(report):
    t0, bad, count = time.time(), [], 0
    for spec in _fans(False):
        g = realize(FanAtom(spec)).graph
        for m in (2, 3):
            if m * len(g) > 24:
                continue
            count += 1
            vals = (fan_dim(spec, m), combinatorial_dim(g, m)[0], oracle_dim(g, m))
            if len(set(vals)) != 1:
                bad.append((spec, m, vals))
    report(2, not bad and count > 0, f"fan dim formula = cut sets = GB on {count} instances, "
           f"mismatches={bad[:3]}", t0)


def _pure_instances():
    for spec in _fans(True):
        g = realize(FanAtom(spec)).graph
        for m in (2, 3):
            if m * len(g) <= 18:
                yield spec, g, m


def test_03_fan_depth(report):
    t0, bad, count = time.time(), [], 0
    for spec, g, m in _pure_instances():
        count += 1
        if res(g, m).depth != len(g) + m - 1:
            bad.append((spec, m))
    report(3, not bad and count > 0, f"pure fan depth = |V|+m-1 on {count} instances, bad={bad}", t0)


def test_04_pure_fan_reg(report):
    t0, bad, count = time.time(), [], 0
    for spec, g, m in _pure_instances():
        count += 1
        if res(g, m).reg != min(len(g) - 1, m + spec.k - 1):
            bad.append((spec, m, res(g, m).reg))
    report(4, not bad and count > 0, f"pure fan reg = min(|V|-1, m+k-1) on {count} instances, "
           f"bad={bad}", t0)


def _fp_instances():
    for p in (1, 2, 3):
        for m in (2, 3):
            if m * 2 * p <= 18:
                yield p, m


def test_05_fp_invariants(report):
    t0, bad, count = time.time(), [], 0
    for p, m in _fp_instances():
        g = realize(FpAtom(p)).graph
        t = res(g, m)
        d = oracle_dim(g, m)
        want = (m + 2 * p - 1 + (p - 1) * (m - 2), m + 2 * p - 1, min(2 * p - 1, m + 1),
                p == 1 or m == 2)
        got = (d, t.depth, t.reg, t.depth == d)
        count += 1
        if got != want:
            bad.append((p, m, got, want))
    report(5, not bad, f"F_p dim/depth/reg/cm on {count} instances, bad={bad}", t0)


def test_06_decomposition_identity(report):
    t0, bad, count = time.time(), [], 0
    graphs = [realize(FanAtom(s)).graph for s in _fans(False)]
    graphs += [realize(FpAtom(p)).graph for p in (1, 2, 3)]
    seen = set()
    for g in graphs:
        if len(g) > 5 or g.serialize() in seen:
            continue
        seen.add(g.serialize())
        r = grid_ring(g, 2)
        J = build_ideal_generators(g, r)
        primes = [build_PT_ideal(g, cs.T, r) for cs in cut_point_sets(g).sets]
        ok = ideal_equal(intersect_all(primes), J)
        for v in g.vertices:
            if is_internal(g, v):
                ok = ok and ideal_equal(intersect_all(vertex_split(g, v, r)), J)
        count += 1
        if not ok:
            bad.append(g.serialize())
    report(6, not bad and count > 0, f"decomposition and vertex-split identities on {count} "
           f"graphs, bad={bad}", t0)


def _composites():
    out = []
    for text in composite_exprs(20, 2, 18):
        e = parse_expr(text)
        out.append((text, e, realize(e).graph))
    return out


def test_07_ffan_depth(report):
    t0, bad = time.time(), []
    comps = _composites()
    for text, e, g in comps:
        if res(g, 2).depth != 2 + len(g) - 1:
            bad.append(text)
    report(7, not bad and len(comps) == 20, f"composite depth = m+|V|-1 on {len(comps)} "
           f"expressions, bad={bad}", t0)


def _intervals(e, m):
    out = []
    if isinstance(e, (Circ, Star)) and isinstance(e.left, ATOMS) and isinstance(e.right, ATOMS):
        fn = circ_reg_bounds if isinstance(e, Circ) else star_reg_bounds
        try:
            out.append((fn.__name__, fn(e, m)))
        except ShapeNotCovered:
            pass
    try:
        out.append(("composite_reg_upper", composite_reg_upper(e, m)))
    except ShapeNotCovered:
        pass
    out.append(("predict", predict(e, m).reg))
    return out


def test_08_regularity_sandwiches(report):
    t0, bad, checks = time.time(), [], 0
    cases = _composites() + [(t, parse_expr(t), realize(parse_expr(t)).graph)
                             for t in ("circ(Fp(3)@6, Fp(3)@1)", "star(Fp(2)@4, path(3)@1)")]
    for text, e, g in cases:
        r = res(g, 2).reg
        for name, v in _intervals(e, 2):
            checks += 1
            if not v.contains(r) or (v.exact and v.value != r):
                bad.append((text, name, v.lo, v.hi, r))
    named = (res(realize(parse_expr("circ(Fp(3)@6, Fp(3)@1)")).graph, 2).reg,
             res(realize(parse_expr("star(Fp(2)@4, path(3)@1)")).graph, 2).reg)
    ok = not bad and named == (6, 5)
    report(8, ok, f"{checks} interval checks on {len(cases)} expressions, "
           f"F3circF3={named[0]} F2starP3={named[1]}, bad={bad}", t0)


def test_09_chain_dimension(report):
    t0 = time.time()
    got = []
    for text in ("circ(Fp(3)@6, Fp(2)@1)", "circ(circ(Fp(3)@6, Fp(3)@1)@2:6, Fp(2)@1)"):
        e = parse_expr(text)
        got.append((chain_dim(e, 2).value, combinatorial_dim(realize(e).graph, 2)[0]))
    report(9, got == [(8, 8), (11, 11)], f"chain_dim, cut-set dim = {got}", t0)


def test_10_substitute(report):
    t0 = time.time()
    contradictions = []
    rng = random.Random(20261018)
    for i in range(200):
        e = random_expr(rng, rng.randint(1, 3))
        m = rng.randint(2, 6)
        try:
            rep = predict(e, m)
            for v in (rep.dim, rep.depth, rep.reg):
                if v.hi is not None and v.lo > v.hi:
                    contradictions.append(i)
        except Contradiction:
            contradictions.append(i)
    # criteria 3-5 again at a second prime, comparing the whole Betti table
    graphs = [(g, m) for _, g, m in _pure_instances()]
    graphs += [(realize(FpAtom(p)).graph, m) for p, m in _fp_instances()]
    drift = [(g.serialize(), m) for g, m in graphs
             if res(g, m).betti != res(g, m, SECOND_PRIME).betti
             or oracle_dim(g, m) != oracle_dim(g, m, char=SECOND_PRIME)]
    ok = not contradictions and not drift
    report(10, ok, f"200 random predictions, contradictions={contradictions}; "
           f"{len(graphs)} Betti tables identical at {SECOND_PRIME}, drift={drift}", t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

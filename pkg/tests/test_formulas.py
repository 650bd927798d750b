import random

import pytest
from hypothesis import given, settings, strategies as st

from bei.cutsets import combinatorial_dim
from bei.dsl import parse_expr
from bei.errors import BeiError, Contradiction
from bei.families import (
    Circ, FanAtom, FanSpec, FpAtom, KAtom, MarkRef, PathAtom, Star, fan_graph, realize,
)
from bei.formulas import (
    InvariantValue, chain_dim, circ_reg_bounds, composite_reg_upper, exact, fan_dim,
    fan_invariants, ffan_depth, fp_invariants, lower, path_invariants, predict,
    star_reg_bounds, upper,
)

from strategies import fan_specs, random_expr

F = FpAtom
WHISKER = FanSpec(3, ((1,),), ((2,),))


def c(a, b, la, lb, aa=None, ab=None):
    return Circ(a, b, MarkRef(la, aa), MarkRef(lb, ab))


def s(a, b, la, lb, aa=None, ab=None):
    return Star(a, b, MarkRef(la, aa), MarkRef(lb, ab))


def triple(rep):
    return rep.dim.value, rep.depth.value, rep.reg.value


def test_combine_rules():
    v = InvariantValue.combine("reg", [upper("a", 5), lower("b", 2)])
    assert (v.kind, v.lo, v.hi) == ("interval", 2, 5)
    v = InvariantValue.combine("reg", [upper("a", 5), exact("b", 3)])
    assert (v.kind, v.value) == ("exact", 3)
    # meeting bounds are not a certificate
    assert InvariantValue.combine("reg", [upper("a", 3), lower("b", 3)]).kind == "interval"
    with pytest.raises(Contradiction):
        InvariantValue.combine("reg", [exact("a", 3), exact("b", 4)])
    with pytest.raises(Contradiction):
        InvariantValue.combine("reg", [upper("a", 2), lower("b", 3)])


def test_fan_examples():
    assert triple(fan_invariants(WHISKER, 2)) == (5, 5, 2)
    for n in (2, 3, 5):
        for m in (2, 3, 6):
            assert triple(fan_invariants(FanSpec(n), m)) == (m + n - 1, m + n - 1, min(m - 1, n - 1))
    r = fan_invariants(FanSpec(4, ((1,),), ((3,),)), 5).reg
    assert r.kind == "interval" and r.hi == 8
    with pytest.raises(BeiError):
        fan_invariants(WHISKER, 1)


def test_fp_examples():
    assert triple(fp_invariants(2, 3)) == (7, 6, 3)
    for m in (2, 3, 5):
        assert triple(fp_invariants(1, m)) == (m + 1, m + 1, 1)
    assert triple(fp_invariants(3, 2)) == (7, 7, 3)
    assert fp_invariants(2, 3).cm is False and fp_invariants(3, 2).cm is True


def test_path_examples():
    assert path_invariants(2, 2).depth.value == 3 and path_invariants(2, 2).reg.value == 1
    assert path_invariants(3, 2).depth.value == 4 and path_invariants(3, 2).reg.value == 2
    rep = path_invariants(3, 3)
    assert rep.dim.value == 6 and rep.cutset_dim == (6, (2,))


def test_ffan_depth_examples():
    assert ffan_depth(F(3), 2).value == 7
    p5 = c(F(2), F(2), 4, 1)
    assert len(realize(p5).graph) == 5 and ffan_depth(p5, 2).value == 6
    fa = FanAtom(FanSpec(4, ((1,),), ((2,),)))
    assert ffan_depth(s(F(3), fa, 6, 5), 3).value == 12
    with pytest.raises(BeiError) as e:
        ffan_depth(KAtom(3), 2)
    assert e.value.kind == "not-an-ffan-expression"


def test_circ_examples():
    assert circ_reg_bounds(c(F(3), F(3), 6, 1), 5).value == 7
    assert circ_reg_bounds(c(F(3), F(3), 6, 1), 2).value == 6
    with pytest.raises(BeiError) as e:
        circ_reg_bounds(c(PathAtom(3), PathAtom(3), 1, 1), 2)
    assert e.value.kind == "operand-shape-unsupported"


def test_star_examples():
    assert star_reg_bounds(s(F(3), PathAtom(3), 6, 1), 2).value == 5
    assert star_reg_bounds(s(F(3), F(3), 6, 1), 2).value == 6
    assert star_reg_bounds(s(F(2), PathAtom(3), 4, 1), 2).value == 5
    v = star_reg_bounds(s(F(3), F(3), 6, 1), 4)
    assert v.hi == 8


def test_star_333_predict():
    r = predict(s(F(3), F(3), 6, 1), 4).reg
    assert r.hi == 8 and r.lo <= 8


def _example_one():
    f35 = FanAtom(FanSpec(5, ((1,), (2,), (3,)), ((2,), (2,), (2,))))
    f24 = FanAtom(FanSpec(4, ((1,), (2,)), ((2,), (2,))))
    e = c(f35, F(3), 8, 1)
    e = s(e, f24, 6, 5, 2)
    e = s(e, PathAtom(2), 6, 1, 3)
    return s(e, F(3), 2, 1, 4)


def _example_two():
    e = s(F(3), F(4), 6, 1)
    e = s(e, PathAtom(5), 8, 1)
    e = s(e, F(3), 5, 1)
    return c(e, F(4), 6, 1)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_composite_examples(m):
    # ell-sum (m+2)+(m+1)+(m+1)+1+(m+1) over the five atoms
    assert composite_reg_upper(_example_one(), m).hi == 4 * m + 6
    assert composite_reg_upper(_example_two(), m).hi == 4 * m + 8
    assert composite_reg_upper(F(3), m).hi == m + 1


def test_composite_at_m2_contains_16():
    r = predict(_example_two(), 2).reg
    assert r.contains(16) and r.hi == 16


def test_composite_error_kind():
    with pytest.raises(BeiError) as e:
        composite_reg_upper(c(FanAtom(FanSpec(3, ((1,), (2,)), ((2,), (3,)))), F(2), 4, 1), 2)
    assert e.value.kind == "atom-shape-unsupported"


def test_chain_dim_examples():
    e1 = c(F(3), F(2), 6, 1)
    e2 = c(c(F(3), F(3), 6, 1), F(2), 6, 1, 2)
    assert chain_dim(e1, 2).value == 8
    assert chain_dim(e2, 2).value == 11
    for e in (e1, e2):
        assert combinatorial_dim(realize(e).graph, 2)[0] == chain_dim(e, 2).value
        assert ffan_depth(e, 2).value == chain_dim(e, 2).value
    with pytest.raises(BeiError) as e:
        chain_dim(s(F(3), F(2), 6, 1), 2)
    assert e.value.kind == "shape-not-covered"


def test_predict_examples():
    r = predict(F(2), 3)
    assert triple(r) == (7, 6, 3) and r.cm is False
    r = predict(FanAtom(WHISKER), 2)
    assert r.dim.exact and r.depth.exact and r.reg.exact and r.cm is True


def test_predict_accepts_parsed_text():
    e = parse_expr("circ(Fp(3)@6, Fp(3)@1)")
    assert predict(e, 2).reg.value == 6


# consistency properties

@settings(max_examples=40)
@given(fan_specs(n_max=5, h_max=3), st.integers(2, 7))
def test_fan_report_consistent(spec, m):
    rep = predict(FanAtom(spec), m)
    assert rep.depth.lo <= rep.dim.lo
    assert rep.dim.value == fan_dim(spec, m)
    if rep.cm is not None and rep.depth.exact and rep.dim.exact:
        assert rep.cm == (rep.depth.value == rep.dim.value)
    V = len(fan_graph(spec))
    assert rep.reg.hi is None or rep.reg.hi <= V - 1


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6), st.integers(2, 6), st.integers(1, 3))
def test_random_expressions_never_contradict(seed, m, depth):
    e = random_expr(random.Random(seed), depth)
    rep = predict(e, m)  # Contradiction would propagate
    V = len(realize(e).graph)
    if rep.depth.exact:
        assert rep.depth.value <= rep.dim.lo
    for v in (rep.dim, rep.depth, rep.reg):
        assert v.hi is None or v.lo <= v.hi
    try:
        up = composite_reg_upper(e, m)
    except BeiError:
        return
    if rep.reg.exact:
        assert up.hi >= rep.reg.value
    assert rep.reg.hi is None or rep.reg.hi <= V - 1


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.integers(2, 5))
def test_ffan_depth_below_dim(seed, m):
    e = random_expr(random.Random(seed), 2)
    try:
        d = ffan_depth(e, m)
    except BeiError:
        return
    g = realize(e).graph
    if len(g) <= 16:
        assert d.value <= combinatorial_dim(g, m)[0]

import random

import pytest
from hypothesis import given, strategies as st

from bei.dsl import emit, parse_expr, tokenize
from bei.errors import DslError
from bei.families import Circ, FanAtom, FanSpec, FpAtom, KAtom, MarkRef, PathAtom, Star, realize

from strategies import expressions, fan_specs, random_expr


def test_examples():
    assert parse_expr("Fp(3)") == FpAtom(3)
    e = parse_expr("circ(Fp(3)@6, Fp(3)@1)")
    assert e == Circ(FpAtom(3), FpAtom(3), MarkRef(6), MarkRef(1))
    assert len(realize(e).graph) == 9
    assert parse_expr("fan(3; W=[[1]]; a=[[2]])") == FanAtom(FanSpec(3, ((1,),), ((2,),)))
    assert parse_expr("K(3)") == KAtom(3) and parse_expr("path(4)") == PathAtom(4)


def test_whitespace_and_defaults():
    a = parse_expr("  star(\n Fp(2) @ 4 ,\tpath(3)@1 ) ")
    assert a == Star(FpAtom(2), PathAtom(3), MarkRef(4), MarkRef(1))
    # omitted a means pure branches
    assert parse_expr("fan(4; W=[[1,2]])") == FanAtom(FanSpec(4, ((1, 2),), ((2, 3),)))


def test_qualified_marks():
    e = parse_expr("star(circ(Fp(3)@6, Fp(3)@1)@2:6, Fp(2)@1)")
    assert e.lmark == MarkRef(6, 2)
    assert emit(e) == "star(circ(Fp(3)@6, Fp(3)@1)@2:6, Fp(2)@1)"


def test_emit_canonical():
    assert emit(parse_expr("fan( 4 ;W=[[1],[2,3]];a=[[2],[2,3]])")) == \
        "fan(4; W=[[1],[2,3]]; a=[[2],[2,3]])"
    assert emit(parse_expr("fan(3; W=[[1]]; a=[[2]]; marks=[4])")) == \
        "fan(3; W=[[1]]; a=[[2]]; marks=[4])"


@pytest.mark.parametrize("text,line,col,kind", [
    ("Fp(3", 1, 5, "syntax-error"),
    ("Fq(3)", 1, 1, "syntax-error"),
    ("circ(Fp(3)@6 Fp(3)@1)", 1, 14, "syntax-error"),
    ("Fp(3)\n  $", 2, 3, "syntax-error"),
    ("circ(Fp(3)@6,\n Fp(3)@3)", 2, 7, "semantic-error"),
    ("fan(3; W=[[1]]; a=[[1]])", 1, 17, "semantic-error"),
    ("fan(3; W=[[4]])", 1, 8, "semantic-error"),
    ("fan(3; W=[[1]]; W=[[2]])", 1, 17, "semantic-error"),
    ("circ(Fp(3)@6, Fp(3)@1) x", 1, 24, "syntax-error"),
])
def test_error_positions(text, line, col, kind):
    with pytest.raises(DslError) as e:
        parse_expr(text)
    assert (e.value.line, e.value.col, e.value.kind) == (line, col, kind)


def test_expected_set():
    with pytest.raises(DslError) as e:
        parse_expr("circ(Fp(3)@6 Fp(3)@1)")
    assert "," in e.value.expected


def test_tokens_track_lines():
    toks = tokenize("a\n  b")
    assert [(t.line, t.col) for t in toks[:2]] == [(1, 1), (2, 3)]


@given(expressions(depth=3))
def test_parse_emit_fixpoint(e):
    text = emit(e)
    again = parse_expr(text)
    assert again == e
    assert emit(again) == text
    assert realize(again).graph == realize(e).graph


@given(fan_specs(n_max=5, h_max=3), st.booleans())
def test_fan_roundtrip(spec, with_marks):
    marks = spec.default_marks()[:1] if with_marks and spec.default_marks() else None
    a = FanAtom(spec, marks)
    assert parse_expr(emit(a)) == a

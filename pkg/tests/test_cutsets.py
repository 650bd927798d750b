import pytest
from hypothesis import given

from bei.cutsets import (
    combinatorial_dim, cut_point_sets, fan_cut_point_sets, has_cut_point_property,
    minimal_prime_components,
)
from bei.errors import BeiError, GraphTooLarge
from bei.families import FanSpec, fan_graph, realize_fp, realize_path
from bei.formulas import fan_dim
from bei.graph import Graph, complete_graph, delete_vertices, num_components

from strategies import fan_specs
from test_graph import graphs

P3 = realize_path(3).graph
K3 = complete_graph([1, 2, 3])
WHISKER_SPEC = FanSpec(3, ((1,),), ((2,),))
WHISKER = fan_graph(WHISKER_SPEC)


def test_cut_point_sets_examples():
    assert cut_point_sets(P3).Ts() == [(), (2,)]
    assert cut_point_sets(K3).Ts() == [()]
    assert cut_point_sets(WHISKER).Ts() == [(), (1,)]


def test_enumeration_cap():
    with pytest.raises(GraphTooLarge):
        cut_point_sets(realize_path(21).graph)


def test_fan_closed_form_examples():
    assert fan_cut_point_sets(WHISKER_SPEC).Ts() == [(), (1,)]
    assert fan_cut_point_sets(FanSpec(3, ((1, 2),), ((2, 3),))).Ts() == [(), (1,), (1, 2)]
    assert fan_cut_point_sets(FanSpec(4)).Ts() == [()]


def test_prime_components():
    r = minimal_prime_components(P3, {2}, 2)
    assert r.components == ((1,), (3,))
    assert minimal_prime_components(P3, (), 3).components == ((1, 2, 3),)
    assert minimal_prime_components(WHISKER, {1}, 2).components == ((2, 3), (4,))
    with pytest.raises(BeiError) as e:
        minimal_prime_components(P3, {1}, 2)
    assert e.value.kind == "T-not-in-family"


def test_combinatorial_dim_examples():
    for n in range(1, 6):
        for m in (2, 3, 4):
            assert combinatorial_dim(complete_graph(range(1, n + 1)), m) == (m + n - 1, ())
    assert combinatorial_dim(WHISKER, 2) == (5, ())
    fam = cut_point_sets(WHISKER)
    assert {cs.c * 1 + 4 - len(cs.T) for cs in fam.sets} == {5}
    assert combinatorial_dim(realize_fp(2).graph, 3)[0] == 7


def test_witness_tie_break():
    # P_4 at m=3: T={2} and T={3} tie at 7; the smaller label wins
    d, w = combinatorial_dim(realize_path(4).graph, 3)
    assert d == 7 and w == (2,)


@given(fan_specs(n_max=4, h_max=2))
def test_fan_family_agrees(spec):
    assert fan_cut_point_sets(spec).Ts() == cut_point_sets(fan_graph(spec)).Ts()
    for m in (2, 3, 4):
        assert combinatorial_dim(fan_graph(spec), m)[0] == fan_dim(spec, m)


@given(graphs(max_n=8))
def test_family_invariants(g):
    fam = cut_point_sets(g)
    assert fam.sets[0].T == () and fam.sets[0].c == num_components(g)
    for cs in fam.sets:
        assert has_cut_point_property(g, cs.T)
        for v in cs.T:
            rest = set(cs.T) - {v}
            assert num_components(delete_vertices(g, cs.T)) > num_components(delete_vertices(g, rest))


@given(graphs(max_n=7))
def test_dim_bounds_and_pendant_monotone(g):
    if num_components(g) == 1:
        assert combinatorial_dim(g, 2)[0] >= len(g)
    for v in g.vertices[:2]:
        new = max(g.vertices) + 1
        h = Graph(g.vertices + (new,), list(g.edges) + [(v, new)])
        for m in (2, 3):
            assert combinatorial_dim(h, m)[0] >= combinatorial_dim(g, m)[0]

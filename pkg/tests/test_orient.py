import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circst.graph import CirculantSpec, Graph, build_circulant, complete, cycle, graph_catalog, wheel
from circst.orient import (
    NOT_SEMI_TRANSITIVE,
    SEMI_TRANSITIVE,
    UNKNOWN,
    Orientation,
    ShortcutWitness,
    bipartite_transitive_orientation,
    check_w5_witness,
    decide_semi_transitive,
    exhaustive_semi_transitive,
    find_shortcut,
    find_w5_obstruction,
    is_acyclic,
    is_semi_transitive,
    is_transitive,
    natural_orientation,
    obstruction_scan,
)

from _oracles import has_cycle, naive_semi_transitive_orientation


def circ(text: str) -> Graph:
    return build_circulant(CirculantSpec.parse(text))


@st.composite
def orientations(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.sets(st.sampled_from(pairs)))
    flips = draw(st.lists(st.booleans(), min_size=len(edges), max_size=len(edges)))
    arcs = [(j, i) if f else (i, j) for (i, j), f in zip(sorted(edges), flips)]
    return Orientation(Graph.from_edges(n, edges), frozenset(arcs))


class TestOrientationType:
    def test_rejects_missing_or_double_arcs(self):
        g = cycle(4)
        with pytest.raises(ValueError):
            Orientation(g, frozenset([(0, 1), (1, 2), (2, 3)]))
        with pytest.raises(ValueError):
            Orientation.from_arcs(2, [(0, 1), (1, 0)])

    def test_dot_and_json(self):
        o = natural_orientation(cycle(4))
        assert o.to_dot().splitlines()[1:] == ["  0 -> 1;", "  0 -> 3;", "  1 -> 2;", "  2 -> 3;", "}"]
        assert Orientation.from_dict(json.loads(o.to_json())) == o


class TestNatural:
    def test_k4_transitive(self):
        o = natural_orientation(complete(4))
        assert is_transitive(o)

    def test_difference_window(self):
        o = natural_orientation(circ("C(9;3,4)"))
        assert {v - u for u, v in o.arcs} == {3, 4, 5, 6}

    def test_c5(self):
        assert natural_orientation(cycle(5)).sorted_arcs() == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]


class TestAcyclicTransitive:
    def test_natural_is_acyclic(self):
        assert is_acyclic(natural_orientation(circ("C(6;1,2)")))

    def test_cyclic_triangle(self):
        assert not is_acyclic(Orientation.from_arcs(3, [(0, 1), (1, 2), (2, 0)]))

    def test_path_not_transitive(self):
        assert not is_transitive(Orientation.from_arcs(3, [(0, 1), (1, 2)]))

    def test_transitive_needs_acyclic(self):
        with pytest.raises(ValueError):
            is_transitive(Orientation.from_arcs(3, [(0, 1), (1, 2), (2, 0)]))

    def test_bipartite_orientation(self):
        o = bipartite_transitive_orientation(circ("C(6;1,3)"))
        assert is_transitive(o) and is_semi_transitive(o)

    def test_k2(self):
        assert bipartite_transitive_orientation(complete(2)).sorted_arcs() == [(0, 1)]

    def test_c14_135(self):
        assert is_semi_transitive(bipartite_transitive_orientation(circ("C(14;1,3,5)")))

    def test_non_bipartite_rejected(self):
        with pytest.raises(ValueError):
            bipartite_transitive_orientation(cycle(5))


class TestShortcut:
    def test_four_cycle_shortcut(self):
        o = Orientation.from_arcs(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        w = find_shortcut(o)
        assert w == ShortcutWitness((0, 1, 2, 3), (0, 3), (0, 2))
        assert w.validate(o)
        assert not is_semi_transitive(o)

    def test_four_cycle_without_long_path(self):
        o = Orientation.from_arcs(4, [(0, 1), (2, 1), (2, 3), (0, 3)])
        assert find_shortcut(o) is None

    def test_cyclic_input_rejected(self):
        with pytest.raises(ValueError):
            find_shortcut(Orientation.from_arcs(3, [(0, 1), (1, 2), (2, 0)]))

    def test_cyclic_not_semi_transitive(self):
        assert not is_semi_transitive(Orientation.from_arcs(3, [(0, 1), (1, 2), (2, 0)]))

    def test_witness_json(self):
        w = ShortcutWitness((0, 1, 2, 3), (0, 3), (0, 2))
        assert w.to_dict() == {"path": [0, 1, 2, 3], "closing_arc": [0, 3], "missing_pair": [0, 2]}
        assert ShortcutWitness.from_dict(w.to_dict()) == w

    def test_tampered_witness_fails(self):
        o = Orientation.from_arcs(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert not ShortcutWitness((0, 1, 2, 3), (0, 3), (0, 1)).validate(o)
        assert not ShortcutWitness((0, 2, 3), (0, 3), (0, 2)).validate(o)

    @settings(max_examples=400, deadline=None)
    @given(orientations())
    def test_agrees_with_path_enumeration(self, o):
        arcs = set(o.arcs)
        assert is_acyclic(o) == (not has_cycle(o.order, arcs))
        assert is_semi_transitive(o) == naive_semi_transitive_orientation(o.base, arcs)
        if is_acyclic(o):
            w = find_shortcut(o)
            assert w is None or w.validate(o)

    @settings(max_examples=200, deadline=None)
    @given(orientations())
    def test_implications(self, o):
        if is_semi_transitive(o):
            assert is_acyclic(o)
        if is_acyclic(o) and is_transitive(o):
            assert is_semi_transitive(o)
        # reversing every arc preserves semi-transitivity
        assert is_semi_transitive(o) == is_semi_transitive(o.reversed())


class TestCirculantOrientations:
    def test_a1_quarter_small(self):
        o = natural_orientation(circ("C(9;3,4)"))
        assert is_semi_transitive(o)

    def test_natural_fails_below_quarter(self):
        # a1 = 1 < (8+1)/4, outside the quarter bound
        o = natural_orientation(circ("C(8;1,2)"))
        w = find_shortcut(o)
        assert w is not None and w.validate(o)


class TestDecide:
    def test_w5(self):
        v = decide_semi_transitive(wheel(5))
        assert v.verdict == NOT_SEMI_TRANSITIVE and v.evidence == "exhausted-search"

    def test_w5_oracle(self):
        assert exhaustive_semi_transitive(wheel(5)) is None

    def test_c4(self):
        v = decide_semi_transitive(cycle(4))
        assert v.verdict == SEMI_TRANSITIVE and is_semi_transitive(v.orientation)

    def test_c13_1_5(self):
        v = decide_semi_transitive(circ("C(13;1,5)"), budget=10**6)
        assert v.verdict == SEMI_TRANSITIVE and is_semi_transitive(v.orientation)

    def test_budget_exhaustion_is_unknown(self):
        v = decide_semi_transitive(circ("C(14;1,3,4,5)"), budget=3)
        assert v.verdict == UNKNOWN and v.budget_spent == 3

    def test_verdict_json(self):
        d = decide_semi_transitive(wheel(5)).to_dict()
        assert d["verdict"] == NOT_SEMI_TRANSITIVE and d["evidence"] == "exhausted-search"
        assert isinstance(d["budget_spent"], int)

    def test_edgeless_and_empty(self):
        assert decide_semi_transitive(Graph(3)).verdict == SEMI_TRANSITIVE
        assert decide_semi_transitive(Graph(0)).verdict == SEMI_TRANSITIVE

    def test_catalog_up_to_five(self):
        for order in range(1, 6):
            for g in graph_catalog(order):
                expected = exhaustive_semi_transitive(g) is not None
                got = decide_semi_transitive(g).verdict == SEMI_TRANSITIVE
                assert got == expected, g

    @pytest.mark.parametrize("text", ["C(9;1,2)", "C(10;1,3)", "C(11;2,5)", "C(12;1,5)", "C(15;2,7)"])
    def test_four_regular_circulants(self, text):
        assert decide_semi_transitive(circ(text)).verdict == SEMI_TRANSITIVE

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 7).flatmap(lambda n: st.tuples(
        st.just(n), st.sets(st.sampled_from(list(itertools.combinations(range(n), 2))), max_size=12)
    )))
    def test_random_graphs_against_enumeration(self, data):
        n, edges = data
        g = Graph.from_edges(n, edges)
        assert (decide_semi_transitive(g).verdict == SEMI_TRANSITIVE) == (exhaustive_semi_transitive(g) is not None)


class TestW5Obstruction:
    def test_out_of_range_set_fails(self):
        assert find_w5_obstruction(CirculantSpec.parse("C(16;3,4,5,6)")) is None

    def test_strict_range(self):
        spec = CirculantSpec.parse("C(26;6,7,8,9,10,11,12)")
        w = find_w5_obstruction(spec)
        assert w is not None and w.vertices == (0, 5, 6, 11, 13, 20)
        assert check_w5_witness(spec, w)

    def test_boundary_n_4t_plus_1(self):
        # t = (n-1)/4 exactly: 2t+1 = n-2t, so 0 and 2t+1 are adjacent and the set is not W5
        spec = CirculantSpec.parse("C(21;5,6,7,8,9,10)")
        assert find_w5_obstruction(spec) is None
        g = build_circulant(spec)
        assert g.adjacent(0, 11)
        # and the graph is in fact semi-transitive
        assert is_semi_transitive(natural_orientation(g))

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            find_w5_obstruction(CirculantSpec.parse("C(21;5,6,7)"))

    def test_range_to_sixty(self):
        for n in range(10, 61):
            for t in range(3, n):
                if 5 * t >= n + 1 and 4 * t <= n - 1:
                    spec = CirculantSpec(n, tuple(range(t, 2 * t + 1)))
                    w = find_w5_obstruction(spec)
                    if 4 * t < n - 1:
                        assert w is not None and check_w5_witness(spec, w), spec
                    else:
                        assert w is None, spec
                        assert is_semi_transitive(natural_orientation(build_circulant(spec))), spec


class TestObstructionScan:
    def test_w5_plus_isolated(self):
        g = Graph.from_edges(7, wheel(5).edges)
        ob = obstruction_scan(g, 6)
        assert ob is not None and ob.vertices == (0, 1, 2, 3, 4, 5)

    def test_c6(self):
        assert obstruction_scan(cycle(6), 6) is None

    def test_order_limit(self):
        with pytest.raises(ValueError):
            obstruction_scan(cycle(6), 9)

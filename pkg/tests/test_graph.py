import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgm.errors import ValidationError
from qgm.graph import (SeparatorTriple, SiteGraph, connected_components, maximal_cliques, neighbors,
                       separator_triples, validate_triple)

from oracles import cliques_by_subsets, flood_fill, random_graph_edges, separated

PATH5 = SiteGraph.path(5)


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return SiteGraph.from_edges(n, edges)


class TestSiteGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError):
            SiteGraph(2, (2, 2), [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            SiteGraph(2, (2, 2), [(0, 2)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValidationError):
            SiteGraph(3, (2, 2, 2), [(0, 1), (1, 0)])

    def test_rejects_small_dimension(self):
        with pytest.raises(ValidationError):
            SiteGraph(2, (2, 1), [])

    def test_rejects_dims_length(self):
        with pytest.raises(ValidationError):
            SiteGraph(3, (2, 2), [])

    def test_json_round_trip(self):
        g = SiteGraph.from_edges(4, [(0, 1), (2, 1), (3, 2)], (2, 3, 2, 4))
        assert SiteGraph.from_dict(g.to_dict()) == g

    def test_from_dict_reports_duplicates(self):
        with pytest.raises(ValidationError):
            SiteGraph.from_dict({"vertices": 2, "local_dims": [2, 2], "edges": [[0, 1], [1, 0]]})

    def test_forest(self):
        assert PATH5.is_forest()
        assert not SiteGraph.complete(3).is_forest()


class TestNeighbors:
    def test_middle_of_path(self):
        assert neighbors(PATH5, {2}) == {1, 3}

    def test_all_vertices(self):
        assert neighbors(PATH5, set(range(5))) == frozenset()

    def test_end_pair(self):
        assert neighbors(PATH5, {0, 1}) == {2}

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            neighbors(PATH5, {5})

    @settings(max_examples=100, deadline=None)
    @given(graphs(), st.data())
    def test_disjoint_from_input(self, g, data):
        u = data.draw(st.sets(st.integers(0, g.vertex_count - 1)))
        assert not neighbors(g, u) & u


class TestMaximalCliques:
    def test_path(self):
        assert maximal_cliques(SiteGraph.path(3)) == [{0, 1}, {1, 2}]

    def test_triangle(self):
        assert maximal_cliques(SiteGraph.complete(3)) == [{0, 1, 2}]

    def test_isolated_vertex(self):
        g = SiteGraph.from_edges(3, [(0, 1)])
        assert maximal_cliques(g) == [{0, 1}, {2}]

    def test_random_8_vertex_graphs(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            edges = random_graph_edges(rng, 8, rng.uniform(0.2, 0.8))
            g = SiteGraph.from_edges(8, edges)
            found = maximal_cliques(g)
            assert len(found) == len(set(found))
            assert set(found) == cliques_by_subsets(8, edges)

    @settings(max_examples=100, deadline=None)
    @given(graphs())
    def test_matches_subset_enumeration(self, g):
        found = maximal_cliques(g)
        assert len(found) == len(set(found))
        assert set(found) == cliques_by_subsets(g.vertex_count, g.edges)


class TestSeparatorTriples:
    def test_path_single_vertices(self):
        triples = separator_triples(PATH5, max_A=1)
        first = [t for t in triples if t.A == {0}][0]
        assert first.B == {1} and first.C == {2, 3, 4}
        # A={4} has remainder {0,1,2}; every single vertex yields a triple
        assert len(triples) == 5

    def test_complete_graph_has_none(self):
        assert separator_triples(SiteGraph.complete(3), max_A=3) == []

    def test_path_max_a_2_against_exhaustive(self):
        triples = separator_triples(PATH5, max_A=2)
        got = {(t.A, t.B, t.C) for t in triples}
        expected = set()
        for size in (1, 2):
            for a in itertools.combinations(range(5), size):
                a = frozenset(a)
                if size == 2 and max(a) - min(a) != 1:
                    continue
                b = frozenset(v for v in range(5) if v not in a and any(abs(v - w) == 1 for w in a))
                c = frozenset(range(5)) - a - b
                if c:
                    assert separated(5, PATH5.edges, a, b, c)
                    expected.add((a, b, c))
        assert got == expected

    def test_rejects_bad_max_a(self):
        with pytest.raises(ValidationError):
            separator_triples(PATH5, 0)

    @settings(max_examples=100, deadline=None)
    @given(graphs(max_n=7), st.integers(1, 3))
    def test_separation_by_flood_fill(self, g, max_a):
        for t in separator_triples(g, max_a):
            assert t.A | t.B | t.C == frozenset(g.vertices)
            for a in t.A:
                assert not flood_fill(g.vertex_count, g.edges, a, t.B) & t.C
            assert separated(g.vertex_count, g.edges, t.A, t.B, t.C)

    def test_only_connected_a(self):
        for t in separator_triples(SiteGraph.path(6), max_A=2):
            assert len(connected_components(SiteGraph.path(6), removed=set(range(6)) - t.A)) == 1


class TestTripleValidation:
    def test_disjointness(self):
        with pytest.raises(ValidationError):
            SeparatorTriple({0, 1}, {1}, {2})

    def test_nonempty(self):
        with pytest.raises(ValidationError):
            SeparatorTriple(set(), {1}, {2})

    def test_must_cover(self):
        with pytest.raises(ValidationError):
            validate_triple(PATH5, SeparatorTriple({0}, {1}, {2, 3}))

    def test_must_separate(self):
        with pytest.raises(ValidationError):
            validate_triple(PATH5, SeparatorTriple({0, 1}, {3}, {2, 4}))
        validate_triple(PATH5, SeparatorTriple({0, 1}, {3}, {2, 4}), require_separation=False)

import networkx as nx
import numpy as np
import pytest

from kgdom.errors import GraphError
from kgdom.knodel import (
    KnodelGraph, VertexSet, automorphism_to_root, build, check_structure, even_mask, neighbors,
    parity_automorphism, parity_bipartition,
)
from kgdom.numtheory import floor_log2
from testcase.base_test import BaseTest


class TestBuild(BaseTest):

    def test_kg6(self):
        g = build(6)
        assert g.degree == 2
        assert g.offsets == (1, 3)
        assert g.neighbor_list(0) == [1, 3]
        assert neighbors(g, 0).vertices() == [1, 3]
        assert g.neighbor(2, 2) == 1

    def test_kg20(self):
        g = build(20)
        assert g.degree == 4
        assert g.offsets == (1, 3, 7, 15)
        assert sorted(g.neighbor_list(4)) == [3, 11, 17, 19]

    def test_power_of_two_uses_last_offset(self):
        g = build(64)
        assert g.offsets[-1] == 63
        assert g.degree == 6

    def test_generalised_degree(self):
        g = build(40, degree=3)
        assert g.degree == 3
        assert g.offsets == (1, 3, 7)

    def test_neighbor_examples(self):
        assert neighbors(build(8), 5).vertices() == [2, 4, 6]
        assert neighbors(build(20), 19).vertices() == [2, 4, 8, 16]

    def test_lower_degree_is_a_subgraph(self):
        for n in self.even_range(6, 130):
            for degree in range(1, floor_log2(n)):
                smaller = set(build(n, degree).edges())
                assert smaller <= set(build(n, degree + 1).edges()), f"n={n}, degree={degree}"

    @pytest.mark.parametrize("n", [5, 7, 4, 0, -2])
    def test_rejects_bad_n(self, n):
        with pytest.raises(GraphError):
            build(n)

    @pytest.mark.parametrize("n,degree", [(12, 4), (20, 5), (20, 0)])
    def test_rejects_bad_degree(self, n, degree):
        with pytest.raises(GraphError):
            build(n, degree)

    def test_vertex_range_checked(self):
        g = build(10)
        with pytest.raises(GraphError):
            g.neighbors(10)
        with pytest.raises(GraphError):
            g.neighbor(0, 4)

    def test_closed_form_matches_rows(self):
        g = build(46)
        for v in range(g.n):
            assert g.neighbors(v) == g.neighbors_closed_form(v)

    def test_sparse_graph_skips_rows(self):
        g = KnodelGraph(64, 6, dense_max_n=32)
        assert not g.is_dense
        assert g.neighbors(5).vertices() == sorted(g.neighbor_list(5))
        with pytest.raises(GraphError):
            _ = g.rows


class TestStructure(BaseTest):

    def test_structure_up_to_4096(self):
        """Every KG_n for even n in [6, 4096] is regular, symmetric, loop-free and parity-bipartite."""
        failures = []
        for n in self.even_range(6, 4096):
            report = check_structure(build(n, dense_max_n=0))
            if not report.ok:
                failures.append((n, report))
        assert failures == []

    def test_structure_of_generalised_graphs(self):
        for n in self.even_range(8, 200):
            for degree in range(1, floor_log2(n) + 1):
                assert check_structure(build(n, degree)).ok, f"n={n}, degree={degree}"

    def test_against_networkx(self):
        for n in (6, 20, 30, 64, 100):
            graph = nx.Graph(build(n).edges())
            degrees = {d for _, d in graph.degree()}
            assert degrees == {floor_log2(n)}
            assert nx.is_bipartite(graph)
            assert nx.is_connected(graph)
            assert graph.number_of_edges() == n * floor_log2(n) // 2
            assert all((u + v) % 2 == 1 for u, v in graph.edges())

    def test_dominator_counts_sum(self):
        g = build(30)
        d = VertexSet.from_vertices(30, [0, 5, 17])
        counts = g.dominator_counts(d)
        assert counts.sum() == 3 * g.degree
        for v in range(30):
            assert counts[v] == (g.neighbors(v) & d).size


class TestParity(BaseTest):

    def test_even_mask(self):
        assert even_mask(6) == 0b010101
        assert even_mask(8) == 0b01010101

    def test_bipartition(self):
        evens, odds = parity_bipartition(build(12))
        assert evens.vertices() == [0, 2, 4, 6, 8, 10]
        assert odds.vertices() == [1, 3, 5, 7, 9, 11]

    @pytest.mark.parametrize("n", [6, 20, 30, 38, 64])
    def test_automorphism_preserves_edges(self, n):
        g = build(n)
        edges = set(g.edges())
        for s in range(0, n, 2):
            perm = parity_automorphism(g, s)
            assert sorted(perm) == list(range(n))
            mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in edges}
            assert mapped == edges

    @pytest.mark.parametrize("n", [6, 20, 38, 64])
    def test_swapped_automorphism_preserves_edges(self, n):
        g = build(n)
        edges = set(g.edges())
        for s in (0, 2, n - 2):
            perm = parity_automorphism(g, s, swap=True)
            mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in edges}
            assert mapped == edges

    def test_every_vertex_maps_to_root(self):
        g = build(30)
        edges = set(g.edges())
        for v in range(g.n):
            perm = automorphism_to_root(g, v)
            assert perm[v] == 0
            assert sorted(perm) == list(range(g.n))
            assert {tuple(sorted((perm[a], perm[b]))) for a, b in edges} == edges

    def test_automorphism_needs_even_shift(self):
        with pytest.raises(GraphError):
            parity_automorphism(build(10), 3)


class TestVertexSet(BaseTest):

    def test_array_round_trip(self):
        d = VertexSet.from_vertices(70, [0, 9, 33, 69])
        assert VertexSet.from_array(70, d.to_array()) == d
        assert d.to_mask().sum() == 4
        assert d.to_mask()[69]

    def test_set_algebra(self):
        a = VertexSet.from_vertices(10, [1, 2, 3])
        b = VertexSet.from_vertices(10, [3, 4])
        assert (a | b).vertices() == [1, 2, 3, 4]
        assert (a & b).vertices() == [3]
        assert (a - b).vertices() == [1, 2]
        assert 2 in a and 4 not in a and 11 not in a
        assert len(a) == 3
        assert a.parity_split() == (1, 2)

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphError):
            VertexSet.from_vertices(6, [6])
        with pytest.raises(GraphError):
            VertexSet.from_array(6, np.array([-1]))
        with pytest.raises(GraphError):
            VertexSet(6, 1 << 6)
        with pytest.raises(GraphError):
            VertexSet.from_vertices(6, [1]) | VertexSet.from_vertices(8, [1])

import pytest

from kgdom.construct import check_thm1_preconditions, construct_thm1
from kgdom.errors import GraphError, VerificationError
from kgdom.knodel import VertexSet, build, parity_bipartition
from kgdom.verify import Prop1Verdict, certify, prop1_check, prop1_conditions
from testcase.base_test import BaseTest


class TestCertify(BaseTest):

    def test_kg6_single_vertex(self):
        cert = certify(build(6), VertexSet.from_vertices(6, [0]))
        assert not cert.dominating
        assert cert.undominated.vertices() == [2, 4, 5]

    def test_kg6_pair_is_efficient(self):
        cert = certify(build(6), VertexSet.from_vertices(6, [0, 5]))
        assert cert.dominating
        assert cert.independent
        assert cert.perfect
        assert cert.efficient
        assert cert.parity_split == (1, 1)

    def test_kg8_pair_is_efficient(self):
        cert = certify(build(8), VertexSet.from_vertices(8, [0, 5]))
        assert cert.dominating
        assert cert.efficient
        assert cert.parity_split == (1, 1)

    def test_adjacent_pair_not_independent(self):
        cert = certify(build(6), VertexSet.from_vertices(6, [0, 1]))
        assert not cert.independent
        assert not cert.efficient

    def test_odd_side_dominates(self):
        g = build(40)
        _, odds = parity_bipartition(g)
        cert = certify(g, odds)
        assert cert.dominating
        assert not cert.perfect

    def test_empty_and_full(self):
        g = build(10)
        assert not certify(g, VertexSet.empty(10)).dominating
        assert certify(g, VertexSet.full(10)).dominating

    def test_rejects_foreign_vertices(self):
        with pytest.raises(GraphError):
            certify(build(10), VertexSet.from_vertices(12, [11]))

    def test_record(self):
        rec = certify(build(20), construct_thm1(20, check_thm1_preconditions(20, 5)).set).to_record()
        assert rec["dominating"] is True
        assert rec["efficient"] is True
        assert rec["undominated"] == []
        assert rec["parity_split"] == [2, 2]


class TestProp1(BaseTest):

    def test_thm1_sets_meeting_berge(self):
        for n, p in ((20, 5), (30, 5), (6, 3)):
            g = build(n)
            d = construct_thm1(n, check_thm1_preconditions(n, p)).set
            verdict = prop1_conditions(g, d)
            assert verdict.holds, f"n={n}: {verdict.failures()}"
            assert prop1_check(g, d)

    def test_wrong_size_raises(self):
        g = build(20)
        with pytest.raises(VerificationError):
            prop1_conditions(g, VertexSet.from_vertices(20, [0, 9, 10]))

    def test_non_integer_ratio_raises(self):
        g = build(22)
        with pytest.raises(VerificationError):
            prop1_conditions(g, VertexSet.from_vertices(22, range(5)))

    def test_non_dominating_raises(self):
        g = build(20)
        with pytest.raises(VerificationError):
            prop1_conditions(g, VertexSet.from_vertices(20, [0, 2, 4, 6]))

    def test_failures_listed(self):
        verdict = Prop1Verdict(efficient=True, even_size=False, balanced=False)
        assert not verdict.holds
        assert verdict.failures() == ["even_size", "balanced"]

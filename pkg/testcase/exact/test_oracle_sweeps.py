import pytest

from kgdom.construct import best_bound
from kgdom.exact import Inconclusive, exact_gamma
from kgdom.knodel import VertexSet, automorphism_to_root, build
from kgdom.verify import certify, prop1_conditions, prop2_lower
from testcase.base_test import BaseTest


class TestOracleSweeps(BaseTest):
    """Bounds, prop1 and prop2 checked against the oracle over a range of n."""

    def check(self, hi):
        checked = 0
        inconclusive = []
        for n in self.even_range(6, hi):
            g = build(n)
            result = exact_gamma(g, config=self.config)
            if isinstance(result, Inconclusive):
                self.logger.warning(f"n={n}: inconclusive in [{result.lower}, {result.upper}]")
                inconclusive.append(n)
                continue

            report = best_bound(n).with_gamma(result.gamma)
            assert report.sandwich_holds(), f"n={n}: {report.lower} <= {result.gamma} <= {report.upper}"

            p2 = prop2_lower(n, g.degree)
            if p2 is not None:
                assert result.gamma >= p2, f"n={n}"

            if n % (g.degree + 1) == 0 and result.gamma == n // (g.degree + 1):
                verdict = prop1_conditions(g, result.witness_set)
                assert verdict.holds, f"n={n}: {verdict.failures()}"
                checked += 1

            if report.gamma_known is not None:
                assert result.gamma == report.gamma_known
        assert inconclusive == [], f"oracle inconclusive for n in {inconclusive}"
        return checked

    def test_sweep_to_40(self):
        assert self.check(40) >= 3

    def test_prop2_instance_n76(self):
        assert prop2_lower(76, 6) == 12
        assert best_bound(76).lower == 12

    def test_witness_moves_to_every_root(self):
        g = build(30)
        witness = exact_gamma(g).witness_set
        for v in witness.vertices():
            perm = automorphism_to_root(g, v)
            moved = VertexSet.from_vertices(g.n, [perm[u] for u in witness.vertices()])
            assert 0 in moved
            assert certify(g, moved).dominating, f"v={v}"

    @pytest.mark.stress
    def test_sweep_to_128(self):
        self.check(128)

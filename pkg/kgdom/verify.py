"""Certificates for vertex sets and the lower bounds on the domination number."""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple, List, Dict, Any

import numpy as np

from kgdom.errors import GraphError, VerificationError
from kgdom.knodel import VertexSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    dominating: bool
    independent: bool
    perfect: bool
    efficient: bool
    undominated: VertexSet
    parity_split: Tuple[int, int]

    def to_record(self) -> Dict[str, Any]:
        return {
            "dominating": self.dominating,
            "independent": self.independent,
            "perfect": self.perfect,
            "efficient": self.efficient,
            "undominated": self.undominated.vertices(),
            "parity_split": list(self.parity_split),
        }


def certify(g, d: VertexSet) -> Certificate:
    """Exhaustive neighbourhood scan of d in g."""
    if d.bits >> g.n:
        raise GraphError(f"set has vertices >= n={g.n}")
    if d.n != g.n:
        d = VertexSet(g.n, d.bits)

    counts = g.dominator_counts(d)
    in_d = d.to_mask()
    dominated = in_d | (counts > 0)
    undominated = VertexSet.from_array(g.n, np.flatnonzero(~dominated))

    dominating = undominated.size == 0
    independent = not bool((counts[in_d] > 0).any())
    perfect = dominating and bool((counts[~in_d] == 1).all())
    cert = Certificate(
        dominating=dominating,
        independent=independent,
        perfect=perfect,
        efficient=perfect and independent,
        undominated=undominated,
        parity_split=d.parity_split(),
    )
    if not dominating:
        logger.debug(f"set of size {d.size} leaves {undominated.size} vertices undominated in {g!r}")
    return cert


class BoundSource(Enum):
    BERGE = "berge"
    PROP2 = "prop2"
    COUNTING = "counting"
    THM1 = "thm1"
    THM2 = "thm2"
    QUARTER = "quarter"
    HALF = "half"


# 同值時的優先順序
_UPPER_RANK = {BoundSource.THM1: 0, BoundSource.THM2: 1, BoundSource.QUARTER: 2, BoundSource.HALF: 3}


@dataclass(frozen=True)
class UpperBound:
    value: int
    source: BoundSource
    p: Optional[int] = None
    e: Optional[int] = None

    @property
    def modulus(self) -> int:
        return self.p ** self.e if self.p else 0

    def sort_key(self):
        return self.value, _UPPER_RANK[self.source], -self.modulus

    def label(self) -> str:
        if self.p is None:
            return self.source.value
        if self.e == 1:
            return f"{self.source.value}(p={self.p})"
        return f"{self.source.value}(p={self.p},k={self.e})"


@dataclass(frozen=True)
class BoundReport:
    n: int
    degree: int
    lower_berge: int
    lower_prop2: Optional[int]
    lower_counting: int
    uppers: Tuple[UpperBound, ...]
    gamma_exact: Optional[int] = None
    gamma_known: Optional[int] = None

    def __post_init__(self):
        # kept in sort_key order
        object.__setattr__(self, "uppers", tuple(sorted(self.uppers, key=UpperBound.sort_key)))

    @property
    def lower(self) -> int:
        return max(self.lower_berge, self.lower_prop2 or 0, self.lower_counting)

    @property
    def best(self) -> Optional[UpperBound]:
        if not self.uppers:
            return None
        return min(self.uppers, key=UpperBound.sort_key)

    @property
    def upper(self) -> Optional[int]:
        best = self.best
        return best.value if best else None

    def sandwich_holds(self) -> bool:
        upper = self.upper if self.upper is not None else self.n
        if self.gamma_exact is None:
            return self.lower <= upper
        return self.lower <= self.gamma_exact <= upper

    def with_gamma(self, gamma: Optional[int]) -> "BoundReport":
        return replace(self, gamma_exact=gamma)

    def to_record(self) -> Dict[str, Any]:
        best = self.best
        return {
            "n": self.n,
            "degree": self.degree,
            "lower_berge": self.lower_berge,
            "lower_prop2": self.lower_prop2,
            "lower_counting": self.lower_counting,
            "uppers": [{"value": u.value, "source": u.source.value, "p": u.p, "e": u.e}
                       for u in self.uppers],
            "best_upper": best.value if best else None,
            "best_source": best.label() if best else None,
            "gamma_exact": self.gamma_exact,
            "gamma_known": self.gamma_known,
        }

    @classmethod
    def from_record(cls, rec: Dict[str, Any]) -> "BoundReport":
        return cls(
            n=rec["n"],
            degree=rec["degree"],
            lower_berge=rec["lower_berge"],
            lower_prop2=rec.get("lower_prop2"),
            lower_counting=rec.get("lower_counting", rec["lower_berge"]),
            uppers=tuple(UpperBound(u["value"], BoundSource(u["source"]), u.get("p"), u.get("e"))
                         for u in rec.get("uppers", [])),
            gamma_exact=rec.get("gamma_exact"),
            gamma_known=rec.get("gamma_known"),
        )


def berge_lower(n: int, degree: int) -> int:
    """ceil(n / (degree + 1))."""
    return -(-n // (degree + 1))


def prop2_lower(n: int, degree: int) -> Optional[int]:
    """2j + 2 when n = 2j(k+1) + r with 4 <= r < k+1, else None."""
    if degree < 2:
        return None
    q, r = divmod(n, degree + 1)
    if q % 2 == 0 and r >= 4:
        return q + 2
    return None


def bipartite_cover_lower(even_need: int, odd_need: int, k: int) -> int:
    """Least a + b with a + k*b >= even_need and k*a + b >= odd_need.

    A chosen vertex covers itself on its own side and at most k vertices on
    the other side of a k-regular bipartite graph.
    """
    even_need, odd_need = max(0, even_need), max(0, odd_need)
    if even_need == 0 and odd_need == 0:
        return 0
    if k == 0:
        return even_need + odd_need
    if k == 1:
        return max(even_need, odd_need)
    s = max(-(-(even_need + odd_need) // (k + 1)), -(-max(even_need, odd_need) // k))
    while True:
        a_lo = max(0, -((s - odd_need) // (k - 1)))
        a_hi = min(s, (k * s - even_need) // (k - 1))
        if a_lo <= a_hi:
            return s
        s += 1


def parity_counting_lower(n: int, degree: int) -> int:
    return bipartite_cover_lower(n // 2, n // 2, degree)


@dataclass(frozen=True)
class Prop1Verdict:
    efficient: bool
    even_size: bool
    balanced: bool

    @property
    def holds(self) -> bool:
        return self.efficient and self.even_size and self.balanced

    def failures(self) -> List[str]:
        return [name for name, ok in (("efficient", self.efficient),
                                      ("even_size", self.even_size),
                                      ("balanced", self.balanced)) if not ok]


def prop1_conditions(g, d: VertexSet) -> Prop1Verdict:
    """Necessary conditions on a set meeting the bound n/(k+1) exactly."""
    k = g.degree
    if g.n % (k + 1) != 0:
        raise VerificationError(f"n/(k+1) = {g.n}/{k + 1} is not an integer")
    if d.size != g.n // (k + 1):
        raise VerificationError(f"set size {d.size} is not n/(k+1) = {g.n // (k + 1)}")
    cert = certify(g, d)
    if not cert.dominating:
        raise VerificationError(f"set does not dominate; {cert.undominated.size} vertices uncovered")
    evens, odds = cert.parity_split
    verdict = Prop1Verdict(efficient=cert.efficient, even_size=(d.size % 2 == 0), balanced=(evens == odds))
    if not verdict.holds:
        logger.warning(f"prop1 conditions fail on {g!r}: {verdict.failures()}")
    return verdict


def prop1_check(g, d: VertexSet) -> bool:
    return prop1_conditions(g, d).holds

"""Exact domination number by iterative deepening over a bounded-size search.

Starting from the root lower bound, each size s below the greedy incumbent is
decided by kgdom.search: the search covers an uncovered vertex with the fewest
remaining dominators, one branch per undominated candidate, and prunes with
fractional, packing and bipartite counting bounds. The first feasible s is
gamma. A plain exhaustive enumeration is kept to validate the search on small
graphs.
"""
import time
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, Any, List, Optional, Union

from kgdom.config import SolverConfig
from kgdom.errors import GraphError
from kgdom.knodel import VertexSet, build
from kgdom.search import BudgetExceeded, DominationSearch
from kgdom.verify import berge_lower, parity_counting_lower, prop2_lower

logger = logging.getLogger(__name__)

_TIME_CHECK_MASK = 1023


class Method(Enum):
    EXHAUSTIVE = "Exhaustive"
    BRANCH_BOUND = "BranchBound"


@dataclass(frozen=True)
class Budget:
    max_nodes: int = SolverConfig.node_budget
    max_seconds: float = SolverConfig.time_budget_s

    @classmethod
    def from_config(cls, config: SolverConfig) -> "Budget":
        return cls(config.node_budget, config.time_budget_s)


@dataclass(frozen=True)
class SolveResult:
    gamma: int
    witness_set: VertexSet
    nodes_explored: int
    method: Method
    time_ms: float

    def to_record(self) -> Dict[str, Any]:
        return {
            "status": "solved",
            "gamma": self.gamma,
            "witness": self.witness_set.vertices(),
            "nodes": self.nodes_explored,
            "method": self.method.value,
            "time_ms": round(self.time_ms, 3),
        }


@dataclass(frozen=True)
class Inconclusive:
    """Budget ran out; lower and upper are still valid bounds."""
    lower: int
    upper: int
    best_set: Optional[VertexSet]
    nodes_explored: int
    method: Method
    time_ms: float
    reason: str = "budget exhausted"

    def to_record(self) -> Dict[str, Any]:
        return {
            "status": "inconclusive",
            "lower": self.lower,
            "upper": self.upper,
            "best_set": self.best_set.vertices() if self.best_set else None,
            "nodes": self.nodes_explored,
            "method": self.method.value,
            "time_ms": round(self.time_ms, 3),
            "reason": self.reason,
        }


def greedy_dominating_set(closed: List[int], n: int) -> int:
    """Iterated max-coverage greedy; ties go to the lowest vertex."""
    full = (1 << n) - 1
    covered = 0
    chosen = 0
    while covered != full:
        uncovered = full & ~covered
        best_v, best_gain = -1, 0
        for v in range(n):
            gain = (closed[v] & uncovered).bit_count()
            if gain > best_gain:
                best_v, best_gain = v, gain
        chosen |= 1 << best_v
        covered |= closed[best_v]
    return chosen


def root_lower_bound(g) -> int:
    if g.bipartite_regular:
        return max(berge_lower(g.n, g.degree),
                   prop2_lower(g.n, g.degree) or 0,
                   parity_counting_lower(g.n, g.degree))
    return berge_lower(g.n, g.degree)


def _check_ceiling(g, ceiling: int, method: Method, force: bool):
    if g.n > ceiling and not force:
        raise GraphError(f"n={g.n} exceeds the {method.value} ceiling {ceiling}; pass force=True to override")


def _exhaustive(g, budget: Budget) -> Union[SolveResult, Inconclusive]:
    start = time.monotonic()
    closed = g.closed_neighborhoods()
    full = (1 << g.n) - 1
    nodes = 0
    for s in range(1, g.n + 1):
        for combo in combinations(range(g.n), s):
            nodes += 1
            if nodes > budget.max_nodes or (nodes & _TIME_CHECK_MASK == 0
                                            and time.monotonic() - start > budget.max_seconds):
                return Inconclusive(s, g.n, None, nodes, Method.EXHAUSTIVE,
                                    (time.monotonic() - start) * 1000.0)
            covered = 0
            for v in combo:
                covered |= closed[v]
            if covered == full:
                return SolveResult(s, VertexSet.from_vertices(g.n, combo), nodes, Method.EXHAUSTIVE,
                                   (time.monotonic() - start) * 1000.0)
    raise GraphError(f"no dominating set found for {g!r}")


def exact_gamma(g, budget: Optional[Budget] = None, method: Method = Method.BRANCH_BOUND,
                config: Optional[SolverConfig] = None,
                force: bool = False) -> Union[SolveResult, Inconclusive]:
    """Domination number of g with a witness, or Inconclusive on budget exhaustion."""
    config = config or SolverConfig()
    budget = budget or Budget.from_config(config)

    if method is Method.EXHAUSTIVE:
        _check_ceiling(g, config.exhaustive_max_n, method, force)
        return _exhaustive(g, budget)

    _check_ceiling(g, config.bnb_max_n, method, force)
    closed = g.closed_neighborhoods()
    search = DominationSearch.for_graph(g, closed, budget.max_nodes, budget.max_seconds)
    start = time.monotonic()
    greedy = greedy_dominating_set(closed, g.n)
    upper = greedy.bit_count()
    lb = root_lower_bound(g)
    try:
        for s in range(lb, upper):
            found = search.decide(s)
            if found is not None:
                elapsed = (time.monotonic() - start) * 1000.0
                logger.info(f"{g!r}: gamma={len(found)} nodes={search.nodes} time={elapsed:.1f}ms")
                return SolveResult(len(found), VertexSet.from_vertices(g.n, found), search.nodes,
                                   Method.BRANCH_BOUND, elapsed)
            lb = s + 1
            logger.debug(f"{g!r}: no dominating set of size {s} ({search.nodes} nodes)")
    except BudgetExceeded as e:
        elapsed = (time.monotonic() - start) * 1000.0
        logger.warning(f"{g!r}: {e} exhausted after {search.nodes} nodes; bounds [{lb}, {upper}]")
        return Inconclusive(lb, upper, VertexSet(g.n, greedy), search.nodes, Method.BRANCH_BOUND,
                            elapsed, reason=f"{e} exhausted")
    elapsed = (time.monotonic() - start) * 1000.0
    logger.info(f"{g!r}: gamma={upper} nodes={search.nodes} time={elapsed:.1f}ms")
    return SolveResult(upper, VertexSet(g.n, greedy), search.nodes, Method.BRANCH_BOUND, elapsed)


def exists_dominating_of_size(g, s: int, budget: Optional[Budget] = None,
                              config: Optional[SolverConfig] = None,
                              force: bool = False) -> Union[bool, Inconclusive]:
    """Decide gamma(g) <= s."""
    if not 0 <= s <= g.n:
        raise GraphError(f"size {s} outside 0..{g.n}")
    if s == g.n:
        return True
    lb = root_lower_bound(g)
    if s < lb:
        return False

    config = config or SolverConfig()
    budget = budget or Budget.from_config(config)
    _check_ceiling(g, config.bnb_max_n, Method.BRANCH_BOUND, force)

    closed = g.closed_neighborhoods()
    search = DominationSearch.for_graph(g, closed, budget.max_nodes, budget.max_seconds)
    start = time.monotonic()
    greedy = greedy_dominating_set(closed, g.n)
    if greedy.bit_count() <= s:
        return True
    try:
        return search.decide(s) is not None
    except BudgetExceeded as e:
        return Inconclusive(lb, greedy.bit_count(), VertexSet(g.n, greedy), search.nodes,
                            Method.BRANCH_BOUND, (time.monotonic() - start) * 1000.0,
                            reason=f"{e} exhausted")


def fixed_degree_range(n: int, degree: int):
    """Cited closed-form range for the generalized graph of degree 3 or 4."""
    if degree == 3:
        base = 2 * (n // 8)
        return base, base + 2
    if degree == 4:
        base = 2 * (n // 10)
        return base, base + 4
    raise GraphError(f"fixed-degree ranges are known for degree 3 or 4, got {degree}")


def fixed_degree_gamma_range_check(n: int, degree: int, budget: Optional[Budget] = None,
                                   config: Optional[SolverConfig] = None) -> Union[bool, Inconclusive]:
    lo, hi = fixed_degree_range(n, degree)
    result = exact_gamma(build(n, degree), budget=budget, config=config)
    if isinstance(result, Inconclusive):
        return result
    ok = lo <= result.gamma <= hi
    if not ok:
        logger.error(f"degree {degree}, n={n}: gamma={result.gamma} outside [{lo}, {hi}]")
    return ok

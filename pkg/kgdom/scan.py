"""Range scans over even n: witnesses, bounds, exact gamma and conjecture verdicts."""
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import repeat
from typing import Any, Dict, Iterable, Iterator, List, Optional, TextIO, Tuple

import numpy as np

from kgdom import records as record_io
from kgdom.config import SolverConfig
from kgdom.construct import (
    best_bound, check_thm1_preconditions, check_thm2_preconditions, construct_thm1,
    construct_thm2, thm1_set, thm1_witnesses, thm2_set, thm2_witnesses,
)
from kgdom.errors import KnodelError, PreconditionError, PreconditionFailure
from kgdom.exact import Budget, Inconclusive, exact_gamma, exists_dominating_of_size
from kgdom.knodel import KnodelGraph, VertexSet, build
from kgdom.numtheory import (
    ceil_log2, factorize, floor_log2, is_odd_prime, is_primitive_root, prime_power_witness,
    primes_below,
)
from kgdom.verify import BoundReport, berge_lower, certify

logger = logging.getLogger(__name__)


class Verdict(Enum):
    SUPPORTED = "Supported"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"
    NOT_APPLICABLE = "NotApplicable"

    @property
    def conclusive(self) -> bool:
        return self in (Verdict.SUPPORTED, Verdict.REFUTED)


@dataclass(frozen=True)
class ConjectureOutcome:
    verdict: Verdict
    p: int
    e: int
    target: int
    evidence: str

    def to_record(self) -> Dict[str, Any]:
        return {"verdict": self.verdict.value, "p": self.p, "e": self.e,
                "target": self.target, "evidence": self.evidence}

    @classmethod
    def from_record(cls, rec: Dict[str, Any]) -> "ConjectureOutcome":
        return cls(Verdict(rec["verdict"]), rec["p"], rec["e"], rec["target"], rec["evidence"])


def aggregate(outcomes: Iterable[ConjectureOutcome]) -> Verdict:
    verdicts = [o.verdict for o in outcomes]
    if not verdicts:
        return Verdict.NOT_APPLICABLE
    if Verdict.REFUTED in verdicts:
        return Verdict.REFUTED
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.SUPPORTED


def conjecture1_primes(n: int) -> List[int]:
    """Odd primes p <= ceil(log n) with 2 primitive mod p; p need not divide n."""
    limit = ceil_log2(n)
    return [p for p in primes_below(limit + 1).tolist() if p > 2 and is_primitive_root(2, p)]


def conjecture2_powers(n: int) -> List[Tuple[int, int]]:
    """(p, k), k >= 2, with phi(p^k) < ceil(log n) and 2 primitive mod p^k."""
    limit = ceil_log2(n)
    found = []
    p = 3
    while p * (p - 1) < limit:
        if is_odd_prime(p):
            k = 2
            while p ** (k - 1) * (p - 1) < limit:
                if is_primitive_root(2, p ** k):
                    found.append((p, k))
                k += 1
        p += 2
    return found


def _greedy_extend(g: KnodelGraph, members: np.ndarray, max_extra: int) -> Optional[np.ndarray]:
    """Add up to max_extra max-coverage vertices until members dominate g."""
    n = g.n
    x = np.arange(n, dtype=np.int64)
    members = np.unique(members % n)
    while True:
        d = VertexSet.from_array(n, members)
        uncovered = ~(d.to_mask() | (g.dominator_counts(d) > 0))
        if not uncovered.any():
            return members
        if max_extra <= 0:
            return None
        gains = uncovered.astype(np.int64)
        for c in g.offsets:
            gains += uncovered[(c - x) % n]
        members = np.append(members, int(np.argmax(gains)))
        max_extra -= 1


def _translated_candidate(g: KnodelGraph, base: np.ndarray, period: int,
                          target: int) -> Optional[Tuple[int, VertexSet]]:
    """Shift a construction for a smaller n' by each offset in [0, period)."""
    for offset in range(period):
        members = _greedy_extend(g, base + offset, target - len(base))
        if members is not None and len(members) <= target:
            return offset, VertexSet.from_array(g.n, members)
    return None


def _check_conjecture_n(n: int):
    if n % 2 != 0:
        raise PreconditionError(PreconditionFailure.NOT_EVEN, f"n={n} is odd")
    if n < 6:
        raise PreconditionError(PreconditionFailure.TOO_SMALL, f"n={n} < 6")


def _decide(g: KnodelGraph, p: int, e: int, target: int, oracle_max: int,
            budget: Optional[Budget], config: SolverConfig, gamma: Optional[int]) -> ConjectureOutcome:
    if gamma is not None:
        answer = gamma <= target
    elif g.n > oracle_max:
        return ConjectureOutcome(Verdict.INCONCLUSIVE, p, e, target, "beyond-oracle")
    else:
        answer = exists_dominating_of_size(g, target, budget=budget, config=config, force=True)
        if isinstance(answer, Inconclusive):
            return ConjectureOutcome(Verdict.INCONCLUSIVE, p, e, target, "oracle-budget")
    if answer:
        return ConjectureOutcome(Verdict.SUPPORTED, p, e, target, "oracle")
    logger.warning(f"n={g.n}: no dominating set of size {target} (p={p}, e={e})")
    return ConjectureOutcome(Verdict.REFUTED, p, e, target, "oracle")


def test_conjecture1(n: int, p: int, budget: Optional[Budget] = None,
                     config: Optional[SolverConfig] = None,
                     oracle_max: Optional[int] = None, gamma: Optional[int] = None) -> ConjectureOutcome:
    """gamma(KG_n) <= ceil(n/p) for p <= ceil(log n) with 2 primitive mod p.

    A gamma already solved for n settles the oracle step without another search.
    """
    config = config or SolverConfig()
    oracle_max = config.bnb_max_n if oracle_max is None else oracle_max
    _check_conjecture_n(n)
    if not is_odd_prime(p):
        raise PreconditionError(PreconditionFailure.NOT_ODD_PRIME, f"{p} is not an odd prime")
    if p > ceil_log2(n):
        raise PreconditionError(PreconditionFailure.PRIME_TOO_LARGE, f"{p} > ceil(log2 {n})")
    if not is_primitive_root(2, p):
        raise PreconditionError(PreconditionFailure.NOT_PRIMITIVE, f"2 is not primitive mod {p}")

    target = -(-n // p)
    if n > config.certify_max_n:
        return ConjectureOutcome(Verdict.INCONCLUSIVE, p, 1, target, "beyond-certify-ceiling")
    g = build(n, dense_max_n=config.dense_max_n)

    if n % p == 0:
        result = construct_thm1(n, check_thm1_preconditions(n, p))
        if certify(g, result.set).dominating and result.set.size <= target:
            return ConjectureOutcome(Verdict.SUPPORTED, p, 1, target, "thm1-construction")

    base_n = n // (2 * p) * (2 * p)
    if base_n >= 2 * p:
        found = _translated_candidate(g, thm1_set(base_n, p).to_array(), 2 * p, target)
        if found is not None:
            offset, d = found
            if certify(g, d).dominating:
                return ConjectureOutcome(Verdict.SUPPORTED, p, 1, target,
                                         f"translated-heuristic(n'={base_n},offset={offset})")

    return _decide(g, p, 1, target, oracle_max, budget, config, gamma)


def test_conjecture2(n: int, p: int, k: int, budget: Optional[Budget] = None,
                     config: Optional[SolverConfig] = None,
                     oracle_max: Optional[int] = None, gamma: Optional[int] = None) -> ConjectureOutcome:
    """gamma(KG_n) <= ceil(2n/p^k) when phi(p^k) < ceil(log n) and 2 is primitive mod p^k."""
    config = config or SolverConfig()
    oracle_max = config.bnb_max_n if oracle_max is None else oracle_max
    _check_conjecture_n(n)
    if k < 2:
        raise PreconditionError(PreconditionFailure.EXPONENT_TOO_SMALL, f"k={k} < 2")
    if not is_odd_prime(p):
        raise PreconditionError(PreconditionFailure.NOT_ODD_PRIME, f"{p} is not an odd prime")
    witness = prime_power_witness(p, k)
    if witness.totient >= ceil_log2(n):
        raise PreconditionError(PreconditionFailure.TOTIENT_TOO_LARGE,
                                f"phi({p}^{k}) = {witness.totient} >= ceil(log2 {n})")
    if not witness.is_primitive:
        raise PreconditionError(PreconditionFailure.NOT_PRIMITIVE, f"2 is not primitive mod {p}^{k}")

    q = witness.value
    target = -(-2 * n // q)
    if n > config.certify_max_n:
        return ConjectureOutcome(Verdict.INCONCLUSIVE, p, k, target, "beyond-certify-ceiling")
    g = build(n, dense_max_n=config.dense_max_n)

    if n % q == 0:
        result = construct_thm2(n, check_thm2_preconditions(n, p, k))
        if certify(g, result.set).dominating and result.set.size <= target:
            return ConjectureOutcome(Verdict.SUPPORTED, p, k, target, "thm2-construction")

    base_n = n // (2 * q) * (2 * q)
    if base_n >= 2 * q:
        found = _translated_candidate(g, thm2_set(base_n, q).to_array(), 2 * q, target)
        if found is not None:
            offset, d = found
            if certify(g, d).dominating:
                return ConjectureOutcome(Verdict.SUPPORTED, p, k, target,
                                         f"translated-heuristic(n'={base_n},offset={offset})")

    return _decide(g, p, k, target, oracle_max, budget, config, gamma)


@dataclass(frozen=True)
class ScanOptions:
    oracle_max: int = 128
    force_oracle: bool = False
    conjectures: bool = True
    budget: Budget = field(default_factory=Budget)
    config: SolverConfig = field(default_factory=SolverConfig)
    workers: int = 1


@dataclass
class ScanRecord:
    n: int
    degree: int
    factorization: str
    thm1_witnesses: List[int]
    thm2_witnesses: List[Tuple[int, int]]
    bounds: BoundReport
    gamma: Optional[int] = None
    gamma_status: str = "skipped"
    solve: Optional[Dict[str, Any]] = None
    conj1: Verdict = Verdict.NOT_APPLICABLE
    conj1_detail: List[ConjectureOutcome] = field(default_factory=list)
    conj2: Verdict = Verdict.NOT_APPLICABLE
    conj2_detail: List[ConjectureOutcome] = field(default_factory=list)
    conj3_slack: Optional[int] = None
    error: Optional[str] = None

    @property
    def has_witness(self) -> bool:
        return bool(self.thm1_witnesses or self.thm2_witnesses)

    @property
    def sandwich_ok(self) -> bool:
        return self.bounds.sandwich_holds()

    def witness_label(self) -> str:
        parts = [f"thm1:p={p}" for p in self.thm1_witnesses]
        parts += [f"thm2:{p}^{k}" for p, k in self.thm2_witnesses]
        return ";".join(parts) if parts else "-"

    def table_row(self) -> Tuple:
        best = self.bounds.best
        return (self.n, self.degree, self.witness_label(), self.bounds.lower_berge,
                self.bounds.lower_prop2, best.value if best else None,
                best.label() if best else None, self.gamma, self.conj1.value,
                self.conj2.value, self.conj3_slack)

    def to_record(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "degree": self.degree,
            "factorization": self.factorization,
            "thm1_witnesses": list(self.thm1_witnesses),
            "thm2_witnesses": [list(w) for w in self.thm2_witnesses],
            "bounds": self.bounds.to_record(),
            "gamma": self.gamma,
            "gamma_status": self.gamma_status,
            "solve": self.solve,
            "conj1": self.conj1.value,
            "conj1_detail": [o.to_record() for o in self.conj1_detail],
            "conj2": self.conj2.value,
            "conj2_detail": [o.to_record() for o in self.conj2_detail],
            "conj3_slack": self.conj3_slack,
            "sandwich_ok": self.sandwich_ok,
            "error": self.error,
        }

    @classmethod
    def from_record(cls, rec: Dict[str, Any]) -> "ScanRecord":
        return cls(
            n=rec["n"],
            degree=rec["degree"],
            factorization=rec["factorization"],
            thm1_witnesses=list(rec.get("thm1_witnesses", [])),
            thm2_witnesses=[tuple(w) for w in rec.get("thm2_witnesses", [])],
            bounds=BoundReport.from_record(rec["bounds"]),
            gamma=rec.get("gamma"),
            gamma_status=rec.get("gamma_status", "skipped"),
            solve=rec.get("solve"),
            conj1=Verdict(rec.get("conj1", Verdict.NOT_APPLICABLE.value)),
            conj1_detail=[ConjectureOutcome.from_record(o) for o in rec.get("conj1_detail", [])],
            conj2=Verdict(rec.get("conj2", Verdict.NOT_APPLICABLE.value)),
            conj2_detail=[ConjectureOutcome.from_record(o) for o in rec.get("conj2_detail", [])],
            conj3_slack=rec.get("conj3_slack"),
            error=rec.get("error"),
        )


def scan_one(n: int, options: ScanOptions) -> ScanRecord:
    """Assemble the record for one n; errors are stored, never raised."""
    degree = floor_log2(n)
    try:
        bounds = best_bound(n)
        record = ScanRecord(
            n=n,
            degree=degree,
            factorization=str(factorize(n)),
            thm1_witnesses=[w.p for w in thm1_witnesses(n)],
            thm2_witnesses=[(w.p, w.e) for w in thm2_witnesses(n)],
            bounds=bounds,
        )
    except KnodelError as e:
        logger.error(f"n={n}: {e}")
        return ScanRecord(n, degree, "?", [], [], BoundReport(n, degree, berge_lower(n, degree),
                                                               None, berge_lower(n, degree), ()),
                          error=str(e))

    try:
        if n <= options.oracle_max or options.force_oracle:
            g = build(n, dense_max_n=options.config.dense_max_n)
            result = exact_gamma(g, budget=options.budget, config=options.config, force=True)
            record.solve = result.to_record()
            if isinstance(result, Inconclusive):
                record.gamma_status = "inconclusive"
            else:
                record.gamma = result.gamma
                record.gamma_status = "solved"
                record.bounds = bounds.with_gamma(result.gamma)
                record.conj3_slack = result.gamma - bounds.lower_berge

        if options.conjectures:
            oracle_max = n if options.force_oracle else options.oracle_max
            record.conj1_detail = [
                test_conjecture1(n, p, options.budget, options.config, oracle_max, record.gamma)
                for p in conjecture1_primes(n)
            ]
            record.conj2_detail = [
                test_conjecture2(n, p, k, options.budget, options.config, oracle_max, record.gamma)
                for p, k in conjecture2_powers(n)
            ]
            record.conj1 = aggregate(record.conj1_detail)
            record.conj2 = aggregate(record.conj2_detail)
    except KnodelError as e:
        logger.error(f"n={n}: {e}")
        record.error = str(e)

    if not record.sandwich_ok:
        logger.error(f"n={n}: sandwich violated: lower={record.bounds.lower} "
                     f"gamma={record.gamma} upper={record.bounds.upper}")
    return record


def scan_range(lo: int, hi: int, options: Optional[ScanOptions] = None) -> Iterator[ScanRecord]:
    """One record per even n in [lo, hi], in increasing n."""
    options = options or ScanOptions()
    if lo < 6 or lo > hi:
        raise KnodelError(f"need 6 <= lo <= hi, got lo={lo}, hi={hi}")
    ns = list(range(lo + (lo % 2), hi + 1, 2))
    logger.info(f"scanning {len(ns)} values of n in [{lo}, {hi}] with {options.workers} worker(s)")

    if options.workers <= 1:
        for n in ns:
            yield scan_one(n, options)
        return

    # map 保持輸入順序
    with ProcessPoolExecutor(max_workers=options.workers) as executor:
        for record in executor.map(scan_one, ns, repeat(options), chunksize=1):
            yield record


def _conclusiveness(rec: ScanRecord) -> int:
    score = 2 if rec.gamma is not None else 0
    score += sum(o.verdict.conclusive for o in rec.conj1_detail + rec.conj2_detail)
    return score


def merge_records(old: Iterable[ScanRecord], new: Iterable[ScanRecord]) -> List[ScanRecord]:
    """Merge by n, preferring the more conclusive record; ties go to the newer one."""
    merged: Dict[int, ScanRecord] = {r.n: r for r in old}
    for rec in new:
        prev = merged.get(rec.n)
        if prev is None or _conclusiveness(rec) >= _conclusiveness(prev):
            merged[rec.n] = rec
    return [merged[n] for n in sorted(merged)]


@dataclass(frozen=True)
class ScanSummary:
    total: int
    with_witness: int
    solved: int
    inconclusive: int
    max_slack: Optional[int]
    mean_slack: Optional[float]
    refuted: int
    errors: int
    sandwich_breaches: Tuple[int, ...]
    slack_violations: Tuple[int, ...]
    slack_c: float

    @property
    def witness_fraction(self) -> float:
        return self.with_witness / self.total if self.total else 0.0

    def rows(self) -> List[Tuple[str, Any]]:
        return [
            ("records", self.total),
            ("witness_fraction", f"{self.witness_fraction:.4f}"),
            ("solved", self.solved),
            ("inconclusive", self.inconclusive),
            ("max_conj3_slack", self.max_slack),
            ("mean_conj3_slack", None if self.mean_slack is None else f"{self.mean_slack:.4f}"),
            ("refuted", self.refuted),
            ("errors", self.errors),
            ("sandwich_breaches", list(self.sandwich_breaches)),
            (f"slack_over_{self.slack_c}*log2(n)", list(self.slack_violations)),
        ]


def summarize(records: Iterable[ScanRecord], slack_c: float = SolverConfig.slack_c) -> ScanSummary:
    records = list(records)
    if not records:
        raise KnodelError("cannot summarize an empty record stream")
    slacks = [r.conj3_slack for r in records if r.conj3_slack is not None]
    refuted = sum(o.verdict is Verdict.REFUTED
                  for r in records for o in r.conj1_detail + r.conj2_detail)
    return ScanSummary(
        total=len(records),
        with_witness=sum(r.has_witness for r in records),
        solved=sum(r.gamma is not None for r in records),
        inconclusive=sum(r.gamma_status == "inconclusive" for r in records),
        max_slack=max(slacks) if slacks else None,
        mean_slack=sum(slacks) / len(slacks) if slacks else None,
        refuted=refuted,
        errors=sum(r.error is not None for r in records),
        sandwich_breaches=tuple(r.n for r in records if not r.sandwich_ok),
        slack_violations=tuple(r.n for r in records
                               if r.conj3_slack is not None and r.conj3_slack > slack_c * math.log2(r.n)),
        slack_c=slack_c,
    )


def write_jsonl(records: Iterable[ScanRecord], fh: TextIO, options: Optional[ScanOptions] = None) -> int:
    extra = {}
    if options is not None:
        extra = {"oracle_max": options.oracle_max, "conjectures": options.conjectures,
                 "node_budget": options.budget.max_nodes, "time_budget_s": options.budget.max_seconds}
    return record_io.write_jsonl((r.to_record() for r in records), fh, record_io.SCAN_SCHEMA, **extra)


def write_table(records: Iterable[ScanRecord], fh: TextIO) -> int:
    return record_io.write_table((r.table_row() for r in records), fh)


def read_records(fh: TextIO) -> List[ScanRecord]:
    _, raw = record_io.read_jsonl(fh, record_io.SCAN_SCHEMA)
    return [ScanRecord.from_record(r) for r in raw]

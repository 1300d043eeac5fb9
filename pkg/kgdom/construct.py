"""Explicit dominating sets licensed by a prime (power) dividing n."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, List, Optional

import numpy as np

from kgdom.errors import PreconditionError, PreconditionFailure, NumberTheoryError
from kgdom.knodel import VertexSet
from kgdom.numtheory import (
    PrimePowerWitness, ceil_log2, factorize, floor_log2, is_odd_prime, prime_power_witness,
)
from kgdom.verify import (
    BoundReport, BoundSource, UpperBound, berge_lower, parity_counting_lower, prop2_lower,
)

logger = logging.getLogger(__name__)

class Theorem(Enum):
    THM1 = "Thm1"
    THM2 = "Thm2"


@dataclass(frozen=True)
class ConstructionResult:
    n: int
    degree: int
    set: VertexSet
    witness: PrimePowerWitness
    claimed_size: int
    theorem_tag: Theorem

    def to_record(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "degree": self.degree,
            "theorem_tag": self.theorem_tag.value,
            "p": self.witness.p,
            "e": self.witness.e,
            "set": self.set.vertices(),
            "size": self.set.size,
        }


def _check_n(n: int):
    if n % 2 != 0:
        raise PreconditionError(PreconditionFailure.NOT_EVEN, f"n={n} is odd")
    if n < 6:
        raise PreconditionError(PreconditionFailure.TOO_SMALL, f"n={n} < 6")


def _witness(p: int, e: int) -> PrimePowerWitness:
    if not is_odd_prime(p):
        raise PreconditionError(PreconditionFailure.NOT_ODD_PRIME, f"{p} is not an odd prime")
    return prime_power_witness(p, e)


def check_thm1_preconditions(n: int, p: int) -> PrimePowerWitness:
    """p | n, p <= ceil(log n) and 2 is a primitive root mod p."""
    _check_n(n)
    witness = _witness(p, 1)
    if n % p != 0:
        raise PreconditionError(PreconditionFailure.NOT_DIVISOR, f"{p} does not divide {n}")
    if p > ceil_log2(n):
        raise PreconditionError(PreconditionFailure.PRIME_TOO_LARGE,
                                f"{p} > ceil(log2 {n}) = {ceil_log2(n)}")
    if not witness.is_primitive:
        raise PreconditionError(PreconditionFailure.NOT_PRIMITIVE,
                                f"2 has order {witness.order_of_two} < {p - 1} mod {p}")
    return witness


def check_thm2_preconditions(n: int, p: int, k: int) -> PrimePowerWitness:
    """p**k | n, phi(p**k) < ceil(log n) and 2 is a primitive root mod p**k."""
    _check_n(n)
    if k < 2:
        raise PreconditionError(PreconditionFailure.EXPONENT_TOO_SMALL, f"k={k} < 2")
    witness = _witness(p, k)
    if n % witness.value != 0:
        raise PreconditionError(PreconditionFailure.NOT_DIVISOR, f"{p}^{k} does not divide {n}")
    if witness.totient >= ceil_log2(n):
        raise PreconditionError(PreconditionFailure.TOTIENT_TOO_LARGE,
                                f"phi({p}^{k}) = {witness.totient} >= ceil(log2 {n}) = {ceil_log2(n)}")
    if not witness.is_primitive:
        raise PreconditionError(PreconditionFailure.NOT_PRIMITIVE,
                                f"2 has order {witness.order_of_two} < {witness.totient} mod {p}^{k}")
    return witness


def check_original_preconditions(n: int) -> PrimePowerWitness:
    """ceil(log n) = p is an odd prime dividing n with 2 primitive mod p; then gamma = n/p."""
    _check_n(n)
    return check_thm1_preconditions(n, ceil_log2(n))


def _revalidate(n: int, witness: PrimePowerWitness, theorem: Theorem) -> PrimePowerWitness:
    if theorem is Theorem.THM1:
        if witness.e != 1:
            raise PreconditionError(PreconditionFailure.WITNESS_MISMATCH,
                                    f"Thm1 needs e = 1, witness has e = {witness.e}")
        fresh = check_thm1_preconditions(n, witness.p)
    else:
        fresh = check_thm2_preconditions(n, witness.p, witness.e)
    if fresh != witness:
        raise PreconditionError(PreconditionFailure.WITNESS_MISMATCH,
                                f"witness {witness} disagrees with recomputed {fresh}")
    return fresh


def thm1_set(n: int, p: int) -> VertexSet:
    """{2pl : 0 <= l < n/2p} union {2pl - 1 : 1 <= l <= n/2p}."""
    step = 2 * p
    blocks = n // step
    evens = step * np.arange(0, blocks, dtype=np.int64)
    odds = step * np.arange(1, blocks + 1, dtype=np.int64) - 1
    return VertexSet.from_array(n, np.concatenate([evens, odds]))


def thm2_set(n: int, q: int) -> VertexSet:
    """{lq : 0 <= l < n/q} union {lq - 1 : 1 <= l <= n/q} for q = p**k."""
    blocks = n // q
    heads = q * np.arange(0, blocks, dtype=np.int64)
    tails = q * np.arange(1, blocks + 1, dtype=np.int64) - 1
    return VertexSet.from_array(n, np.concatenate([heads, tails]))


def construct_thm1(n: int, witness: PrimePowerWitness) -> ConstructionResult:
    witness = _revalidate(n, witness, Theorem.THM1)
    d = thm1_set(n, witness.p)
    claimed = n // witness.p
    if d.size != claimed:
        raise NumberTheoryError(f"Thm1 set for n={n}, p={witness.p} has size {d.size} != {claimed}")
    return ConstructionResult(n, floor_log2(n), d, witness, claimed, Theorem.THM1)


def construct_thm2(n: int, witness: PrimePowerWitness) -> ConstructionResult:
    witness = _revalidate(n, witness, Theorem.THM2)
    d = thm2_set(n, witness.value)
    claimed = 2 * n // witness.value
    if d.size != claimed:
        raise NumberTheoryError(f"Thm2 set for n={n}, q={witness.value} has size {d.size} != {claimed}")
    return ConstructionResult(n, floor_log2(n), d, witness, claimed, Theorem.THM2)


def thm1_witnesses(n: int) -> List[PrimePowerWitness]:
    """All primes licensing Thm1 for n, largest first."""
    found = []
    for p, _ in factorize(n).odd_factors():
        try:
            found.append(check_thm1_preconditions(n, p))
        except PreconditionError as e:
            logger.debug(f"n={n}: Thm1 rejects p={p}: {e}")
    return sorted(found, key=lambda w: -w.p)


def thm2_witnesses(n: int) -> List[PrimePowerWitness]:
    """All prime powers p**k (k >= 2) licensing Thm2 for n, largest first."""
    found = []
    for p, e in factorize(n).odd_factors():
        for k in range(2, e + 1):
            try:
                found.append(check_thm2_preconditions(n, p, k))
            except PreconditionError as err:
                logger.debug(f"n={n}: Thm2 rejects {p}^{k}: {err}")
                if err.code is PreconditionFailure.TOTIENT_TOO_LARGE:
                    break
    return sorted(found, key=lambda w: -w.value)


def best_bound(n: int, degree: Optional[int] = None) -> BoundReport:
    """Every admissible upper bound with provenance, plus the lower bounds."""
    _check_n(n)
    if degree is None:
        degree = floor_log2(n)
    lower_berge = berge_lower(n, degree)
    lower_prop2 = prop2_lower(n, degree)
    lower_counting = parity_counting_lower(n, degree)

    uppers = [UpperBound(n // 2, BoundSource.HALF)]
    # 定理只適用於完整度數的 KG_n
    gamma_known = None
    if degree == floor_log2(n):
        quarter = -(-n // 4)
        # n = 12 is the case where a lower bound rules the quarter out
        if quarter >= max(lower_berge, lower_prop2 or 0, lower_counting):
            uppers.append(UpperBound(quarter, BoundSource.QUARTER))
        for w in thm1_witnesses(n):
            uppers.append(UpperBound(n // w.p, BoundSource.THM1, w.p, 1))
        for w in thm2_witnesses(n):
            uppers.append(UpperBound(2 * n // w.value, BoundSource.THM2, w.p, w.e))
        try:
            w = check_original_preconditions(n)
            gamma_known = n // w.p
        except PreconditionError:
            pass

    report = BoundReport(
        n=n,
        degree=degree,
        lower_berge=lower_berge,
        lower_prop2=lower_prop2,
        lower_counting=lower_counting,
        uppers=tuple(uppers),
        gamma_known=gamma_known,
    )
    logger.debug(f"best_bound({n}): lower={report.lower} upper={report.upper} via {report.best.label()}")
    return report

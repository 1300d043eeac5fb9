"""Elementary number theory used to license the Knödel constructions.

All logarithms are base 2. Inputs are bounded by 2**63; Python integers make
the modular products exact, so `pow(a, e, m)` is used throughout.
"""
import math
import logging
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from kgdom.errors import NumberTheoryError

logger = logging.getLogger(__name__)

# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10**24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def floor_log2(n: int) -> int:
    if n < 1:
        raise NumberTheoryError(f"log2 undefined for {n}")
    return n.bit_length() - 1


def ceil_log2(n: int) -> int:
    if n < 1:
        raise NumberTheoryError(f"log2 undefined for {n}")
    return (n - 1).bit_length()


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_odd_prime(p: int) -> bool:
    return p > 2 and is_prime(p)


@dataclass(frozen=True)
class Factorization:
    """n = prod(p**e) with primes strictly increasing."""
    n: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        product = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1 or not is_prime(p):
                raise NumberTheoryError(f"malformed factorization of {self.n}: {self.factors}")
            product *= p ** e
            last = p
        if product != self.n:
            raise NumberTheoryError(f"factors {self.factors} do not multiply to {self.n}")

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.factors)

    def odd_factors(self) -> List[Tuple[int, int]]:
        return [(p, e) for p, e in self.factors if p != 2]

    def totient(self) -> int:
        result = 1
        for p, e in self.factors:
            result *= p ** (e - 1) * (p - 1)
        return result

    def __str__(self) -> str:
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def factorize(n: int) -> Factorization:
    """Complete factorization by trial division."""
    if n < 2:
        raise NumberTheoryError(f"cannot factorize {n}; need n >= 2")
    factors = []
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def totient(n: int) -> int:
    """Euler's phi; phi(1) = 1 by convention."""
    if n < 1:
        raise NumberTheoryError(f"totient undefined for {n}")
    if n == 1:
        return 1
    return factorize(n).totient()


def multiplicative_order(a: int, m: int) -> int:
    """Least k >= 1 with a**k = 1 (mod m).

    Starts from phi(m) and strips prime factors while the power stays 1.
    """
    if m < 2:
        raise NumberTheoryError(f"modulus must be >= 2, got {m}")
    if math.gcd(a, m) != 1:
        raise NumberTheoryError(f"order of {a} mod {m} undefined: gcd = {math.gcd(a, m)}")
    a %= m
    order = totient(m)
    if order == 1:
        return 1
    for q, _ in factorize(order):
        while order % q == 0 and pow(a, order // q, m) == 1:
            order //= q
    return order


def multiplicative_order_naive(a: int, m: int) -> int:
    if m < 2 or math.gcd(a, m) != 1:
        raise NumberTheoryError(f"order of {a} mod {m} undefined")
    a %= m
    k, x = 1, a
    while x != 1:
        x = x * a % m
        k += 1
    return k


def is_primitive_root(a: int, m: int) -> bool:
    if m < 2:
        raise NumberTheoryError(f"modulus must be >= 2, got {m}")
    if math.gcd(a, m) != 1:
        return False
    return multiplicative_order(a, m) == totient(m)


def is_wieferich(p: int) -> bool:
    """True iff p**2 divides 2**(p-1) - 1."""
    if not is_odd_prime(p):
        raise NumberTheoryError(f"{p} is not an odd prime")
    return pow(2, p - 1, p * p) == 1


@dataclass(frozen=True)
class PrimePowerWitness:
    p: int
    e: int
    value: int
    order_of_two: int
    is_primitive: bool

    @property
    def totient(self) -> int:
        return self.value - self.value // self.p


def prime_power_witness(p: int, e: int) -> PrimePowerWitness:
    """Evaluate the order of 2 modulo p**e; does not check any theorem clause."""
    if not is_odd_prime(p):
        raise NumberTheoryError(f"{p} is not an odd prime")
    if e < 1:
        raise NumberTheoryError(f"exponent must be >= 1, got {e}")
    value = p ** e
    order = multiplicative_order(2, value)
    phi = value - value // p
    return PrimePowerWitness(p=p, e=e, value=value, order_of_two=order,
                             is_primitive=(order == phi))


def primes_below(limit: int) -> np.ndarray:
    """All primes p < limit (Eratosthenes over a numpy mask)."""
    if limit <= 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def totients_upto(limit: int) -> np.ndarray:
    """phi[0..limit] by sieve; phi[0] is 0 and unused."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_below(limit + 1):
        phi[p::p] -= phi[p::p] // p
    return phi


def heuristic_sum(X: int) -> float:
    """Sum over primes p < X of phi(p-1) / (p (p-1))."""
    if X < 3:
        raise NumberTheoryError(f"heuristic sum needs X >= 3, got {X}")
    primes = primes_below(X)
    phi = totients_upto(X)
    numerators = phi[primes - 1].astype(np.float64)
    denominators = primes.astype(np.float64) * (primes - 1).astype(np.float64)
    value = math.fsum((numerators / denominators).tolist())
    logger.debug(f"heuristic_sum({X}) over {len(primes)} primes = {value}")
    return value


@dataclass(frozen=True)
class WieferichRecord:
    p: int
    order_of_two: int
    two_is_primitive: bool


def wieferich_primes(limit: int) -> List[WieferichRecord]:
    """Wieferich primes below limit, with the order of 2 modulo each."""
    found = []
    for p in primes_below(limit).tolist():
        if p == 2:
            continue
        if pow(2, p - 1, p * p) == 1:
            order = multiplicative_order(2, p)
            found.append(WieferichRecord(p, order, order == p - 1))
    return found


def primes_with_primitive_two(limit: int) -> List[int]:
    return [p for p in primes_below(limit).tolist()
            if p > 2 and is_primitive_root(2, p)]

import math
import random

import pytest
from sympy.ntheory import factorint, isprime, n_order
from sympy.ntheory import is_primitive_root as sym_is_primitive_root
from sympy.ntheory import totient as sym_totient

from kgdom.errors import NumberTheoryError
from kgdom.numtheory import (
    ceil_log2, factorize, floor_log2, is_odd_prime, is_prime, is_primitive_root, is_wieferich,
    multiplicative_order, multiplicative_order_naive, prime_power_witness, primes_below,
    primes_with_primitive_two, totient, totients_upto, wieferich_primes,
)
from testcase.base_test import BaseTest

PRIMITIVE_TWO_BELOW_64 = [3, 5, 11, 13, 19, 29, 37, 53, 59, 61]


class TestLogarithms(BaseTest):

    def test_floor_and_ceil(self):
        assert floor_log2(20) == 4
        assert ceil_log2(20) == 5
        assert floor_log2(64) == 6
        assert ceil_log2(64) == 6
        assert ceil_log2(65) == 7
        assert ceil_log2(1) == 0

    def test_non_positive_raises(self):
        with pytest.raises(NumberTheoryError):
            floor_log2(0)
        with pytest.raises(NumberTheoryError):
            ceil_log2(-4)


class TestPrimes(BaseTest):

    def test_is_prime_matches_sympy(self):
        for n in range(-3, 5000):
            assert is_prime(n) == isprime(n), f"is_prime({n})"

    def test_large_primes(self):
        assert is_prime(2 ** 61 - 1)
        assert not is_prime(2 ** 61 + 1)
        assert is_prime(1_000_000_007)

    def test_is_odd_prime(self):
        assert not is_odd_prime(2)
        assert is_odd_prime(3)
        assert not is_odd_prime(9)

    def test_primes_below(self):
        primes = primes_below(100).tolist()
        assert primes == [p for p in range(100) if isprime(p)]
        assert primes_below(2).tolist() == []
        assert primes_below(3).tolist() == [2]


class TestFactorization(BaseTest):

    def test_matches_sympy(self):
        for n in range(2, 3000):
            assert dict(factorize(n).factors) == factorint(n), f"factorize({n})"

    def test_str_and_odd_factors(self):
        f = factorize(72)
        assert str(f) == "2^3*3^2"
        assert f.odd_factors() == [(3, 2)]
        assert str(factorize(20)) == "2^2*5"

    def test_rejects_small(self):
        with pytest.raises(NumberTheoryError):
            factorize(1)


class TestTotient(BaseTest):

    def test_matches_sympy(self):
        for n in range(1, 3000):
            assert totient(n) == sym_totient(n), f"phi({n})"

    def test_sieve_matches_scalar(self):
        phi = totients_upto(500)
        assert phi[1:].tolist() == [totient(n) for n in range(1, 501)]

    def test_sieve_matches_factorisation_to_100000(self):
        phi = totients_upto(100_000)
        mismatches = [n for n in range(1, 100_001) if phi[n] != totient(n)]
        assert mismatches == []

    def test_phi_of_one(self):
        assert totient(1) == 1


class TestOrders(BaseTest):

    def test_order_matches_sympy_and_naive(self):
        for m in range(3, 400, 2):
            expected = n_order(2, m)
            assert multiplicative_order(2, m) == expected
            assert multiplicative_order_naive(2, m) == expected

    def test_order_of_every_base_sampled(self):
        rng = random.Random(2024)
        for m in rng.sample(range(2, 10_001), 300):
            bases = [a for a in range(1, m) if math.gcd(a, m) == 1]
            for a in rng.sample(bases, min(len(bases), 20)):
                expected = n_order(a, m)
                assert multiplicative_order(a, m) == expected, f"ord_{m}({a})"
                if m < 2000:
                    assert multiplicative_order_naive(a, m) == expected, f"ord_{m}({a})"

    def test_order_needs_coprime(self):
        with pytest.raises(NumberTheoryError):
            multiplicative_order(2, 10)
        with pytest.raises(NumberTheoryError):
            multiplicative_order(3, 1)

    def test_primitive_two_below_64(self):
        found = [p for p in range(3, 64) if is_prime(p) and is_primitive_root(2, p)]
        assert found == PRIMITIVE_TWO_BELOW_64
        assert primes_with_primitive_two(64) == PRIMITIVE_TWO_BELOW_64

    def test_primitive_root_matches_sympy(self):
        for m in range(3, 200):
            if m % 2 == 1:
                assert is_primitive_root(2, m) == sym_is_primitive_root(2, m), f"m={m}"

    def test_not_coprime_is_not_primitive(self):
        assert not is_primitive_root(2, 12)


class TestWitness(BaseTest):

    def test_prime_power_witness(self):
        w = prime_power_witness(3, 2)
        assert (w.value, w.order_of_two, w.totient, w.is_primitive) == (9, 6, 6, True)
        w = prime_power_witness(7, 1)
        assert (w.order_of_two, w.is_primitive) == (3, False)
        assert prime_power_witness(5, 2).is_primitive

    def test_rejects_bad_input(self):
        with pytest.raises(NumberTheoryError):
            prime_power_witness(2, 1)
        with pytest.raises(NumberTheoryError):
            prime_power_witness(3, 0)


class TestWieferich(BaseTest):

    def test_known_pair(self):
        assert is_wieferich(1093)
        assert is_wieferich(3511)
        assert not is_wieferich(3)

    def test_only_two_below_100000(self):
        records = wieferich_primes(100_000)
        assert [r.p for r in records] == [1093, 3511]
        assert [r.order_of_two for r in records] == [364, 1755]
        assert not any(r.two_is_primitive for r in records)

    def test_rejects_non_prime(self):
        with pytest.raises(NumberTheoryError):
            is_wieferich(9)

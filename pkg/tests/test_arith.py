from math import gcd

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.functions.combinatorial.numbers import jacobi_symbol, mobius as sp_mobius

from d4quartic.arith import (
    disc_sort_key,
    factorize,
    fundamental_discriminant_of,
    fundamental_discriminants,
    is_fundamental,
    is_square,
    is_squarefree,
    kronecker,
    lcm,
    mobius,
    omega,
    primes_upto,
    smallest_prime_factor,
    squarefree_kernel,
    squarefree_sieve,
    xgcd,
)


def brute_fundamental(d):
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(abs(d))
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(abs(m))
    return False


def kronecker_by_definition(a, n):
    # multiplicative extension of Legendre symbols, with (a/2) and (a/-1)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    out = 1
    if n < 0:
        n = -n
        if a < 0:
            out = -out
    for p, e in sympy.factorint(n).items():
        if p == 2:
            if a % 2 == 0:
                return 0
            s = 1 if a % 8 in (1, 7) else -1
        else:
            s = pow(a % p, (p - 1) // 2, p)
            s = -1 if s == p - 1 else s
        out *= s**e
    return out


def test_factorize_matches_sympy():
    for n in range(1, 3000):
        assert dict(factorize(n)) == sympy.factorint(n)


@given(st.integers(min_value=2, max_value=10**15))
def test_factorize_roundtrip(n):
    prod = 1
    for p, e in factorize(n):
        assert sympy.isprime(p)
        prod *= p**e
    assert prod == n
    assert omega(n) == len(sympy.factorint(n))


def test_kronecker_against_definition():
    for a in range(-60, 61):
        for n in range(-30, 61):
            assert kronecker(a, n) == kronecker_by_definition(a, n), (a, n)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**5).map(lambda n: 2 * n + 1))
def test_kronecker_odd_is_jacobi(a, n):
    assert kronecker(a, n) == jacobi_symbol(a % n, n)


@given(st.integers(-10**4, 10**4), st.integers(1, 500), st.integers(1, 500))
def test_kronecker_multiplicative_in_n(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_fundamental_discriminants():
    assert fundamental_discriminants(12) == [-3, -4, 5, -7, -8, 8, -11, 12]
    brute = [d for d in range(-2000, 2001) if brute_fundamental(d)]
    assert sorted(fundamental_discriminants(2000), key=disc_sort_key) == sorted(brute, key=disc_sort_key)
    for d in range(-2000, 2001):
        assert is_fundamental(d) == brute_fundamental(d)


@given(st.integers(-10**6, 10**6).filter(lambda m: not is_square(m) and m != 0))
def test_fundamental_discriminant_of(m):
    D = fundamental_discriminant_of(m)
    assert is_fundamental(D)
    # Q(sqrt m) = Q(sqrt D): m * D is a square up to sign 1
    assert m * D > 0 and is_square(m * D if D % 4 else m * D // 4) or is_square(m * D)


def test_squarefree_helpers_match_sympy():
    sf = squarefree_sieve(5000)
    spf = smallest_prime_factor(5000)
    assert spf[1] == 1
    for n in range(2, 5001):
        fac = sympy.factorint(n)
        assert bool(sf[n]) == all(e == 1 for e in fac.values())
        assert mobius(n) == sp_mobius(n)
        assert spf[n] == min(fac)
    assert primes_upto(1000) == list(sympy.primerange(2, 1001))


@given(st.integers(-10**9, 10**9).filter(bool))
def test_squarefree_kernel(n):
    s = squarefree_kernel(n)
    assert is_squarefree(abs(s))
    q = n // s
    assert n % s == 0 and q > 0 and is_square(q)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd_and_lcm(a, b):
    g, s, t = xgcd(a, b)
    assert g == gcd(a, b) and s * a + t * b == g
    if a and b:
        assert lcm(a, b) == abs(a * b) // gcd(a, b)


def test_is_square():
    assert [n for n in range(-5, 50) if is_square(n)] == [0, 1, 4, 9, 16, 25, 36, 49]

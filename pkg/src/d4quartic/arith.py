"""
Exact integer utilities: factorization, Kronecker symbol, fundamental
discriminants, squarefree kernels and small sieves.

Everything here works on Python ints, so sizes are unbounded.  The sieves
return numpy arrays and are meant for the enumeration kernels.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import numpy as np
from sympy import factorint
from sympy.functions.combinatorial.numbers import jacobi_symbol


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple  # ((p, e), ...) with p increasing

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def as_dict(self):
        return dict(self.factors)


def factorize(n):
    """Prime factorization of a positive integer.

    Backed by sympy's factorint (trial division, Pollard rho and a
    Miller-Rabin based primality test), which is ample for the 10^12-sized
    inputs that occur here.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    if n == 1:
        return Factorization(1, ())
    return Factorization(n, tuple(sorted(factorint(n).items())))


def omega(n):
    """Number of distinct prime factors of n."""
    return len(factorize(abs(n)))


def kronecker(a, n):
    """Kronecker symbol (a/n) in {-1, 0, 1}."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi_symbol(a % n, n)


def is_squarefree(n):
    n = abs(int(n))
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n))


def squarefree_kernel(n):
    """Sign-preserving squarefree part: n = kernel * m^2."""
    n = int(n)
    if n == 0:
        raise ValueError("squarefree kernel of 0")
    core = 1
    for p, e in factorize(abs(n)):
        if e % 2:
            core *= p
    return core if n > 0 else -core


def is_square(n):
    """True for perfect squares of integers (0 included)."""
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def is_fundamental(d):
    d = int(d)
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminant_of(m):
    """Discriminant of Q(sqrt(m)) for a non-square integer m."""
    core = squarefree_kernel(m)
    if core == 1:
        raise ValueError(f"{m} is a square; Q(sqrt({m})) is not quadratic")
    return core if core % 4 == 1 else 4 * core


def disc_sort_key(d):
    # |d| first, negative before positive on ties
    return (abs(d), d > 0)


def fundamental_discriminants(bound):
    """All fundamental discriminants with |d| <= bound, ordered by |d| then sign."""
    bound = int(bound)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    sf = squarefree_sieve(bound)
    out = []
    for n in range(3, bound + 1):
        for d in (-n, n):
            if d % 4 == 1:
                if sf[n]:
                    out.append(d)
            elif d % 4 == 0:
                m = abs(d) // 4
                if (d // 4) % 4 in (2, 3) and sf[m]:
                    out.append(d)
    return out


def squarefree_sieve(n):
    """Boolean array s with s[m] true iff m is squarefree (s[0] false)."""
    s = np.ones(n + 1, dtype=bool)
    s[0] = False
    for p in range(2, isqrt(n) + 1):
        s[p * p::p * p] = False
    return s


@lru_cache(maxsize=8)
def _spf_cached(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    spf[1:] = np.arange(1, n + 1)
    for p in range(2, isqrt(n) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            mask = block == np.arange(p * p, n + 1, p)
            block[mask] = p
    spf.flags.writeable = False
    return spf


def smallest_prime_factor(n):
    """Smallest-prime-factor table for 0..n (spf[1] = 1)."""
    size = 1 << max(10, int(n).bit_length())
    return _spf_cached(size)[: n + 1]


def primes_upto(n):
    if n < 2:
        return []
    spf = smallest_prime_factor(n)
    idx = np.nonzero(spf[2:] == np.arange(2, n + 1))[0] + 2
    return [int(p) for p in idx]


def mobius(n):
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def lcm(a, b):
    return abs(a // gcd(a, b) * b)

"""
Arithmetic in a quadratic field k = Q(sqrt(D)) with D a fundamental
discriminant.

Elements are written x + y*w in the integral basis (1, w), w = (D + sqrt(D))/2,
so w^2 = D*w - n0 with n0 = (D^2 - D)/4.  Integral ideals are Z-lattices kept
in Hermite normal form

    I = A*Z + (B + C*w)*Z,   C | A, C | B, 0 <= B < A,

which is the same thing as content * (a, (b + sqrt(D))/2) with a = A/C.
Equality, inclusion and coprimality are then integer comparisons.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, isqrt

import numpy as np
from sympy.ntheory import sqrt_mod

from .arith import factorize, is_fundamental, kronecker


@dataclass(frozen=True)
class QuadField:
    d: int

    def __post_init__(self):
        if not is_fundamental(self.d):
            raise ValueError(f"{self.d} is not a fundamental discriminant")

    @property
    def delta(self):
        return self.d

    @property
    def r1(self):
        return 2 if self.d > 0 else 0

    @property
    def r2(self):
        return 0 if self.d > 0 else 1

    @property
    def n0(self):
        return (self.d * self.d - self.d) // 4

    @property
    def degree(self):
        return 2

    def element(self, x, y=0):
        return FieldElement(x, y, self.d)

    @property
    def one(self):
        return FieldElement(1, 0, self.d)

    @property
    def omega(self):
        return FieldElement(0, 1, self.d)

    def from_sqrt_coords(self, u, v):
        """The element u + v*sqrt(D)."""
        # sqrt(D) = 2w - D
        return FieldElement(Fraction(u) - Fraction(v) * self.d, 2 * Fraction(v), self.d)

    @cached_property
    def unit_ideal(self):
        return QuadIdeal(self.d, 1, 1, 0)

    def __repr__(self):
        return f"QuadField({self.d})"


def _norm(d, x, y):
    return x * x + d * x * y + (d * d - d) // 4 * y * y


def _mul(d, x1, y1, x2, y2):
    n0 = (d * d - d) // 4
    yy = y1 * y2
    return x1 * x2 - n0 * yy, x1 * y2 + x2 * y1 + d * yy


@dataclass(frozen=True)
class FieldElement:
    x: object
    y: object
    d: int

    def __post_init__(self):
        # keep integral coordinates as int
        for name in ("x", "y"):
            v = getattr(self, name)
            if isinstance(v, Fraction) and v.denominator == 1:
                object.__setattr__(self, name, int(v.numerator))

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.d != self.d:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.x + o.x, self.y + o.y, self.d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.x, -self.y, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.x - o.x, self.y - o.y, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        x, y = _mul(self.d, self.x, self.y, o.x, o.y)
        return FieldElement(x, y, self.d)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return (self.inverse()) ** (-e)
        result = FieldElement(1, 0, self.d)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self):
        return FieldElement(self.x + self.d * self.y, -self.y, self.d)

    def norm(self):
        return _norm(self.d, self.x, self.y)

    def trace(self):
        return 2 * self.x + self.d * self.y

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return FieldElement(Fraction(c.x) / n, Fraction(c.y) / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def is_integral(self):
        return isinstance(self.x, int) and isinstance(self.y, int)

    def is_zero(self):
        return self.x == 0 and self.y == 0

    def sqrt_coords(self):
        """(u, v) with self = u + v*sqrt(D)."""
        v = Fraction(self.y) / 2
        u = Fraction(self.x) + Fraction(self.y) * self.d / 2
        return u, v

    def real_embeddings(self, prec=30):
        """Both real embeddings (d > 0) as mpmath numbers: (self, conj(self))."""
        import mpmath

        with mpmath.workdps(prec):
            r = mpmath.sqrt(self.d)
            u, v = self.sqrt_coords()
            u = mpmath.mpf(u.numerator) / u.denominator
            v = mpmath.mpf(v.numerator) / v.denominator
            return u + v * r, u - v * r

    def __repr__(self):
        return f"({self.x} + {self.y}*w)"


# ---------------------------------------------------------------------------
# ideals


def _hnf(vectors):
    """HNF (A, B, C) of the full-rank Z-lattice spanned by (x, y) vectors."""
    A = 0
    piv = None
    for x, y in vectors:
        if y == 0:
            A = gcd(A, x)
            continue
        if piv is None:
            piv = (x, y)
            continue
        px, py = piv
        g = gcd(py, y)
        # extended gcd for the pivot combination
        s, t = _bezout(py, y, g)
        piv = (s * px + t * x, g)
        A = gcd(A, (y // g) * px - (py // g) * x)
    if piv is None or A == 0:
        raise ValueError("lattice is not of full rank")
    px, py = piv
    if py < 0:
        px, py = -px, -py
    return A, px % A, py


def _bezout(a, b, g):
    s0, s1, t0, t1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q, r = divmod(aa, bb)
        aa, bb = bb, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if aa < 0:
        s0, t0 = -s0, -t0
    return s0, t0


@dataclass(frozen=True)
class QuadIdeal:
    """Integral ideal content*(a, (b + sqrt(D))/2) of the field with discriminant d."""

    d: int
    a: int
    content: int
    s: int  # (b - d)/2 reduced mod a; the HNF second-row offset of the primitive part

    @property
    def b(self):
        a = self.a
        b = (2 * self.s + self.d) % (2 * a)
        if b > a:
            b -= 2 * a
        return b

    @property
    def norm(self):
        return self.content * self.content * self.a

    @property
    def hnf(self):
        c = self.content
        return c * self.a, c * self.s, c

    def basis(self):
        A, B, C = self.hnf
        return (A, 0), (B, C)

    def is_unit(self):
        return self.a == 1 and self.content == 1

    def is_primitive(self):
        return self.content == 1

    def __mul__(self, other):
        return ideal_mul(self, other)

    def __pow__(self, e):
        return ideal_pow(self, e)

    def __repr__(self):
        if self.content == 1:
            return f"Ideal({self.a}, ({self.b}+sqrt({self.d}))/2)"
        return f"{self.content}*Ideal({self.a}, ({self.b}+sqrt({self.d}))/2)"


def ideal_from_hnf(d, A, B, C):
    if A % C or B % C:
        raise ValueError("not an ideal HNF")
    a = A // C
    return QuadIdeal(d, a, C, (B // C) % a)


def ideal_from_z_gens(d, vectors):
    A, B, C = _hnf(vectors)
    I = ideal_from_hnf(d, A, B, C)
    return I


def ideal_from_gens(k, elements):
    """Ideal generated (as O_k-module) by integral elements."""
    d = k.d if isinstance(k, QuadField) else k
    vecs = []
    for e in elements:
        x, y = (e.x, e.y) if isinstance(e, FieldElement) else e
        vecs.append((x, y))
        vecs.append(_mul(d, x, y, 0, 1))
    return ideal_from_z_gens(d, vecs)


def principal_ideal(k, alpha):
    return ideal_from_gens(k, [alpha])


def ideal_mul(I, J):
    d = I.d
    vecs = []
    for x1, y1 in I.basis():
        for x2, y2 in J.basis():
            vecs.append(_mul(d, x1, y1, x2, y2))
    return ideal_from_z_gens(d, vecs)


def ideal_pow(I, e):
    result = QuadIdeal(I.d, 1, 1, 0)
    base = I
    while e:
        if e & 1:
            result = ideal_mul(result, base)
        base = ideal_mul(base, base)
        e >>= 1
    return result


def ideal_add(I, J):
    return ideal_from_z_gens(I.d, list(I.basis()) + list(J.basis()))


def ideal_conj(I):
    d = I.d
    A, B, C = I.hnf
    return ideal_from_z_gens(d, [(A, 0), (B + C * d, -C)])


def ideal_contains(I, elem):
    x, y = (elem.x, elem.y) if isinstance(elem, FieldElement) else elem
    A, B, C = I.hnf
    if y % C:
        return False
    return (x - (y // C) * B) % A == 0


def ideal_divides(I, J):
    """True when I | J, i.e. J is contained in I."""
    return all(ideal_contains(I, v) for v in J.basis())


def ideal_coprime(I, J):
    return ideal_add(I, J).is_unit()


def ideal_div(I, J):
    """Exact quotient I/J; requires J | I."""
    if not ideal_divides(J, I):
        raise ValueError("ideal division is not exact")
    P = ideal_mul(I, ideal_conj(J))
    n = J.norm
    A, B, C = P.hnf
    return ideal_from_hnf(I.d, A // n, B // n, C // n)


def rational_ideal(k, m):
    d = k.d if isinstance(k, QuadField) else k
    return QuadIdeal(d, 1, m, 0)


# ---------------------------------------------------------------------------
# primes


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    kind: str  # "split", "inert", "ramified"
    which: int  # 0 or 1 for split primes, 0 otherwise
    ideal: QuadIdeal

    @property
    def norm(self):
        return self.ideal.norm


def splitting_type(k, p):
    s = kronecker(k.d, p)
    return {1: "split", -1: "inert", 0: "ramified"}[s]


@lru_cache(maxsize=None)
def _primes_above(d, p):
    kind = {1: "split", -1: "inert", 0: "ramified"}[kronecker(d, p)]
    if kind == "inert":
        return (PrimeIdeal(p, kind, 0, QuadIdeal(d, 1, p, 0)),)
    if p == 2:
        if kind == "split":
            bs = [1, -1]
        else:
            bs = [0] if d % 16 == 8 else [2]
    else:
        r = int(sqrt_mod(d % p, p))
        if (r - d) % 2:
            r += p
        bs = [r, -r] if kind == "split" else [r]
    out = []
    for b in bs:
        s = ((b - d) // 2) % p
        out.append(QuadIdeal(d, p, 1, s))
    out.sort(key=lambda I: (I.b,))
    return tuple(PrimeIdeal(p, kind, i, I) for i, I in enumerate(out))


def primes_above(k, p):
    """Prime ideals above the rational prime p, ordered deterministically."""
    return _primes_above(k.d, int(p))


def prime_conj(k, P):
    if P.kind != "split":
        return P
    return primes_above(k, P.p)[1 - P.which]


def factor_ideal(I):
    """Prime factorization [(PrimeIdeal, e), ...] of a nonzero integral ideal."""
    d = I.d
    out = []
    for p, e in factorize(I.norm):
        left = e
        for P in _primes_above(d, p):
            v = 0
            J = I
            f = 2 if P.kind == "inert" else 1
            while left >= f and ideal_divides(P.ideal, J):
                J = ideal_div(J, P.ideal)
                v += 1
                left -= f
            if v:
                out.append((P, v))
                I = J
    return out


def ideal_from_factorization(k, fac):
    I = k.unit_ideal
    for P, e in fac:
        I = ideal_mul(I, ideal_pow(P.ideal, e))
    return I


def is_squarefree_ideal(I):
    return all(e == 1 for _, e in factor_ideal(I))


def euler_phi_ideal(k, m):
    """|(O/m)^*|."""
    out = 1
    for P, e in factor_ideal(m):
        q = P.norm
        out *= q ** (e - 1) * (q - 1)
    return out


def tau_ideal(k, m):
    out = 1
    for _, e in factor_ideal(m):
        out *= e + 1
    return out


def ideal_key(I):
    return (I.content, I.a, I.b)


def _local_ideals(k, p, e):
    Ps = primes_above(k, p)
    kind = Ps[0].kind
    if kind == "inert":
        return [ideal_pow(Ps[0].ideal, e // 2)] if e % 2 == 0 else []
    if kind == "ramified":
        return [ideal_pow(Ps[0].ideal, e)]
    P, Q = Ps[0].ideal, Ps[1].ideal
    return [ideal_mul(ideal_pow(P, i), ideal_pow(Q, e - i)) for i in range(e + 1)]


def ideals_of_norm(k, m):
    """All integral ideals of norm m, sorted by (content, a, b)."""
    if m < 1:
        raise ValueError("norm must be positive")
    parts = [_local_ideals(k, p, e) for p, e in factorize(m)]
    out = []
    for combo in product(*parts):
        I = k.unit_ideal
        for J in combo:
            I = ideal_mul(I, J)
        out.append(I)
    out.sort(key=ideal_key)
    return out


# ---------------------------------------------------------------------------
# norm sieve


@lru_cache(maxsize=64)
def _char_period(d):
    m = abs(d)
    return np.array([kronecker(d, n) for n in range(m)], dtype=np.int64)


def character_values(d, M):
    """chi_d(n) for n = 0..M as an int array (chi_d(0) = 0)."""
    per = _char_period(d)
    reps = M // len(per) + 1
    return np.tile(per, reps)[: M + 1]


@lru_cache(maxsize=32)
def _dedekind_coefficients(d, M):
    chi = character_values(d, M)
    r = np.zeros(M + 1, dtype=np.int64)
    for e in range(1, M + 1):
        c = chi[e]
        if c:
            r[e::e] += c
    r.flags.writeable = False
    return r


def dedekind_coefficients(k, M):
    """r[m] = number of ideals of norm m, m <= M, via r(m) = sum_{e|m} chi(e)."""
    return _dedekind_coefficients(k.d, int(M))


def count_ideals_upto(k, X):
    """Number of integral ideals with norm <= X."""
    M = int(Fraction(X)) if not isinstance(X, float) else int(X)
    if M < 1:
        return 0
    return int(dedekind_coefficients(k, M)[1:].sum())


# ---------------------------------------------------------------------------
# units


def _cf_floor(P, Q, D, s):
    # floor((P + sqrt(D))/Q) for non-square D, s = isqrt(D)
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // (-Q)) - 1


@lru_cache(maxsize=None)
def _fundamental_unit(d):
    # continued fraction of w = (d + sqrt(d))/2 = (P + sqrt(D))/Q with D = d
    D = d
    s = isqrt(D)
    P, Q = d, 2
    n0 = (d * d - d) // 4
    p_prev, p = 1, None
    q_prev, q = 0, None
    first = True
    for _ in range(100000):
        a = _cf_floor(P, Q, D, s)
        if first:
            p, q = a, 1
            first = False
        else:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
        # norm of p - q*w
        N = p * p - d * p * q + n0 * q * q
        if abs(N) == 1:
            # eps = conj(p - q w) up to sign: p - q*(d - w) = (p - q d) + q w
            x, y = p - q * d, q
            e = FieldElement(x, y, d)
            big = e.real_embeddings(prec=max(30, len(str(abs(x))) + 10))[0]
            if big < 0:
                e = -e
            return e, N
        P = a * Q - P
        Q = (D - P * P) // Q
    raise RuntimeError("continued fraction did not produce a unit")


def fundamental_unit(k):
    """Smallest unit > 1 of a real quadratic field, with its norm."""
    if k.d < 0:
        raise ValueError("fundamental unit requires a real quadratic field")
    return _fundamental_unit(k.d)


def torsion_generator(k):
    """Generator of the roots of unity of k."""
    if k.d == -4:
        return FieldElement(2, 1, -4)  # i = w + 2
    if k.d == -3:
        return FieldElement(2, 1, -3)  # (1 + sqrt(-3))/2 = w + 2
    return FieldElement(-1, 0, k.d)


def unit_generators(k):
    """Generators of O_k^*: the torsion generator, then the fundamental unit."""
    gens = [torsion_generator(k)]
    if k.d > 0:
        gens.append(fundamental_unit(k)[0])
    return gens


def roots_of_unity_count(k):
    return {-4: 4, -3: 6}.get(k.d, 2)


# ---------------------------------------------------------------------------
# squares


def _rational_sqrt(q):
    q = Fraction(q)
    if q < 0:
        return None
    n, m = q.numerator, q.denominator
    rn, rm = isqrt(n), isqrt(m)
    if rn * rn == n and rm * rm == m:
        return Fraction(rn, rm)
    return None


def sqrt_in_k(k, x):
    """A square root of x in k, or None when x is not a square."""
    if isinstance(x, (int, Fraction)):
        x = k.element(x)
    if x.is_zero():
        return x
    n = _rational_sqrt(x.norm())
    if n is None:
        return None
    t = x.trace()
    for ny in (n, -n):
        tau2 = t + 2 * ny
        if tau2 == 0:
            continue
        tau = _rational_sqrt(tau2)
        if tau is None:
            continue
        y = (x + ny) * FieldElement(1 / Fraction(tau), 0, k.d)
        if y * y == x:
            return y
    # trace-zero roots t*sqrt(D)
    u, v = x.sqrt_coords()
    if v == 0:
        r = _rational_sqrt(Fraction(u) / k.d)
        if r is not None:
            return k.from_sqrt_coords(0, r)
    return None


def is_square_in_k(k, x):
    if isinstance(x, FieldElement) and x.is_zero():
        raise ValueError("is_square_in_k needs a nonzero element")
    return sqrt_in_k(k, x) is not None


# ---------------------------------------------------------------------------
# residues modulo ideals dividing 4


def residue_index(x, y):
    return (x % 4) * 4 + (y % 4)


def residue_from_index(i):
    return i // 4, i % 4


@lru_cache(maxsize=None)
def residue_mul_table(d):
    """16x16 table of products of residues mod 4 (index = 4*(x%4) + y%4)."""
    tab = []
    for i in range(16):
        x1, y1 = residue_from_index(i)
        row = []
        for j in range(16):
            x2, y2 = residue_from_index(j)
            x, y = _mul(d, x1, y1, x2, y2)
            row.append(residue_index(x, y))
        tab.append(tuple(row))
    return tuple(tab)


def reduce_mod(I, x, y):
    """Canonical representative of x + y*w modulo the ideal I."""
    A, B, C = I.hnf
    y0 = y % C
    q = (y - y0) // C
    return (x - q * B) % A, y0


def divisors_of_ideal(k, m):
    """All integral ideal divisors of m, sorted by (norm, key)."""
    fac = factor_ideal(m)
    out = []
    for exps in product(*[range(e + 1) for _, e in fac]):
        I = k.unit_ideal
        for (P, _), e in zip(fac, exps):
            if e:
                I = ideal_mul(I, ideal_pow(P.ideal, e))
        out.append(I)
    out.sort(key=lambda I: (I.norm, ideal_key(I)))
    return out


def mobius_ideal(k, m):
    fac = factor_ideal(m)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1

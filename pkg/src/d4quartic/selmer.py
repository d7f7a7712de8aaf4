"""
The 2-Selmer group S(k) = V(k)/(k*)^2 of a quadratic field and the
parametrization of quadratic extensions K/k by pairs (a, u).

S(k) is generated by the units modulo squares together with the gamma_i of
the even invariant factors, where G_i^{n_i} = (gamma_i) and G_i is an odd
ideal in the i-th basis class.  For an odd n_i the gamma_i is already a
square times a unit, so it drops out.  All representatives are coprime to 2.

Local data at 2 is handled through residues modulo 4: an ideal c | 2 has
c^2 | 4, so x^2 = delta (mod c^2) only depends on delta mod 4.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .arith import squarefree_kernel
from .classgroup import class_group, odd_basis, principal_generator
from .quadfield import (
    FieldElement,
    QuadField,
    QuadIdeal,
    fundamental_unit,
    ideal_conj,
    ideal_contains,
    ideal_div,
    ideal_divides,
    ideal_mul,
    ideal_pow,
    is_square_in_k,
    is_squarefree_ideal,
    primes_above,
    rational_ideal,
    reduce_mod,
    residue_from_index,
    residue_index,
    residue_mul_table,
    torsion_generator,
)

C4, V4, D4 = "C4", "V4", "D4"


@dataclass(frozen=True)
class SelmerGroup:
    field: QuadField
    basis: tuple
    order: int
    elements: tuple = field(repr=False)  # all 2^r products, index = bit vector
    residues: tuple = field(repr=False)  # element residues mod 4
    negative: tuple = field(repr=False)  # N(element) < 0

    @property
    def rank(self):
        return len(self.basis)

    def element(self, bits):
        return self.elements[bits]

    def coordinates(self, v):
        """Bit vector of the class of v in V(k)/(k*)^2 (None if v is not in V(k))."""
        k = self.field
        for i, u in enumerate(self.elements):
            if is_square_in_k(k, v * u):
                return i
        return None


def _unit_part(k):
    if k.d == -4:
        return [torsion_generator(k)]
    if k.d < 0:
        return [FieldElement(-1, 0, k.d)]
    return [FieldElement(-1, 0, k.d), fundamental_unit(k)[0]]


@lru_cache(maxsize=4096)
def _selmer_group(d):
    k = QuadField(d)
    ob = odd_basis(k)
    basis = _unit_part(k)
    for g, n in zip(ob.gammas, ob.divisors):
        if n % 2 == 0:
            basis.append(g)
    elems = []
    for bits in range(1 << len(basis)):
        e = FieldElement(1, 0, d)
        for i, b in enumerate(basis):
            if bits >> i & 1:
                e = e * b
        elems.append(e)
    return SelmerGroup(
        k,
        tuple(basis),
        len(elems),
        tuple(elems),
        tuple(residue_index(e.x, e.y) for e in elems),
        tuple(e.norm() < 0 for e in elems),
    )


def selmer_group(k):
    return _selmer_group(k.d)


# ---------------------------------------------------------------------------
# alpha_0


def alpha0_for(k, a):
    """(alpha0, q) with a * q^2 = (alpha0) and q coprime to 2."""
    if a.is_unit():
        return FieldElement(1, 0, k.d), k.unit_ideal
    G = class_group(k)
    v = G.ideal_class(a)
    if not G.is_square_class(v):
        raise ValueError("the class of the ideal is not a square")
    ob = odd_basis(k)
    q = k.unit_ideal
    for Gi, x, n in zip(ob.ideals, v, ob.divisors):
        if n % 2:
            t = (-x * pow(2, -1, n)) % n
        else:
            t = ((-x) // 2) % n
        if t:
            q = ideal_mul(q, ideal_pow(Gi, t))
    alpha = principal_generator(ideal_mul(a, ideal_mul(q, q)))
    if alpha is None:
        raise RuntimeError("a * q^2 failed to be principal")
    return alpha, q


# ---------------------------------------------------------------------------
# local squares at the primes above 2


@dataclass(frozen=True)
class TwoAdicData:
    primes: tuple  # PrimeIdealAbove records for p = 2
    exps: tuple  # v_P(2)
    # square[j][e][r]: residue r (mod 4) is a unit square mod P_j^{2e}
    square: tuple
    unit: tuple  # unit[j][r]: residue r is prime to P_j


def _squares_mod(d, M, P):
    units, sq = [], set()
    for i in range(16):
        x, y = residue_from_index(i)
        if not ideal_contains(P, (x, y)):
            units.append(i)
    tab = residue_mul_table(d)
    for i in units:
        x, y = residue_from_index(tab[i][i])
        sq.add(reduce_mod(M, x, y))
    out = []
    for i in range(16):
        x, y = residue_from_index(i)
        out.append(i in units and reduce_mod(M, x, y) in sq)
    return tuple(out), tuple(i in units for i in range(16))


@lru_cache(maxsize=4096)
def two_adic_data(d):
    k = QuadField(d)
    Ps = primes_above(k, 2)
    exps = tuple(2 if P.kind == "ramified" else 1 for P in Ps)
    square, unit = [], []
    for P, v in zip(Ps, exps):
        rows = [tuple(True for _ in range(16))]
        u = None
        for e in range(1, v + 1):
            M = ideal_pow(P.ideal, 2 * e)
            row, u = _squares_mod(d, M, P.ideal)
            rows.append(row)
        square.append(tuple(rows))
        unit.append(u)
    return TwoAdicData(tuple(Ps), exps, tuple(square), tuple(unit))


def local_conductor_exponents(d, res, mask):
    """Exponent of each P | 2 in the conductor for delta = res (mod 4).

    Primes in ``mask`` (bit j for the j-th prime above 2) divide a and get 0.
    """
    T = two_adic_data(d)
    out = []
    for j, v in enumerate(T.exps):
        if mask >> j & 1:
            out.append(0)
            continue
        e = 0
        for t in range(1, v + 1):
            if T.square[j][t][res]:
                e = t
        out.append(e)
    return tuple(out)


@lru_cache(maxsize=4096)
def conductor_norm_table(d):
    """table[mask][res] = N(c) for delta = res (mod 4) and the 2-part mask of a."""
    T = two_adic_data(d)
    nmask = 1 << len(T.primes)
    out = []
    for mask in range(nmask):
        row = []
        for res in range(16):
            n = 1
            for P, e in zip(T.primes, local_conductor_exponents(d, res, mask)):
                n *= P.norm ** e
            row.append(n)
        out.append(tuple(row))
    return tuple(out)


def two_mask(k, a):
    T = two_adic_data(k.d)
    mask = 0
    for j, P in enumerate(T.primes):
        if ideal_divides(P.ideal, a):
            mask |= 1 << j
    return mask


def _integral_residue(delta):
    if not delta.is_integral():
        raise ValueError("element must be integral")
    return residue_index(delta.x, delta.y)


def _as_element(k, u):
    if isinstance(u, FieldElement):
        return u
    if isinstance(u, int):
        return selmer_group(k).element(u)
    raise TypeError("u must be a FieldElement or a Selmer bit vector")


def conductor_ideal(k, a, u, alpha0=None):
    """The largest c | 2 prime to a with x^2 = alpha0*u (mod c^2) solvable."""
    u = _as_element(k, u)
    if alpha0 is None:
        alpha0 = alpha0_for(k, a)[0]
    res = _integral_residue(alpha0 * u)
    mask = two_mask(k, a)
    T = two_adic_data(k.d)
    c = k.unit_ideal
    for P, e in zip(T.primes, local_conductor_exponents(k.d, res, mask)):
        if e:
            c = ideal_mul(c, ideal_pow(P.ideal, e))
    return c


def relative_discriminant(k, a, u, alpha0=None):
    c = conductor_ideal(k, a, u, alpha0)
    four_a = ideal_mul(rational_ideal(k, 4), a)
    return ideal_div(four_a, ideal_mul(c, c))


def galois_type_from_norm(d, n):
    """Galois group of the closure of k(sqrt(delta)) from N(delta) mod squares."""
    core = squarefree_kernel(n)
    if core == 1:
        return V4
    if core == squarefree_kernel(d):
        return C4
    return D4


def classify_galois(k, a, u, alpha0=None):
    u = _as_element(k, u)
    if alpha0 is None:
        alpha0 = alpha0_for(k, a)[0]
    return galois_type_from_norm(k.d, (alpha0 * u).norm())


@dataclass(frozen=True)
class ExtensionDescriptor:
    field: QuadField
    a: QuadIdeal
    u: int  # Selmer bit vector
    alpha0: FieldElement
    c: QuadIdeal
    rel_disc: QuadIdeal
    rel_disc_norm: int
    abs_disc: int
    galois_type: str

    @property
    def delta(self):
        return self.alpha0 * selmer_group(self.field).element(self.u)


def describe(k, a, u):
    """Full descriptor of the extension attached to (a, u)."""
    if not is_squarefree_ideal(a):
        raise ValueError("a must be squarefree")
    alpha0, _ = alpha0_for(k, a)
    ue = selmer_group(k).element(u)
    c = conductor_ideal(k, a, ue, alpha0)
    rd = ideal_div(ideal_mul(rational_ideal(k, 4), a), ideal_mul(c, c))
    return ExtensionDescriptor(
        k, a, u, alpha0, c, rd, rd.norm, rd.norm * k.d * k.d,
        galois_type_from_norm(k.d, (alpha0 * ue).norm()),
    )


def kummer_polynomial(delta):
    """Characteristic polynomial over Q of sqrt(delta): x^4 - Tr(delta) x^2 + N(delta).

    It is the square of a quadratic when delta is rational, as for some V4 fields.
    """
    return (1, 0, -delta.trace(), 0, delta.norm())


def conjugate_pair(k, a, u, alpha0=None):
    """(sigma(a), u') such that (sigma(a), u') describes sigma(K)."""
    S = selmer_group(k)
    if alpha0 is None:
        alpha0 = alpha0_for(k, a)[0]
    delta = alpha0 * S.element(u)
    a2 = ideal_conj(a)
    beta, _ = alpha0_for(k, a2)
    v = delta.conj() * beta
    bits = S.coordinates(v)
    if bits is None:
        raise RuntimeError("conjugate Kummer class left V(k)")
    return a2, bits

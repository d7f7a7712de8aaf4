"""
Class groups of quadratic fields through binary quadratic forms.

Conventions
-----------
The primitive ideal I = [a, (b + sqrt(D))/2] is sent to the form (a, b, c),
c = (b^2 - D)/(4a).  With the basis (alpha, beta) = (a, (b + sqrt(D))/2) one has
N(x*alpha + y*beta) = a * f(x, y), and every reduction step below changes the
basis by an SL2(Z) move so this identity is preserved.  That is what lets the
reduction double as a principal-ideal test that also returns a generator.

The map is the classical ideal-to-form map composed with conjugation, i.e.
with inversion in the class group, so it is still a group isomorphism.

For D > 0 the SL2(Z) classes of forms are narrow ideal classes.  Each narrow
class is a cycle of reduced forms under rho; the wide group is the quotient by
the class of (-1, D, -n0), the form attached to principal ideals with a
generator of negative norm.  That class is trivial exactly when the
fundamental unit has norm -1.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

from .abelian import apply, smith_form
from .arith import primes_upto, xgcd
from .quadfield import (
    FieldElement,
    QuadField,
    QuadIdeal,
    fundamental_unit,
    ideal_mul,
    ideal_pow,
    primes_above,
)


@dataclass(frozen=True, order=True)
class BQF:
    a: int
    b: int
    c: int

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self):
        return BQF(self.a, -self.b, self.c)

    def __repr__(self):
        return f"({self.a}, {self.b}, {self.c})"


def principal_form(D):
    b = D % 2
    return BQF(1, b, (b * b - D) // 4)


def form_of_ideal(I):
    a, b = I.a, I.b
    return BQF(a, b, (b * b - I.d) // (4 * a))


def ideal_of_form(d, f):
    """Ideal [a, (b + sqrt(d))/2] for a form with a > 0."""
    if f.a <= 0:
        raise ValueError("ideal_of_form needs a > 0")
    a = f.a
    return QuadIdeal(d, a, 1, ((f.b - d) // 2) % a)


# ---------------------------------------------------------------------------
# reduction with basis tracking
#
# basis vectors are carried as integer pairs (x, y) meaning x + y*w


def _elt_add(d, u, v, s=1):
    return (u[0] + s * v[0], u[1] + s * v[1])


def _elt_scale(u, s):
    return (s * u[0], s * u[1])


def _normalize_imag(a, b, c, basis):
    # b -> b + 2as with s = floor((a - b)/(2a)), so that -a < b <= a
    s = (a - b) // (2 * a)
    if s:
        c = a * s * s + b * s + c
        b = b + 2 * a * s
        if basis is not None:
            al, be = basis
            basis = (al, (be[0] + s * al[0], be[1] + s * al[1]))
    return a, b, c, basis


def _reduce_imag(a, b, c, basis=None):
    if a <= 0:
        raise ValueError("positive definite form required")
    a, b, c, basis = _normalize_imag(a, b, c, basis)
    while a > c or (a == c and b < 0):
        a, b, c = c, -b, a
        if basis is not None:
            al, be = basis
            basis = (be, (-al[0], -al[1]))
        a, b, c, basis = _normalize_imag(a, b, c, basis)
    return a, b, c, basis


def _r(b, c, s):
    # the b' of a rho step, s = isqrt(D)
    m = 2 * abs(c)
    if abs(c) > s:
        r = b % m
        if r > abs(c):
            r -= m
        return r
    return s - ((s - b) % m)


def _is_reduced_real(a, b, s):
    return 0 < b <= s and 2 * abs(a) + b >= s + 1 and 2 * abs(a) - b <= s


def _rho(a, b, c, D, s, basis=None):
    b2 = _r(-b, c, s)
    t = (b2 + b) // (2 * c)
    a2, c2 = c, (b2 * b2 - D) // (4 * c)
    if basis is not None:
        al, be = basis
        basis = (be, (t * be[0] - al[0], t * be[1] - al[1]))
    return a2, b2, c2, basis


def _reduce_real(a, b, c, D, basis=None):
    s = isqrt(D)
    if a == 0:
        raise ValueError("degenerate form")
    guard = 0
    while not _is_reduced_real(a, b, s):
        a, b, c, basis = _rho(a, b, c, D, s, basis)
        guard += 1
        if guard > 10000:
            raise RuntimeError("real reduction did not terminate")
    return a, b, c, basis


def rho_cycle(f):
    """The full rho cycle of a reduced indefinite form, starting at f."""
    D = f.disc
    s = isqrt(D)
    out = [f]
    a, b, c = f.a, f.b, f.c
    while True:
        a, b, c, _ = _rho(a, b, c, D, s)
        g = BQF(a, b, c)
        if g == f:
            return out
        out.append(g)


def is_reduced(f):
    D = f.disc
    if D < 0:
        return abs(f.b) <= f.a <= f.c and (f.b >= 0 if (abs(f.b) == f.a or f.a == f.c) else True)
    return _is_reduced_real(f.a, f.b, isqrt(D))


def reduce_any(f):
    """Some reduced form equivalent to f (for D > 0 not yet canonical)."""
    if f.a == 0:
        raise ValueError("degenerate form with a = 0")
    D = f.disc
    if D < 0:
        a, b, c, _ = _reduce_imag(f.a, f.b, f.c)
    else:
        a, b, c, _ = _reduce_real(f.a, f.b, f.c, D)
    return BQF(a, b, c)


def reduce(f):
    """Canonical reduced representative of the SL2(Z) class of f.

    For D > 0 this is the lexicographically smallest (a, b) on the rho cycle.
    """
    g = reduce_any(f)
    if g.disc < 0:
        return g
    return min(rho_cycle(g), key=lambda h: (h.a, h.b))


def _positive_lead(f):
    # an equivalent form with a > 0 (for D > 0 walk the cycle)
    if f.a > 0:
        return f
    D = f.disc
    g = reduce_any(f)
    if g.a > 0:
        return g
    a, b, c, _ = _rho(g.a, g.b, g.c, D, isqrt(D))
    return BQF(a, b, c)


def compose(f, g):
    """Gauss composition by the classical gcd formulas, reduced canonically."""
    D = f.disc
    if g.disc != D:
        raise ValueError("forms have different discriminants")
    return reduce(compose_raw(f, g))


def compose_raw(f, g):
    D = f.disc
    f, g = _positive_lead(f), _positive_lead(g)
    if f.a > g.a:
        f, g = g, f
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return BQF(a3, b3, c3)


def form_power(f, e):
    D = f.disc
    result = reduce(principal_form(D))
    base = reduce(f)
    if e < 0:
        base = reduce(base.inverse())
        e = -e
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# enumeration of reduced forms


def reduced_forms(D):
    """All reduced forms of discriminant D (for D > 0: of every cycle, both signs of a)."""
    out = []
    if D < 0:
        amax = isqrt(-D // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b - D) % 2:
                    continue
                num = b * b - D
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a or (c == a and b < 0):
                    continue
                out.append(BQF(a, b, c))
        return out
    s = isqrt(D)
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        N = (D - b * b) // 4
        lo = max(1, -((b - s - 1) // 2))  # ceil((s + 1 - b)/2)
        hi = (s + b) // 2
        for a in range(lo, hi + 1):
            if N % a:
                continue
            c = N // a
            for sg in (1, -1):
                f = BQF(sg * a, b, -sg * c)
                if _is_reduced_real(f.a, f.b, s):
                    out.append(f)
    return out


# ---------------------------------------------------------------------------
# the group


@dataclass
class ClassGroup:
    field: QuadField
    narrow: bool
    elementary_divisors: list
    generators: list  # forms, one per invariant factor
    discrete_log: dict  # reduced form -> coordinate tuple
    class_reps: dict = field(repr=False, default_factory=dict)  # coordinate tuple -> canonical form

    @property
    def order(self):
        out = 1
        for n in self.elementary_divisors:
            out *= n
        return out

    @property
    def d(self):
        return self.field.d

    def zero(self):
        return tuple(0 for _ in self.elementary_divisors)

    def log_form(self, f):
        return self.discrete_log[reduce_any(f)]

    def ideal_class(self, I):
        if I.a == 1:
            return self.zero()
        return self.log_form(form_of_ideal(I))

    def add(self, u, v):
        return tuple((x + y) % n for x, y, n in zip(u, v, self.elementary_divisors))

    def neg(self, u):
        return tuple((-x) % n for x, n in zip(u, self.elementary_divisors))

    def is_square_class(self, v):
        return all(x % 2 == 0 for x, n in zip(v, self.elementary_divisors) if n % 2 == 0)

    def two_rank(self):
        return sum(1 for n in self.elementary_divisors if n % 2 == 0)


def _cycle_classes(D):
    """Map reduced form -> canonical key of its SL2 class."""
    forms = reduced_forms(D)
    key = {}
    if D < 0:
        for f in forms:
            key[f] = f
        return key
    for f in forms:
        if f in key:
            continue
        cyc = rho_cycle(f)
        k = min(cyc, key=lambda h: (h.a, h.b))
        for g in cyc:
            key[g] = k
    return key


@lru_cache(maxsize=4096)
def _class_group(d, narrow):
    k = QuadField(d)
    D = d
    key = _cycle_classes(D)
    if D > 0 and not narrow and fundamental_unit(k)[1] == 1:
        # merge each cycle with its translate by the negative principal class
        neg = BQF(-1, D, -((D * D - D) // 4))
        merged = {}
        for f in set(key.values()):
            if f in merged:
                continue
            g = key[reduce_any(compose_raw(f, neg))]
            canon = min(f, g, key=lambda h: (h.a, h.b))
            merged[f] = canon
            merged[g] = canon
        key = {f: merged[c] for f, c in key.items()}
    classes = set(key.values())
    h = len(classes)

    def canon(f):
        return key[reduce_any(f)]

    def mul(f, g):
        return canon(compose_raw(f, g))

    one = canon(principal_form(D))
    # subgroup built one generator at a time: canonical form -> vector
    elems = {one: ()}
    gens = []
    relations = []
    for p in primes_upto(max(100, 4 * isqrt(abs(D)) + 10)):
        if len(elems) == h:
            break
        for P in primes_above(k, p):
            if len(elems) == h:
                break
            if P.kind == "inert":
                continue
            g = canon(form_of_ideal(P.ideal))
            if g in elems:
                continue
            ng = len(gens)
            gens.append(g)
            relations = [r + [0] for r in relations]
            old = {f: v + (0,) for f, v in elems.items()}
            new = dict(old)
            power = g
            j = 1
            while power not in old:
                for f, v in old.items():
                    new[mul(f, power)] = v[:ng] + (j,)
                power = mul(power, g)
                j += 1
            rel = [-x for x in old[power][:ng]] + [j]
            relations.append(rel)
            elems = new
    if len(elems) != h:
        raise RuntimeError(f"prime forms did not generate the class group of {D}")
    ngens = len(gens)
    if ngens == 0:
        divisors, Q = [], []
    else:
        divisors, Q = smith_form(relations, ngens)
    coords = {f: apply(Q, divisors, v) if ngens else () for f, v in elems.items()}
    dlog = {f: coords[c] for f, c in key.items()}
    reps = {v: f for f, v in coords.items()}
    gen_forms = []
    for i in range(len(divisors)):
        e = tuple(int(i == j) for j in range(len(divisors)))
        gen_forms.append(reps[e])
    return ClassGroup(k, narrow, list(divisors), gen_forms, dlog, reps)


def class_group(k, narrow=False):
    """Class group (wide by default, narrow on request) with discrete logs."""
    return _class_group(k.d, bool(narrow))


def ideal_class(k, I):
    return class_group(k).ideal_class(I)


def in_square_subgroup(k, I):
    G = class_group(k)
    return G.is_square_class(G.ideal_class(I))


def two_torsion(k):
    return 2 ** class_group(k).two_rank()


def class_number(k, narrow=False):
    return class_group(k, narrow).order


# ---------------------------------------------------------------------------
# principal generators


def principal_generator(I):
    """A generator of I as a FieldElement, or None when I is not principal."""
    d = I.d
    c = I.content
    if I.a == 1:
        return FieldElement(c, 0, d)
    a, b = I.a, I.b
    f_c = (b * b - d) // (4 * a)
    basis = ((a, 0), ((b - d) // 2, 1))
    if d < 0:
        ra, rb, rc, basis = _reduce_imag(a, b, f_c, basis)
        if ra != 1:
            return None
        x, y = basis[0]
        return FieldElement(c * x, c * y, d)
    ra, rb, rc, basis = _reduce_real(a, b, f_c, d, basis)
    s = isqrt(d)
    start = (ra, rb, rc)
    while abs(ra) != 1:
        ra, rb, rc, basis = _rho(ra, rb, rc, d, s, basis)
        if (ra, rb, rc) == start:
            return None
    x, y = basis[0]
    return FieldElement(c * x, c * y, d)


def is_principal(I):
    return principal_generator(I) is not None


# ---------------------------------------------------------------------------
# odd ideal generators of the wide class group


@dataclass(frozen=True)
class OddBasis:
    """Ideals G_i coprime to 2 whose classes are the invariant-factor basis,
    with generators gamma_i of G_i^{n_i}."""

    ideals: tuple
    gammas: tuple
    divisors: tuple


@lru_cache(maxsize=4096)
def _odd_basis(d):
    k = QuadField(d)
    G = class_group(k)
    r = len(G.elementary_divisors)
    if r == 0:
        return OddBasis((), (), ())
    targets = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    reps = {G.zero(): k.unit_ideal}
    for p in primes_upto(10**6)[1:]:
        if all(t in reps for t in targets):
            break
        for P in primes_above(k, p):
            if P.kind == "inert":
                continue
            v = G.ideal_class(P.ideal)
            if v in reps:
                continue
            # close the table of representatives under multiplication by P
            frontier = dict(reps)
            while True:
                added = {}
                for u, J in frontier.items():
                    w = G.add(u, v)
                    if w not in reps and w not in added:
                        added[w] = ideal_mul(J, P.ideal)
                if not added:
                    break
                reps.update(added)
                frontier = added
    ideals = tuple(reps[t] for t in targets)
    gammas = []
    for J, n in zip(ideals, G.elementary_divisors):
        g = principal_generator(ideal_pow(J, n))
        if g is None:
            raise RuntimeError("class group relation failed to be principal")
        gammas.append(g)
    return OddBasis(ideals, tuple(gammas), tuple(G.elementary_divisors))


def odd_basis(k):
    return _odd_basis(k.d)

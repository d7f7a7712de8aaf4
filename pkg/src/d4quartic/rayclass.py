"""
Ray class groups Cl_m(k) for moduli m = d^2 with d | 2 (finite part only),
their quadratic characters and conductors.

Presentation: one generator per odd class-group basis ideal G_i and one per
unit residue r in (O/m)*, with relations

    [r1] + [r2] - [r1 r2]          (the residue map is a homomorphism)
    [eta]                          (units generate the trivial ideal)
    n_i [G_i] - [gamma_i mod m]    (G_i^{n_i} = (gamma_i)).

An ideal I prime to m has log [beta mod m] - sum e_i [G_i], where
I * prod G_i^{e_i} = (beta).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .abelian import apply, smith_form
from .classgroup import class_group, odd_basis, principal_generator
from .quadfield import (
    QuadField,
    QuadIdeal,
    divisors_of_ideal,
    factor_ideal,
    ideal_coprime,
    ideal_contains,
    ideal_div,
    ideal_divides,
    ideal_mul,
    ideal_pow,
    rational_ideal,
    reduce_mod,
    residue_from_index,
    residue_index,
    unit_generators,
    _mul,
)


@dataclass
class RayClassGroup:
    field: QuadField
    modulus: QuadIdeal
    elementary_divisors: list
    Q: list = field(repr=False)
    unit_residues: list = field(repr=False)  # canonical reps (x, y) of (O/m)*
    res_index: dict = field(repr=False)  # canonical rep -> position
    from_mod4: tuple = field(repr=False)  # residue index mod 4 -> position or -1
    ngens_class: int = 0
    modulus_primes: tuple = ()

    @property
    def order(self):
        out = 1
        for n in self.elementary_divisors:
            out *= n
        return out

    def two_rank(self):
        return sum(1 for n in self.elementary_divisors if n % 2 == 0)

    def _vector(self, shift, res_pos):
        t = self.ngens_class
        vec = [-e for e in shift] + [0] * len(self.unit_residues)
        vec[t + res_pos] += 1
        return vec

    def log_from_data(self, shift, beta_res4):
        """Log of an ideal I prime to m with I*prod G^shift = (beta), beta = beta_res4 mod 4."""
        pos = self.from_mod4[beta_res4]
        if pos < 0:
            raise ValueError("ideal is not prime to the modulus")
        return apply(self.Q, self.elementary_divisors, self._vector(shift, pos))

    def log(self, I):
        if not ideal_coprime(I, self.modulus):
            raise ValueError("ideal is not prime to the modulus")
        k = self.field
        G = class_group(k)
        v = G.ideal_class(I)
        e = tuple((-x) % n for x, n in zip(v, G.elementary_divisors))
        J = I
        for Gi, ei in zip(odd_basis(k).ideals, e):
            if ei:
                J = ideal_mul(J, ideal_pow(Gi, ei))
        beta = principal_generator(J)
        return self.log_from_data(e, residue_index(beta.x % 4, beta.y % 4))

    def log_element(self, alpha):
        """Log of the principal ideal (alpha) for alpha prime to m."""
        pos = self.from_mod4[residue_index(alpha.x, alpha.y)]
        if pos < 0:
            raise ValueError("element is not prime to the modulus")
        vec = [0] * (self.ngens_class + len(self.unit_residues))
        vec[self.ngens_class + pos] = 1
        return apply(self.Q, self.elementary_divisors, vec)

    def is_square(self, v):
        return all(x % 2 == 0 for x, n in zip(v, self.elementary_divisors) if n % 2 == 0)


@lru_cache(maxsize=8192)
def _ray_class_group(d, mod_key):
    k = QuadField(d)
    content, a, s = mod_key
    m = QuadIdeal(d, a, content, s)
    G = class_group(k)
    ob = odd_basis(k)
    mprimes = tuple(P for P, _ in factor_ideal(m))
    # residues mod m
    reps = []
    seen = set()
    for x, y in product(range(4), repeat=2):
        r = reduce_mod(m, x, y)
        if r in seen:
            continue
        seen.add(r)
        if all(not ideal_contains(P.ideal, r) for P in mprimes):
            reps.append(r)
    reps.sort()
    pos = {r: i for i, r in enumerate(reps)}
    from_mod4 = []
    for i in range(16):
        x, y = residue_from_index(i)
        from_mod4.append(pos.get(reduce_mod(m, x, y), -1))
    t = len(ob.ideals)
    n = t + len(reps)

    def unit_vec(r):
        v = [0] * n
        v[t + pos[reduce_mod(m, *r)]] += 1
        return v

    rels = []
    for r1 in reps:
        for r2 in reps:
            v = unit_vec(r1)
            prod_r = reduce_mod(m, *_mul(d, r1[0], r1[1], r2[0], r2[1]))
            v[t + pos[r2]] += 1
            v[t + pos[prod_r]] -= 1
            rels.append(v)
    for eta in unit_generators(k):
        rels.append(unit_vec((eta.x, eta.y)))
    for i, (g, ni) in enumerate(zip(ob.gammas, ob.divisors)):
        v = [-x for x in unit_vec((g.x, g.y))]
        v[i] += ni
        rels.append(v)
    divisors, Q = smith_form(rels, n)
    return RayClassGroup(k, m, list(divisors), Q, reps, pos, tuple(from_mod4), t, mprimes)


def ray_class_group(k, d):
    """Cl_{d^2}(k) for an ideal d dividing 2."""
    if not ideal_divides(d, rational_ideal(k, 2)):
        raise ValueError("d must divide 2")
    m = ideal_mul(d, d)
    return _ray_class_group(k.d, (m.content, m.a, m.s))


def ray_class_group_mod(k, m):
    """Cl_m(k) for any modulus m dividing 4."""
    if not ideal_divides(m, rational_ideal(k, 4)):
        raise ValueError("modulus must divide 4")
    return _ray_class_group(k.d, (m.content, m.a, m.s))


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class RayCharacter:
    group: RayClassGroup = field(compare=False, repr=False)
    exponents: tuple  # x_j in {0, 1} on each invariant factor (0 on odd ones)

    @property
    def is_principal(self):
        return not any(self.exponents)

    def value_on_log(self, v):
        s = 0
        for x, c in zip(self.exponents, v):
            if x:
                s += c
        return -1 if s & 1 else 1

    def __call__(self, I):
        return evaluate(self, I)


def quadratic_characters(G):
    """All chi with chi^2 = 1; the principal character first."""
    even = [j for j, n in enumerate(G.elementary_divisors) if n % 2 == 0]
    out = []
    for bits in range(1 << len(even)):
        x = [0] * len(G.elementary_divisors)
        for i, j in enumerate(even):
            if bits >> i & 1:
                x[j] = 1
        out.append(RayCharacter(G, tuple(x)))
    return out


def all_characters(G):
    """Every character, as exponent tuples chi(g_j) = exp(2 pi i x_j / n_j)."""
    return list(product(*[range(n) for n in G.elementary_divisors]))


def evaluate(chi, I):
    G = chi.group
    if not ideal_coprime(I, G.modulus):
        return 0
    return chi.value_on_log(G.log(I))


@dataclass(frozen=True)
class CharacterConductor:
    character: RayCharacter
    f: QuadIdeal


def _kernel_trivial(chi, f):
    # chi is trivial on the classes of (alpha) with alpha = 1 mod f
    G = chi.group
    d = G.field.d
    for r in G.unit_residues:
        if reduce_mod(f, *r) != reduce_mod(f, 1, 0):
            continue
        v = apply(G.Q, G.elementary_divisors, _unit_only(G, r))
        if chi.value_on_log(v) != 1:
            return False
    return True


def _unit_only(G, r):
    vec = [0] * (G.ngens_class + len(G.unit_residues))
    vec[G.ngens_class + G.res_index[r]] = 1
    return vec


def conductor(chi):
    """Smallest f | m through which chi factors."""
    G = chi.group
    k = G.field
    valid = [f for f in divisors_of_ideal(k, G.modulus) if _kernel_trivial(chi, f)]
    best = valid[0]
    for f in valid:
        if not ideal_divides(best, f):
            raise RuntimeError("conductor candidates are not closed under gcd")
    return CharacterConductor(chi, best)

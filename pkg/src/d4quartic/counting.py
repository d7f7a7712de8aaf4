"""
Two independent counts of quadratic extensions K/k with N(disc(K/k)) <= Y.

direct:      walk the squarefree ideals a with N(a) <= Y whose class is a
             square, attach every u in S(k), compute the conductor c from
             alpha0*u mod 4 and keep N(4a/c^2) <= Y.
characters:  -1 + 2^{r1+r2} sum_{d|2} N(d)^-1 sum_{chi^2=1} sum_{c|d}
             mu(d/c) sum_{a squarefree, N(a) <= N(c)^2 Y/16} chi(a),
             with chi running over the ray class group mod d^2.

Both are exact; they share only the prime table (generators of shifted
primes), so their agreement is a strong consistency check.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from .arith import fundamental_discriminants, primes_upto, squarefree_kernel
from .fielddata import field_data
from .quadfield import (
    QuadField,
    divisors_of_ideal,
    factor_ideal,
    ideal_coprime,
    ideal_div,
    ideal_divides,
    ideal_mul,
    mobius_ideal,
    rational_ideal,
    residue_index,
    residue_mul_table,
)
from .rayclass import quadratic_characters, ray_class_group
from .selmer import (
    C4,
    D4,
    V4,
    ExtensionDescriptor,
    alpha0_for,
    conductor_norm_table,
    galois_type_from_norm,
    local_conductor_exponents,
    selmer_group,
    two_adic_data,
)

TYPES = (C4, V4, D4)


def _floor_bound(Y):
    if isinstance(Y, float):
        Y = Fraction(Y)
    return int(Fraction(Y))


@dataclass
class RelativeCountResult:
    field: QuadField
    bound: object
    total: int
    by_type: dict
    descriptors: list = None


@dataclass
class _Walk:
    # raw output of the direct enumeration
    norms: list = field(default_factory=list)
    types: list = field(default_factory=list)
    keys: list = field(default_factory=list)  # (prime indices, u, rel norm) when requested


def _enumerate(k, Y, keep_keys=False, keep_types=(C4, V4, D4)):
    """Walk all nontrivial pairs (a, u) with N(4a/c^2) <= Y."""
    d = k.d
    M = _floor_bound(Y)
    out = _Walk()
    if M < 1:
        return out
    fd = field_data(k, M)
    primes = fd.prime_list(M)
    S = selmer_group(k)
    tab = residue_mul_table(d)
    cond = conductor_norm_table(d)
    divs = fd.divisors
    even_mask = sum(1 << i for i, n in enumerate(divs) if n % 2 == 0)
    odd_idx = [i for i, n in enumerate(divs) if n % 2]
    twos = [P.ideal for P in fd.twos]
    core_d = squarefree_kernel(d)

    # per-prime data in flat lists for the walk
    pn = [r.norm for r in primes]
    pp = [r.p for r in primes]
    pkind = [r.kind for r in primes]
    pres = [r.res for r in primes]
    pneg = [r.neg for r in primes]
    pidx = [r.index for r in primes]
    pmask = []
    for r in primes:
        m = 0
        for i, e in enumerate(r.shift):
            if e & 1:
                m |= 1 << i
        pmask.append(m)
    ptwo = []
    for r in primes:
        t = 0
        if r.p == 2:
            for j, P in enumerate(twos):
                if P == r.ideal:
                    t = 1 << j
        ptwo.append(t)

    # gamma correction for odd invariant factors with odd exponent sum
    fix = {}

    def gamma_fix(mask):
        got = fix.get(mask)
        if got is None:
            res, neg = residue_index(1, 0), False
            for i in odd_idx:
                if mask >> i & 1:
                    res = tab[res][fd.gamma_res[i]]
                    neg ^= fd.gamma_neg[i]
            got = (res, neg)
            fix[mask] = got
        return got

    # per (alpha0 residue, 2-mask): [(u, N(c)^2, N(u) < 0)]
    ulists = {}

    def ulist(res0, tmask):
        key = (res0, tmask)
        got = ulists.get(key)
        if got is None:
            row = cond[tmask]
            got = [(u, row[tab[res0][S.residues[u]]] ** 2, S.negative[u]) for u in range(S.order)]
            ulists[key] = got
        return got

    want_types = set(keep_types)
    norms, types, keys = out.norms, out.types, out.keys
    path = []

    def visit(n, pmask_acc, res, neg, core, tmask):
        if pmask_acc & even_mask:
            return
        fres, fneg = gamma_fix(pmask_acc)
        res0 = tab[res][fres]
        neg0 = neg ^ fneg
        trivial_a = n == 1
        for u, c2, uneg in ulist(res0, tmask):
            rn = 16 * n // c2
            if rn > M:
                continue
            if trivial_a and u == 0:
                continue
            nd = -core if (neg0 ^ uneg) else core
            if nd == 1:
                t = V4
            elif nd == core_d:
                t = C4
            else:
                t = D4
            norms.append(rn)
            types.append(t)
            if keep_keys and t in want_types:
                keys.append((tuple(path), u, rn))

    # depth-first walk over squarefree products of distinct prime ideals
    def walk(start, n, pm, res, neg, core, tmask):
        visit(n, pm, res, neg, core, tmask)
        for i in range(start, len(pn)):
            m = n * pn[i]
            if m > M:
                break
            p = pp[i]
            if pkind[i] == "inert":
                c2 = core
            else:
                c2 = core // p if core % p == 0 else core * p
            if keep_keys:
                path.append(pidx[i])
            walk(i + 1, m, pm ^ pmask[i], tab[res][pres[i]], neg ^ pneg[i], c2, tmask | ptwo[i])
            if keep_keys:
                path.pop()

    walk(0, 1, 0, residue_index(1, 0), False, 1, 0)
    return out


def alpha0_from_primes(k, indices):
    """alpha0 of the squarefree ideal prod P_i built exactly as in the direct walk."""
    fd = field_data(k)
    recs = fd.records
    alpha = k.one
    E = [0] * len(fd.divisors)
    a = k.unit_ideal
    for i in indices:
        r = recs[i]
        alpha = alpha * r.beta
        a = ideal_mul(a, r.ideal)
        for j, e in enumerate(r.shift):
            E[j] += e
    for j, n in enumerate(fd.divisors):
        if n % 2 and E[j] % 2:
            alpha = alpha * fd.basis.gammas[j]
    return alpha, a


def count_relative_direct(k, Y, keep_descriptors=None):
    """Exact count of quadratic K/k with N(disc(K/k)) <= Y by enumeration of pairs (a, u)."""
    if Fraction(Y) < 1:
        raise ValueError("Y must be at least 1")
    if keep_descriptors is None:
        keep_descriptors = Fraction(Y) <= 10**4
    w = _enumerate(k, Y, keep_keys=keep_descriptors)
    by_type = {t: 0 for t in TYPES}
    for t in w.types:
        by_type[t] += 1
    descs = None
    if keep_descriptors:
        descs = [_descriptor(k, idx, u) for idx, u, _ in w.keys]
        descs.sort(key=lambda D: (D.rel_disc_norm, D.a.content, D.a.a, D.a.b, D.u))
    return RelativeCountResult(k, Y, len(w.norms), by_type, descs)


def _descriptor(k, indices, u):
    alpha0, a = alpha0_from_primes(k, indices)
    S = selmer_group(k)
    delta = alpha0 * S.element(u)
    mask = 0
    T = two_adic_data(k.d)
    for j, P in enumerate(T.primes):
        if ideal_divides(P.ideal, a):
            mask |= 1 << j
    c = k.unit_ideal
    for P, e in zip(T.primes, local_conductor_exponents(k.d, residue_index(delta.x, delta.y), mask)):
        for _ in range(e):
            c = ideal_mul(c, P.ideal)
    rd = ideal_div(ideal_mul(rational_ideal(k, 4), a), ideal_mul(c, c))
    return ExtensionDescriptor(
        k, a, u, alpha0, c, rd, rd.norm, rd.norm * k.d * k.d,
        galois_type_from_norm(k.d, delta.norm()),
    )


def relative_norm_table(k, Y):
    """Sorted rel-disc norms (numpy int64) and matching Galois types for all K/k up to Y."""
    w = _enumerate(k, Y)
    norms = np.array(w.norms, dtype=np.int64)
    types = np.array(w.types, dtype="<U2")
    order = np.argsort(norms, kind="stable")
    return norms[order], types[order]


# ---------------------------------------------------------------------------
# character sums


def _local_chi_values(chi, M):
    """{p: (kind, values on the primes above p)} for primes of norm <= M."""
    G = chi.group
    k = G.field
    fd = field_data(k, M)
    out = {}
    for r in fd.prime_list(M):
        if any(r.ideal == P.ideal for P in G.modulus_primes):
            v = 0
        else:
            v = chi.value_on_log(G.log_from_data(r.shift, r.res))
        out.setdefault(r.p, (r.kind, []))[1].append(v)
    return out


def _multiplicative_sieve(M, local):
    """F[n] for n <= M of the multiplicative function with F(p^e) = local(p, e)."""
    F = np.ones(M + 1, dtype=np.int64)
    F[0] = 0
    for p in primes_upto(M):
        e_max = 1
        while p ** (e_max + 1) <= M:
            e_max += 1
        vals = np.array([0] + [local(p, e) for e in range(1, e_max + 1)], dtype=np.int64)
        j = np.arange(1, M // p + 1)
        v = np.ones_like(j)
        t = j
        for _ in range(e_max - 1):
            hit = t % p == 0
            if not hit.any():
                break
            v += hit
            t = np.where(hit, t // p, t)
        F[p::p] *= vals[v]
    return F


def _squarefree_local(loc):
    def local(p, e):
        got = loc.get(p)
        if got is None:
            return 0  # prime above p has norm beyond the table: cannot occur
        kind, vals = got
        if kind == "split":
            x, y = vals
            return {1: x + y, 2: x * y}.get(e, 0)
        if kind == "inert":
            return vals[0] if e == 2 else 0
        return vals[0] if e == 1 else 0

    return local


def _full_local(loc):
    def local(p, e):
        got = loc.get(p)
        if got is None:
            return 0
        kind, vals = got
        if kind == "split":
            x, y = vals
            return sum(x**i * y ** (e - i) for i in range(e + 1))
        if kind == "inert":
            return vals[0] ** (e // 2) if e % 2 == 0 else 0
        return vals[0] ** e

    return local


def _char_table(chi, M, squarefree):
    loc = _local_chi_values(chi, M)
    # inert primes with p^2 > M are absent from the table; they only matter at p^2
    local = _squarefree_local(loc) if squarefree else _full_local(loc)
    return _multiplicative_sieve(M, local)


def char_sum(chi, X):
    """sum of chi(a) over integral ideals with N(a) <= X."""
    M = _floor_bound(X)
    if M < 1:
        return 0
    return int(_char_table(chi, M, False)[1:].sum())


def char_sum_squarefree(chi, X, method="sieve"):
    """sum of chi(a) over squarefree integral ideals with N(a) <= X.

    method="sieve" sums the squarefree coefficient table; method="mobius"
    uses sum_d mu(d) chi(d^2) char_sum(X / N(d)^2).
    """
    M = _floor_bound(X)
    if M < 1:
        return 0
    if method == "sieve":
        return int(_char_table(chi, M, True)[1:].sum())
    if method != "mobius":
        raise ValueError("method must be 'sieve' or 'mobius'")
    full = np.cumsum(_char_table(chi, M, False))
    G = chi.group
    k = G.field
    fd = field_data(k, isqrt(M))
    recs = [r for r in fd.prime_list(isqrt(M))
            if not any(r.ideal == P.ideal for P in G.modulus_primes)]
    total = 0

    def walk(start, n, mu):
        nonlocal total
        total += mu * int(full[M // (n * n)])
        for i in range(start, len(recs)):
            m = n * recs[i].norm
            if m * m > M:
                break
            walk(i + 1, m, -mu)

    walk(0, 1, 1)
    return total


def count_relative_characters(k, Y):
    """The ray-class character formula for the number of K/k with N(disc) <= Y."""
    Yq = Fraction(Y)
    if Yq < 1:
        raise ValueError("Y must be at least 1")
    two = rational_ideal(k, 2)
    total = Fraction(0)
    for dd in divisors_of_ideal(k, two):
        G = ray_class_group(k, dd)
        chars = quadratic_characters(G)
        inner = 0
        for c in divisors_of_ideal(k, dd):
            mu = mobius_ideal(k, ideal_div(dd, c))
            if mu == 0:
                continue
            B = int(Yq * c.norm * c.norm / 16)
            if B < 1:
                continue
            for chi in chars:
                inner += mu * int(_char_table(chi, B, True)[1:].sum())
        total += Fraction(inner, dd.norm)
    total = -1 + 2 ** (k.r1 + k.r2) * total
    if total.denominator != 1:
        raise ArithmeticError("character formula produced a non-integer")
    return int(total)


def _engine_rows(d, bounds):
    k = QuadField(d)
    return [(d, Y, count_relative_direct(k, Y).total, count_relative_characters(k, Y)) for Y in bounds]


def engine_table(max_disc, bounds, threads=1):
    """Rows (disc, Y, direct count, character count) for all fundamental |disc| <= max_disc."""
    bounds = sorted(set(bounds))
    ds = fundamental_discriminants(max_disc)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda d: _engine_rows(d, bounds), ds))
    else:
        parts = [_engine_rows(d, bounds) for d in ds]
    return [row for part in parts for row in part]


# ---------------------------------------------------------------------------
# the solvability count


def selmer_solvability_count(k, a, c, alpha0=None):
    """#{u in S : x^2 = alpha0 u (mod c^2) solvable with x prime to c}."""
    if not ideal_coprime(a, c):
        raise ValueError("a and c must be coprime")
    if not ideal_divides(c, rational_ideal(k, 2)):
        raise ValueError("c must divide 2")
    if alpha0 is None:
        alpha0 = alpha0_for(k, a)[0]
    T = two_adic_data(k.d)
    need = []
    for j, P in enumerate(T.primes):
        e = 0
        cc = c
        while ideal_divides(P.ideal, cc):
            cc = ideal_div(cc, P.ideal)
            e += 1
        need.append(e)
    S = selmer_group(k)
    count = 0
    for u in S.elements:
        delta = alpha0 * u
        r = residue_index(delta.x, delta.y)
        if all(T.square[j][e][r] for j, e in enumerate(need)):
            count += 1
    return count


def solvability_closed_form(k, a, c):
    """2^{r1+r2} |Cl_{c^2}[2]| / N(c) when [a] is a square in Cl_{c^2}, else 0."""
    G = ray_class_group(k, c)
    if not G.is_square(G.log(a)):
        return 0
    val = Fraction(2 ** (k.r1 + k.r2) * 2 ** G.two_rank(), c.norm)
    if val.denominator != 1:
        raise ArithmeticError("closed form is not an integer")
    return int(val)

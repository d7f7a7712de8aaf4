"""
The quartic census over quadratic base fields.

Every quartic field with a quadratic subfield arises as K/k for a quadratic
k, with multiplicity two for D4 (k and its conjugate pair of extensions),
one for C4 and three for V4, so

    sum_k N_k(X / D_k^2) = 2 n_D4 + n_C4 + 3 n_V4.

The D4 multiplicity is audited by pairing each D4 pair (a, u) with the pair
describing the conjugate field, and the V4 count is re-derived from
triples of quadratic discriminants.
"""

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isqrt, log

import mpmath
import numpy as np

from .analytic import PREC, batch_L_values, main_term_constant, tail_bound
from .arith import disc_sort_key, fundamental_discriminant_of, fundamental_discriminants
from .counting import TYPES, _enumerate, alpha0_from_primes, relative_norm_table
from .fielddata import field_data
from .quadfield import QuadField, is_square_in_k
from .selmer import C4, D4, V4, selmer_group


class AuditError(RuntimeError):
    """A D4 descriptor without a conjugate partner."""


@dataclass
class FieldCount:
    disc: int
    bound: int
    total: int
    by_type: dict
    d4_pairs: int = 0


@dataclass
class CensusResult:
    X: int
    total_quad_over_quad: int
    n_d4: int
    n_c4: int
    n_v4: int
    per_field_breakdown: list = field(default_factory=list)
    audited: bool = False

    @property
    def identity_holds(self):
        return self.total_quad_over_quad == 2 * self.n_d4 + self.n_c4 + 3 * self.n_v4


def census_fields(X):
    """Fundamental discriminants with D^2 <= X, in census order."""
    r = isqrt(int(X))
    return fundamental_discriminants(r) if r >= 3 else []


def _audit_d4(k, keys):
    """Pair every D4 key (prime indices, u, rel norm) with its conjugate; return the number of pairs."""
    if not keys:
        return 0
    fd = field_data(k)
    recs = fd.records
    S = selmer_group(k)
    by_a = {}
    for idx, u, rn in keys:
        by_a.setdefault(frozenset(idx), []).append((u, rn))
    alpha = {}

    def alpha0(a):
        got = alpha.get(a)
        if got is None:
            got = alpha0_from_primes(k, sorted(a))[0]
            alpha[a] = got
        return got

    partner = {}
    for idx, u, rn in keys:
        a = frozenset(idx)
        b = frozenset(recs[i].conj for i in idx)
        sig = (alpha0(a) * S.element(u)).conj()
        found = []
        for v, rn2 in by_a.get(b, ()):
            if rn2 == rn and is_square_in_k(k, sig * alpha0(b) * S.element(v)):
                found.append(v)
        if len(found) != 1:
            raise AuditError(f"D4 pair {sorted(idx)}, u={u} over {k.d} has {len(found)} partners")
        me, other = (a, u), (b, found[0])
        if me == other:
            raise AuditError(f"D4 pair {sorted(idx)}, u={u} over {k.d} is its own conjugate")
        partner[me] = other
    for me, other in partner.items():
        if partner.get(other) != me:
            raise AuditError(f"conjugation is not an involution at {me} over {k.d}")
    return len(partner) // 2


def _field_count(d, X, audit):
    k = QuadField(d)
    Y = int(X) // (d * d)
    if Y < 1:
        return FieldCount(d, Y, 0, {t: 0 for t in TYPES})
    w = _enumerate(k, Y, keep_keys=audit, keep_types=(D4,))
    by_type = {t: 0 for t in TYPES}
    for t in w.types:
        by_type[t] += 1
    pairs = _audit_d4(k, w.keys) if audit else 0
    if audit and 2 * pairs != by_type[D4]:
        raise AuditError(f"{by_type[D4]} D4 descriptors over {d} but {pairs} conjugate pairs")
    return FieldCount(d, Y, len(w.norms), by_type, pairs)


def quad_over_quad_total(X, threads=1, audit=True):
    """Census of quartic fields with a quadratic subfield and |disc| <= X."""
    X = int(X)
    if X < 1:
        raise ValueError("X must be at least 1")
    ds = census_fields(X)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(lambda d: _field_count(d, X, audit), ds))
    else:
        rows = [_field_count(d, X, audit) for d in ds]
    rows.sort(key=lambda r: disc_sort_key(r.disc))
    total = sum(r.total for r in rows)
    d4 = sum(r.by_type[D4] for r in rows)
    c4 = sum(r.by_type[C4] for r in rows)
    v4 = sum(r.by_type[V4] for r in rows)
    if d4 % 2:
        raise AuditError(f"odd number of D4 descriptors ({d4})")
    if v4 % 3:
        raise AuditError(f"V4 descriptor count {v4} is not divisible by 3")
    return CensusResult(X, total, d4 // 2, c4, v4 // 3, rows, audit)


MULTIPLICITY = {D4: 2, C4: 1, V4: 3}


def field_table(X):
    """{(abs_disc, type): number of quartic fields} for all fields with a quadratic subfield and |disc| <= X."""
    raw = Counter()
    for d in census_fields(X):
        Y = int(X) // (d * d)
        if Y < 1:
            continue
        w = _enumerate(QuadField(d), Y)
        for n, t in zip(w.norms, w.types):
            raw[(n * d * d, t)] += 1
    out = {}
    for (disc, t), c in sorted(raw.items()):
        m = MULTIPLICITY[t]
        if c % m:
            raise AuditError(f"{c} {t} descriptors at discriminant {disc}, not a multiple of {m}")
        out[(disc, t)] = c // m
    return out


def d4_exact(X, threads=1):
    return quad_over_quad_total(X, threads=threads, audit=True).n_d4


def v4_triples(X):
    """Sorted triples (d1, d2, d3) of fundamental discriminants of the V4 fields with |d1 d2 d3| <= X."""
    X = int(X)
    out = []
    if X < 1:
        return out
    r = 1
    while (r + 1) ** 3 <= X:
        r += 1
    small = fundamental_discriminants(r) if r >= 3 else []
    big_bound = isqrt(X // 3) if X >= 3 else 0
    allds = fundamental_discriminants(big_bound) if big_bound >= 3 else []
    for d1 in small:
        k1 = disc_sort_key(d1)
        lim = isqrt(X // abs(d1))
        for d2 in allds:
            if abs(d2) > lim:
                break
            if disc_sort_key(d2) <= k1:
                continue
            d3 = fundamental_discriminant_of(d1 * d2)
            if disc_sort_key(d3) <= disc_sort_key(d2):
                continue
            if abs(d1 * d2 * d3) <= X:
                out.append((d1, d2, d3))
    return out


def v4_independent(X):
    return len(v4_triples(X))


# ---------------------------------------------------------------------------
# error terms


@dataclass
class ErrorScan:
    field: QuadField
    grid: list  # (Y, N_k(Y), main term, E_k(Y))
    sup_ratio: float


def envelope(d, Y):
    return abs(d) ** (1 / 3) * Y**0.5 * (1 + log(Y))


def error_scan(k, grid):
    grid = [int(y) for y in grid]
    if grid != sorted(grid):
        raise ValueError("grid must be sorted ascending")
    if not grid or grid[0] < 1:
        raise ValueError("grid values must be positive")
    norms, _ = relative_norm_table(k, grid[-1])
    c = main_term_constant(k)
    rows = []
    sup = 0.0
    with mpmath.workdps(PREC):
        for Y in grid:
            N = int(np.searchsorted(norms, Y, side="right"))
            main = c * Y
            E = N - main
            rows.append((Y, N, main, E))
            sup = max(sup, float(abs(E)) / envelope(k.d, Y))
    return ErrorScan(k, rows, sup)


def default_scan_grid(lo=100, hi=10**5, per_decade=10):
    """Integer grid, log-spaced, deduplicated."""
    n = int(round(per_decade * np.log10(hi / lo)))
    g = np.unique(np.round(np.logspace(np.log10(lo), np.log10(hi), n + 1)).astype(np.int64))
    return [int(y) for y in g]


@dataclass
class ZSplitRow:
    label: str
    Z: float
    near_measured: float  # sum over |D| <= Z of |E_k(X/D^2)|
    far_measured: float  # sum over Z < |D| <= sqrt X of N_k(X/D^2)
    near_shape: float  # sum over |D| <= Z of |D|^{1/3} (X/D^2)^{1/2} (1 + log)
    far_shape: float  # sum over Z < |D| <= sqrt X of X/D^2

    @property
    def measured_total(self):
        return self.near_measured + self.far_measured

    @property
    def shape_total(self):
        return self.near_shape + self.far_shape


@dataclass
class ZSplitReport:
    X: int
    rows: list
    best_measured: str
    best_shape: str
    tail_sum: float  # sum over |D| > sqrt X of main_term/D^2 (numerically, up to tail_horizon)
    tail_horizon: int
    tail_envelope: float


def z_split_experiment(X, census=None, tail_horizon=None):
    X = int(X)
    if X < 16:
        raise ValueError("X must be at least 16")
    if census is None:
        census = quad_over_quad_total(X, audit=False)
    per = []
    for r in census.per_field_breakdown:
        k = QuadField(r.disc)
        Y = X // (r.disc * r.disc)
        main = float(main_term_constant(k)) * (X / r.disc**2)
        per.append((abs(r.disc), r.total, abs(r.total - main), Y))
    rows = []
    for label, e in (("X^(1/4)", 0.25), ("X^(3/8)", 0.375), ("X^(1/2)", 0.5)):
        Z = X**e
        nm = fm = ns = fs = 0.0
        for a, N, E, Y in per:
            if a <= Z:
                nm += E
                ns += a ** (1 / 3) * (X / a**2) ** 0.5 * (1 + log(X / a**2))
            else:
                fm += N
                fs += X / a**2
        rows.append(ZSplitRow(label, Z, nm, fm, ns, fs))
    best_m = min(rows, key=lambda r: r.measured_total).label
    best_s = min(rows, key=lambda r: r.shape_total).label
    root = isqrt(X)
    horizon = tail_horizon or max(100 * root, 10**4)
    ds = np.array([d for d in fundamental_discriminants(horizon) if abs(d) > root], dtype=np.int64)
    L1, L2 = batch_L_values(ds)
    r2 = (ds < 0).astype(float)
    tail = float(np.sum(L1 / (2.0**r2 * (np.pi**2 / 6) * L2) / ds.astype(float) ** 2))
    return ZSplitReport(X, rows, best_m, best_s, tail, horizon, 2 * tail_bound(max(root, 3)))


# ---------------------------------------------------------------------------
# secondary term of the V4 count


@dataclass
class SecondaryFit:
    grid: list
    fitted_D: float
    counts: list
    residuals: list
    relative_residuals: list

    def conditional_d4_secondary(self, X):
        """Predicted secondary term -(3/2) D X^(1/2) (log X)^2 of the D4 count; conditional, never asserted."""
        return -1.5 * self.fitted_D * X**0.5 * log(X) ** 2


def fit_D(grid, counts):
    x = np.asarray(grid, dtype=float)
    w = np.sqrt(x) * np.log(x) ** 2
    y = np.asarray(counts, dtype=float)
    D, *_ = np.linalg.lstsq(w[:, None], y, rcond=None)
    D = float(D[0])
    res = y - D * w
    return D, [float(t) for t in res], [float(t) for t in res / w]


def secondary_fit(grid):
    grid = sorted(int(x) for x in grid)
    if len(grid) < 2 or grid[-1] < 100 * grid[0]:
        raise ValueError("grid must span at least two decades")
    counts = [v4_independent(x) for x in grid]
    D, res, rel = fit_D(grid, counts)
    return SecondaryFit(grid, D, counts, res, rel)

"""
L(s, chi_d) at s = 1, 2, Dedekind zeta data of quadratic fields, the
main-term constant of the relative count, the leading constant C of the
D4 count, and the error-exponent formulas.

Three evaluation routes for L(s, chi_d), chi_d the Kronecker character of
the fundamental discriminant d with conductor f = |d| and parity a:

closed_form            s = 1 only: -pi f^{-3/2} sum chi(r) r for d < 0,
                       -f^{-1/2} sum chi(r) log sin(pi r/f) for d > 0
series                 s = 1: -(1/f) sum chi(r) digamma(r/f);
                       s = 2: f^{-2} sum chi(r) zeta(2, r/f)
functional_equation    the theta-function split of the completed L-function
                       at y = 1, which converges like exp(-pi n^2/f); the
                       same formulas in double precision give a fast batch
                       evaluator used for the constant C.

Working precision is 60 decimal digits.
"""

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, isqrt, log, pi, sqrt
from threading import Lock

import mpmath
import numpy as np
from scipy.special import erfc, exp1

from .arith import fundamental_discriminants, is_fundamental, kronecker, mobius
from .classgroup import class_number
from .quadfield import (
    QuadField,
    divisors_of_ideal,
    euler_phi_ideal,
    factor_ideal,
    fundamental_unit,
    ideal_div,
    mobius_ideal,
    rational_ideal,
    roots_of_unity_count,
)

PREC = 60
CACHE_ENV = "D4QUARTIC_CACHE_DIR"


@dataclass(frozen=True)
class LValue:
    d: int
    s: int
    value: mpmath.mpf
    method: str
    digits: int = PREC


def _chi_table(d):
    f = abs(d)
    return [kronecker(d, r) for r in range(f)]


def _check_d(d):
    if d != 1 and not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")


def _L1_closed(d):
    f = abs(d)
    chi = _chi_table(d)
    if d < 0:
        s = sum(c * r for r, c in enumerate(chi) if c)
        return -mpmath.pi * s / mpmath.mpf(f) ** 1.5
    acc = mpmath.mpf(0)
    for r, c in enumerate(chi):
        if c:
            acc += c * mpmath.log(mpmath.sin(mpmath.pi * r / f))
    return -acc / mpmath.sqrt(f)


def _L1_series(d):
    f = abs(d)
    chi = _chi_table(d)
    acc = mpmath.mpf(0)
    for r, c in enumerate(chi):
        if c:
            acc += c * mpmath.digamma(mpmath.mpf(r) / f)
    return -acc / f


def _L2_series(d):
    if d == 1:
        return mpmath.zeta(2)
    f = abs(d)
    chi = _chi_table(d)
    acc = mpmath.mpf(0)
    for r, c in enumerate(chi):
        if c:
            acc += c * mpmath.zeta(2, mpmath.mpf(r) / f)
    return acc / f**2


def _fe_terms(d, s, n, chi, f):
    # one term of the functional-equation series, all in mpmath
    x = mpmath.pi * n * n / f
    sq = mpmath.sqrt(f)
    ec = mpmath.erfc(mpmath.sqrt(x))
    ex = mpmath.exp(-x)
    if s == 1:
        if d > 0:
            return chi * (ec / n + mpmath.e1(x) / sq)
        return chi * (ex / n + mpmath.pi / sq * ec)
    if d > 0:
        return chi * (ex / n**2 + mpmath.pi / f * (2 * ex - 2 * mpmath.pi * n / sq * ec))
    return chi * (ec / n**2 + 2 * ex / (n * sq) + 2 * mpmath.pi * n * mpmath.e1(x) / mpmath.mpf(f) ** 1.5)


def _L_functional_equation(d, s):
    f = abs(d)
    # exp(-pi n^2/f) below 10^-(PREC+10)
    nmax = int(sqrt((PREC + 10) * log(10) * f / pi)) + 2
    acc = mpmath.mpf(0)
    for n in range(1, nmax + 1):
        c = kronecker(d, n)
        if c:
            acc += _fe_terms(d, s, n, c, f)
    return acc


_memo = {}
_memo_lock = Lock()


def _cache_path(d, s, method):
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return os.path.join(root, f"L_{d}_{s}_{method}_{PREC}.json")


def _cached(d, s, method, compute):
    key = (d, s, method)
    with _memo_lock:
        if key in _memo:
            return _memo[key]
    path = _cache_path(d, s, method)
    if path and os.path.exists(path):
        with open(path) as fh:
            rec = json.load(fh)
        with mpmath.workdps(PREC + 15):
            val = mpmath.mpf((int(rec["mantissa"]), rec["exponent"]))
    else:
        with mpmath.workdps(PREC + 15):
            val = +compute()
        if path:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path))
            with os.fdopen(fd, "w") as fh:
                man, exp = val.man_exp
                rec = {"d": d, "s": s, "method": method, "value": mpmath.nstr(val, PREC),
                       "mantissa": str(man), "exponent": int(exp)}
                json.dump(rec, fh)
            os.replace(tmp, path)
    with _memo_lock:
        _memo.setdefault(key, val)
    return val


def L_value(d, s, method=None):
    """L(s, chi_d) for s in {1, 2} to 60 digits."""
    _check_d(d)
    if s not in (1, 2):
        raise ValueError("s must be 1 or 2")
    if d == 1 and s == 1:
        raise ValueError("zeta has a pole at s = 1")
    if method is None:
        method = "closed_form" if s == 1 else "series"
    if d == 1:
        return LValue(1, 2, _cached(1, 2, "series", lambda: mpmath.zeta(2)), "series")
    if method == "closed_form":
        if s != 1:
            raise ValueError("no closed form at s = 2")
        fn = lambda: _L1_closed(d)
    elif method == "series":
        fn = (lambda: _L1_series(d)) if s == 1 else (lambda: _L2_series(d))
    elif method == "functional_equation":
        fn = lambda: _L_functional_equation(d, s)
    else:
        raise ValueError(f"unknown method {method}")
    return LValue(d, s, _cached(d, s, method, fn), method)


# ---------------------------------------------------------------------------
# Dedekind zeta data


def zeta_k_residue(k):
    """zeta_k^*(1) = L(1, chi_D)."""
    return L_value(k.d, 1).value


def regulator(k):
    if k.d < 0:
        return mpmath.mpf(1)
    eps = fundamental_unit(k)[0]
    with mpmath.workdps(PREC + 15):
        big = eps.real_embeddings(prec=PREC + 15 + len(str(abs(eps.x))))[0]
        return mpmath.log(big)


def class_number_formula(k):
    """2^{r1} (2 pi)^{r2} h R / (w sqrt|D|)."""
    h = class_number(k)
    w = roots_of_unity_count(k)
    with mpmath.workdps(PREC + 15):
        return (2**k.r1 * (2 * mpmath.pi) ** k.r2 * h * regulator(k)) / (w * mpmath.sqrt(abs(k.d)))


def zeta_k_at_2(k):
    with mpmath.workdps(PREC + 15):
        return mpmath.zeta(2) * L_value(k.d, 2).value


def zeta_k_imprimitive_at_2(k, m):
    """zeta_k(2) with the Euler factors at the primes dividing m removed."""
    val = zeta_k_at_2(k)
    with mpmath.workdps(PREC + 15):
        for P, _ in factor_ideal(m):
            val *= 1 - mpmath.mpf(P.norm) ** -2
    return val


def main_term_constant(k):
    """zeta_k^*(1) / (2^{r2} zeta_k(2))."""
    with mpmath.workdps(PREC + 15):
        return zeta_k_residue(k) / (2**k.r2 * zeta_k_at_2(k))


def telescoping_factor(k):
    """The rational factor sum_{d|2} Phi(d) N(d)^-2 prod_{p|d}(1-Np^-2)^-1 sum_{c|d} mu(d/c) N(c)^2.

    Returned together with sum_{d|2} Phi(d); both equal N(2) = 4.
    """
    two = rational_ideal(k, 2)
    raw = Fraction(0)
    phis = 0
    for dd in divisors_of_ideal(k, two):
        phi = euler_phi_ideal(k, dd)
        phis += phi
        loc = Fraction(1)
        for P, _ in factor_ideal(dd):
            loc /= 1 - Fraction(1, P.norm**2)
        inner = 0
        for c in divisors_of_ideal(k, dd):
            inner += mobius_ideal(k, ideal_div(dd, c)) * c.norm**2
        raw += Fraction(phi, dd.norm**2) * loc * inner
    return raw, phis


def main_term_from_characters(k):
    """The main-term constant rebuilt from the principal-character terms of the character formula."""
    raw, _ = telescoping_factor(k)
    with mpmath.workdps(PREC + 15):
        ratio = zeta_k_residue(k) / zeta_k_at_2(k)
        return mpmath.mpf(2 ** (k.r1 + k.r2)) / 16 * mpmath.mpf(raw.numerator) / raw.denominator * ratio


# ---------------------------------------------------------------------------
# the constant C


@lru_cache(maxsize=None)
def _kron_row(n):
    # kronecker(d, n) depends on d mod 4n; table indexed by d mod 4n
    m = 4 * n
    return np.array([kronecker(r, n) for r in range(m)], dtype=np.int8)


def batch_L_values(ds):
    """Double-precision (L(1, chi_d), L(2, chi_d)) for an array of fundamental d.

    Uses the functional-equation series truncated where pi n^2/f > 40, so the
    neglected terms are below 1e-17 relative.
    """
    ds = np.asarray(ds, dtype=np.int64)
    L1 = np.zeros(len(ds))
    L2 = np.zeros(len(ds))
    if len(ds) == 0:
        return L1, L2
    order = np.argsort(np.abs(ds), kind="stable")
    chunk = 512
    for start in range(0, len(ds), chunk):
        idx = order[start:start + chunk]
        d = ds[idx]
        f = np.abs(d).astype(float)
        N = int(ceil(sqrt(40.0 * f.max() / pi))) + 1
        n = np.arange(1, N + 1, dtype=float)
        chi = np.empty((len(d), N), dtype=np.int8)
        for j in range(1, N + 1):
            chi[:, j - 1] = _kron_row(j)[d % (4 * j)]
        F = f[:, None]
        x = pi * n[None, :] ** 2 / F
        live = x <= 45.0
        xs = np.where(live, x, 45.0)
        sq = np.sqrt(F)
        ec = erfc(np.sqrt(xs))
        ex = np.exp(-xs)
        e1 = exp1(xs)
        ch = np.where(live, chi, 0).astype(float)
        even = (d > 0)[:, None]
        t1 = np.where(even, ec / n + e1 / sq, ex / n + pi / sq * ec)
        t2 = np.where(
            even,
            ex / n**2 + pi / F * (2 * ex - 2 * pi * n / sq * ec),
            ec / n**2 + 2 * ex / (n * sq) + 2 * pi * n * e1 / F**1.5,
        )
        L1[idx] = (ch * t1).sum(axis=1)
        L2[idx] = (ch * t2).sum(axis=1)
    return L1, L2


ZETA2 = pi * pi / 6
ZETA4 = pi**4 / 90
BATCH_REL_ERR = 1e-13  # allowance for double-precision rounding in the batch sums


@dataclass(frozen=True)
class ConstantCResult:
    truncation: int
    partial_sum: float
    tail_bound: float
    value_interval: tuple
    fields: int


def tail_bound(B):
    """Bound for (1/2) sum_{|D| > B} main_term_constant(D) / D^2.

    Per |D| = n at most one real and one imaginary field occur, weighing
    1 + 1/2 <= 2; with L(1, chi) <= log(n)/2 + 1 and zeta_k(2) >= zeta(4),
    the sum is at most (1/zeta(4)) * integral_B^oo (log t / 2 + 1) t^-2 dt.
    """
    return (0.5 * log(B) + 1.5) / (ZETA4 * B)


def constant_C(B):
    """Certified interval for C = (1/2) sum_D main_term_constant(D) / D^2."""
    B = int(B)
    if B < 3:
        raise ValueError("B must be at least 3")
    ds = np.array(fundamental_discriminants(B), dtype=np.int64)
    L1, L2 = batch_L_values(ds)
    r2 = (ds < 0).astype(float)
    terms = L1 / (2.0**r2 * ZETA2 * L2) / ds.astype(float) ** 2
    # sum smallest terms first
    partial = 0.5 * float(np.sum(np.sort(terms)))
    tb = tail_bound(B)
    err = BATCH_REL_ERR * partial
    return ConstantCResult(B, partial, tb, (partial - err, partial + tb + err), len(ds))


# ---------------------------------------------------------------------------
# exponent formulas


@dataclass(frozen=True)
class ErrorExponent:
    delta_exponent: Fraction
    x_exponent: Fraction
    log_x_power: int
    log_delta_power: int = 0
    epsilon: bool = False


def error_exponent(n, theorem="relative"):
    if n < 2:
        raise ValueError("n must be at least 2")
    if theorem == "relative":
        if n == 2:
            return ErrorExponent(Fraction(1, 3), Fraction(1, 2), 1, 1)
        if n == 3:
            return ErrorExponent(Fraction(1, 4), Fraction(1, 2), 3, 2)
        return ErrorExponent(Fraction(1, n + 1), 1 - Fraction(2, n + 1), n - 1, 0)
    if theorem == "quartic_over_F":
        e = Fraction(2, 2 * n + 1)
        return ErrorExponent(e, 1 - e, 0, 0, True)
    raise ValueError("theorem must be 'relative' or 'quartic_over_F'")


def alpha_bound(n):
    if n < 2:
        raise ValueError("n must be at least 2")
    if n == 2:
        return Fraction(0)
    if n in (3, 4):
        return Fraction(2785, 10000)
    return Fraction(1, 2) - Fraction(1, 2 * n)

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from d4quartic import analytic
from d4quartic.analytic import (
    L_value,
    alpha_bound,
    batch_L_values,
    class_number_formula,
    constant_C,
    error_exponent,
    main_term_constant,
    main_term_from_characters,
    tail_bound,
    telescoping_factor,
    zeta_k_at_2,
    zeta_k_imprimitive_at_2,
    zeta_k_residue,
)
from d4quartic.arith import fundamental_discriminants
from d4quartic.quadfield import QuadField, rational_ideal


def close(a, b, digits=50):
    with mpmath.workdps(80):
        return abs(a - b) <= mpmath.mpf(10) ** -digits * max(1, abs(b))


def test_classical_values():
    with mpmath.workdps(80):
        assert close(L_value(-4, 1).value, mpmath.pi / 4)
        assert close(L_value(-3, 1).value, mpmath.pi / (3 * mpmath.sqrt(3)))
        assert close(L_value(1, 2).value, mpmath.pi**2 / 6)
        assert close(L_value(-4, 2).value, mpmath.catalan)
        # L(1, chi_5) = 2 log(golden ratio) / sqrt 5
        assert close(L_value(5, 1).value, 2 * mpmath.log((1 + mpmath.sqrt(5)) / 2) / mpmath.sqrt(5))


def test_rejections():
    for bad in (20, -5, 0, 9):
        with pytest.raises(ValueError):
            L_value(bad, 1)
    with pytest.raises(ValueError):
        L_value(1, 1)
    with pytest.raises(ValueError):
        L_value(-4, 3)
    with pytest.raises(ValueError):
        L_value(-4, 2, method="closed_form")
    with pytest.raises(ValueError):
        L_value(-4, 1, method="guess")


@pytest.mark.parametrize("d", [-3, -4, -7, -23, -84, -163, 5, 8, 13, 136, 229, 401])
def test_methods_agree(d):
    a = L_value(d, 1, "closed_form").value
    b = L_value(d, 1, "series").value
    c = L_value(d, 1, "functional_equation").value
    assert close(a, b) and close(a, c)
    assert close(L_value(d, 2, "series").value, L_value(d, 2, "functional_equation").value)
    assert L_value(d, 1).value > 0 and L_value(d, 2).value > 0


@pytest.mark.parametrize("d", [-4, -3, -23, 5, 12, 136, -84, 229])
def test_class_number_formula(d):
    k = QuadField(d)
    assert close(zeta_k_residue(k), class_number_formula(k))


def test_imprimitive_factors():
    k = QuadField(-4)
    z = zeta_k_at_2(k)
    with mpmath.workdps(80):
        assert close(z, mpmath.zeta(2) * mpmath.catalan)
        assert close(zeta_k_imprimitive_at_2(k, rational_ideal(k, 1)), z)
        assert close(zeta_k_imprimitive_at_2(k, rational_ideal(k, 2)), z * (1 - mpmath.mpf(1) / 4))
        k = QuadField(-7)  # 2 splits: two primes of norm 2
        z = zeta_k_at_2(k)
        assert close(zeta_k_imprimitive_at_2(k, rational_ideal(k, 2)), z * (1 - mpmath.mpf(1) / 4) ** 2)


def test_main_term_examples():
    with mpmath.workdps(80):
        assert close(main_term_constant(QuadField(-4)), 3 / (4 * mpmath.pi * mpmath.catalan), 40)
        k = QuadField(5)
        assert close(main_term_constant(k), L_value(5, 1).value / zeta_k_at_2(k))


@pytest.mark.parametrize("d", fundamental_discriminants(100))
def test_telescoping(d):
    k = QuadField(d)
    raw, phis = telescoping_factor(k)
    assert raw == Fraction(4) and phis == 4
    assert close(main_term_from_characters(k), main_term_constant(k), 40)


def test_batch_matches_mpmath():
    ds = np.array(fundamental_discriminants(300), dtype=np.int64)
    L1, L2 = batch_L_values(ds)
    for d, a, b in zip(ds, L1, L2):
        assert abs(a - float(L_value(int(d), 1).value)) < 1e-13
        assert abs(b - float(L_value(int(d), 2).value)) < 1e-13


def test_upper_bound_used_by_tail():
    ds = np.array(fundamental_discriminants(20000), dtype=np.int64)
    L1, L2 = batch_L_values(ds)
    f = np.abs(ds).astype(float)
    assert np.all(L1 <= 0.5 * np.log(f) + 1)
    assert np.all(np.pi**2 / 6 * L2 >= analytic.ZETA4)


def test_constant_C_nesting():
    r10, r3, r4 = constant_C(10), constant_C(1000), constant_C(10**4)
    for outer, inner in ((r10, r3), (r10, r4), (r3, r4)):
        assert outer.value_interval[0] <= inner.value_interval[0]
        assert inner.value_interval[1] <= outer.value_interval[1]
    assert abs(r4.partial_sum - r3.partial_sum) < r3.tail_bound
    assert r4.tail_bound < r3.tail_bound < r10.tail_bound
    with pytest.raises(ValueError):
        constant_C(2)


def test_constant_C_small_exact():
    # B = 4: fields -3 and -4
    with mpmath.workdps(60):
        exact = (main_term_constant(QuadField(-3)) / 9 + main_term_constant(QuadField(-4)) / 16) / 2
    assert abs(constant_C(4).partial_sum - float(exact)) < 1e-15


@given(st.integers(3, 10**7), st.integers(3, 10**7))
def test_tail_bound_decreasing(a, b):
    lo, hi = sorted((a, b))
    assert tail_bound(hi) <= tail_bound(lo)


def test_error_exponents():
    e = error_exponent(2, "relative")
    assert (e.delta_exponent, e.x_exponent, e.log_x_power) == (Fraction(1, 3), Fraction(1, 2), 1)
    assert e.log_delta_power == 1
    e = error_exponent(3, "relative")
    assert (e.delta_exponent, e.x_exponent, e.log_x_power, e.log_delta_power) == (Fraction(1, 4), Fraction(1, 2), 3, 2)
    e = error_exponent(5, "relative")
    assert (e.delta_exponent, e.x_exponent, e.log_x_power) == (Fraction(1, 6), Fraction(2, 3), 4)
    e = error_exponent(2, "quartic_over_F")
    assert e.x_exponent == Fraction(3, 5) and e.epsilon
    with pytest.raises(ValueError):
        error_exponent(1)
    with pytest.raises(ValueError):
        error_exponent(2, "other")


def test_alpha_bound():
    assert alpha_bound(2) == 0
    assert alpha_bound(3) == alpha_bound(4) == Fraction(2785, 10000)
    assert alpha_bound(6) == Fraction(5, 12)
    with pytest.raises(ValueError):
        alpha_bound(1)


def test_disk_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(analytic.CACHE_ENV, str(tmp_path))
    monkeypatch.setattr(analytic, "_memo", {})
    v = L_value(-431, 2).value
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    assert v.man_exp[1] < -200  # more than double precision
    monkeypatch.setattr(analytic, "_memo", {})
    assert L_value(-431, 2).value == v

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from d4quartic.abelian import apply, smith_form


def full_rank_matrices(n):
    return st.lists(
        st.lists(st.integers(-12, 12), min_size=n, max_size=n), min_size=n, max_size=n + 3
    ).filter(lambda rows: Matrix(rows).rank() == n)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), full_rank_matrices(n))))
def test_invariant_factors_match_sympy(data):
    n, rows = data
    divisors, Q = smith_form(rows, n)
    want = [int(abs(x)) for x in invariant_factors(Matrix(rows), domain=ZZ) if abs(x) != 1]
    assert divisors == want
    # the coordinate map kills every relation
    for r in rows:
        assert apply(Q, divisors, r) == tuple(0 for _ in divisors)
    # and is onto: images of unit vectors generate the product of cyclic groups
    images = [apply(Q, divisors, [int(i == j) for j in range(n)]) for i in range(n)]
    span = {tuple(0 for _ in divisors)}
    frontier = list(span)
    while frontier:
        nxt = []
        for v in frontier:
            for g in images:
                w = tuple((a + b) % m for a, b, m in zip(v, g, divisors))
                if w not in span:
                    span.add(w)
                    nxt.append(w)
        frontier = nxt
    order = 1
    for m in divisors:
        order *= m
    assert len(span) == order


def test_examples():
    assert smith_form([[2, 0], [0, 3]], 2)[0] == [6]
    assert smith_form([[2, 0], [0, 4]], 2)[0] == [2, 4]
    assert smith_form([[1, 0], [0, 1]], 2)[0] == []
    assert smith_form([], 0) == ([], [])


def test_infinite_group_rejected():
    with pytest.raises(ValueError):
        smith_form([[1, 1]], 2)

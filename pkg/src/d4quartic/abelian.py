"""
Finite abelian groups given by generators and relations.

A group Z^n / <relation rows> is brought to Smith form with the column
transform tracked, which is all that is needed to turn presentation
coordinates into invariant-factor coordinates.
"""

from .arith import xgcd


def _insert_row(basis, row, n):
    # incremental row echelon form; basis[j] is the pivot row for column j or None
    row = list(row)
    for j in range(n):
        if row[j] == 0:
            continue
        piv = basis[j]
        if piv is None:
            if row[j] < 0:
                row = [-x for x in row]
            basis[j] = row
            return
        g, s, t = xgcd(piv[j], row[j])
        pa, ra = piv[j] // g, row[j] // g
        new_piv = [s * x + t * y for x, y in zip(piv, row)]
        row = [ra * x - pa * y for x, y in zip(piv, row)]
        basis[j] = new_piv
    # row reduced to zero


def smith_form(relations, ngens):
    """Invariant factors and column transform of Z^ngens / <relations>.

    Returns (divisors, Q): divisors is the list of nontrivial invariant
    factors d_1 | d_2 | ..., and Q is an ngens x len(divisors) integer matrix
    (list of rows) such that v -> (v Q) mod divisors is an isomorphism.
    Raises ValueError when the group is infinite.
    """
    n = ngens
    if n == 0:
        return [], []
    basis = [None] * n
    for r in relations:
        if len(r) != n:
            raise ValueError("relation length does not match generator count")
        if any(r):
            _insert_row(basis, r, n)
    if any(b is None for b in basis):
        raise ValueError("relations do not have full rank: group is infinite")
    # keep entries small: reduce each row to the right of its pivot by later pivots
    for j in range(n - 1, -1, -1):
        row = basis[j]
        for k in range(j + 1, n):
            q = row[k] // basis[k][k]
            if q:
                row = [x - q * y for x, y in zip(row, basis[k])]
        basis[j] = row
    M = [list(r) for r in basis]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(dst, src, q):
        # column dst -= q * column src
        for row in M:
            row[dst] -= q * row[src]
        for row in Q:
            row[dst] -= q * row[src]

    def col_swap(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    v = M[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                raise ValueError("singular relation matrix")
            _, i, j = best
            if i != t:
                M[i], M[t] = M[t], M[i]
            if j != t:
                col_swap(j, t)
            p = M[t][t]
            clean = True
            for i in range(t + 1, n):
                q = M[i][t] // p
                if q:
                    M[i] = [x - q * y for x, y in zip(M[i], M[t])]
                if M[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = M[t][j] // p
                if q:
                    col_op(j, t, q)
                if M[t][j]:
                    clean = False
            if not clean:
                continue
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if M[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            M[t] = [x + y for x, y in zip(M[t], M[bad])]
        if M[t][t] < 0:
            for row in M:
                row[t] = -row[t]
            for row in Q:
                row[t] = -row[t]
    diag = [M[t][t] for t in range(n)]
    keep = [t for t in range(n) if diag[t] != 1]
    divisors = [diag[t] for t in keep]
    Qk = [[row[t] for t in keep] for row in Q]
    return divisors, Qk


def apply(Q, divisors, vec):
    """Coordinates of a presentation vector in the invariant-factor basis."""
    out = []
    for t, dt in enumerate(divisors):
        s = 0
        for v, row in zip(vec, Q):
            if v:
                s += v * row[t]
        out.append(s % dt)
    return tuple(out)

"""
Quadratic extensions of a quadratic field
=========================================

Enumerate the quadratic extensions K/k of k = Q(i) with small relative
discriminant, look at a few of them, and check that the direct
enumeration and the ray class character formula give the same counts.
"""

from d4quartic import QuadField, count_relative_characters, count_relative_direct
from d4quartic.selmer import kummer_polynomial

k = QuadField(-4)



def show(coeffs):
    _, _, b, _, c = coeffs
    return f"x^4 {'+' if b >= 0 else '-'} {abs(b)}x^2 + {c}"


# Each extension is k(sqrt(delta)); the descriptor keeps the data used to count it.
# A D4 field shows up twice: once as K/k and once as its Galois conjugate over k.
res = count_relative_direct(k, 64, keep_descriptors=True)
print(f"{res.total} extensions of {k} with N(disc) <= 64, by type {res.by_type}")
for D in res.descriptors[:8]:
    print(f"  N(disc) = {D.rel_disc_norm:3d}  |disc K| = {D.abs_disc:5d}  {D.galois_type}  "
          f"{show(kummer_polynomial(D.delta))}")

# The two engines agree exactly on a doubling grid.
for j in range(0, 11, 2):
    Y = 2**j
    a, b = count_relative_direct(k, Y).total, count_relative_characters(k, Y)
    print(f"Y = {Y:5d}: direct {a:5d}, characters {b:5d}")

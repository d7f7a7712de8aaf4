"""
The quartic census
==================

Count quartic fields with a quadratic subfield by summing relative counts
over quadratic base fields, then split the total by Galois group.
"""

from d4quartic.census import field_table, quad_over_quad_total, v4_independent

for X in (10**3, 10**4, 10**5):
    r = quad_over_quad_total(X)
    print(f"X = {X:>6}: sum over k = {r.total_quad_over_quad:6d} = "
          f"2*{r.n_d4} + {r.n_c4} + 3*{r.n_v4}   holds: {r.identity_holds}")
    # biquadratic fields counted a second way, from triples of quadratic discriminants
    print(f"           V4 from triples: {v4_independent(X)}")

# the smallest fields, one line per (discriminant, Galois group)
for (disc, t), c in list(field_table(1000).items())[:12]:
    print(f"{disc:5d} {t} x{c}")

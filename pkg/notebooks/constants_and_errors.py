"""
The D4 constant and the error terms
===================================

Certify an interval for the leading constant of the D4 count, compare it
with the exact count, and measure the error of the per-field counts
against their natural envelope.
"""

from d4quartic import QuadField
from d4quartic.analytic import constant_C, main_term_constant
from d4quartic.census import d4_exact, default_scan_grid, error_scan, z_split_experiment

r = constant_C(10**4)
lo, hi = r.value_interval
print(f"C in [{lo:.8f}, {hi:.8f}] from {r.fields} fields")

X = 10**5
print(f"n_D4({X}) / X = {d4_exact(X) / X:.6f}  (the gap decays slowly, like X^(-3/8))")

k = QuadField(-4)
print(f"main term constant for {k}: {main_term_constant(k)}")
scan = error_scan(k, default_scan_grid(100, 10**5, per_decade=2))
for Y, N, main, E in scan.grid:
    print(f"  Y = {Y:6d}  N = {N:6d}  E = {float(E):9.2f}")
print(f"sup |E| / envelope = {scan.sup_ratio:.4f}")

rep = z_split_experiment(X)
for row in rep.rows:
    print(f"Z = {row.label:8s} measured {row.measured_total:10.1f}  shape {row.shape_total:10.1f}")
print(f"smallest measured total at {rep.best_measured}")

"""Coefficient inequalities for homogeneous parts, checked against certified sups."""

# %%
import io
import math

from sidonlab.dirichlet import BohrPolynomial, DirichletPolynomial
from sidonlab.inequalities import (
    bh_constant,
    bh_constant_below_exp,
    bh_fuzz,
    check_bh_dirichlet,
    check_bh_poly,
    mixed_norm,
    write_fuzz_csv,
)
from sidonlab.ntheory import sieve_primes

for m in (2, 3, 5, 10, 30):
    print(f"m={m:2d}  C_m={bh_constant(m):.4g}  e^m={math.exp(m):.4g}  proved C_m <= e^m: {bh_constant_below_exp(m)}")

print("mixed norm of (3, 4) with m = 3:", mixed_norm([3, 4], 3))

# %%
table = sieve_primes(1000)
f = DirichletPolynomial(50, {n: 1.0 for n in (4, 6, 9, 10, 14, 15, 21, 22, 25, 49)})
print(check_bh_dirichlet(f, 2, table))
print(check_bh_poly(BohrPolynomial(2, {(2, 0): 1, (1, 1): 1j, (0, 2): -1}), 2))

# %% a reproducible batch, written as CSV
reports = bh_fuzz(seed=0, count=5, table=table)
buf = io.StringIO()
write_fuzz_csv(reports, buf)
print(buf.getvalue())
print("smallest margin:", min(r.margin for r in reports))

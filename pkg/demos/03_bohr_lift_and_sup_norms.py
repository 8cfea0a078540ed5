"""Dirichlet polynomials, their Bohr lift, and three sup-norm estimates."""

# %%
import numpy as np

from sidonlab.dirichlet import (
    DirichletPolynomial,
    bohr_lift,
    homogeneous_parts,
    inverse_lift,
    l1_norm,
    l2_norm,
    random_polynomial,
    smooth_rough_split,
    sup_norm,
    sup_norm_line,
)
from sidonlab.ntheory import sieve_primes

table = sieve_primes(1000)
f = DirichletPolynomial(12, {1: 1.0, 2: 0.5j, 6: -0.75, 9: 0.25, 12: 0.4 - 0.3j})
F = bohr_lift(f, table)
print("lifted to", F.k, "variables:")
for alpha, c in sorted(F.terms.items()):
    print("  z^", alpha, "->", c)
assert inverse_lift(F, table) == f

# %% l1 >= sup >= l2; the line search approaches the torus value (Kronecker)
torus = sup_norm(f, table)
line = sup_norm_line(f, T=1e4)
print(f"l1={l1_norm(f):.6f}  torus in [{torus.lower:.9f}, {torus.upper:.9f}]  line >= {line.lower:.6f}  l2={l2_norm(f):.6f}")

# %% pieces never exceed the whole
for m, part in homogeneous_parts(f, table).items():
    print(f"degree {m}: sup <= {sup_norm(part, table).upper:.6f}")
for kappa, block in smooth_rough_split(f, 2, table).items():
    print(f"2-smooth factor {kappa:2d}: rough block sup >= {sup_norm(block, table).lower:.6f}")

# %% a sample of random polynomials: line estimate over torus estimate
rng = np.random.default_rng(0)
ratios = []
for _ in range(10):
    g = random_polynomial(rng, 20)
    ratios.append(sup_norm_line(g, T=1e4).lower / sup_norm(g, table).lower)
print("line/torus ratios:", np.round(ratios, 4))

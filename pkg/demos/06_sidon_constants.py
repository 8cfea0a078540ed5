"""Certified lower bounds for Sidon constants of small frequency sets."""

# %%
import json
import math

from sidonlab.ntheory import sieve_primes
from sidonlab.sidon import SidonInstance, recertify, sidon_oracle_small, sidon_search

table = sieve_primes(1000)

# independent frequencies (1, 2, 3 lift to 1, z1, z2): nothing beats 1
print("{1,2,3}:", sidon_search(SidonInstance((1, 2, 3)), budget=1000, table=table).bound)

# %% 1, 2, 4 lift to 1, z, z^2; the optimum is sqrt 2 at (1, 2i, 1)/4
w = sidon_search(SidonInstance((1, 2, 4)), budget=5000, seed=7, table=table)
print(f"search: {w.bound:.10f}  (sqrt 2 = {math.sqrt(2):.10f})")
print("oracle:", sidon_oracle_small(SidonInstance((1, 2, 4)), table=table))
print("recertified on a 10x finer grid:", recertify(w, 10, table))
print(json.dumps(w.to_json(), indent=1))

# %% bigger supports, and the multiplicative seeding mode
for support in [(1, 2, 4, 8), (1, 2, 3, 4, 6), (1, 2, 3, 4, 5, 6, 7, 8)]:
    for mode in ("random", "smooth"):
        b = sidon_search(SidonInstance(support), budget=1500, seed=0, table=table, mode=mode).bound
        print(f"{support}  {mode:6s}  {b:.6f}")

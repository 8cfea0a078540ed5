"""Dickman's function from its delay equation."""

# %%
import math

import numpy as np

from sidonlab.dickman import log_rho_asymptotic, rho, rho_table

for u in (0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0):
    print(f"rho({u:4}) = {rho(u):.12e}")
print("1 - log 2 =", 1 - math.log(2))

# %% the delay relation u rho'(u) + rho(u - 1) = 0, by central differences
t = rho_table()
h = 1e-3
u = np.array([1.5, 2.5, 7.25, 15.5])
resid = u * (t.evaluate(u + h) - t.evaluate(u - h)) / (2 * h) + t.evaluate(u - 1)
print("residuals:", resid)

# %% decay: log rho(u) against the leading asymptotic -u (log u + log log u - 1)
for u in (10, 20, 50, 100):
    print(f"u={u:3d}  log rho = {math.log(rho(u)):9.3f}   asymptotic = {log_rho_asymptotic(u):9.3f}")

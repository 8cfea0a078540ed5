"""Counting rough and smooth integers with a least-prime-factor table."""

# %%
from sidonlab.ntheory import (
    calibrate_balazard,
    count_R,
    phi_exact,
    rough_count_table,
    sieve_primes,
    smooth_count,
    smooth_count_bound,
)

table = sieve_primes(100_000)
print(table, "largest prime below 100:", table.primes[table.pi(100) - 1])

# %% 2-rough n <= 30 (odd numbers), split by number of prime factors
t = rough_count_table(30, 2, table, members=True)
for m in sorted(t.counts):
    print(f"m={m}: {t.counts[m]:2d}  {t.members[m]}")
print("R(30, 2, 2) =", count_R(30, 2, 2, table), " Phi(30, 2, 2) =", phi_exact(30, 2, 2, table))

# %% smooth numbers against the exponent-box bound
for x, y in [(30, 5), (1000, 7), (100_000, 13)]:
    print(f"x={x:>6} y={y:>2}  count={smooth_count(x, y, table):>5}  bound={smooth_count_bound(x, y, table):.1f}")

# %% smallest constant for which the rough-count bound holds on the desk grid
cal = calibrate_balazard(table)
print(f"c* = {cal.c_star}  (required {cal.c_required:.5f}, tightest at x, y, M = {cal.worst}), violations = {cal.violations}")

"""Independent reference implementations used only by the tests.

Nothing here imports the package; each oracle recomputes its quantity from
first principles (trial division, gcd tests, Taylor recursions, brute grids).
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np


def primes_trial_division(limit: int) -> list[int]:
    out = []
    for n in range(2, limit + 1):
        if all(n % p for p in out if p * p <= n):
            out.append(n)
    return out


def factor_trial_division(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def big_omega(n: int) -> int:
    return sum(factor_trial_division(n).values())


def primorial(y: int) -> int:
    return math.prod(primes_trial_division(y)) if y >= 2 else 1


def is_rough(n: int, y: int) -> bool:
    """P^-(n) > y, via a gcd with the product of primes <= y (n = 1 is rough)."""
    return math.gcd(n, primorial(y)) == 1


def rough_count_by_gcd(x: int, y: int) -> np.ndarray:
    """``out[x'] = #{n <= x' : n y-rough}`` for ``0 <= x' <= x``."""
    P = primorial(y)
    flags = np.array([0] + [math.gcd(n, P) == 1 for n in range(1, x + 1)], dtype=np.int64)
    return np.cumsum(flags)


# ---------------------------------------------------------------- Dickman


@lru_cache(maxsize=None)
def _rho_series(u_max: int, terms: int = 480, dps: int = 260):
    """Taylor coefficients of rho about k + 1/2 on each [k, k+1].

    Writing u = c + t, the delay equation u rho'(u) = -rho(u - 1) gives
    ``c (i+1) a_{i+1} + i a_i = -b_i`` where ``b`` are the coefficients of
    the previous piece about ``c - 1``; ``a_0`` then follows from continuity
    at ``u = k``.
    """
    mpmath.mp.dps = dps
    half = mpmath.mpf(1) / 2
    series = [[mpmath.mpf(1)] + [mpmath.mpf(0)] * terms]
    for k in range(1, u_max):
        b = series[-1]
        c = k + half
        a = [mpmath.mpf(0)] * (terms + 1)
        for i in range(terms):
            a[i + 1] = (-b[i] - i * a[i]) / (c * (i + 1))
        left = mpmath.fsum(b[i] * half**i for i in range(terms + 1))
        rest = mpmath.fsum(a[i] * (-half) ** i for i in range(1, terms + 1))
        a[0] = left - rest
        series.append(a)
    return series


def rho_taylor(u: float, u_max: int = 60) -> mpmath.mpf:
    if u <= 1:
        return mpmath.mpf(1)
    series = _rho_series(u_max)
    k = min(int(math.floor(u)), u_max - 1)
    t = mpmath.mpf(u) - (k + mpmath.mpf(1) / 2)
    return mpmath.polyval(series[k][::-1], t)


def rho_quad_2_3() -> tuple[float, float]:
    """rho(2) and rho(3) from rho(u) = rho(n) - int_n^u rho(t - 1)/t dt."""
    mpmath.mp.dps = 30
    rho2 = 1 - mpmath.quad(lambda t: 1 / t, [1, 2])
    rho3 = rho2 - mpmath.quad(lambda t: (1 - mpmath.log(t - 1)) / t, [2, 3])
    return float(rho2), float(rho3)


# ---------------------------------------------------------------- sup norms


def univariate_sup(coeffs: dict[int, complex], points: int = 1_000_000) -> tuple[float, float]:
    """Grid lower bound and Lipschitz upper bound for ``sup |sum c_j z^j|``."""
    j = np.array(list(coeffs), dtype=np.float64)
    c = np.array(list(coeffs.values()), dtype=np.complex128)
    best = 0.0
    for chunk in np.array_split(np.arange(points), 20):
        th = 2 * np.pi * chunk / points
        best = max(best, float(np.abs(np.exp(1j * np.outer(th, j)) @ c).max()))
    lip = float(np.sum(np.abs(c) * np.abs(j)))
    return best, best + lip * np.pi / points

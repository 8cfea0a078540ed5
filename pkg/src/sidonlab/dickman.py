"""
Dickman's function rho(u).

rho = 1 on [0, 1] and for u > 1 it solves the delay equation

    u rho'(u) + rho(u - 1) = 0,

which integrates to rho(u) = rho(n) - int_n^u rho(t - 1) / t dt.  We use the
equivalent form

    u rho(u) = int_{u-1}^{u} rho(t) dt,

whose integrand is positive: the subtractive form cancels catastrophically
once rho drops below about 1e-8, while this one keeps full relative accuracy
out to u = 100 (rho(100) is about 1e-230).

The table stores rho at 16 Gauss-Legendre nodes on each panel of width 1/64.
Panels are aligned with the integers, where rho loses smoothness, so rho is
analytic on every panel and its degree-15 interpolant is accurate to a few
ulps.  The window [u - 1, u] starts at the matching node one unit back, so no
interpolation of delayed values is needed.  Each panel then needs only a
16 x 16 linear solve, because the part of the window inside the current
panel is unknown.
"""

from __future__ import annotations

import csv
import math
from functools import lru_cache
from typing import IO

import numpy as np
from numpy.polynomial import legendre as L

from .errors import DomainError

__all__ = ["RhoTable", "rho", "rho_table", "log_rho_asymptotic", "asymptotic_constant", "write_rho_csv"]

PANELS_PER_UNIT = 64
NODES = 16
U_MAX = 100.0


class RhoTable:
    """Piecewise Legendre representation of rho on ``[0, u_max]``.

    Attributes
    ----------
    step : float
        Panel width.
    u_max : float
        Right end of the table; evaluation beyond it is refused.
    nodes : ndarray, shape (panels, NODES)
        Abscissae of the collocation nodes.
    node_values : ndarray, shape (panels, NODES)
        rho at those nodes.
    """

    def __init__(self, u_max: float = U_MAX, panels_per_unit: int = PANELS_PER_UNIT, nodes: int = NODES):
        if u_max < 1 or u_max != int(u_max):
            raise DomainError(f"u_max must be an integer >= 1, got {u_max}")
        self.u_max = float(u_max)
        self.step = h = 1.0 / panels_per_unit
        self._ppu = ppu = panels_per_unit
        xi, w = L.leggauss(nodes)
        V = L.legvander(xi, nodes - 1)
        # node values -> Legendre coefficients of the interpolant
        to_coef = np.linalg.inv(V)
        eye = np.eye(nodes)
        anti = L.legint(eye, lbnd=-1, axis=0)
        # head[i] @ v = int_{-1}^{xi_i} of the interpolant; tail likewise to +1
        head = L.legvander(xi, nodes) @ anti @ to_coef
        tail = (L.legval(1.0, anti) - L.legvander(xi, nodes) @ anti) @ to_coef

        n_panels = int(u_max) * ppu
        pos = (xi + 1) / 2 * h
        R = np.ones((n_panels, nodes))
        I = np.full(n_panels, h)
        for p in range(ppu, n_panels):
            u = p * h + pos
            rhs = (h / 2) * (tail @ R[p - ppu]) + I[p - ppu + 1 : p].sum()
            R[p] = np.linalg.solve(np.diag(u) - (h / 2) * head, rhs)
            I[p] = (h / 2) * (w @ R[p])

        self.nodes = np.arange(n_panels)[:, None] * h + pos
        self.node_values = R
        self._coefs = R @ to_coef.T
        self._panel_integrals = I

    def __call__(self, u):
        return self.evaluate(u)

    def evaluate(self, u):
        """rho at a scalar or array of points in ``[0, u_max]``."""
        arr = np.asarray(u, dtype=np.float64)
        if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > self.u_max):
            raise DomainError(f"rho is tabulated on [0, {self.u_max:g}]")
        flat = arr.ravel()
        out = np.ones_like(flat)
        big = flat > 1
        if np.any(big):
            out[big] = self._interpolate(flat[big])
        return out.reshape(arr.shape) if arr.ndim else float(out[0])

    def _interpolate(self, u: np.ndarray) -> np.ndarray:
        scaled = u * self._ppu
        pan = np.minimum(np.floor(scaled).astype(np.int64), len(self._coefs) - 1)
        xi = 2 * (scaled - pan) - 1
        V = L.legvander(xi, self._coefs.shape[1] - 1)
        return np.einsum("ij,ij->i", V, self._coefs[pan])

    def derivative(self, u):
        """rho'(u) = -rho(u - 1)/u for u > 1, 0 on [0, 1)."""
        arr = np.asarray(u, dtype=np.float64)
        out = np.where(arr > 1, -self.evaluate(np.maximum(arr - 1, 0)) / np.maximum(arr, 1), 0.0)
        return out if arr.ndim else float(out)


@lru_cache(maxsize=4)
def rho_table(u_max: float = U_MAX) -> RhoTable:
    """Shared, lazily built table (immutable, safe to share)."""
    return RhoTable(u_max)


def rho(u: float, u_max: float = U_MAX) -> float:
    """Dickman's function.  Refuses ``u < 0`` and ``u > u_max``."""
    if not 0 <= u <= u_max:
        raise DomainError(f"rho(u) needs 0 <= u <= {u_max:g}, got {u}")
    if u <= 1:
        return 1.0
    return rho_table(u_max).evaluate(u)


def log_rho_asymptotic(u: float, C: float = 0.0) -> float:
    """``-u (log u + log log u + C)``, the shape of ``log rho(u)`` for large u."""
    if not u > math.e:
        raise DomainError(f"log_rho_asymptotic needs u > e, got {u}")
    return -u * (math.log(u) + math.log(math.log(u)) + C)


def asymptotic_constant(u):
    """The ``C`` with ``log rho(u) = log_rho_asymptotic(u, C)`` exactly."""
    u = np.asarray(u, dtype=np.float64)
    return -np.log(rho_table().evaluate(u)) / u - np.log(u) - np.log(np.log(u))


def write_rho_csv(u_max: float, fh: IO[str], step: float = 0.01) -> None:
    """CSV ``u,rho`` on a regular grid of ``[0, u_max]``."""
    if not 0 < u_max <= U_MAX:
        raise DomainError(f"table maximum must lie in (0, {U_MAX:g}], got {u_max}")
    n = int(round(u_max / step))
    us = np.linspace(0.0, n * step, n + 1)
    vals = rho_table().evaluate(us)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["u", "rho"])
    for u, r in zip(us, vals):
        w.writerow([f"{u:.10g}", repr(float(r))])

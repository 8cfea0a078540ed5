"""
Sup norms of trigonometric polynomials on the torus T^k.

A polynomial is held as an integer exponent matrix ``A`` (terms x variables)
and a complex coefficient vector ``a``; with phases ``theta`` it evaluates to

    F(theta) = sum_t a_t exp(i <A_t, theta>).

:func:`torus_sup` returns a :class:`SupEstimate` whose ``lower`` is a value
of ``|F|`` actually attained at ``witness`` and whose ``upper`` is a
certified bound on ``sup |F|``.

Lower bound
    k <= 3: dense phase grid, then local ascent from the best grid points.
    k > 3: seeded multistart gradient ascent on ``|F|^2`` with step halving.

Upper bound
    Best-first branch and bound over axis-aligned cells covering the torus.
    For a cell with centre ``c`` and half-widths ``r`` every point is
    ``c + d`` with ``|d_j| <= r_j``.  Writing ``P = |F|^2``, ``s_t = <A_t, r>``
    (with ``|A_t|`` entrywise) and ``D_tu = sum_j |A_tj - A_uj| r_j``,

        P(c + d) <= P(c) + sum_j |dP/dtheta_j (c)| r_j
                    + 1/2 sum_{t,u} |a_t| |a_u| D_tu^2        (second order)
        |F(c + d)| <= |F(c)| + sum_t |a_t| s_t                 (first order)

    and always ``|F| <= sum |a_t|``.  The cell bound is the smallest of the
    three.  Cells whose bound cannot beat the current lower bound are
    discarded; the rest are bisected along their widest side until every
    live bound is within ``tol`` of ``lower`` or the evaluation budget runs
    out.  In both cases ``upper`` is the largest live bound, so it stays
    valid even when the search stops early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SearchConfig", "SupEstimate", "TrigPoly", "torus_sup", "cell_bounds"]

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`torus_sup`.  All randomness flows from ``seed``."""

    seed: int = 0
    grid: int = 256  # points per variable for the dense grid (k <= 3)
    grid_cap: int = 2**20  # total dense-grid points; N = min(grid, cap**(1/k))
    cover_cap: int = 2**15  # initial branch-and-bound cells when k > 3
    restarts: int = 200
    max_iter: int = 400
    step_min: float = 1e-8
    bb_budget: int = 200_000  # cell evaluations in branch and bound
    bb_batch: int = 2048
    rel_tol: float = 1e-10  # target upper - lower, relative to sum |a_t|
    dense_max_dim: int = 3

    def refined(self, factor: int) -> "SearchConfig":
        """Same search with a ``factor``-times finer grid."""
        return SearchConfig(**{**self.__dict__, "grid": self.grid * factor, "grid_cap": self.grid_cap * factor**2})


@dataclass
class SupEstimate:
    """Bracket ``lower <= sup |F| <= upper``.

    ``lower`` is attained at ``witness`` (phases for a torus search, a real
    ``t`` for the line).  ``upper`` is always a valid bound, at worst the
    coefficient l1 norm.
    """

    lower: float
    upper: float
    witness: object
    method: str = ""
    evaluations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        w = self.witness
        if isinstance(w, np.ndarray):
            w = [float(v) for v in w]
        return {
            "lower": self.lower,
            "upper": self.upper,
            "witness": w,
            "method": self.method,
            "evaluations": self.evaluations,
        }


class TrigPoly:
    """Exponent matrix plus coefficients, restricted to active variables."""

    def __init__(self, exponents, coeffs):
        A = np.asarray(exponents, dtype=np.int64)
        a = np.asarray(coeffs, dtype=np.complex128)
        if A.ndim != 2 or A.shape[0] != a.shape[0]:
            raise ValueError("exponents must be (terms, k) matching coeffs")
        keep = a != 0
        A, a = A[keep], a[keep]
        active = np.nonzero(np.any(A != 0, axis=0))[0] if A.size else np.zeros(0, dtype=np.int64)
        self.k_full = A.shape[1]
        self.active = active
        self.A = A[:, active]
        self.a = a
        self.absa = np.abs(a)
        self.l1 = float(self.absa.sum())
        self._hess_cache: dict[tuple, float] = {}

    @property
    def k(self) -> int:
        return self.A.shape[1]

    def full_phase(self, theta: np.ndarray) -> np.ndarray:
        out = np.zeros(self.k_full)
        out[self.active] = theta
        return out

    def values(self, theta: np.ndarray) -> np.ndarray:
        """F at each row of ``theta`` (shape (n, k))."""
        return np.exp(1j * (theta @ self.A.T)) @ self.a

    def values_and_grad(self, theta: np.ndarray):
        E = np.exp(1j * (theta @ self.A.T)) * self.a
        F = E.sum(axis=1)
        dF = 1j * (E @ self.A)
        return F, dF

    def hessian_term(self, r: np.ndarray) -> float:
        """``1/2 sum |a_t||a_u| D_tu^2`` for half-widths ``r``."""
        key = tuple(np.round(r, 15))
        hit = self._hess_cache.get(key)
        if hit is not None:
            return hit
        T = len(self.a)
        if T <= 400:
            D = np.abs(self.A[:, None, :] - self.A[None, :, :]) @ r
            val = 0.5 * float(self.absa @ (D**2) @ self.absa)
        else:
            # D_tu <= s_t + s_u
            s = np.abs(self.A) @ r
            val = float(self.l1 * (self.absa @ s**2) + (self.absa @ s) ** 2)
        self._hess_cache[key] = val
        return val


def cell_bounds(poly: TrigPoly, centers: np.ndarray, r: np.ndarray):
    """Certified upper bounds of ``|F|`` on cells with half-widths ``r``.

    Returns ``(bounds, abs_values_at_centres)``.
    """
    F, dF = poly.values_and_grad(centers)
    P = F.real**2 + F.imag**2
    dP = 2 * (np.conj(F)[:, None] * dF).real
    second = P + np.abs(dP) @ r + poly.hessian_term(r)
    absF = np.sqrt(P)
    first = absF + float(poly.absa @ (np.abs(poly.A) @ r))
    bound = np.minimum(np.sqrt(second), first)
    bound = np.minimum(bound, poly.l1)
    # headroom for rounding in the evaluation itself
    bound = bound * (1 + 1e-12) + 1e-15 * poly.l1
    return bound, absF


def _grid_points(N: int, k: int) -> np.ndarray:
    axis = TWO_PI * np.arange(N) / N
    mesh = np.meshgrid(*([axis] * k), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _ascend(poly: TrigPoly, theta0: np.ndarray, cfg: SearchConfig):
    """Batched gradient ascent on ``|F|^2`` with per-start step halving."""
    theta = theta0.copy()
    F, dF = poly.values_and_grad(theta)
    P = np.abs(F) ** 2
    step = np.full(len(theta), 0.5 / max(poly.l1, 1e-300) ** 2)
    live = np.ones(len(theta), dtype=bool)
    evals = len(theta)
    for _ in range(cfg.max_iter):
        idx = np.nonzero(live)[0]
        if idx.size == 0:
            break
        g = 2 * (np.conj(F[idx])[:, None] * dF[idx]).real
        trial = theta[idx] + step[idx, None] * g
        Ft, dFt = poly.values_and_grad(trial)
        Pt = np.abs(Ft) ** 2
        evals += idx.size
        better = Pt > P[idx] * (1 + 1e-15)
        acc = idx[better]
        theta[acc], F[acc], dF[acc], P[acc] = trial[better], Ft[better], dFt[better], Pt[better]
        step[acc] *= 1.5
        rej = idx[~better]
        step[rej] *= 0.5
        # step is in units of theta per unit gradient; measure the move itself
        move = step[idx] * np.abs(g).max(axis=1)
        live[idx[(move < cfg.step_min) & ~better]] = False
    return np.mod(theta, TWO_PI), np.sqrt(P), evals


def torus_sup(poly: TrigPoly, cfg: SearchConfig | None = None) -> SupEstimate:
    """Lower and certified upper bound for ``sup_{T^k} |F|``."""
    cfg = cfg or SearchConfig()
    if poly.l1 == 0:
        return SupEstimate(0.0, 0.0, np.zeros(poly.k_full), "zero", 0)
    k = poly.k
    if k == 0:
        c = abs(complex(poly.a.sum()))
        return SupEstimate(c, c, np.zeros(poly.k_full), "constant", 1)

    rng = np.random.default_rng(cfg.seed)
    tol = cfg.rel_tol * poly.l1
    evals = 0

    if k <= cfg.dense_max_dim:
        N = max(4, min(cfg.grid, int(math.floor(cfg.grid_cap ** (1 / k) + 1e-9))))
        method = f"grid{N}^{k}"
    else:
        N = max(1, min(cfg.grid, int(math.floor(cfg.cover_cap ** (1 / k) + 1e-9))))
        method = f"multistart{cfg.restarts}"
    centers = _grid_points(N, k)
    r = np.full(k, math.pi / N)
    bounds = np.empty(len(centers))
    absF = np.empty(len(centers))
    for lo in range(0, len(centers), 65536):
        hi = lo + 65536
        bounds[lo:hi], absF[lo:hi] = cell_bounds(poly, centers[lo:hi], r)
    evals += len(centers)

    if k <= cfg.dense_max_dim:
        top = np.argsort(-absF, kind="stable")[:8]
        starts = centers[top]
    else:
        starts = rng.uniform(0, TWO_PI, size=(cfg.restarts, k))
        starts[0] = 0.0
    pts, vals, n_ev = _ascend(poly, starts, cfg)
    evals += n_ev

    i_best = int(np.argmax(absF))
    lower, witness = float(absF[i_best]), centers[i_best]
    j = int(np.argmax(vals))
    if vals[j] > lower:
        lower, witness = float(vals[j]), pts[j]

    # branch and bound; all live cells at one depth share the same r
    depth_r = {0: r}
    depth = np.zeros(len(centers), dtype=np.int64)
    keep = bounds > lower
    centers, bounds, depth = centers[keep], bounds[keep], depth[keep]
    budget = cfg.bb_budget
    while len(bounds) and budget > 0:
        need = bounds > lower + tol
        if not need.any():
            break
        cand = np.nonzero(need)[0]
        if len(cand) > cfg.bb_batch:
            cand = cand[np.argsort(-bounds[cand], kind="stable")[: cfg.bb_batch]]
        rest = np.ones(len(bounds), dtype=bool)
        rest[cand] = False
        kids_c, kids_d = [], []
        for d in np.unique(depth[cand]):
            sel = cand[depth[cand] == d]
            rd = depth_r[int(d)]
            ax = int(np.argmax(rd))
            r_new = rd.copy()
            r_new[ax] /= 2
            depth_r.setdefault(int(d) + 1, r_new)
            shift = np.zeros(k)
            shift[ax] = r_new[ax]
            kids_c.append(np.concatenate([centers[sel] - shift, centers[sel] + shift]))
            kids_d.append(np.full(2 * len(sel), d + 1))
        kc = np.concatenate(kids_c)
        kd = np.concatenate(kids_d)
        kb = np.empty(len(kc))
        ka = np.empty(len(kc))
        for d in np.unique(kd):
            sel = kd == d
            kb[sel], ka[sel] = cell_bounds(poly, kc[sel], depth_r[int(d)])
        evals += len(kc)
        budget -= len(kc)
        j = int(np.argmax(ka))
        if ka[j] > lower:
            lower, witness = float(ka[j]), kc[j]
        centers = np.concatenate([centers[rest], kc])
        bounds = np.concatenate([bounds[rest], kb])
        depth = np.concatenate([depth[rest], kd])
        keep = bounds > lower
        centers, bounds, depth = centers[keep], bounds[keep], depth[keep]

    upper = max(lower, min(float(bounds.max()) if len(bounds) else lower, poly.l1))
    finest = min((float(v.max()) for v in depth_r.values()), default=math.pi / N)
    return SupEstimate(
        lower=lower,
        upper=upper,
        witness=poly.full_phase(np.mod(witness, TWO_PI)),
        method=method,
        evaluations=evals,
        info={"live_cells": int(len(bounds)), "finest_halfwidth": finest, "k_active": k},
    )

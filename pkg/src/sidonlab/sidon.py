"""
Certified lower bounds for Sidon constants of small frequency sets.

For a finite support the Sidon constant is the supremum of
``sum |a| / sup |f|`` over nonzero coefficient vectors, so any single
coefficient vector certifies a lower bound as long as ``sup |f|`` is replaced
by a certified upper bound.  :func:`sidon_search` looks for good vectors by
stochastic local search and certifies them through the Bohr lift and
:func:`sidonlab.torus.torus_sup`; :func:`sidon_oracle_small` is an
independent brute-force cross-check for supports lifting to at most two
variables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .dirichlet import DirichletPolynomial, bohr_lift
from .errors import DomainError
from .ntheory import PrimeTable, sieve_primes
from .torus import SearchConfig, TrigPoly, torus_sup

__all__ = [
    "SidonInstance",
    "SidonWitness",
    "sidon_search",
    "sidon_oracle_small",
    "certify_coefficients",
    "recertify",
    "MAX_SUPPORT",
]

MAX_SUPPORT = 12
TWO_PI = 2 * math.pi

# torus search used to certify a candidate
CERTIFY = SearchConfig(restarts=32, max_iter=300, bb_budget=400_000, rel_tol=1e-12)


@dataclass(frozen=True)
class SidonInstance:
    """A finite frequency set.

    ``kind="dirichlet"``: ``support`` holds indices n, frequencies ``log n``.
    ``kind="integer"``: ``support`` holds the integer frequencies themselves
    (the set ``{0, 1, ..., N}`` and friends), lifted to one variable.
    """

    support: tuple[int, ...]
    kind: str = "dirichlet"

    def __post_init__(self):
        sup = tuple(int(n) for n in self.support)
        if not sup:
            raise DomainError("support must be nonempty")
        if len(set(sup)) != len(sup):
            raise DomainError(f"support entries must be distinct: {sup}")
        if self.kind == "dirichlet" and min(sup) < 1:
            raise DomainError("Dirichlet indices must be >= 1")
        if self.kind not in ("dirichlet", "integer"):
            raise DomainError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "support", tuple(sorted(sup)))

    @property
    def x(self) -> int:
        return max(self.support)

    def exponents(self, table: PrimeTable | None = None) -> np.ndarray:
        """Exponent matrix of the lifted monomials, one row per support entry."""
        if self.kind == "integer":
            lo = min(self.support)
            return np.array([[n - lo] for n in self.support], dtype=np.int64)
        table = _table_for(self.x, table)
        F = bohr_lift(DirichletPolynomial(self.x, {n: 1 for n in self.support}), table)
        index = {n: i for i, n in enumerate(self.support)}
        primes = table.primes[: F.k]
        A = np.zeros((len(self.support), F.k), dtype=np.int64)
        for alpha in F.terms:
            n = math.prod(int(p) ** e for p, e in zip(primes, alpha) if e)
            A[index[n]] = alpha
        return A


@dataclass
class SidonWitness:
    """A coefficient vector with certified ``bound = l1 / sup_upper``.

    Coefficients are normalised to ``l1 = 1`` with the first one real and
    nonnegative.
    """

    support: tuple[int, ...]
    coefficients: tuple[complex, ...]
    l1: float
    sup_lower: float
    sup_upper: float
    bound: float
    seed: int
    evaluations: int = 0
    kind: str = "dirichlet"
    history: list[float] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {n: c for n, c in zip(self.support, self.coefficients)}

    def to_json(self) -> dict:
        return {
            "support": list(self.support),
            "kind": self.kind,
            "coefficients": [{"n": n, "re": c.real, "im": c.imag} for n, c in zip(self.support, self.coefficients)],
            "l1": self.l1,
            "sup_lower": self.sup_lower,
            "sup_upper": self.sup_upper,
            "bound": self.bound,
            "seed": self.seed,
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SidonWitness":
        try:
            coeffs = [(int(c["n"]), complex(c["re"], c["im"])) for c in obj["coefficients"]]
            return cls(
                support=tuple(n for n, _ in coeffs),
                coefficients=tuple(c for _, c in coeffs),
                l1=float(obj["l1"]),
                sup_lower=float(obj["sup_lower"]),
                sup_upper=float(obj["sup_upper"]),
                bound=float(obj["bound"]),
                seed=int(obj["seed"]),
                evaluations=int(obj.get("evaluations", 0)),
                kind=obj.get("kind", "dirichlet"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"not a witness record: {exc}") from exc


def _table_for(x: int, table: PrimeTable | None) -> PrimeTable:
    if table is not None and table.limit >= max(x, 2):
        return table
    return sieve_primes(max(x, 2))


def _normalise(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.complex128)
    l1 = np.abs(c).sum()
    if l1 == 0:
        raise DomainError("coefficient vector is zero")
    nz = np.nonzero(c)[0][0]
    phase = c[nz] / abs(c[nz])
    return c / (l1 * phase)


def certify_coefficients(A: np.ndarray, coeffs: np.ndarray, config: SearchConfig = CERTIFY):
    """``(bound, sup_lower, sup_upper)`` for the normalised vector."""
    c = _normalise(coeffs)
    est = torus_sup(TrigPoly(A, c), config)
    l1 = float(np.abs(c).sum())
    return l1 / est.upper, est.lower, est.upper


class _FastSup:
    """Cheap sup estimate used inside the search loop (never certified)."""

    def __init__(self, A: np.ndarray, seed: int):
        keep = np.any(A != 0, axis=0)
        self.A = A[:, keep]
        self.k = self.A.shape[1]
        self.rng = np.random.default_rng(seed + 7919)
        if self.k == 0:
            self.E = None
        elif self.k <= 2:
            N = 1024 if self.k == 1 else 96
            axis = TWO_PI * np.arange(N) / N
            pts = np.stack([m.ravel() for m in np.meshgrid(*([axis] * self.k), indexing="ij")], axis=1)
            self.pts = pts
            self.E = np.exp(1j * pts @ self.A.T)
        else:
            self.E = None
            self.pts = None
        self.warm: np.ndarray | None = None

    def __call__(self, c: np.ndarray) -> float:
        if self.k == 0:
            return abs(c.sum())
        if self.E is not None:
            vals = np.abs(self.E @ c)
            i = int(np.argmax(vals))
            start = self.pts[i : i + 1]
        else:
            n0 = 12
            start = self.rng.uniform(0, TWO_PI, size=(n0, self.k))
            start[0] = 0.0
            if self.warm is not None:
                start[1] = self.warm
        theta, val = self._polish(c, start)
        if self.E is None:
            self.warm = theta
        return val

    def _polish(self, c: np.ndarray, theta: np.ndarray, iters: int = 25):
        theta = theta.copy()
        A = self.A
        E = np.exp(1j * theta @ A.T) * c
        F = E.sum(axis=1)
        P = np.abs(F) ** 2
        step = np.full(len(theta), 0.25 / max(np.abs(c).sum(), 1e-300) ** 2)
        for _ in range(iters):
            g = 2 * (np.conj(F)[:, None] * (1j * (E @ A))).real
            trial = theta + step[:, None] * g
            Et = np.exp(1j * trial @ A.T) * c
            Ft = Et.sum(axis=1)
            Pt = np.abs(Ft) ** 2
            ok = Pt > P
            theta[ok], E[ok], F[ok], P[ok] = trial[ok], Et[ok], Ft[ok], Pt[ok]
            step = np.where(ok, step * 1.5, step * 0.5)
        i = int(np.argmax(P))
        return theta[i], float(math.sqrt(P[i]))


def sidon_search(
    inst: SidonInstance,
    budget: int = 2000,
    seed: int = 0,
    table: PrimeTable | None = None,
    init: Sequence[Mapping[int, complex]] = (),
    restart_len: int = 300,
    certify_step: float = 1e-5,
    mode: str = "random",
    config: SearchConfig = CERTIFY,
) -> SidonWitness:
    """Search for coefficients maximising ``l1 / sup`` on ``inst.support``.

    Each restart runs a (1+1) evolution strategy with Gaussian complex
    mutations and 1/5-success step control, then a coordinate polish over
    magnitudes and phases, for ``restart_len`` objective evaluations.
    Restarts begin from the vectors in ``init`` (projected onto the support),
    then from random vectors (``mode="random"``) or completely multiplicative
    unimodular ones (``mode="smooth"``).

    Candidates are certified whenever the running best estimate improves by
    a relative ``certify_step`` and at the end of every restart; the witness
    returned is the best *certified* one, starting from a single monomial
    (bound exactly 1).  The sequence of evaluations depends only on ``seed``,
    so a larger ``budget`` never returns a smaller bound.
    """
    if budget < 1:
        raise DomainError(f"budget must be >= 1, got {budget}")
    if len(inst.support) > MAX_SUPPORT:
        raise DomainError(f"support size {len(inst.support)} exceeds the desk limit {MAX_SUPPORT}")
    if mode not in ("random", "smooth"):
        raise DomainError(f"unknown mode {mode!r}")
    s = len(inst.support)
    A = inst.exponents(table)
    rng = np.random.default_rng(seed)
    fast = _FastSup(A, seed)

    best_c = np.zeros(s, dtype=np.complex128)
    best_c[0] = 1.0
    best_bound, best_lo, best_up = 1.0, 1.0, 1.0
    history: list[float] = []
    evals = 0
    run_best = 0.0
    last_cert = 0.0
    seen: set[bytes] = set()

    def certify(c):
        nonlocal best_c, best_bound, best_lo, best_up
        key = np.round(_normalise(c), 14).tobytes()
        if key in seen:
            return
        seen.add(key)
        b, lo, up = certify_coefficients(A, c, config)
        if b > best_bound:
            best_c, best_bound, best_lo, best_up = _normalise(c), b, lo, up

    def objective(c):
        nonlocal evals, run_best, last_cert
        evals += 1
        val = float(np.abs(c).sum() / fast(c))
        if val > run_best:
            run_best = val
            if val > last_cert * (1 + certify_step):
                last_cert = val
                certify(c)
        history.append(best_bound)
        return val

    seeds = []
    for d in init:
        v = np.array([complex(d.get(n, 0)) for n in inst.support])
        if np.any(v != 0):
            seeds.append(v)

    primes_cache = None
    restart = 0
    while evals < budget:
        if restart < len(seeds):
            c = seeds[restart].copy()
        elif mode == "smooth" and inst.kind == "dirichlet":
            if primes_cache is None:
                primes_cache = A
            w = np.exp(1j * rng.uniform(0, TWO_PI, A.shape[1]))
            c = np.prod(np.where(A > 0, w[None, :] ** A, 1), axis=1) * rng.uniform(0.5, 1.5, s)
        else:
            c = rng.standard_normal(s) + 1j * rng.standard_normal(s)
        restart += 1
        stop = min(budget, evals + restart_len)
        c = _run_restart(c, objective, rng, lambda: evals < stop, restart_len)
        certify(c)
    return SidonWitness(
        support=inst.support,
        coefficients=tuple(complex(v) for v in best_c),
        l1=1.0,
        sup_lower=best_lo,
        sup_upper=best_up,
        bound=best_bound,
        seed=seed,
        evaluations=evals,
        kind=inst.kind,
        history=history,
    )


def _run_restart(c, objective, rng, more, length):
    """(1+1)-ES then coordinate polish; returns the best vector seen."""
    s = len(c)
    c = _normalise(c)
    f = objective(c)
    sigma = 0.3
    es_len = int(0.7 * length)
    used = 1
    while used < es_len and more():
        trial = c + sigma * (rng.standard_normal(s) + 1j * rng.standard_normal(s)) / s
        if not np.any(trial):
            continue
        trial = _normalise(trial)
        ft = objective(trial)
        used += 1
        if ft > f:
            c, f = trial, ft
            sigma *= 1.5
        else:
            sigma *= 1.5**-0.25
        sigma = min(max(sigma, 1e-7), 1.0)
    delta = 0.05
    while more() and delta > 1e-9:
        improved = False
        for j in range(s):
            for move in (delta, -delta, 1j * delta, -1j * delta):
                if not more():
                    break
                r, ph = abs(c[j]), np.angle(c[j])
                if move.imag == 0:
                    new = max(r + move.real, 0.0) * np.exp(1j * ph)
                else:
                    new = r * np.exp(1j * (ph + move.imag * TWO_PI))
                trial = c.copy()
                trial[j] = new
                if not np.any(trial):
                    continue
                trial = _normalise(trial)
                ft = objective(trial)
                if ft > f:
                    c, f, improved = trial, ft, True
        if not improved:
            delta /= 2
    return c


def recertify(w: SidonWitness, factor: int = 10, table: PrimeTable | None = None) -> float:
    """Bound for the same witness with a ``factor``-times finer sup grid."""
    A = SidonInstance(w.support, w.kind).exponents(table)
    b, _, _ = certify_coefficients(A, np.array(w.coefficients), CERTIFY.refined(factor))
    return b


# --------------------------------------------------------------------------
# brute-force oracle


def _lipschitz_sup(A: np.ndarray, c: np.ndarray, n0: int, tol: float, max_evals: int = 5_000_000):
    """Sup of ``|sum c_t e^{i A_t.theta}|`` by first-order Lipschitz bisection.

    Independent of :mod:`sidonlab.torus`: cells of half-width r are bounded by
    ``|F(centre)| + r * sum |c_t| |A_t|_1`` and split into 2^k children.
    """
    keep = np.any(A != 0, axis=0)
    A = A[:, keep]
    k = A.shape[1]
    l1 = float(np.abs(c).sum())
    if k == 0:
        v = abs(c.sum())
        return v, v
    lip = float(np.abs(c) @ np.abs(A).sum(axis=1))
    axis = TWO_PI * (np.arange(n0) + 0.5) / n0
    centers = np.stack([m.ravel() for m in np.meshgrid(*([axis] * k), indexing="ij")], axis=1)
    r = math.pi / n0
    offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=k)))
    lower = 0.0
    evals = 0
    upper = l1
    while True:
        vals = np.abs(np.exp(1j * centers @ A.T) @ c)
        evals += len(centers)
        lower = max(lower, float(vals.max()))
        bnd = vals + r * lip
        live = bnd > lower + tol
        upper = min(l1, max(lower, float(bnd.max())) * (1 + 1e-12))
        if not live.any() or evals > max_evals:
            return lower, upper
        centers = (centers[live][:, None, :] + r * offsets[None, :, :]).reshape(-1, k)
        r /= 2


def sidon_oracle_small(
    inst: SidonInstance,
    grid: int = 720,
    table: PrimeTable | None = None,
    lattice_cap: int = 60_000,
    polish: int = 12,
) -> float:
    """Near-exhaustive certified lower bound for S on a tiny support.

    The coefficient vector is normalised to l1 = 1 with its first entry real
    and nonnegative, leaving ``s - 1`` magnitudes on the simplex and ``s - 1``
    phases.  A uniform lattice over that set (``lattice_cap`` points at
    most) is scored on a dense phase grid, the best ``polish`` points are
    refined by Nelder-Mead, and the winner is certified by Lipschitz
    bisection started from ``grid`` points per variable.
    """
    s = len(inst.support)
    if s > 6:
        raise DomainError(f"the oracle handles at most 6 frequencies, got {s}")
    A = inst.exponents(table)
    active = A[:, np.any(A != 0, axis=0)]
    k = active.shape[1]
    if k > 2:
        raise DomainError(f"the oracle handles at most 2 lifted variables, got {k}")
    if s == 1 or k == 0:
        return 1.0

    # coarse scoring grid on the torus
    Ng = 256 if k == 1 else 48
    axis = TWO_PI * np.arange(Ng) / Ng
    pts = np.stack([m.ravel() for m in np.meshgrid(*([axis] * k), indexing="ij")], axis=1)
    E = np.exp(1j * pts @ active.T)

    dims = 2 * (s - 1)
    q = 1
    while _lattice_size(s, q + 1) <= lattice_cap:
        q += 1
    mags = _simplex(s, q)
    phases = TWO_PI * np.array(list(itertools.product(range(q), repeat=s - 1)), dtype=np.float64).reshape(-1, s - 1) / q
    best_scores = []
    for m in mags:
        if m[0] == 0 and q > 1:
            continue
        C = m[None, :] * np.exp(1j * np.concatenate([np.zeros((len(phases), 1)), phases], axis=1))
        sup = np.abs(C @ E.T).max(axis=1)
        ratio = 1.0 / sup
        top = np.argsort(-ratio)[:polish]
        best_scores.extend((float(ratio[i]), tuple(m), tuple(phases[i])) for i in top)
    best_scores.sort(key=lambda t: -t[0])

    fine_N = 4096 if k == 1 else 160
    axis = TWO_PI * np.arange(fine_N) / fine_N
    fine_pts = np.stack([m.ravel() for m in np.meshgrid(*([axis] * k), indexing="ij")], axis=1)
    Ef = np.exp(1j * fine_pts @ active.T)

    def unpack(p):
        mag = np.abs(p[:s])
        ph = np.concatenate([[0.0], p[s:]])
        c = mag * np.exp(1j * ph)
        return c

    def neg_ratio(p):
        c = unpack(p)
        l1 = np.abs(c).sum()
        if l1 == 0:
            return 0.0
        return -l1 / np.abs(Ef @ c).max()

    best = 1.0
    for _, m, ph in best_scores[:polish]:
        p0 = np.concatenate([np.array(m), np.array(ph)])
        res = minimize(neg_ratio, p0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 400 * dims})
        c = unpack(res.x)
        c = c / np.abs(c).sum()
        lo, up = _lipschitz_sup(active, c, grid, tol=1e-7 if k == 1 else 1e-5)
        best = max(best, float(np.abs(c).sum()) / up)
    return best


def _lattice_size(s: int, q: int) -> int:
    return math.comb(q + s - 1, s - 1) * q ** (s - 1)


def _simplex(s: int, q: int) -> np.ndarray:
    """All points of the simplex ``sum = 1`` with denominators ``q``."""
    out = []
    for bars in itertools.combinations(range(q + s - 1), s - 1):
        parts = np.diff(np.concatenate([[-1], bars, [q + s - 1]])) - 1
        out.append(parts / q)
    return np.array(out)

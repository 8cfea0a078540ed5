"""
Dirichlet polynomials f(s) = sum_{n <= x} a_n n^{-s} and their Bohr lift.

Factoring ``n = prod p_j^{alpha_j}`` sends ``n^{-it}`` to the monomial
``z^{alpha(n)}`` with ``z_j = p_j^{-it}``, so f becomes a polynomial F in
``k = pi(x)`` variables.  The logarithms of the primes are linearly
independent over Q, so ``sup_t |f(it)| = sup_{T^k} |F|``; the line sup below
is only ever a lower estimate of that common value, the torus search gives
both sides.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Mapping

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .ntheory import PrimeTable, factor
from .torus import SearchConfig, SupEstimate, TrigPoly, torus_sup

__all__ = [
    "DirichletPolynomial",
    "BohrPolynomial",
    "PolynomialFormatError",
    "bohr_lift",
    "inverse_lift",
    "homogeneous_part",
    "homogeneous_parts",
    "smooth_rough_split",
    "l1_norm",
    "l2_norm",
    "sup_norm_line",
    "sup_norm_torus",
    "sup_norm",
    "random_polynomial",
    "read_polynomial",
    "write_polynomial",
]


class PolynomialFormatError(ValueError):
    """Input does not follow the polynomial JSON layout."""


@dataclass(frozen=True, eq=True)
class DirichletPolynomial:
    """Sparse coefficients ``{n: a_n}`` with ``1 <= n <= x``.

    Exact zeros are dropped, so two polynomials compare equal iff they have
    the same cutoff and the same nonzero coefficients.
    """

    x: int
    coefficients: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.x < 1:
            raise DomainError(f"cutoff x must be >= 1, got {self.x}")
        clean = {}
        for n, a in sorted(self.coefficients.items()):
            n = int(n)
            if not 1 <= n <= self.x:
                raise DomainError(f"index {n} outside 1..{self.x}")
            a = complex(a)
            if a != 0:
                clean[n] = a
        object.__setattr__(self, "coefficients", clean)

    @classmethod
    def zero(cls, x: int) -> "DirichletPolynomial":
        return cls(x, {})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def coeff_array(self) -> tuple[np.ndarray, np.ndarray]:
        n = np.fromiter(self.coefficients, dtype=np.int64, count=len(self.coefficients))
        a = np.fromiter(self.coefficients.values(), dtype=np.complex128, count=len(self.coefficients))
        return n, a

    def __call__(self, t):
        """Value ``f(it)`` at real ``t`` (scalar or array)."""
        n, a = self.coeff_array()
        tt = np.asarray(t, dtype=np.float64)
        out = np.exp(-1j * np.multiply.outer(tt, np.log(n))) @ a
        return complex(out) if tt.ndim == 0 else out

    def __add__(self, other: "DirichletPolynomial") -> "DirichletPolynomial":
        x = max(self.x, other.x)
        out = dict(self.coefficients)
        for n, a in other.coefficients.items():
            out[n] = out.get(n, 0) + a
        return DirichletPolynomial(x, out)

    def scale(self, c: complex) -> "DirichletPolynomial":
        return DirichletPolynomial(self.x, {n: c * a for n, a in self.coefficients.items()})

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "coefficients": [{"n": n, "re": a.real, "im": a.imag} for n, a in self.coefficients.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "DirichletPolynomial":
        try:
            x = obj["x"]
            items = obj["coefficients"]
            if not isinstance(x, int) or isinstance(x, bool) or not isinstance(items, list):
                raise TypeError
            coeffs: dict[int, complex] = {}
            for item in items:
                n = item["n"]
                if not isinstance(n, int) or isinstance(n, bool):
                    raise TypeError
                a = complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))
                coeffs[n] = coeffs.get(n, 0) + a
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise PolynomialFormatError(
                'expected {"x": int, "coefficients": [{"n": int, "re": float, "im": float}, ...]}'
            ) from exc
        return cls(x, coeffs)


@dataclass(frozen=True)
class BohrPolynomial:
    """``terms`` maps exponent vectors (length ``k``) to coefficients.

    ``x`` remembers the cutoff of the Dirichlet polynomial a lift came from;
    it is ``None`` for hand-built polynomials.
    """

    k: int
    terms: Mapping[tuple[int, ...], complex] = field(default_factory=dict)
    x: int | None = None

    def __post_init__(self):
        clean = {}
        for alpha, c in self.terms.items():
            alpha = tuple(int(e) for e in alpha)
            if len(alpha) != self.k or any(e < 0 for e in alpha):
                raise DomainError(f"exponent {alpha} is not a vector in N^{self.k}")
            if alpha in clean:
                raise DomainError(f"duplicate exponent {alpha}")
            c = complex(c)
            if c != 0:
                clean[alpha] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_monomials(cls, k: int, terms: Mapping[tuple[int, ...], complex]) -> "BohrPolynomial":
        return cls(k, terms)

    def degrees(self) -> set[int]:
        return {sum(alpha) for alpha in self.terms}

    def is_homogeneous(self, m: int) -> bool:
        return all(sum(alpha) == m for alpha in self.terms)

    def trig(self) -> TrigPoly:
        if self.terms:
            A = np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), self.k)
        else:
            A = np.zeros((0, self.k), dtype=np.int64)
        return TrigPoly(A, np.array(list(self.terms.values()), dtype=np.complex128))

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=np.complex128)
        return complex(sum(c * np.prod(z**np.array(alpha)) for alpha, c in self.terms.items()))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "x": self.x,
            "terms": [{"alpha": list(a), "re": c.real, "im": c.imag} for a, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, obj) -> "BohrPolynomial":
        try:
            k = obj["k"]
            x = obj.get("x")
            items = obj["terms"]
            if not isinstance(k, int) or not isinstance(items, list) or not (x is None or isinstance(x, int)):
                raise TypeError
            terms = {}
            for item in items:
                alpha = item["alpha"]
                if not isinstance(alpha, list) or not all(isinstance(e, int) for e in alpha):
                    raise TypeError
                terms[tuple(alpha)] = complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise PolynomialFormatError(
                'expected {"k": int, "x": int|null, "terms": [{"alpha": [int, ...], "re": float, "im": float}, ...]}'
            ) from exc
        return cls(k, terms, x)


def bohr_lift(f: DirichletPolynomial, table: PrimeTable) -> BohrPolynomial:
    """``F(z) = sum a_n z^{alpha(n)}`` in ``k = pi(x)`` variables."""
    if f.x > table.limit:
        raise DomainError(f"cutoff {f.x} exceeds the sieve limit {table.limit}")
    k = table.pi(f.x) if f.x >= 2 else 0
    terms = {}
    for n, a in f.coefficients.items():
        alpha = [0] * k
        for j, e in factor(n, table).alpha:
            alpha[j] = e
        terms[tuple(alpha)] = a
    return BohrPolynomial(k, terms, x=f.x)


def inverse_lift(F: BohrPolynomial, table: PrimeTable, x: int | None = None) -> DirichletPolynomial:
    """Undo :func:`bohr_lift`: ``z^alpha`` goes back to ``n = prod p_j^alpha_j``."""
    if F.k > table.pi():
        raise DomainError(f"{F.k} variables need more primes than the sieve holds")
    primes = [int(p) for p in table.primes[: F.k]]
    cutoff = x if x is not None else F.x
    coeffs = {}
    for alpha, c in F.terms.items():
        n = math.prod(p**e for p, e in zip(primes, alpha) if e)
        if cutoff is not None and n > cutoff:
            raise DomainError(f"monomial {alpha} maps to n={n} beyond the cutoff {cutoff}")
        if n >= 2**63:
            raise DomainError(f"monomial {alpha} maps to an index that overflows int64")
        coeffs[n] = c
    if cutoff is None:
        cutoff = max(coeffs, default=1)
    return DirichletPolynomial(cutoff, coeffs)


def homogeneous_part(f: DirichletPolynomial, m: int, table: PrimeTable) -> DirichletPolynomial:
    """Terms with ``Omega(n) == m``; these lift to the m-homogeneous part."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if f.x > table.limit:
        raise DomainError(f"cutoff {f.x} exceeds the sieve limit {table.limit}")
    om = table.omega
    return DirichletPolynomial(f.x, {n: a for n, a in f.coefficients.items() if om[n] == m})


def homogeneous_parts(f: DirichletPolynomial, table: PrimeTable) -> dict[int, DirichletPolynomial]:
    """All nonzero homogeneous parts keyed by degree."""
    om = table.omega
    degs = sorted({int(om[n]) for n in f.coefficients})
    return {m: homogeneous_part(f, m, table) for m in degs}


def smooth_rough_split(f: DirichletPolynomial, y: int, table: PrimeTable) -> dict[int, DirichletPolynomial]:
    """Write each ``n = kappa * eta`` with kappa y-smooth and eta y-rough.

    Returns ``{kappa: f_kappa}`` with ``f_kappa = sum_eta a_{kappa eta} eta^{-s}``
    so that ``f = sum_kappa kappa^{-s} f_kappa``.  ``f_kappa`` has cutoff
    ``x // kappa``.
    """
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    blocks: dict[int, dict[int, complex]] = {}
    for n, a in f.coefficients.items():
        kappa = 1
        for p, e in factor(n, table).powers.items():
            if p <= y:
                kappa *= p**e
        blocks.setdefault(kappa, {})[n // kappa] = a
    return {kappa: DirichletPolynomial(f.x // kappa, blocks[kappa]) for kappa in sorted(blocks)}


def l1_norm(f: DirichletPolynomial) -> float:
    return math.fsum(abs(a) for a in f.coefficients.values())


def l2_norm(f: DirichletPolynomial) -> float:
    return math.sqrt(math.fsum(abs(a) ** 2 for a in f.coefficients.values()))


def sup_norm_line(f: DirichletPolynomial, T: float = 1e4, grid: int = 200_000, refine: int = 10) -> SupEstimate:
    """Search ``max |f(it)|`` over ``0 <= t <= T``.

    ``grid`` equally spaced samples, then a bounded golden-section/Brent
    search (tolerance 1e-10 in t) around the ``refine`` best local maxima.
    ``upper`` is the l1 norm, which bounds ``|f(it)|`` for every real t.
    """
    if T <= 0 or grid < 2:
        raise DomainError(f"need T > 0 and grid >= 2, got T={T}, grid={grid}")
    l1 = l1_norm(f)
    if f.is_zero():
        return SupEstimate(0.0, 0.0, 0.0, "line", 0)
    n, a = f.coeff_array()
    logn = np.log(n)
    ts = np.linspace(0.0, T, grid)
    vals = np.empty(grid)
    chunk = max(1, 4_000_000 // len(n))
    for lo in range(0, grid, chunk):
        seg = ts[lo : lo + chunk]
        vals[lo : lo + chunk] = np.abs(np.exp(-1j * np.outer(seg, logn)) @ a)
    # interior local maxima, best first
    inner = np.nonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:]))[0] + 1
    order = inner[np.argsort(-vals[inner], kind="stable")][:refine]
    best_i = int(np.argmax(vals))
    lower, witness = float(vals[best_i]), float(ts[best_i])

    def neg(t):
        return -abs(np.exp(-1j * t * logn) @ a)

    for i in order:
        res = minimize_scalar(neg, bounds=(ts[i - 1], ts[i + 1]), method="bounded", options={"xatol": 1e-10})
        if -res.fun > lower:
            lower, witness = float(-res.fun), float(res.x)
    return SupEstimate(lower, max(l1, lower), witness, "line", grid + len(order) * 60, info={"T": T})


def sup_norm_torus(F: BohrPolynomial, config: SearchConfig | None = None) -> SupEstimate:
    """Bracket ``sup_{T^k} |F|`` (see :mod:`sidonlab.torus` for the method)."""
    return torus_sup(F.trig(), config)


def sup_norm(f: DirichletPolynomial, table: PrimeTable, config: SearchConfig | None = None) -> SupEstimate:
    """``||f||_inf`` via the lift."""
    return sup_norm_torus(bohr_lift(f, table), config)


def random_polynomial(
    rng: np.random.Generator,
    x: int,
    terms: int | None = None,
    complex_coeffs: bool = True,
) -> DirichletPolynomial:
    """Random sparse polynomial: ``terms`` distinct indices in 1..x with
    standard Gaussian coefficients."""
    if terms is None:
        terms = int(rng.integers(1, min(x, 8) + 1))
    terms = min(terms, x)
    idx = rng.choice(np.arange(1, x + 1), size=terms, replace=False)
    re = rng.standard_normal(terms)
    im = rng.standard_normal(terms) if complex_coeffs else np.zeros(terms)
    return DirichletPolynomial(x, {int(n): complex(r, i) for n, r, i in zip(idx, re, im)})


def read_polynomial(fh: IO[str]) -> DirichletPolynomial:
    try:
        obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PolynomialFormatError(f"invalid JSON: {exc}") from exc
    return DirichletPolynomial.from_json(obj)


def write_polynomial(f: DirichletPolynomial, fh: IO[str]) -> None:
    json.dump(f.to_json(), fh, sort_keys=True)
    fh.write("\n")

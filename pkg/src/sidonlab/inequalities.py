"""
Bohnenblust-Hille type inequalities and their numerical checks.

For an m-homogeneous polynomial on C^n,

    ||a||_{2m/(m+1)} <= C_m sup_{D^n} |sum a_alpha z^alpha|,
    C_m = (1 + 1/(m-1))^(m-1) sqrt(m) sqrt(2)^(m-1),

and for a Dirichlet polynomial f the coefficients with Omega(n) = m satisfy
the same estimate with C_m replaced by e^m and the sup by ||f||_inf.

Checks compare an exact coefficient norm (left) against a certified upper
bound of the sup times the constant (right), so a failed check can only come
from the inequality, never from an under-resolved sup search.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .dirichlet import (
    BohrPolynomial,
    DirichletPolynomial,
    bohr_lift,
    homogeneous_part,
    random_polynomial,
    sup_norm_torus,
)
from .errors import DomainError
from .ntheory import PrimeTable
from .torus import SearchConfig

__all__ = [
    "CheckReport",
    "MARGIN_TOL",
    "bh_constant",
    "bh_constant_below_exp",
    "mixed_norm",
    "check_bh_dirichlet",
    "check_bh_poly",
    "random_homogeneous",
    "bh_fuzz",
    "write_fuzz_csv",
]

MARGIN_TOL = 1e-9


@dataclass
class CheckReport:
    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    digest: str

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(**d)


def _report(name: str, lhs: float, rhs: float, instance, tol: float) -> CheckReport:
    margin = rhs - lhs
    blob = json.dumps(instance, sort_keys=True).encode()
    return CheckReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        passed=bool(margin >= -tol),
        digest=hashlib.sha256(blob).hexdigest()[:16],
    )


def bh_constant(m: int) -> float:
    """``(1 + 1/(m-1))**(m-1) * sqrt(m) * sqrt(2)**(m-1)`` for ``m >= 2``."""
    if m < 2:
        raise DomainError(f"the polynomial BH constant needs m >= 2, got {m}")
    return (1 + 1 / (m - 1)) ** (m - 1) * math.sqrt(m) * math.sqrt(2) ** (m - 1)


def bh_constant_below_exp(m: int) -> bool:
    """Decide ``bh_constant(m) <= e**m`` in exact rational arithmetic.

    Squares both sides: ``C_m**2 = (m/(m-1))**(2(m-1)) * m * 2**(m-1)`` is
    rational, and a partial sum of the series of ``e**(2m)`` is a rational
    lower bound for it.  Returns True only when the inequality is proved.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    c2 = Fraction(m, m - 1) ** (2 * (m - 1)) * m * 2 ** (m - 1)
    target = 2 * m
    partial = Fraction(0)
    term = Fraction(1)
    for j in range(1, 20 * m + 40):
        partial += term
        if c2 <= partial:
            return True
        term = term * target / j
    return False


def mixed_norm(coeffs: Iterable[complex], m: int) -> float:
    """The l^p norm with ``p = 2m/(m+1)`` (so ``m = 1`` is the l1 norm)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    a = np.abs(np.asarray(list(coeffs), dtype=np.complex128))
    if a.size == 0:
        return 0.0
    top = a.max()
    if top == 0:
        return 0.0
    p = 2 * m / (m + 1)
    return float(top * np.sum((a / top) ** p) ** (1 / p))


def check_bh_dirichlet(
    f: DirichletPolynomial,
    m: int,
    table: PrimeTable,
    config: SearchConfig | None = None,
    tol: float = MARGIN_TOL,
) -> CheckReport:
    """``mixed_norm(a_n : Omega(n) = m) <= e**m * ||f||_inf``."""
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    part = homogeneous_part(f, m, table)
    lhs = mixed_norm(part.coefficients.values(), m)
    sup = sup_norm_torus(bohr_lift(f, table), config)
    rhs = math.exp(m) * sup.upper
    return _report(f"bh_dirichlet[m={m}]", lhs, rhs, {"f": f.to_json(), "m": m}, tol)


def check_bh_poly(F: BohrPolynomial, m: int, config: SearchConfig | None = None, tol: float = MARGIN_TOL) -> CheckReport:
    """``mixed_norm(F) <= bh_constant(m) * sup_{T^k} |F|`` for m-homogeneous F."""
    if not F.is_homogeneous(m):
        raise DomainError(f"polynomial is not {m}-homogeneous (degrees {sorted(F.degrees())})")
    lhs = mixed_norm(F.terms.values(), m)
    sup = sup_norm_torus(F, config)
    rhs = bh_constant(m) * sup.upper
    inst = {"k": F.k, "m": m, "terms": [[list(a), c.real, c.imag] for a, c in sorted(F.terms.items())]}
    return _report(f"bh_poly[m={m}]", lhs, rhs, inst, tol)


def random_homogeneous(rng: np.random.Generator, k: int, m: int, terms: int | None = None) -> BohrPolynomial:
    """Random m-homogeneous polynomial in ``k`` variables, Gaussian coefficients."""
    monos = _monomials(k, m)
    if terms is None:
        terms = int(rng.integers(1, len(monos) + 1))
    pick = rng.choice(len(monos), size=min(terms, len(monos)), replace=False)
    c = rng.standard_normal(len(pick)) + 1j * rng.standard_normal(len(pick))
    return BohrPolynomial(k, {monos[i]: ci for i, ci in zip(sorted(pick), c)})


def _monomials(k: int, m: int) -> list[tuple[int, ...]]:
    if k == 1:
        return [(m,)]
    out = []
    for e in range(m, -1, -1):
        out.extend((e,) + rest for rest in _monomials(k - 1, m - e))
    return out


def bh_fuzz(
    seed: int,
    count: int,
    table: PrimeTable,
    x_max: int = 50,
    ms: Sequence[int] = (2, 3),
    poly_vars: int = 4,
    config: SearchConfig | None = None,
) -> list[CheckReport]:
    """Randomized Dirichlet and polynomial checks, reproducible from ``seed``.

    Each Dirichlet instance is a random polynomial plus a few random terms
    with ``Omega(n) = m``, so the left side is rarely zero.
    """
    rng = np.random.default_rng(seed)
    reports = []
    for i in range(count):
        x = int(rng.integers(2, x_max + 1))
        m = int(ms[i % len(ms)])
        f = random_polynomial(rng, x)
        level = np.nonzero(table.omega[1 : x + 1] == m)[0] + 1
        if level.size:
            pick = rng.choice(level, size=min(level.size, int(rng.integers(1, 4))), replace=False)
            extra = rng.standard_normal((pick.size, 2))
            f = f + DirichletPolynomial(x, {int(n): complex(*e) for n, e in zip(pick, extra)})
        reports.append(check_bh_dirichlet(f, m, table, config))
        k = int(rng.integers(1, poly_vars + 1))
        reports.append(check_bh_poly(random_homogeneous(rng, k, 2), 2, config))
    return reports


def write_fuzz_csv(reports: Iterable[CheckReport], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "name", "lhs", "rhs", "margin", "passed", "digest"])
    for i, r in enumerate(reports):
        w.writerow([i, r.name, repr(r.lhs), repr(r.rhs), repr(r.margin), int(r.passed), r.digest])

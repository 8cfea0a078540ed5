"""
Explicit envelopes for the Sidon constant S(x) of Dirichlet polynomials.

Write S(x) = sqrt(x) exp((-1 + delta(x)) sqrt(log x loglog x / 2)).  With
L = log x, LL = loglog x and LLL = logloglog x the two envelopes are

    delta_lower(x) = -1/2 LLL/LL + C_lower/LL
    delta_upper(x) =  3   LLL/LL + C_upper/LL

where the O(1/loglog x) constants are not effective and default to 0.

The upper bound comes from splitting ||f^||_1 by the number of prime
factors m of the index (f normalised to ||f||_inf = 1, indices y-rough):

    Sigma_1  m <= M1:      sum x^((m-1)/2m) e^m            (|R_m| <= x)
    Sigma_2  M1 < m < M2:  sum Phi(x,y,m)^((m-1)/2m) e^m
    Sigma_3  m >= M2:      sqrt(Phi(x, y, M2))             (Cauchy-Schwarz)

with M1 = alpha sqrt(L/LL), M2 = beta sqrt(L/LL), alpha = 1/sqrt 2,
beta = 2 sqrt 2, and finally a factor for the number of y-smooth kappa.

Every function accepts either ``x`` or, for arguments past the float range,
``log_x``.  All results are natural logs unless stated otherwise.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import IO

import numpy as np
from scipy.special import logsumexp

from .dickman import U_MAX, rho
from .errors import DomainError
from .ntheory import DESK_GRID, sieve_primes

__all__ = [
    "EnvelopeConfig",
    "BoundCertificate",
    "DegenerateChoiceWarning",
    "C_BALAZARD_DESK",
    "thresholds",
    "y_upper_choice",
    "y_lower_choice",
    "log_y_lower_choice",
    "regime_coefficient",
    "sigma_main_terms",
    "upper_envelope",
    "lower_envelope",
    "delta_upper",
    "delta_lower",
    "bretche_lower",
    "certificate",
    "envelope_sweep",
    "write_sweep_csv",
    "plot_sweep",
]

ALPHA = 1 / math.sqrt(2)
BETA = 2 * math.sqrt(2)

# Output of ntheory.calibrate_balazard on the desk grid (x <= 1e5, y <= 13,
# M <= 16); tests re-derive it.
C_BALAZARD_DESK = 0.02


class DegenerateChoiceWarning(UserWarning):
    """A parameter choice only meaningful for huge x was made at desk scale."""


@dataclass(frozen=True)
class EnvelopeConfig:
    C_lower: float = 0.0
    C_upper: float = 0.0
    c_balazard: float = C_BALAZARD_DESK
    alpha: float = ALPHA
    beta: float = BETA
    bretche_constant: float = 1.0  # implied constant in the lower estimate

    def __post_init__(self):
        vals = (self.C_lower, self.C_upper, self.c_balazard, self.alpha, self.beta, self.bretche_constant)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("envelope constants must be finite")
        if not 0 < self.alpha < self.beta:
            raise DomainError(f"need 0 < alpha < beta, got alpha={self.alpha}, beta={self.beta}")
        if self.bretche_constant <= 0:
            raise DomainError("the implied constant must be positive")


@dataclass
class BoundCertificate:
    """Log-scale bounds for the three regimes and their assembly.

    ``kappa_log`` bounds ``||f_kappa^||_1`` for one smooth block;
    ``total_log = smooth_factor_log + kappa_log`` bounds ``||f^||_1``
    for any f with ``||f||_inf = 1``.
    """

    x_log: float
    y: float
    M1: float
    M2: float
    sigma1_log: float
    sigma2_log: float
    sigma3_log: float
    kappa_log: float
    smooth_factor_log: float
    total_log: float
    sigma1_main: float
    sigma2_main: float
    sigma2_gamma_main: float
    sigma3_main: float
    c_balazard: float
    heuristic: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundCertificate":
        """Inverse of :meth:`to_dict` (null regime logs read back as -inf)."""
        vals = dict(d)
        for k in ("sigma2_log", "sigma2_main"):
            if vals.get(k) is None:
                vals[k] = -math.inf
        return cls(**vals)


def _logs(x: float | None, log_x: float | None) -> tuple[float, float, float]:
    if log_x is None:
        if x is None:
            raise DomainError("give x or log_x")
        if not x > 0:
            raise DomainError(f"x must be positive, got {x}")
        log_x = math.log(x)
    if not log_x > math.e:
        raise DomainError(f"need x > e^e (loglog x > 1), got log x = {log_x}")
    LL = math.log(log_x)
    return log_x, LL, math.log(LL)


def thresholds(x: float | None = None, cfg: EnvelopeConfig | None = None, *, log_x: float | None = None):
    """``(M1, M2) = (alpha, beta) * sqrt(log x / loglog x)``."""
    cfg = cfg or EnvelopeConfig()
    L, LL, _ = _logs(x, log_x)
    s = math.sqrt(L / LL)
    return cfg.alpha * s, cfg.beta * s


def y_upper_choice(x: float | None = None, *, log_x: float | None = None, warn: bool = True) -> float:
    """``sqrt(log x / (loglog x)**3)``; below 2 for every desk-scale x."""
    L, LL, _ = _logs(x, log_x)
    y = math.sqrt(L / LL**3)
    if warn and y < 2:
        warnings.warn(f"y = {y:.4g} < 2: the upper-bound parameter is degenerate here", DegenerateChoiceWarning, stacklevel=2)
    return y


def y_lower_choice(x: float | None = None, *, log_x: float | None = None) -> float:
    """``exp(sqrt(log x loglog x / 2))``; see :func:`log_y_lower_choice` for huge x."""
    return math.exp(log_y_lower_choice(x, log_x=log_x))


def log_y_lower_choice(x: float | None = None, *, log_x: float | None = None) -> float:
    L, LL, _ = _logs(x, log_x)
    return math.sqrt(L * LL / 2)


def regime_coefficient(gamma: float) -> float:
    """``1/(2 gamma) + gamma/4``; minimal (= 1/sqrt 2) at gamma = sqrt 2."""
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return 1 / (2 * gamma) + gamma / 4


def sigma_main_terms(
    x: float | None = None, gamma: float = math.sqrt(2), y: float | None = None, *, log_x: float | None = None
) -> tuple[float, float]:
    """Main terms of ``-log x / (2m) - (m/2) log y`` at ``m = gamma sqrt(L/LL)``.

    With the default ``y = sqrt(L / LL**3)`` the sum splits exactly as

        term1 = -(1/(2 gamma) + gamma/4) sqrt(L LL)
        term2 = (3 gamma / 4) LLL sqrt(L / LL).

    For any other ``y``, term2 absorbs the difference, so
    ``term1 + term2`` is always the exact value.
    """
    L, LL, LLL = _logs(x, log_x)
    term1 = -regime_coefficient(gamma) * math.sqrt(L * LL)
    if y is None:
        return term1, 0.75 * gamma * LLL * math.sqrt(L / LL)
    if y <= 0:
        raise DomainError(f"y must be positive, got {y}")
    m = gamma * math.sqrt(L / LL)
    exact = -L / (2 * m) - (m / 2) * math.log(y)
    return term1, exact - term1


def delta_upper(x: float | None = None, cfg: EnvelopeConfig | None = None, *, log_x: float | None = None) -> float:
    cfg = cfg or EnvelopeConfig()
    _, LL, LLL = _logs(x, log_x)
    return 3 * LLL / LL + cfg.C_upper / LL


def delta_lower(x: float | None = None, cfg: EnvelopeConfig | None = None, *, log_x: float | None = None) -> float:
    cfg = cfg or EnvelopeConfig()
    _, LL, LLL = _logs(x, log_x)
    return -0.5 * LLL / LL + cfg.C_lower / LL


def _envelope(L: float, LL: float, delta: float) -> float:
    return 0.5 * L + (-1 + delta) * math.sqrt(L * LL / 2)


def upper_envelope(x: float | None = None, cfg: EnvelopeConfig | None = None, *, log_x: float | None = None) -> float:
    """``log`` of ``sqrt(x) exp((-1 + delta_upper) sqrt(L LL / 2))``."""
    L, LL, _ = _logs(x, log_x)
    return _envelope(L, LL, delta_upper(log_x=L, cfg=cfg))


def lower_envelope(x: float | None = None, cfg: EnvelopeConfig | None = None, *, log_x: float | None = None) -> float:
    """``log`` of ``sqrt(x) exp((-1 + delta_lower) sqrt(L LL / 2))``."""
    L, LL, _ = _logs(x, log_x)
    return _envelope(L, LL, delta_lower(log_x=L, cfg=cfg))


def bretche_lower(
    x: float | None = None,
    y: float | None = None,
    cfg: EnvelopeConfig | None = None,
    *,
    log_x: float | None = None,
    log_y: float | None = None,
    warn: bool = True,
) -> float:
    """Log of ``K sqrt(x log y / loglog x) exp(log(rho(u))/2 - log x / (2u))``.

    ``u = log x / log y`` and ``K`` is ``cfg.bretche_constant``.  ``y`` should
    satisfy ``x >= y >= exp((loglog x)**(3/5))``; outside that range a
    :class:`DegenerateChoiceWarning` is issued (epsilon is taken as 0).
    """
    cfg = cfg or EnvelopeConfig()
    L, LL, _ = _logs(x, log_x)
    if log_y is None:
        if y is None:
            raise DomainError("give y or log_y")
        if y < 2:
            raise DomainError(f"y must be >= 2, got {y}")
        log_y = math.log(y)
    if log_y < math.log(2):
        raise DomainError("y must be >= 2")
    if log_y > L:
        raise DomainError("y must not exceed x")
    if warn and log_y < LL**0.6:
        warnings.warn("y lies below exp((loglog x)^(3/5))", DegenerateChoiceWarning, stacklevel=2)
    u = L / log_y
    if u > U_MAX:
        raise DomainError(f"u = {u:.4g} is beyond the rho table (u <= {U_MAX:g})")
    log_rho = math.log(rho(u))
    return math.log(cfg.bretche_constant) + 0.5 * (L + math.log(log_y) - LL) + 0.5 * log_rho - L / (2 * u)


def _pi_real(y: float) -> int:
    n = int(math.floor(y))
    if n < 2:
        return 0
    return sieve_primes(n).pi()


def certificate(
    x: float | None = None,
    cfg: EnvelopeConfig | None = None,
    y: float | None = None,
    *,
    log_x: float | None = None,
) -> BoundCertificate:
    """Assemble the Sigma_1 / Sigma_2 / Sigma_3 bound for ``||f^||_1``.

    Valid for every f with ``||f||_inf = 1`` supported on ``n <= x``,
    provided the Balazard-type bound holds with ``cfg.c_balazard`` (checked
    for x <= 1e5 by calibration).  Uses the upper-bound choice of ``y``
    unless one is given; a choice below 2 is clamped to 2 and the
    certificate is marked heuristic.
    """
    cfg = cfg or EnvelopeConfig()
    L, LL, LLL = _logs(x, log_x)
    notes: list[str] = []
    heuristic = False
    if y is None:
        y = y_upper_choice(log_x=L, warn=False)
        if y < 2:
            notes.append(f"y = sqrt(log x/(loglog x)^3) = {y:.4g} < 2, clamped to 2")
            heuristic = True
            y = 2.0
    elif y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if math.log(y) > L:
        raise DomainError("y must not exceed x")
    if L > math.log(DESK_GRID["x_max"]):
        notes.append("c_balazard was calibrated only for x <= 1e5")
    M1, M2 = thresholds(log_x=L, cfg=cfg)
    logy = math.log(y)

    def log_phi(m: float) -> float:
        # Phi(x, y, m) <= min(x, (x / y^m) (log x)^y e^(c y))
        return min(L, L - m * logy + y * LL + cfg.c_balazard * y)

    # m = 0: the constant term is bounded by ||f||_inf = 1
    s1 = [0.0] + [(m - 1) / (2 * m) * L + m for m in range(1, int(math.floor(M1)) + 1)]
    sigma1 = float(logsumexp(s1))
    m2 = [m for m in range(int(math.floor(M1)) + 1, int(math.ceil(M2))) if M1 < m < M2]
    s2 = [(m - 1) / (2 * m) * log_phi(m) + m for m in m2]
    sigma2 = float(logsumexp(s2)) if s2 else -math.inf
    sigma3 = 0.5 * log_phi(math.ceil(M2))
    kappa = float(logsumexp([sigma1, sigma2, sigma3]))
    smooth = _pi_real(y) * math.log1p(L / math.log(2))

    raw2 = [-L / (2 * m) - (m / 2) * logy for m in m2]
    gam = np.linspace(cfg.alpha, cfg.beta, 2001)
    mg = gam * math.sqrt(L / LL)
    return BoundCertificate(
        x_log=L,
        y=y,
        M1=M1,
        M2=M2,
        sigma1_log=sigma1,
        sigma2_log=sigma2,
        sigma3_log=sigma3,
        kappa_log=kappa,
        smooth_factor_log=smooth,
        total_log=smooth + kappa,
        sigma1_main=0.5 * L - L / (2 * M1),
        sigma2_main=0.5 * L + max(raw2) if raw2 else -math.inf,
        sigma2_gamma_main=float(0.5 * L + np.max(-L / (2 * mg) - (mg / 2) * logy)),
        sigma3_main=0.5 * L - M2 * logy / 2,
        c_balazard=cfg.c_balazard,
        heuristic=heuristic,
        notes=notes,
    )


def envelope_sweep(x_min: float, x_max: float, points: int, cfg: EnvelopeConfig | None = None) -> list[dict]:
    """``lower/upper`` envelopes and the rho-based lower estimate on a log grid."""
    cfg = cfg or EnvelopeConfig()
    if not math.e**math.e < x_min <= x_max or points < 1:
        raise DomainError("need e^e < x_min <= x_max and points >= 1")
    rows = []
    for lx in np.linspace(math.log(x_min), math.log(x_max), points):
        lx = float(lx)
        rows.append(
            {
                "x": math.exp(lx),
                "lower_log": lower_envelope(log_x=lx, cfg=cfg),
                "upper_log": upper_envelope(log_x=lx, cfg=cfg),
                "bretche_log": bretche_lower(log_x=lx, log_y=log_y_lower_choice(log_x=lx), cfg=cfg, warn=False),
            }
        )
    return rows


def write_sweep_csv(rows: list[dict], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "lower_log", "upper_log", "bretche_log"])
    for r in rows:
        w.writerow([repr(r["x"]), repr(r["lower_log"]), repr(r["upper_log"]), repr(r["bretche_log"])])


def plot_sweep(rows: list[dict], path) -> None:
    """Envelopes normalised by ``log sqrt(x)``; needs matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x = np.array([r["x"] for r in rows])
    half = 0.5 * np.log(x)
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, label in (("upper_log", "upper envelope"), ("lower_log", "lower envelope"), ("bretche_log", "rho estimate")):
        ax.plot(x, np.array([r[key] for r in rows]) - half, label=label)
    ax.set_xscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\log S - \frac{1}{2}\log x$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

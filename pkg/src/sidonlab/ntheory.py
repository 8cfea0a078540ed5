"""
Prime sieving, factorization into exponent vectors and smooth/rough counting.

Everything here hangs off a :class:`PrimeTable`, a least-prime-factor sieve
up to some limit.  From it we derive, for every ``n <= limit``,

* ``Omega(n)``, the number of prime factors counted with multiplicity,
* ``P^-(n)`` (the least prime factor) and ``P^+(n)`` (the largest),

and then count the sets

    R(x, y, m) = {n <= x : P^-(n) > y, Omega(n) = m}
    Phi(x, y, M) = sum_{m >= M} |R(x, y, m)|

exactly by enumeration.  ``n = 1`` is treated as y-rough for every y
(``P^-(1) = +inf``) and as y-smooth (``P^+(1) = 1``).
"""

from __future__ import annotations

import csv
import math
import os
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import BoundOverflowWarning, DomainError

__all__ = [
    "PrimeTable",
    "Factorization",
    "RoughCountTable",
    "BalazardCalibration",
    "sieve_primes",
    "load_or_sieve",
    "factor",
    "count_R",
    "rough_count_table",
    "rough_count_profile",
    "phi_exact",
    "log_balazard_bound",
    "balazard_bound",
    "calibrate_balazard",
    "smooth_count",
    "log_smooth_count_bound",
    "smooth_count_bound",
    "write_count_csv",
    "DESK_GRID",
]

# log(float max); anything above overflows exp().
_LOG_FLOAT_MAX = math.log(np.finfo(np.float64).max)

SIEVE_MAX = 10**8

# Grid over which the constant in the Balazard-type bound is calibrated.
DESK_GRID = {"x_max": 10**5, "ys": (2, 3, 5, 7, 11, 13), "M_max": 16}


class PrimeTable:
    """Least-prime-factor sieve up to ``limit``.

    ``lpf[n]`` is the least prime factor of ``n`` for ``2 <= n <= limit``;
    ``lpf[0] = 0`` and ``lpf[1] = 1`` are placeholders.  The derived arrays
    ``omega`` and ``p_plus`` are built on first access.

    Instances are never mutated after construction, so concurrent reads are
    safe.
    """

    def __init__(self, limit: int, lpf: np.ndarray):
        self.limit = int(limit)
        lpf = np.asarray(lpf, dtype=np.uint32)
        lpf.setflags(write=False)
        self.lpf = lpf
        idx = np.arange(lpf.size, dtype=np.int64)
        primes = idx[2:][lpf[2:] == idx[2:]]
        primes.setflags(write=False)
        self.primes = primes
        self._omega: np.ndarray | None = None
        self._p_plus: np.ndarray | None = None

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, pi={self.pi()})"

    def __len__(self) -> int:
        return len(self.primes)

    def pi(self, y: float | None = None) -> int:
        """Prime counting function; ``pi()`` is ``pi(limit)``."""
        if y is None:
            return len(self.primes)
        if y > self.limit:
            raise DomainError(f"pi({y}) needs a sieve past its limit {self.limit}")
        return int(np.searchsorted(self.primes, math.floor(y), side="right"))

    def smallest_factor(self, n: int) -> int:
        if not 2 <= n <= self.limit:
            raise DomainError(f"smallest_factor needs 2 <= n <= {self.limit}, got {n}")
        return int(self.lpf[n])

    def prime_index(self, p: int) -> int:
        """0-based index ``j`` with ``primes[j] == p``."""
        j = int(np.searchsorted(self.primes, p))
        if j >= len(self.primes) or self.primes[j] != p:
            raise DomainError(f"{p} is not a prime <= {self.limit}")
        return j

    @property
    def omega(self) -> np.ndarray:
        """``omega[n] = Omega(n)`` for ``0 <= n <= limit`` (``omega[0]`` is 0)."""
        if self._omega is None:
            self._omega, self._p_plus = self._strip_factors()
        return self._omega

    @property
    def p_plus(self) -> np.ndarray:
        """``p_plus[n] = P^+(n)`` with ``P^+(1) = 1`` (``p_plus[0]`` is 0)."""
        if self._p_plus is None:
            self._omega, self._p_plus = self._strip_factors()
        return self._p_plus

    def _strip_factors(self) -> tuple[np.ndarray, np.ndarray]:
        work = np.arange(self.limit + 1, dtype=np.int64)
        omega = np.zeros(self.limit + 1, dtype=np.int16)
        pmax = np.ones(self.limit + 1, dtype=np.int64)
        pmax[0] = 0
        active = np.nonzero(work > 1)[0]
        while active.size:
            p = self.lpf[work[active]].astype(np.int64)
            omega[active] += 1
            # stripped primes come out in nondecreasing order
            pmax[active] = p
            work[active] //= p
            active = active[work[active] > 1]
        omega.setflags(write=False)
        pmax.setflags(write=False)
        return omega, pmax

    def rough_mask(self, x: int, y: float) -> np.ndarray:
        """Boolean mask over ``n = 1..x`` of the y-rough integers."""
        self._check_x(x)
        mask = self.lpf[1 : x + 1] > y
        mask[0] = True
        return mask

    def smooth_mask(self, x: int, y: float) -> np.ndarray:
        """Boolean mask over ``n = 1..x`` of the y-smooth integers."""
        self._check_x(x)
        return self.p_plus[1 : x + 1] <= y

    def _check_x(self, x: int) -> None:
        if not 1 <= x <= self.limit:
            raise DomainError(f"x must satisfy 1 <= x <= {self.limit}, got {x}")


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of ``n`` as an exponent vector.

    ``alpha`` lists ``(j, alpha_j)`` pairs with ``j`` the 0-based index of
    the prime in the table, so ``n = prod primes[j] ** alpha_j``.
    """

    n: int
    alpha: tuple[tuple[int, int], ...]
    primes: tuple[int, ...]
    omega: int
    p_plus: int
    p_minus: float

    @property
    def powers(self) -> dict[int, int]:
        """``{p: exponent}`` keyed by the prime itself."""
        return {p: e for p, (_, e) in zip(self.primes, self.alpha)}

    @property
    def squarefree(self) -> bool:
        return all(e == 1 for _, e in self.alpha)

    def value(self) -> int:
        return math.prod(p**e for p, (_, e) in zip(self.primes, self.alpha))


@dataclass
class RoughCountTable:
    """``counts[m] = |R(x, y, m)|`` for every ``m`` that occurs."""

    x: int
    y: int
    counts: dict[int, int]
    members: dict[int, list[int]] | None = field(default=None, repr=False)

    def total(self) -> int:
        return sum(self.counts.values())

    def rows(self) -> list[tuple[int, int, int, int]]:
        return [(self.x, self.y, m, c) for m, c in sorted(self.counts.items())]


def sieve_primes(limit: int) -> PrimeTable:
    """Least-prime-factor sieve of Eratosthenes up to ``limit``."""
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > SIEVE_MAX:
        raise DomainError(f"sieve limit {limit} exceeds the supported maximum {SIEVE_MAX}")
    lpf = np.zeros(limit + 1, dtype=np.uint32)
    lpf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if lpf[p]:
            continue
        lpf[p] = p
        tail = lpf[p * p :: p]
        tail[tail == 0] = p
    rest = np.nonzero(lpf == 0)[0]
    rest = rest[rest >= 2]
    lpf[rest] = rest
    return PrimeTable(limit, lpf)


# Cache file layout: magic, format version, bytes per entry, limit; then the
# packed little-endian least-prime-factor array for n = 0..limit.
_CACHE_MAGIC = b"SDLBSIEV"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<8sHHQ")


def _cache_path(limit: int, cache_dir: str | os.PathLike) -> Path:
    return Path(cache_dir) / f"sieve-{limit}.bin"


def save_table(table: PrimeTable, cache_dir: str | os.PathLike) -> Path:
    path = _cache_path(table.limit, cache_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, 4, table.limit))
        fh.write(table.lpf.astype("<u4").tobytes())
    os.replace(tmp, path)
    return path


def load_table(path: str | os.PathLike) -> PrimeTable:
    with open(path, "rb") as fh:
        head = fh.read(_CACHE_HEADER.size)
        if len(head) != _CACHE_HEADER.size:
            raise ValueError(f"{path}: truncated sieve cache header")
        magic, version, width, limit = _CACHE_HEADER.unpack(head)
        if magic != _CACHE_MAGIC or version != _CACHE_VERSION or width != 4:
            raise ValueError(f"{path}: unrecognised sieve cache (version {version})")
        lpf = np.frombuffer(fh.read(), dtype="<u4")
    if lpf.size != limit + 1:
        raise ValueError(f"{path}: expected {limit + 1} entries, found {lpf.size}")
    return PrimeTable(limit, lpf.astype(np.uint32))


def load_or_sieve(limit: int, cache_dir: str | os.PathLike | None = None) -> PrimeTable:
    """Sieve up to ``limit``, reusing ``<cache_dir>/sieve-<limit>.bin`` if present."""
    if cache_dir is None:
        return sieve_primes(limit)
    path = _cache_path(limit, cache_dir)
    if path.exists():
        try:
            return load_table(path)
        except ValueError as exc:
            warnings.warn(f"ignoring unreadable sieve cache: {exc}", stacklevel=2)
    table = sieve_primes(limit)
    try:
        save_table(table, cache_dir)
    except OSError as exc:
        warnings.warn(f"could not write sieve cache: {exc}", stacklevel=2)
    return table


def factor(n: int, table: PrimeTable) -> Factorization:
    """Factor ``1 <= n <= table.limit`` by repeated least-prime-factor lookups."""
    if not 1 <= n <= table.limit:
        raise DomainError(f"factor needs 1 <= n <= {table.limit}, got {n}")
    powers: dict[int, int] = {}
    rest = int(n)
    while rest > 1:
        p = int(table.lpf[rest])
        powers[p] = powers.get(p, 0) + 1
        rest //= p
    primes = tuple(sorted(powers))
    alpha = tuple((table.prime_index(p), powers[p]) for p in primes)
    return Factorization(
        n=int(n),
        alpha=alpha,
        primes=primes,
        omega=sum(powers.values()),
        p_plus=primes[-1] if primes else 1,
        p_minus=primes[0] if primes else math.inf,
    )


def _check_xy(x: int, y: float, table: PrimeTable) -> None:
    if x < 2 or y < 2:
        raise DomainError(f"need x >= 2 and y >= 2, got x={x}, y={y}")
    if x > table.limit:
        raise DomainError(f"x={x} exceeds the sieve limit {table.limit}")


def count_R(x: int, y: int, m: int, table: PrimeTable) -> int:
    """``|R(x, y, m)|``: y-rough ``n <= x`` with exactly ``m`` prime factors."""
    _check_xy(x, y, table)
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    rough = table.rough_mask(x, y)
    return int(np.count_nonzero(rough & (table.omega[1 : x + 1] == m)))


def rough_count_table(x: int, y: int, table: PrimeTable, members: bool = False) -> RoughCountTable:
    """All nonzero ``|R(x, y, m)|`` at once, optionally with member lists."""
    _check_xy(x, y, table)
    n = np.nonzero(table.rough_mask(x, y))[0] + 1
    om = table.omega[n]
    ms, cs = np.unique(om, return_counts=True)
    counts = {int(m): int(c) for m, c in zip(ms, cs)}
    lists = None
    if members:
        lists = {int(m): n[om == m].tolist() for m in ms}
    return RoughCountTable(x=x, y=y, counts=counts, members=lists)


def rough_count_profile(x_max: int, y: int, table: PrimeTable) -> np.ndarray:
    """Cumulative table ``P[x, m] = |R(x, y, m)|`` for ``0 <= x <= x_max``.

    Row 0 is all zeros; columns run over ``m = 0..max Omega``.
    """
    _check_xy(x_max, y, table)
    om = table.omega[1 : x_max + 1].astype(np.int64)
    rough = table.rough_mask(x_max, y)
    width = int(om.max()) + 1
    onehot = np.zeros((x_max + 1, width), dtype=np.int64)
    rows = np.nonzero(rough)[0]
    onehot[rows + 1, om[rows]] = 1
    return np.cumsum(onehot, axis=0)


def phi_exact(x: int, y: int, M: float, table: PrimeTable) -> int:
    """``Phi(x, y, M)``: y-rough ``n <= x`` with at least ``M`` prime factors."""
    _check_xy(x, y, table)
    if M < 0:
        raise DomainError(f"M must be >= 0, got {M}")
    rough = table.rough_mask(x, y)
    return int(np.count_nonzero(rough & (table.omega[1 : x + 1] >= M)))


def log_balazard_bound(x: float, y: float, M: float, c: float) -> float:
    """Natural log of ``(x / y**M) * (log x)**y * exp(c*y)``."""
    if not x >= y >= 2:
        raise DomainError(f"need x >= y >= 2, got x={x}, y={y}")
    if M < 0 or c < 0:
        raise DomainError(f"need M >= 0 and c >= 0, got M={M}, c={c}")
    return math.log(x) - M * math.log(y) + y * math.log(math.log(x)) + c * y


def _exp_or_flag(log_value: float, what: str) -> float:
    if log_value > _LOG_FLOAT_MAX:
        warnings.warn(
            f"{what} overflows float64 (log value {log_value:.6g}); returning inf",
            BoundOverflowWarning,
            stacklevel=3,
        )
        return math.inf
    return math.exp(log_value)


def balazard_bound(x: float, y: float, M: float, c: float) -> float:
    """Upper bound ``(x / y**M) (log x)**y e**(c y)`` for ``Phi(x, y, M)``.

    Evaluated in log-space.  If the result does not fit in a float64 the
    function returns ``inf`` and emits :class:`BoundOverflowWarning`.
    """
    return _exp_or_flag(log_balazard_bound(x, y, M, c), "balazard_bound")


@dataclass(frozen=True)
class BalazardCalibration:
    c_star: float
    c_required: float
    worst: tuple[int, int, int]
    x_max: int
    ys: tuple[int, ...]
    M_max: int
    violations: int


def calibrate_balazard(
    table: PrimeTable,
    x_max: int = DESK_GRID["x_max"],
    ys: Sequence[int] = DESK_GRID["ys"],
    M_max: int = DESK_GRID["M_max"],
    decimals: int = 2,
) -> BalazardCalibration:
    """Smallest ``c`` (rounded up to ``decimals`` places) for which
    ``phi_exact(x, y, M) <= balazard_bound(x, y, M, c)`` on the whole grid
    ``y <= x <= x_max``, ``y in ys``, ``0 <= M <= M_max``.

    For fixed ``(y, M)`` the bound is monotone in ``c``, so each grid point
    imposes ``c >= (log Phi - log x + M log y - y loglog x) / y`` whenever
    ``Phi > 0``; the answer is the maximum of these requirements.
    """
    if x_max > table.limit:
        raise DomainError(f"x_max={x_max} exceeds the sieve limit {table.limit}")
    xs = np.arange(x_max + 1, dtype=np.float64)
    need = -math.inf
    worst = (0, 0, 0)
    for y in ys:
        prof = rough_count_profile(x_max, y, table)
        # tail[x, M] = Phi(x, y, M)
        tail = np.cumsum(prof[:, ::-1], axis=1)[:, ::-1]
        lo = int(y)
        logx = np.log(xs[lo:])
        loglogx = np.log(logx)
        for M in range(M_max + 1):
            phi = tail[lo:, M] if M < tail.shape[1] else np.zeros(x_max + 1 - lo)
            ok = phi > 0
            if not ok.any():
                continue
            req = (np.log(phi[ok]) - logx[ok] + M * math.log(y) - y * loglogx[ok]) / y
            i = int(np.argmax(req))
            if req[i] > need:
                need = float(req[i])
                worst = (int(np.nonzero(ok)[0][i]) + lo, int(y), M)
    scale = 10**decimals
    c_star = max(0.0, math.ceil(need * scale - 1e-9) / scale)
    violations = _count_violations(table, x_max, ys, M_max, c_star)
    while violations:
        c_star = round(c_star + 1 / scale, decimals)
        violations = _count_violations(table, x_max, ys, M_max, c_star)
    return BalazardCalibration(
        c_star=c_star,
        c_required=need,
        worst=worst,
        x_max=x_max,
        ys=tuple(int(y) for y in ys),
        M_max=M_max,
        violations=violations,
    )


def _count_violations(table: PrimeTable, x_max: int, ys: Iterable[int], M_max: int, c: float) -> int:
    """Number of grid points where the exact count exceeds the bound."""
    bad = 0
    xs = np.arange(x_max + 1, dtype=np.float64)
    for y in ys:
        prof = rough_count_profile(x_max, y, table)
        tail = np.cumsum(prof[:, ::-1], axis=1)[:, ::-1]
        logx = np.log(xs[y:])
        for M in range(M_max + 1):
            if M >= tail.shape[1]:
                break
            bound = logx - M * math.log(y) + y * np.log(logx) + c * y
            phi = tail[y:, M]
            with np.errstate(divide="ignore"):
                bad += int(np.count_nonzero(np.log(phi) > bound))
    return bad


def smooth_count(x: int, y: float, table: PrimeTable) -> int:
    """``Psi(x, y)``: the number of y-smooth ``n <= x`` (``n = 1`` included)."""
    if x < 1 or y < 2:
        raise DomainError(f"need x >= 1 and y >= 2, got x={x}, y={y}")
    return int(np.count_nonzero(table.smooth_mask(x, y)))


def log_smooth_count_bound(x: float, y: float, table: PrimeTable) -> float:
    """``pi(y) * log(1 + log x / log 2)``."""
    if not x >= y >= 2:
        raise DomainError(f"need x >= y >= 2, got x={x}, y={y}")
    return table.pi(y) * math.log1p(math.log(x) / math.log(2))


def smooth_count_bound(x: float, y: float, table: PrimeTable) -> float:
    """Crude bound ``(1 + log x / log 2) ** pi(y)`` on the y-smooth count.

    Each of the ``pi(y)`` primes carries an exponent in ``[0, log2 x]``.
    """
    return _exp_or_flag(log_smooth_count_bound(x, y, table), "smooth_count_bound")


def write_count_csv(rows: Iterable[Sequence[int]], fh: IO[str]) -> None:
    """Write ``(x, y, m, count)`` rows with a header line."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "y", "m", "count"])
    for row in rows:
        w.writerow(row)

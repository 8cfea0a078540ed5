"""
Runtime settings for the command line.

Settings come from three layers, later ones winning: a flat ``key = value``
file, command-line flags, then ``SIDONLAB_<KEY>`` environment variables.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .bounds import C_BALAZARD_DESK, EnvelopeConfig
from .errors import DomainError

__all__ = ["Config", "load_config", "parse_config_text", "default_cache_dir"]

ENV_PREFIX = "SIDONLAB_"


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "sidonlab"


@dataclass(frozen=True)
class Config:
    cache_dir: Path = dataclasses.field(default_factory=default_cache_dir)
    seed: int = 0
    margin_tol: float = 1e-9
    rho_tol: float = 1e-8
    c_lower: float = 0.0
    c_upper: float = 0.0
    c_balazard: float = C_BALAZARD_DESK
    sidon_budget: int = 2000
    oracle_grid: int = 720
    line_T: float = 1e4

    def __post_init__(self):
        if self.margin_tol <= 0 or self.rho_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.sidon_budget < 1 or self.oracle_grid < 1:
            raise DomainError("search sizes must be positive")

    def envelope(self) -> EnvelopeConfig:
        return EnvelopeConfig(C_lower=self.c_lower, C_upper=self.c_upper, c_balazard=self.c_balazard)

    def writable_cache(self) -> Path | None:
        """The cache directory, or None if it cannot be created or written."""
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        except OSError:
            return None
        return self.cache_dir if os.access(self.cache_dir, os.W_OK) else None


_FIELDS = {f.name: f for f in dataclasses.fields(Config)}


def _coerce(key: str, raw) -> object:
    if key not in _FIELDS:
        raise DomainError(f"unknown config key {key!r}")
    default = _FIELDS[key].default
    if key == "cache_dir":
        return Path(raw).expanduser()
    try:
        return type(default)(raw)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"config key {key!r}: cannot parse {raw!r}") from exc


def parse_config_text(text: str) -> dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DomainError(f"config line {lineno}: expected key = value")
        key = key.strip().lower().replace("-", "_")
        out[key] = _coerce(key, value.strip())
    return out


def load_config(
    path: str | os.PathLike | None = None,
    flags: Mapping[str, object] | None = None,
    env: Mapping[str, str] | None = None,
) -> Config:
    env = os.environ if env is None else env
    values: dict[str, object] = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    for key, v in (flags or {}).items():
        if v is not None:
            values[key] = _coerce(key, v)
    for key in _FIELDS:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None and raw != "":
            values[key] = _coerce(key, raw)
    return Config(**values)

"""
Command line entry point: ``sidonlab <subcommand> [options]``.

Results go to stdout as JSON (sorted keys) or CSV.  Exit codes: 0 success,
2 a violated precondition, 64 unknown subcommand, 65 malformed JSON input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import asdict
from typing import Callable, Sequence

from . import bounds, dickman, dirichlet, inequalities, ntheory, sidon
from .config import ENV_PREFIX, Config, load_config
from .dirichlet import PolynomialFormatError
from .errors import DomainError

__all__ = ["main", "run", "SUBCOMMANDS", "EXIT_OK", "EXIT_DOMAIN", "EXIT_USAGE", "EXIT_DATA"]

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_DATA = 0, 2, 64, 65

MIN_SIEVE = 1 << 16


class _JSONInputError(Exception):
    pass


def _clean(obj):
    """Make ``obj`` strict-JSON safe: non-finite floats become null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    return obj


def _emit(out, obj, as_csv: bool) -> None:
    if not as_csv:
        out.write(json.dumps(_clean(obj), sort_keys=True, allow_nan=False) + "\n")
        return
    rows = obj if isinstance(obj, list) else [obj]
    rows = [_clean(r) for r in rows]
    header = sorted({k for r in rows for k in r})
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        cells = []
        for k in header:
            v = r.get(k)
            cells.append(json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else ("" if v is None else v))
        w.writerow(cells)


def _read_json_file(path: str, reader: Callable):
    try:
        fh = sys.stdin if path == "-" else open(path)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise _JSONInputError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return reader(obj)
    except PolynomialFormatError as exc:
        raise _JSONInputError(f"{path}: {exc}") from exc


def _table(cfg: Config, n: int) -> ntheory.PrimeTable:
    return ntheory.load_or_sieve(max(int(n), MIN_SIEVE), cfg.writable_cache())


def _support(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise DomainError(f"support must be comma-separated integers, got {text!r}") from exc


# --------------------------------------------------------------------------
# subcommands; each returns a JSON-able object or writes CSV itself


def cmd_sieve(a, cfg, out):
    cache = cfg.writable_cache()
    table = ntheory.load_or_sieve(a.limit, cache)
    return {
        "limit": table.limit,
        "pi": table.pi(a.limit),
        "cache": str(cache / f"sieve-{table.limit}.bin") if cache else None,
    }


def cmd_count_r(a, cfg, out):
    table = _table(cfg, a.x)
    if a.m is not None:
        res = {"x": a.x, "y": a.y, "m": a.m, "count": ntheory.count_R(a.x, a.y, a.m, table)}
        if a.members:
            t = ntheory.rough_count_table(a.x, a.y, table, members=True)
            res["members"] = (t.members or {}).get(a.m, [])
        return res
    t = ntheory.rough_count_table(a.x, a.y, table, members=a.members)
    if a.csv:
        ntheory.write_count_csv(t.rows(), out)
        return None
    res = {"x": a.x, "y": a.y, "counts": {str(m): c for m, c in sorted(t.counts.items())}, "total": t.total()}
    if a.members:
        res["members"] = {str(m): v for m, v in sorted(t.members.items())}
    return res


def cmd_phi(a, cfg, out):
    return {"phi": ntheory.phi_exact(a.x, a.y, a.m, _table(cfg, a.x))}


def cmd_smooth(a, cfg, out):
    table = _table(cfg, a.x)
    return {
        "x": a.x,
        "y": a.y,
        "count": ntheory.smooth_count(a.x, a.y, table),
        "bound": ntheory.smooth_count_bound(a.x, a.y, table),
        "log_bound": ntheory.log_smooth_count_bound(a.x, a.y, table),
    }


def cmd_dickman(a, cfg, out):
    if a.table:
        dickman.write_rho_csv(a.max, out, step=a.step)
        return None
    if a.u is None:
        raise DomainError("dickman needs --u or --table")
    return {"u": a.u, "rho": dickman.rho(a.u)}


def cmd_lift(a, cfg, out):
    if a.inverse:
        F = _read_json_file(a.file, dirichlet.BohrPolynomial.from_json)
        table = _table(cfg, F.x or 2)
        return dirichlet.inverse_lift(F, table, F.x).to_json()
    f = _read_json_file(a.file, dirichlet.DirichletPolynomial.from_json)
    table = _table(cfg, f.x)
    res = dirichlet.bohr_lift(f, table).to_json()
    res["primes"] = [int(p) for p in table.primes[: res["k"]]]
    return res


def cmd_norms(a, cfg, out):
    f = _read_json_file(a.file, dirichlet.DirichletPolynomial.from_json)
    which = ["l1", "l2", "line", "torus"] if a.which == "all" else [a.which]
    res = {}
    if "l1" in which:
        res["l1"] = dirichlet.l1_norm(f)
    if "l2" in which:
        res["l2"] = dirichlet.l2_norm(f)
    if "line" in which:
        res["line"] = dirichlet.sup_norm_line(f, T=cfg.line_T).to_dict()
    if "torus" in which:
        res["torus"] = dirichlet.sup_norm(f, _table(cfg, f.x)).to_dict()
    return res


def cmd_bh_check(a, cfg, out):
    f = _read_json_file(a.file, dirichlet.DirichletPolynomial.from_json)
    rep = inequalities.check_bh_dirichlet(f, a.m, _table(cfg, f.x), tol=cfg.margin_tol)
    return rep.to_dict()


def cmd_bh_fuzz(a, cfg, out):
    reports = inequalities.bh_fuzz(cfg.seed, a.count, _table(cfg, a.x_max), x_max=a.x_max)
    if a.json:
        return [r.to_dict() for r in reports]
    inequalities.write_fuzz_csv(reports, out)
    return None


def cmd_bounds(a, cfg, out):
    rows = bounds.envelope_sweep(a.x_min, a.x_max, a.points, cfg.envelope())
    if a.json:
        payload = rows
    else:
        bounds.write_sweep_csv(rows, out)
        payload = None
    if a.plot:
        try:
            bounds.plot_sweep(rows, a.plot)
        except Exception as exc:  # plots are optional
            warnings.warn(f"plot skipped ({type(exc).__name__}: {exc})", RuntimeWarning)
    return payload


def cmd_certificate(a, cfg, out):
    if (a.x is None) == (a.log_x is None):
        raise DomainError("give exactly one of --x and --log-x")
    if a.x is not None and a.x <= 1:
        raise DomainError(f"x must exceed 1, got {a.x}")
    log_x = a.log_x if a.log_x is not None else math.log(a.x)
    return bounds.certificate(cfg=cfg.envelope(), y=a.y, log_x=log_x).to_dict()


def cmd_sidon(a, cfg, out):
    inst = sidon.SidonInstance(_support(a.support), a.kind)
    table = _table(cfg, inst.x) if inst.kind == "dirichlet" else None
    return sidon.sidon_search(inst, budget=cfg.sidon_budget, seed=cfg.seed, table=table, mode=a.mode).to_json()


def cmd_sidon_oracle(a, cfg, out):
    inst = sidon.SidonInstance(_support(a.support), a.kind)
    grid = cfg.oracle_grid
    table = _table(cfg, inst.x) if inst.kind == "dirichlet" else None
    return {"support": list(inst.support), "kind": inst.kind, "grid": grid, "bound": sidon.sidon_oracle_small(inst, grid, table)}


def cmd_calibrate(a, cfg, out):
    ys = _support(a.ys)
    cal = ntheory.calibrate_balazard(_table(cfg, a.x_max), x_max=a.x_max, ys=ys, M_max=a.m_max)
    return asdict(cal)


# --------------------------------------------------------------------------


def _parser() -> tuple[argparse.ArgumentParser, dict[str, Callable]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--cache-dir", help="directory for sieve caches")
    common.add_argument("--csv", action="store_true", help="CSV instead of JSON")

    p = argparse.ArgumentParser(prog="sidonlab", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    handlers = {}

    def add(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        handlers[name] = fn
        return sp

    s = add("sieve", cmd_sieve, "build or load a cached least-prime-factor table")
    s.add_argument("--limit", type=int, required=True)

    s = add("count-r", cmd_count_r, "count y-rough n <= x by number of prime factors")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--members", action="store_true")

    s = add("phi", cmd_phi, "y-rough n <= x with at least M prime factors")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)
    s.add_argument("--m", type=int, required=True)

    s = add("smooth", cmd_smooth, "count y-smooth n <= x and the exponent-box bound")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)

    s = add("dickman", cmd_dickman, "Dickman's function")
    s.add_argument("--u", type=float)
    s.add_argument("--table", action="store_true")
    s.add_argument("--max", type=float, default=10.0)
    s.add_argument("--step", type=float, default=0.01)

    s = add("lift", cmd_lift, "Bohr lift of a Dirichlet polynomial (or its inverse)")
    s.add_argument("--file", required=True)
    s.add_argument("--inverse", action="store_true")

    s = add("norms", cmd_norms, "coefficient and sup norms")
    s.add_argument("--file", required=True)
    s.add_argument("--which", choices=["l1", "l2", "line", "torus", "all"], default="all")

    s = add("bh-check", cmd_bh_check, "check the homogeneous-part coefficient inequality")
    s.add_argument("--file", required=True)
    s.add_argument("--m", type=int, required=True)

    s = add("bh-fuzz", cmd_bh_fuzz, "randomized coefficient-inequality checks (CSV)")
    s.add_argument("--seed", type=int)
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--x-max", type=int, default=50)
    s.add_argument("--json", action="store_true")

    s = add("bounds", cmd_bounds, "upper/lower envelope sweep (CSV)")
    s.add_argument("--x-min", type=float, default=1e3)
    s.add_argument("--x-max", type=float, default=1e12)
    s.add_argument("--points", type=int, default=50)
    s.add_argument("--c-lower", type=float)
    s.add_argument("--c-upper", type=float)
    s.add_argument("--plot", help="also write a plot to this path")
    s.add_argument("--json", action="store_true")

    s = add("certificate", cmd_certificate, "assembled regime bound at one x")
    s.add_argument("--x", type=float)
    s.add_argument("--log-x", type=float)
    s.add_argument("--y", type=float)

    for name, fn, help in (
        ("sidon", cmd_sidon, "certified Sidon-constant lower bound by search"),
        ("sidon-oracle", cmd_sidon_oracle, "brute-force Sidon lower bound for tiny supports"),
    ):
        s = add(name, fn, help)
        s.add_argument("--support", required=True, help="comma-separated, e.g. 1,2,4")
        s.add_argument("--kind", choices=["dirichlet", "integer"], default="dirichlet")
        if name == "sidon":
            s.add_argument("--budget", type=int)
            s.add_argument("--seed", type=int)
            s.add_argument("--mode", choices=["random", "smooth"], default="random")
        else:
            s.add_argument("--grid", type=int)

    s = add("calibrate-balazard", cmd_calibrate, "smallest constant validating the rough-count bound")
    s.add_argument("--x-max", type=int, default=ntheory.DESK_GRID["x_max"])
    s.add_argument("--ys", default=",".join(str(y) for y in ntheory.DESK_GRID["ys"]))
    s.add_argument("--m-max", type=int, default=ntheory.DESK_GRID["M_max"])
    return p, handlers


SUBCOMMANDS = tuple(_parser()[1])


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(argv)
    if argv and not argv[0].startswith("-") and argv[0] not in SUBCOMMANDS:
        print(f"sidonlab: unknown subcommand {argv[0]!r} (choose from {', '.join(SUBCOMMANDS)})", file=err)
        return EXIT_USAGE
    parser, handlers = _parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error already reported by argparse
        return int(exc.code or 0)
    # flag name -> config key; env vars still win over these
    flags = {"cache_dir": a.cache_dir}
    for attr, key in (("c_lower", "c_lower"), ("c_upper", "c_upper"), ("seed", "seed"), ("budget", "sidon_budget"), ("grid", "oracle_grid")):
        flags[key] = getattr(a, attr, None)
    try:
        cfg = load_config(a.config or os.environ.get(ENV_PREFIX + "CONFIG") or None, flags)
        buf = io.StringIO()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                result = handlers[a.command](a, cfg, buf)
            finally:
                for w in caught:
                    print(f"warning: {w.message}", file=err)
        if result is not None:
            _emit(buf, result, a.csv)
        out.write(buf.getvalue())
    except _JSONInputError as exc:
        print(f"sidonlab {a.command}: malformed input: {exc}", file=err)
        return EXIT_DATA
    except (DomainError, OSError) as exc:
        print(f"sidonlab {a.command}: {exc}", file=err)
        return EXIT_DOMAIN
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: spectra, thermodynamic tables, claim checks, game demos.

Configuration comes from flags, optionally layered over a flat key=value
config file (flags win). Relative output paths are resolved against
QCGIBBS_OUTDIR when set; QCGIBBS_THREADS > 1 parallelizes grid evaluation
(output order stays fixed by grid index). Exit codes: 0 success, 2 usage or
validation, 3 numerical failure (truncation, quadrature, accuracy), 4 a
theorem-class claim reported Violated.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import game as game_mod
from .ensemble import (
    THERMO_FIELDS,
    thermo_point,
    thermo_table_to_json,
)
from .errors import (
    AccuracyError,
    ContractError,
    ConvergenceError,
    IntegrabilityError,
    QCGibbsError,
    ResourceError,
    TailModelError,
    TruncationError,
)
from .models import (
    ModelFamily,
    box_family,
    homogeneous_family,
    tabulated_family,
)
from .potential import load_tabulated_csv
from .spectrum import solve_box, solve_fd_1d, spectrum_to_csv
from .util import fmt17, log_grid
from .verify import (
    THEOREM_CLAIMS,
    CLAIM_CHECKS,
    Status,
    reports_to_json,
    run_claims,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_VIOLATED = 4

_NUMERICAL_ERRORS = (
    TruncationError,
    AccuracyError,
    IntegrabilityError,
    TailModelError,
    ResourceError,
    ConvergenceError,
    ContractError,
)


@dataclass
class RunConfig:
    """Declarative run description; round-trips through the flat config format."""

    model: str = "box"
    dimension: int = 1
    lengths: tuple[float, ...] = (1.0,)
    nu: float = 2.0
    mass: float = 1.0
    table: str | None = None
    beta: tuple[float, ...] = (1.0,)
    h: tuple[float, ...] = (1.0,)
    count: int = 10
    max_levels: int = 2_000_000
    tail_rtol: float = 1e-10
    format: str = "csv"
    output: str | None = None
    seed: int = 0

    def to_text(self) -> str:
        lines = [
            f"model = {self.model}",
            f"dimension = {self.dimension}",
            "lengths = " + ",".join(fmt17(x) for x in self.lengths),
            f"nu = {fmt17(self.nu)}",
            f"mass = {fmt17(self.mass)}",
        ]
        if self.table:
            lines.append(f"table = {self.table}")
        lines += [
            "beta = " + ",".join(fmt17(x) for x in self.beta),
            "h = " + ",".join(fmt17(x) for x in self.h),
            f"count = {self.count}",
            f"max_levels = {self.max_levels}",
            f"tail_rtol = {fmt17(self.tail_rtol)}",
            f"format = {self.format}",
            f"seed = {self.seed}",
        ]
        if self.output:
            lines.append(f"output = {self.output}")
        return "\n".join(lines) + "\n"


def parse_config(text: str) -> RunConfig:
    """Parse the flat key = value format (''#'' starts a comment line)."""
    cfg = RunConfig()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed config line: {raw!r}")
        key = key.strip()
        value = value.strip()
        if key == "model":
            cfg.model = value
        elif key == "dimension":
            cfg.dimension = int(value)
        elif key == "lengths":
            cfg.lengths = tuple(float(x) for x in value.split(","))
        elif key == "nu":
            cfg.nu = float(value)
        elif key == "mass":
            cfg.mass = float(value)
        elif key == "table":
            cfg.table = value
        elif key == "beta":
            cfg.beta = _parse_grid(value)
        elif key == "h":
            cfg.h = _parse_grid(value)
        elif key == "count":
            cfg.count = int(value)
        elif key == "max_levels":
            cfg.max_levels = int(value)
        elif key == "tail_rtol":
            cfg.tail_rtol = float(value)
        elif key == "format":
            cfg.format = value
        elif key == "output":
            cfg.output = value
        elif key == "seed":
            cfg.seed = int(value)
        else:
            raise ValueError(f"unknown config key: {key!r}")
    return cfg


def _parse_grid(text: str) -> tuple[float, ...]:
    """Either a comma list '0.5,1,2' or a log range 'lo:hi:per_decade'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"grid range must be lo:hi[:per_decade], got {text!r}")
        lo, hi = float(parts[0]), float(parts[1])
        per_decade = int(parts[2]) if len(parts) == 3 else 9
        return tuple(float(x) for x in log_grid(lo, hi, per_decade))
    return tuple(float(x) for x in text.split(","))


def _outdir() -> Path | None:
    env = os.environ.get("QCGIBBS_OUTDIR")
    return Path(env) if env else None


def _resolve_output(path_str: str | None) -> Path | None:
    if path_str is None:
        return None
    path = Path(path_str)
    base = _outdir()
    if base is not None and not path.is_absolute():
        return base / path
    return path


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QCGIBBS_THREADS", "1")))
    except ValueError:
        return 1


def _grid_map(fn, items):
    """Evaluate fn over items, optionally threaded, preserving order."""
    workers = _thread_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _build_family(cfg: RunConfig) -> ModelFamily:
    if cfg.model == "box":
        lengths = cfg.lengths
        if len(lengths) == 1 and cfg.dimension > 1:
            lengths = lengths * cfg.dimension
        if len(lengths) != cfg.dimension:
            raise ValueError("number of lengths must match the dimension N")
        fam = box_family(lengths, cfg.mass)
    elif cfg.model == "homogeneous":
        if cfg.nu <= 0.0:
            raise ValueError("exponent nu must be positive")
        fam = homogeneous_family(cfg.nu, cfg.mass)
    elif cfg.model == "tabulated":
        if not cfg.table:
            raise ValueError("tabulated model needs --table pointing at an x,V CSV")
        fam = tabulated_family(load_tabulated_csv(cfg.table, cfg.mass))
    else:
        raise ValueError(f"unknown model {cfg.model!r}; expected box, homogeneous, or tabulated")
    fam.level_cap = cfg.max_levels
    return fam


def _write_or_print(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(cfg: RunConfig) -> int:
    h = cfg.h[0]
    if cfg.model == "box":
        lengths = cfg.lengths if len(cfg.lengths) == cfg.dimension else cfg.lengths * cfg.dimension
        spec = solve_box(cfg.dimension, lengths, cfg.mass, h, cfg.count,
                         max_states=cfg.max_levels)
    else:
        fam = _build_family(cfg)
        if cfg.model == "homogeneous":
            base = fam.base_spectrum(lambda_min=45.0 / _homog_level_energy(fam, cfg.count))
            from .spectrum import rescale

            spec = rescale(base, h, fam.energy_exponent) if h != 1.0 else base
            spec = _truncate(spec, cfg.count)
        else:
            spec = solve_fd_1d(fam.potential, h, count=cfg.count, refinements=2)
    out = _resolve_output(cfg.output)
    if out is None:
        lines = [f"# h={fmt17(spec.planck)}", f"# source={spec.source.value}", "n,E"]
        lines += [f"{i},{fmt17(e)}" for i, e in enumerate(spec.levels[: cfg.count], start=1)]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        spectrum_to_csv(_truncate(spec, cfg.count), out)
    return EXIT_OK


def _homog_level_energy(fam: ModelFamily, count: int) -> float:
    """Rough energy of level `count` at h=1, used to size direct spectrum dumps."""
    from .spectrum import weyl_energy

    nu = fam.potential.exponent
    if nu == 2.0:
        return math.sqrt(2.0 / fam.potential.mass) * (count + 0.5)
    return weyl_energy(nu, fam.potential.mass, 1.0, count + 8)


def _truncate(spec, count: int):
    from .spectrum import Spectrum

    if spec.count <= count:
        return spec
    errs = None if spec.level_errors is None else spec.level_errors[:count]
    return Spectrum(spec.levels[:count], spec.planck, spec.source, level_errors=errs,
                    tail_model=spec.tail_model)


def cmd_table(cfg: RunConfig) -> int:
    fam = _build_family(cfg)
    try:
        lam_min = fam.lambda_min(cfg.beta, cfg.h)
    except ValueError:
        lam_min = float(min(cfg.beta))  # tabulated: no scaling law
    else:
        try:
            fam.base_spectrum(lam_min)  # warm the cache before thread fan-out
        except _NUMERICAL_ERRORS:
            pass  # rows will carry the failure in their status column
    points = [(float(b), float(h)) for b in cfg.beta for h in cfg.h]

    def one(bh):
        beta, h = bh
        try:
            spec = fam.spectrum(h, lam_min)
            return thermo_point(fam.potential, spec, beta, cfg.tail_rtol), "ok"
        except _NUMERICAL_ERRORS as exc:
            return None, f"error: {exc}"

    results = _grid_map(one, points)

    rows = []
    for (beta, h), (pt, status) in zip(points, results):
        if pt is None:
            rows.append([fmt17(beta), fmt17(h)] + ["nan"] * 6 + [status])
        else:
            sq_identity = pt.beta * pt.e_quantum + pt.log_z_quantum
            if abs(pt.s_quantum - sq_identity) > 1e-10 * max(1.0, abs(sq_identity)):
                rows.append([fmt17(beta), fmt17(h)] + ["nan"] * 6 + ["error: entropy identity"])
                continue
            vals = [pt.beta, pt.planck, pt.zq_scaled, pt.z_classical,
                    pt.e_quantum, pt.e_classical, pt.s_quantum, pt.s_classical]
            rows.append([fmt17(v) for v in vals] + ["ok"])
    any_failed = any(r[-1] != "ok" for r in rows)

    out = _resolve_output(cfg.output)
    if cfg.format == "json":
        if any_failed:
            payload = {"rows": [dict(zip(THERMO_FIELDS + ("status",),
                                         [_maybe_float(v) for v in r])) for r in rows]}
            text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        else:
            pts = [pt for pt, _ in results]
            text = thermo_table_to_json(pts) + "\n"
    else:
        header = ",".join(THERMO_FIELDS + (("status",) if any_failed else ()))
        body = [",".join(r if any_failed else r[:-1]) for r in rows]
        text = header + "\n" + "\n".join(body) + "\n"
    _write_or_print(text, out)
    return EXIT_NUMERICAL if any_failed else EXIT_OK


def _maybe_float(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def cmd_verify(cfg: RunConfig, claims: list[str]) -> int:
    for key in claims:
        if key not in CLAIM_CHECKS:
            raise ValueError(f"unknown claim id {key!r}; expected one of {sorted(CLAIM_CHECKS)}")
    fam = _build_family(cfg)
    overrides: dict = {}
    betas = np.asarray(cfg.beta) if len(cfg.beta) > 1 else None
    hs = np.asarray(cfg.h) if len(cfg.h) > 1 else None
    for key in claims:
        opts: dict = {}
        if key in ("c11", "c12", "t41"):
            if betas is not None:
                opts["betas"] = betas
            if hs is not None:
                opts["hs"] = hs
        elif key == "c13":
            opts["h"] = float(cfg.h[0])
            if betas is not None:
                opts["betas"] = betas
        elif key == "t31":
            opts["h"] = float(cfg.h[0])
            opts["beta"] = float(max(cfg.beta))
        elif key in ("c41", "wehrl"):
            opts["beta"] = float(cfg.beta[0])
            if hs is not None:
                opts["hs"] = hs
        if opts:
            overrides[key] = opts
    reports = run_claims(fam, claims, **overrides)
    text = reports_to_json(reports) + "\n"
    out = _resolve_output(cfg.output)
    _write_or_print(text, out)
    table_stream = sys.stdout if out is not None else sys.stderr
    for r in reports:
        table_stream.write(
            f"{r.claim_id.value:10s} {fam.label:20s} {r.status.value:13s} "
            f"margin={r.worst_margin:.6g} tol={r.tolerance:.3g}\n"
        )
    violated = any(
        r.status is Status.VIOLATED and r.claim_id in THEOREM_CLAIMS for r in reports
    )
    return EXIT_VIOLATED if violated else EXIT_OK


def cmd_game(args, cfg: RunConfig) -> int:
    if args.levels_file:
        levels = np.loadtxt(args.levels_file, ndmin=1)
    else:
        levels = np.asarray([float(x) for x in args.levels.split(",")])
    lam = args.lam
    if lam > 0:
        raise ValueError("lambda = -beta must be <= 0")
    weights = game_mod.stationary_point(levels, lam)
    state = game_mod.GameState(levels, lam, weights)
    f_val, e_val, s_val = game_mod.compromise(state)
    p = state.probabilities
    lines = ["n,P"]
    lines += [f"{i},{fmt17(pi)}" for i, pi in enumerate(p, start=1)]
    lines.append(f"F = {fmt17(f_val)}")
    lines.append(f"E = {fmt17(e_val)}")
    lines.append(f"S = {fmt17(s_val)}")
    if args.minors:
        if lam >= 0:
            raise ValueError("minor signs need lambda < 0")
        signs = game_mod.principal_minor_signs(levels, lam, args.minors)
        lines.append("minor_signs = " + ",".join("+" if s > 0 else "-" for s in signs))
    sys.stdout.write("\n".join(lines) + "\n")
    if args.ascend:
        rng = np.random.default_rng(cfg.seed)
        start = np.exp(rng.uniform(-1.0, 1.0, size=levels.size))
        result = game_mod.ascend(levels, lam, start)
        sys.stdout.write(f"ascent_iterations = {result.iterations}\n")
        out = _resolve_output(cfg.output)
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            game_mod.trace_to_csv(result.trace, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcgibbs",
        description="Quantum vs classical canonical ensembles: spectra, "
                    "thermodynamic tables, claim verification, and the "
                    "energy-entropy game.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--model", choices=("box", "homogeneous", "tabulated"))
        p.add_argument("--N", type=int, dest="dimension", help="coordinate dimension")
        p.add_argument("--L", help="comma list of box lengths")
        p.add_argument("--nu", type=float, help="power-law exponent")
        p.add_argument("--mass", type=float)
        p.add_argument("--table", help="x,V CSV for tabulated potentials")
        p.add_argument("--beta", help="comma list or lo:hi[:per_decade] log range")
        p.add_argument("--h", help="comma list or lo:hi[:per_decade] log range")
        p.add_argument("--count", type=int, help="number of levels")
        p.add_argument("--max-levels", type=int, dest="max_levels")
        p.add_argument("--tail-rtol", type=float, dest="tail_rtol")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--output", "-o")
        p.add_argument("--seed", type=int)

    p_spec = sub.add_parser("spectrum", help="write an n,E level table")
    add_model_flags(p_spec)

    p_table = sub.add_parser("table", help="thermodynamic table over a (beta, h) grid")
    add_model_flags(p_table)

    p_verify = sub.add_parser("verify", help="run claim checks and emit a JSON report")
    add_model_flags(p_verify)
    p_verify.add_argument("--claims", required=True,
                          help="comma list from: " + ",".join(sorted(CLAIM_CHECKS)))

    p_game = sub.add_parser("game", help="stationary distribution, minors, ascent trace")
    add_model_flags(p_game)
    p_game.add_argument("--levels", help="comma list of level energies")
    p_game.add_argument("--levels-file", help="file with one level per line")
    p_game.add_argument("--lambda", type=float, dest="lam", default=-1.0,
                        help="lambda = -beta <= 0")
    p_game.add_argument("--minors", type=int, default=0,
                        help="report minor signs up to this order")
    p_game.add_argument("--ascend", action="store_true",
                        help="run the gradient ascent from a random start")
    return parser


def _merge_config(args) -> RunConfig:
    if getattr(args, "config", None):
        cfg = parse_config(Path(args.config).read_text())
    else:
        cfg = RunConfig()
    if args.model is not None:
        cfg.model = args.model
    if args.dimension is not None:
        cfg.dimension = args.dimension
    if args.L is not None:
        cfg.lengths = tuple(float(x) for x in args.L.split(","))
    if args.nu is not None:
        cfg.nu = args.nu
    if args.mass is not None:
        cfg.mass = args.mass
    if args.table is not None:
        cfg.table = args.table
    if args.beta is not None:
        cfg.beta = _parse_grid(args.beta)
    if args.h is not None:
        cfg.h = _parse_grid(args.h)
    if args.count is not None:
        cfg.count = args.count
    if args.max_levels is not None:
        cfg.max_levels = args.max_levels
    if args.tail_rtol is not None:
        cfg.tail_rtol = args.tail_rtol
    if args.format is not None:
        cfg.format = args.format
    if args.output is not None:
        cfg.output = args.output
    if args.seed is not None:
        cfg.seed = args.seed
    # basic validation shared by every command
    if cfg.tail_rtol <= 0.0:
        raise ValueError("tail_rtol must be positive")
    if not cfg.beta or not cfg.h:
        raise ValueError("grids must be non-empty")
    if any(b <= 0 for b in cfg.beta) or any(x <= 0 for x in cfg.h):
        raise ValueError("beta and h grid values must be positive")
    if cfg.count < 1:
        raise ValueError("count must be at least 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = _merge_config(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "table":
            return cmd_table(cfg)
        if args.command == "verify":
            claims = [c.strip() for c in args.claims.split(",") if c.strip()]
            return cmd_verify(cfg, claims)
        if args.command == "game":
            if not args.levels and not args.levels_file:
                raise ValueError("game needs --levels or --levels-file")
            return cmd_game(args, cfg)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QCGibbsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())

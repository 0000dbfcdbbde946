"""Command-line driver: ``activeflux {run,converge,cfl1d,region2d}``.

Settings come from flags and optionally a ``key=value`` file given with
``--config``; flags win over file entries. Exit codes: 0 success, 1 bad
configuration, 2 numerical abort.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import io
from .limiter import PositivityError
from .operators import SchemeVariant
from .problems import PROBLEM_IDS, convergence_study, get_problem, run_problem
from .stability import max_cfl_1d, stability_region_2d
from .timestepping import InstabilityError, RkScheme

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("run", "converge", "cfl1d", "region2d")
PME_PROBLEMS = {"barenblatt", "two_boxes_equal", "two_boxes_unequal", "waiting_time", "two_hills"}
CONFIG_KEYS = {
    "problem", "m", "n", "ny", "cfl", "tfinal", "variant", "rk", "limiter", "snapshots", "out",
    "meshes", "samples",
}


# any DoF beyond this magnitude counts as a blow-up (all shipped data are O(10))
DIVERGENCE_BOUND = 1e6


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    problem: str | None = None
    m: int | None = None
    n: int | None = None
    n_y: int | None = None
    cfl: float | None = None
    t_final: float | None = None
    variant: str = "central4"
    rk: int = 3
    limiter: bool | None = None
    snapshots: tuple = ()
    out: str = "out"
    meshes: tuple = ()
    samples: int = 32
    verbose: bool = False

    def resolved(self) -> "RunConfig":
        """Fill problem-dependent defaults (CFL by dimension, limiter for PME)."""
        if self.problem is None:
            return self
        problem = get_problem(self.problem, self.m)
        cfg = RunConfig(**asdict(self))
        if cfg.cfl is None:
            cfg.cfl = 0.27 if problem.dim == 1 else 0.15
        if cfg.limiter is None:
            cfg.limiter = problem.id in PME_PROBLEMS and cfg.rk == 3
        if cfg.t_final is None:
            cfg.t_final = problem.t_final
        if cfg.n is None:
            cfg.n = problem.n
        return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _bool(text: str) -> bool:
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(s) for s in str(text).replace(";", ",").split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"not a list of numbers: {text!r}") from None


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(s) for s in str(text).split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"not a list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="activeflux", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        # every default is None so that config-file entries are only overridden by explicit flags
        p.add_argument("--config")
        p.add_argument("--problem")
        p.add_argument("--m", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--ny", type=int)
        p.add_argument("--cfl", type=float)
        p.add_argument("--tfinal", type=float)
        p.add_argument("--variant")
        p.add_argument("--rk")
        p.add_argument("--limiter", dest="limiter", action="store_const", const="true")
        p.add_argument("--no-limiter", dest="limiter", action="store_const", const="false")
        p.add_argument("--snapshots")
        p.add_argument("--meshes")
        p.add_argument("--samples", type=int)
        p.add_argument("--out")
    return parser


def read_config_file(path) -> dict:
    entries = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key == "t_final":
            key = "tfinal"
        if key == "n_y":
            key = "ny"
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        entries[key] = value
    return entries


def parse_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.subcommand is None:
        raise ConfigError(f"a subcommand is required ({', '.join(SUBCOMMANDS)})")
    merged = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    cfg = RunConfig(args.subcommand, verbose=args.verbose)
    try:
        if "problem" in merged:
            cfg.problem = str(merged["problem"]).lower().replace("-", "_")
            if cfg.problem not in PROBLEM_IDS:
                raise ConfigError(f"unknown problem {merged['problem']!r}")
        for key, attr, conv in (("m", "m", int), ("n", "n", int), ("ny", "n_y", int),
                                ("cfl", "cfl", float), ("tfinal", "t_final", float),
                                ("samples", "samples", int)):
            if key in merged:
                setattr(cfg, attr, conv(merged[key]))
        if "variant" in merged:
            cfg.variant = str(merged["variant"]).lower()
            if cfg.variant != "all":
                SchemeVariant.parse(cfg.variant)
        if "rk" in merged:
            cfg.rk = RkScheme.parse(merged["rk"]).order
        if "limiter" in merged:
            cfg.limiter = _bool(merged["limiter"])
        if "snapshots" in merged:
            cfg.snapshots = _float_list(merged["snapshots"])
        if "meshes" in merged:
            cfg.meshes = _int_list(merged["meshes"])
        if "out" in merged:
            cfg.out = str(merged["out"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if cfg.subcommand in ("run", "converge") and cfg.problem is None:
        raise ConfigError(f"{cfg.subcommand} requires --problem")
    if cfg.cfl is not None and not cfg.cfl > 0:
        raise ConfigError("--cfl must be positive")
    if cfg.n is not None and cfg.n <= 0 or cfg.n_y is not None and cfg.n_y <= 0:
        raise ConfigError("mesh sizes must be positive")
    if cfg.limiter and cfg.rk != 3:
        raise ConfigError("the positivity limiter requires rk 3")
    if cfg.m is not None and cfg.m < 2:
        raise ConfigError("--m must be an integer >= 2")
    return cfg.resolved()


def _metadata(cfg: RunConfig, problem=None, **extra) -> dict:
    meta = {"config": asdict(cfg)}
    if problem is not None:
        meta["problem"] = {
            "id": problem.id,
            "dim": problem.dim,
            "extents": list(problem.extents),
            "bc": io.bc_label(problem.bc),
            "coefficient": repr(problem.coefficient) if problem.id != "ring" else "ring field (-y, x)/r",
            "t0": problem.t0,
            "notes": problem.notes,
        }
    meta["choices"] = {
        "dt_policy": "dt = C h^2 / max eigenvalue of A over all DoFs and cell centers, h = min(dx, dy); "
                     "with the limiter also dt <= positivity bound of the first-order scheme; "
                     "last step shortened to hit snapshot and final times",
        "norms": "discrete L2 = sqrt(sum e^2 * cell measure), Linf = max |e|; averages vs exact cell means "
                 "(composite 5-point Gauss, 2 sub-cells per direction), points vs exact samples",
        "pme_coefficient": "m * max(u, 0)^(m-1) at every node",
        "time_integrator": "SSP-RK3" if cfg.rk == 3 else "classical RK4",
    }
    meta.update(extra)
    return meta


def _fmt_time(t: float) -> str:
    return ("%.6g" % t).replace(".", "p")


def cmd_run(cfg: RunConfig, out: Path) -> None:
    problem = get_problem(cfg.problem, cfg.m)
    grid, result = run_problem(
        problem, n=cfg.n, cfl=cfg.cfl, t_final=cfg.t_final, limiter=cfg.limiter,
        variant=SchemeVariant.parse(cfg.variant), scheme=RkScheme.parse(cfg.rk),
        snapshot_times=cfg.snapshots, n_y=cfg.n_y, divergence_bound=DIVERGENCE_BOUND,
    )
    for t, state in sorted(result.snapshots.items()):
        io.write_solution_csv(state, grid, t, out / f"solution_t{_fmt_time(t)}.csv", problem.bc)
    io.write_solution_csv(result.state, grid, result.t, out / "solution.csv", problem.bc)
    io.write_metadata(_metadata(cfg, problem, result={
        "t": result.t, "steps": result.steps, "min_dof": result.min_dof,
        "mass_drift": result.mass_drift,
    }), out / "metadata.json")
    print(f"{problem.id}: t={result.t:.6g} steps={result.steps} min={result.min_dof:.3e} "
          f"mass drift={result.mass_drift:.2e}")


def cmd_converge(cfg: RunConfig, out: Path) -> None:
    problem = get_problem(cfg.problem, cfg.m)
    if problem.exact is None:
        raise ConfigError(f"{problem.id} has no exact solution")
    meshes = cfg.meshes or ((20, 40, 80, 160) if problem.dim == 1 else (10, 20, 40, 80))
    try:
        table = convergence_study(problem, meshes, cfl=cfg.cfl, t_final=cfg.t_final,
                                  variant=SchemeVariant.parse(cfg.variant), scheme=RkScheme.parse(cfg.rk))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    io.write_convergence_csv(table, out / "converge.csv")
    io.write_metadata(_metadata(cfg, problem, meshes=list(meshes)), out / "metadata.json")
    for row in table.rows:
        if row.norms is None:
            print("unstable")
        else:
            print(f"n={row.norms.n:4d} l2_avg={row.norms.l2_avg:.3e} rate={row.rate_avg:.2f} "
                  f"l2_pnt={row.norms.l2_pnt:.3e} rate={row.rate_pnt:.2f}")


def cmd_cfl1d(cfg: RunConfig, out: Path) -> None:
    variants = list(SchemeVariant) if cfg.variant == "all" else [SchemeVariant.parse(cfg.variant)]
    entries = [(v.value, cfg.rk, max_cfl_1d(v, cfg.rk)) for v in variants]
    io.write_cfl_csv(entries, out / "cfl1d.csv")
    io.write_metadata(_metadata(cfg, samples=400, resolution=0.005), out / "metadata.json")
    for v, rk, c in entries:
        print(f"{v} rk{rk}: max CFL {c:.5f}")


def cmd_region2d(cfg: RunConfig, out: Path) -> None:
    region = stability_region_2d(cfg.rk, symbol_samples=cfg.samples)
    io.write_region_csv(region, out / "region2d.csv")
    io.write_metadata(_metadata(cfg), out / "metadata.json")
    print(f"{region.stable.size} samples, {int(region.stable.sum())} stable")


COMMANDS = {"run": cmd_run, "converge": cmd_converge, "cfl1d": cmd_cfl1d, "region2d": cmd_region2d}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        logging.basicConfig(level=logging.DEBUG if cfg.verbose else logging.WARNING)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[cfg.subcommand](cfg, out)
    except ConfigError as exc:
        print(f"activeflux: error: {exc}", file=sys.stderr)
        return 1
    except (InstabilityError, PositivityError, FloatingPointError) as exc:
        print(f"activeflux: numerical abort: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"activeflux: I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

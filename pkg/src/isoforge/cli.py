"""Batch command-line front end: ``iso-forge <command> [flags]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import isoperimetry, lattices, pde, subdifferential, transport
from .errors import InputError, InvariantViolation
from .geometry import minkowski_constant
from .graph import neighbor_fan

COMMANDS = ("minkowski", "neumann", "chain", "scan", "ot-fit", "census", "verify")
LATTICES = ("honeycomb", "triangular", "bcc", "fcc_subdivided", "product_grid")
REFERENCE = {"honeycomb": "hex_honeycomb", "triangular": "hex_triangular", "bcc": "rhombic_dodeca_bcc"}
SIG_DIGITS = 12


@dataclass(frozen=True)
class RunConfig:
    command: str
    lattice: str
    params: dict = field(default_factory=dict)
    window: int | None = None
    max_n: int = 6
    jobs: int = 1
    out: str | None = None
    fmt: str = "json"
    tol_geom: float = 1e-7
    selection_cap: int = 100000
    omega: tuple[int, ...] | None = None
    hex_k: int | None = None
    fold: str = "min"
    symmetry: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if not self.tol_geom > 0:
            raise InputError("--tol-geom must be positive")
        if not 1 <= self.max_n <= isoperimetry.MAX_N_CAP:
            raise InputError(f"--max-n must lie in [1, {isoperimetry.MAX_N_CAP}]")
        if self.jobs < 1:
            raise InputError("--jobs must be positive")
        if self.selection_cap < 1:
            raise InputError("--selection-cap must be positive")
        if self.window is not None and self.window < 1:
            raise InputError("--window must be positive")


# ---------------------------------------------------------------------------
# deterministic output


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _fmt_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{SIG_DIGITS}g}"
    return str(v)


def render(payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in payload:
        w.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# pipelines


def _bundle(cfg: RunConfig, window: int | None = None):
    return lattices.generate(cfg.lattice, window or cfg.window or 4, **cfg.params)


def _omega(cfg: RunConfig, bundle) -> frozenset:
    if cfg.omega is not None:
        om = frozenset(cfg.omega)
        unknown = sorted(x for x in om if x not in bundle.graph.points)
        if unknown:
            raise InputError(f"unknown vertex ids {unknown[:5]}")
        bundle.require_inside(om)
        return om
    if bundle.kind in REFERENCE:
        return lattices.reference_subset(bundle, REFERENCE[bundle.kind], cfg.hex_k or 1)
    return frozenset([bundle.seed, *bundle.graph.neighbors(bundle.seed)])


def _bundle_and_omega(cfg: RunConfig):
    """Bundle plus subset; without --window the window grows until the subset fits."""
    if cfg.window is not None or cfg.omega is not None:
        b = _bundle(cfg)
        return b, _omega(cfg, b)
    window = 4
    while True:
        b = _bundle(cfg, window)
        try:
            return b, _omega(cfg, b)
        except lattices.WindowError:
            window += 1
            if window > 16:
                raise


def cmd_minkowski(cfg: RunConfig):
    bundle = _bundle(cfg)
    rows = {}
    for x in bundle.orbit_reps():
        sol = minkowski_constant(neighbor_fan(bundle.graph, x).vectors)
        rows[str(x)] = {
            "fan": [v.tolist() for v in sol.fan],
            "C": sol.constant,
            "alpha": sol.alpha,
            "feasible": sol.feasible,
            "c": sol.c.tolist(),
        }
    if cfg.fmt == "csv":
        return [["vertex", "C", "alpha"]] + [[k, v["C"], v["alpha"]] for k, v in sorted(rows.items())]
    return {"lattice": bundle.kind, "orbits": rows}


def cmd_neumann(cfg: RunConfig):
    bundle, om = _bundle_and_omega(cfg)
    sol = pde.neumann_solve(bundle.graph, om, fold=cfg.fold)
    opt = pde.optimal_constant(bundle.graph, om, selection_cap=cfg.selection_cap, jobs=cfg.jobs)
    if cfg.fmt == "csv":
        rows = [["vertex", "u", "laplacian"]]
        lap = pde.laplacian(bundle.graph, om, sol.u)
        rows += [[x, sol.u[x], lap.get(x, "")] for x in sorted(sol.u)]
        return rows
    return {"omega": sorted(om), "solution": sol.to_dict(), "optimal_constant": opt.to_dict()}


def _chain_payload(cfg: RunConfig, bundle, om, u, extra: dict):
    rep = subdifferential.chain_report(bundle.graph, om, u, rtol=cfg.tol_geom * 10, seed=cfg.seed)
    if cfg.fmt == "csv":
        return [["vol_Hg", "vol_union", "sum_prox", "sum_bound", "rhs", "flags_acde", "overlap"], rep.csv_row()]
    return {"omega": sorted(om), "chain": rep.to_dict(), **extra}


def cmd_chain(cfg: RunConfig):
    bundle, om = _bundle_and_omega(cfg)
    sol = pde.neumann_solve(bundle.graph, om, fold=cfg.fold)
    return _chain_payload(cfg, bundle, om, sol.u, {"u": {str(k): v for k, v in sorted(sol.u.items())}})


def cmd_ot_fit(cfg: RunConfig):
    bundle, om = _bundle_and_omega(cfg)
    u, diag, sol = transport.aleksandrov_function(bundle.graph, om)
    extra = {
        "power_diagram": {"weights": diag.weights, "volumes": diag.volumes, "body_volume": diag.body.volume},
        "legendre_defect": transport.legendre_defect(diag, sol),
        "u": {str(k): v for k, v in sorted(u.items())},
    }
    return _chain_payload(cfg, bundle, om, u, extra)


def _scan_bundle(cfg: RunConfig):
    if cfg.window is not None:
        return _bundle(cfg)
    window = max(2, cfg.max_n)
    while True:
        b = _bundle(cfg, window)
        try:
            isoperimetry._check_window(b, b.orbit_reps(), cfg.max_n)
            return b
        except lattices.WindowError:
            window += 1
            if window > 4 * cfg.max_n + 4:
                raise


def cmd_scan(cfg: RunConfig):
    bundle = _scan_bundle(cfg)
    res = isoperimetry.scan(bundle, cfg.max_n, jobs=cfg.jobs, symmetry=cfg.symmetry)
    if cfg.fmt == "csv":
        return res.csv_rows()
    return res.to_dict()


def cmd_census(cfg: RunConfig):
    if cfg.hex_k is not None or cfg.omega is not None:
        if cfg.omega is not None:
            bundle = lattices.triangular(cfg.window or 4)
            cen = isoperimetry.triangular_census(bundle, cfg.omega)
        else:
            cen = isoperimetry.census_from_labels(isoperimetry.hexagon_labels(cfg.hex_k))
        if cfg.fmt == "csv":
            d = cen.to_dict()
            return [["X", "Y", "X_star", "Y_star", "E", "ratio"], [d["X"], d["Y"], d["X_star"], d["Y_star"], d["E"], d["ratio"]]]
        return cen.to_dict()
    rows = [["X", "count", "min_ratio", "equality_count"]]
    per: dict[int, list] = {}
    for _, cen in isoperimetry.enumerate_disks(cfg.max_n):
        r = per.setdefault(cen.X, [0, None, 0])
        r[0] += 1
        if r[1] is None or cen.ratio < r[1]:
            r[1] = cen.ratio
        r[2] += cen.ratio == 12
        if cen.ratio < 12:
            raise InvariantViolation(f"census ratio {cen.ratio} below 12 at X = {cen.X}")
    for X in sorted(per):
        rows.append([X, per[X][0], float(per[X][1]), per[X][2]])
    if cfg.fmt == "csv":
        return rows
    return {"max_x": cfg.max_n, "rows": [dict(zip(rows[0], r)) for r in rows[1:]]}


# smallest window holding a tiled dilate of the lattice body around the seed
VERIFY_WINDOW = {"bcc": 5, "fcc_subdivided": 5}


def cmd_verify(cfg: RunConfig):
    bundle = _bundle(cfg, cfg.window or VERIFY_WINDOW.get(cfg.lattice))
    rep = transport.verify_sufficiency(bundle, rtol=cfg.tol_geom)
    d = rep.to_dict()
    d["iso_constant"] = rep.iso_constant
    if cfg.fmt == "csv":
        return [["check", "passed"]] + [[k, v] for k, v in sorted(rep.checks.items())]
    return d


PIPELINES = {
    "minkowski": cmd_minkowski,
    "neumann": cmd_neumann,
    "chain": cmd_chain,
    "scan": cmd_scan,
    "ot-fit": cmd_ot_fit,
    "census": cmd_census,
    "verify": cmd_verify,
}
DEFAULT_FORMAT = {"scan": "csv"}


# ---------------------------------------------------------------------------
# argument parsing


def _default_jobs() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(sorted({int(t) for t in text.split(",") if t.strip()}))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated vertex ids, got {text!r}") from exc


def _matrix(text: str) -> list[list[float]]:
    rows = [_floats(r) for r in text.split(";")]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise argparse.ArgumentTypeError("--matrix takes a 2x2 matrix as 'a,b;c,d'")
    return rows


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iso-forge", description="Discrete isoperimetric inequalities on weighted lattices.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--lattice", choices=LATTICES, default="honeycomb")
    p.add_argument("--window", type=int, default=None, help="window radius in cells (scan picks one if omitted)")
    p.add_argument("--max-n", type=int, default=6, help="largest subset size for scan, largest X for census")
    p.add_argument("--jobs", type=int, default=None, help="worker count (default: available CPUs)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--tol-geom", type=float, default=1e-7, help="relative tolerance for geometric equalities")
    p.add_argument("--selection-cap", type=int, default=100000)
    p.add_argument("--hex-k", type=int, default=None, help="use the hexagon of radius k")
    p.add_argument("--omega", type=_ints, default=None, help="comma-separated vertex ids")
    p.add_argument("--fold", choices=("min", "max"), default="min")
    p.add_argument("--symmetry", action="store_true", help="scan: also count classes up to the point group")
    p.add_argument("--matrix", type=_matrix, default=None, help="honeycomb deformation 'a,b;c,d'")
    p.add_argument("--lambdas", type=_floats, default=None, help="grid spacings")
    p.add_argument("--ell1", type=float, default=None, help="fcc_subdivided type-1 edge length")
    return p


def parse(argv: list[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    params = {}
    if args.matrix is not None:
        params["matrix"] = args.matrix
    if args.lambdas is not None:
        params["lambdas"] = tuple(args.lambdas)
    if args.ell1 is not None:
        params["ell1"] = args.ell1
    seed_text = os.environ.get("ISOFORGE_SEED", "0")
    try:
        seed = int(seed_text)
    except ValueError as exc:
        raise InputError(f"ISOFORGE_SEED must be an integer, got {seed_text!r}") from exc
    if args.hex_k is not None and args.hex_k < 1:
        raise InputError("--hex-k must be >= 1")
    return RunConfig(
        command=args.command,
        lattice=args.lattice,
        params=params,
        window=args.window,
        max_n=args.max_n,
        jobs=args.jobs if args.jobs is not None else _default_jobs(),
        out=args.out,
        fmt=args.format or DEFAULT_FORMAT.get(args.command, "json"),
        tol_geom=args.tol_geom,
        selection_cap=args.selection_cap,
        omega=args.omega,
        hex_k=args.hex_k,
        fold=args.fold,
        symmetry=args.symmetry,
        seed=seed,
    )


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse(argv)
        text = render(PIPELINES[cfg.command](cfg), cfg.fmt)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2
    except InvariantViolation as exc:
        print(f"iso-forge: invariant violation: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"iso-forge: input error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"iso-forge: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

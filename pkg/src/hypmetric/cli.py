"""Command-line front end.

Exit status: 0 on success, 2 for invalid parameters or unusable files,
3 when an iterative solver stops without meeting its tolerance.
Grids are written as ``x,y,value`` CSV with 17 significant digits plus a
JSON header next to the CSV; reports are JSON.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import agard as agard_mod
from .closed_forms import (
    RADIAL_VARIANTS,
    RadialMetricFamily,
    minda_schober_density,
    radial_density,
)
from .density import Density, Grid
from .domains import Annulus, Disk, DiskMinusHoles
from .errors import HypMetricError
from .geodesic import geodesic_path
from .green import BoundaryData, solve_liouville_disk
from .maps import power_map
from .metric import PathPolyline, curvature_estimate, path_length
from .perron import perron_solve
from .schwarzian import (
    SchwarzianField,
    check_transformation_law,
    cpp_schwarzian_closed_form,
    density_dz,
    metric_schwarzian_fd,
    reconstruct_developing_map,
)

EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 2, 3
FAMILIES = RADIAL_VARIANTS + ("minda-schober", "agard")


class ValidationError(HypMetricError):
    pass


@dataclass
class RunConfig:
    """A validated command: its name and the parsed options."""

    command: str
    args: argparse.Namespace = field(default_factory=argparse.Namespace)

    @classmethod
    def from_argv(cls, argv: Optional[Sequence[str]] = None) -> "RunConfig":
        args = build_parser().parse_args(argv)
        return cls(args.command, args)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_point(text: str) -> complex:
    """Accept ``x,y``, ``a+bj`` or ``a+bi``."""
    s = text.strip().replace(" ", "")
    try:
        if "," in s:
            x, y = s.split(",")
            return complex(float(x), float(y))
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ValidationError(f"cannot parse point {text!r}") from None


def _points(args) -> list[complex]:
    return [parse_point(p) for p in (args.point or [])]


def build_density(args) -> Density:
    fam = args.family
    if fam == "agard":
        return agard_mod.agard_metric()
    if fam == "minda-schober":
        return minda_schober_density(args.eps)
    center = parse_point(args.center)
    return radial_density(RadialMetricFamily(fam, R=args.R, r=args.r, alpha=args.alpha, center=center))


def _emit(values: dict, fmt: str, out: Optional[str]) -> None:
    if fmt == "csv":
        keys = list(values)
        rows = zip(*[values[k] for k in keys])
        text = ",".join(keys) + "\n" + "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)
    else:
        text = json.dumps(values, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _spacing(args) -> float:
    if getattr(args, "grid", None):
        return 1.0 / args.grid
    return args.spacing


def _bbox(args, density: Density):
    if args.bbox:
        vals = [float(v) for v in args.bbox.split(",")]
        if len(vals) != 4:
            raise ValidationError("--bbox needs xmin,xmax,ymin,ymax")
        return tuple(vals)
    bb = density.domain.bbox()
    if bb is None:
        raise ValidationError("unbounded domain: pass --bbox")
    return bb


def _sample_grid(density: Density, spacing: float, bbox, quantity: str, fn=None) -> Grid:
    """Grid over ``bbox`` with nodes inside the domain (and off punctures) active."""
    grid = Grid.for_domain(density.domain, spacing, bbox=bbox, margin=spacing * 1e-6)
    act = grid.active()
    z = grid.nodes()[act]
    vals = np.zeros(grid.shape)
    v = fn(z) if fn is not None else density(z)
    vals[act] = np.log(v) if quantity == "log_density" else v
    return grid.with_values(vals, quantity)


def _write_grid(grid: Grid, out: Optional[str]) -> None:
    if out:
        grid.save(out)
    else:
        sys.stdout.write(json.dumps(grid.header()) + "\n")
        nodes, act = grid.nodes(), grid.active()
        sys.stdout.write("x,y,value\n")
        for zz, vv in zip(nodes[act], grid.values[act]):
            sys.stdout.write(f"{zz.real:.17g},{zz.imag:.17g},{vv:.17g}\n")


# ---------------------------------------------------------------------------
# commands


def cmd_density(args) -> int:
    d = build_density(args)
    if args.grid or args.spacing:
        grid = _sample_grid(d, _spacing(args), _bbox(args, d), args.quantity)
        _write_grid(grid, args.out)
        return EXIT_OK
    pts = _points(args)
    if not pts:
        raise ValidationError("give --point or --grid/--spacing")
    vals = d(np.array(pts))
    if args.quantity == "log_density":
        vals = np.log(vals)
    _emit({"x": [p.real for p in pts], "y": [p.imag for p in pts], "value": [float(v) for v in vals]},
          args.format, args.out)
    return EXIT_OK


def _read_path(args) -> PathPolyline:
    if args.path:
        return PathPolyline.load(args.path)
    if args.vertices:
        return PathPolyline(np.array([parse_point(v) for v in args.vertices.split(";")]))
    raise ValidationError("give --path FILE or --vertices 'x,y;x,y;...'")


def cmd_length(args) -> int:
    d = build_density(args)
    L = path_length(d, _read_path(args), rtol=args.rtol)
    _emit({"length": [L]}, args.format, args.out)
    return EXIT_OK


def cmd_distance(args) -> int:
    d = build_density(args)
    res = geodesic_path(d, parse_point(args.a), parse_point(args.b), args.resolution, smooth=not args.no_smooth)
    if args.path_out:
        res.path.save(args.path_out)
    _emit({"distance": [res.distance], "graph_distance": [res.graph_distance]}, args.format, args.out)
    return EXIT_OK


def cmd_curvature(args) -> int:
    d = build_density(args)
    if args.grid or args.spacing:
        fn = lambda z: curvature_estimate(d, z, args.h)  # noqa: E731
        s = _spacing(args)
        grid = Grid.for_domain(d.domain, s, bbox=_bbox(args, d))
        act = grid.active()
        z = grid.nodes()[act]
        dist = d.domain.distance_to_boundary(z)
        keep = dist > (args.h or 0) * 2 + s
        act_idx = np.flatnonzero(act.ravel())
        mask = grid.mask.copy().ravel()
        mask[act_idx[~keep]] = 0
        grid = Grid(grid.x0, grid.y0, s, mask.reshape(grid.shape), np.zeros(grid.shape), "curvature")
        vals = np.zeros(grid.shape)
        vals[grid.active()] = fn(grid.nodes()[grid.active()])
        _write_grid(grid.with_values(vals), args.out)
        return EXIT_OK
    pts = _points(args)
    if args.random:
        rng = np.random.default_rng(args.seed)
        bb = _bbox(args, d)
        cand = []
        while len(cand) < args.random:
            w = complex(rng.uniform(bb[0], bb[1]), rng.uniform(bb[2], bb[3]))
            if d.domain.distance_to_boundary(np.array([w]))[0] > 1e-2:
                cand.append(w)
        pts += cand
    if not pts:
        raise ValidationError("give --point, --random N or --grid/--spacing")
    vals = curvature_estimate(d, np.array(pts), args.h)
    _emit({"x": [p.real for p in pts], "y": [p.imag for p in pts], "curvature": np.atleast_1d(vals).tolist()},
          args.format, args.out)
    return EXIT_OK


def cmd_solve_disk(args) -> int:
    if args.constant_boundary is not None:
        psi = BoundaryData.constant(args.constant_boundary)
    elif args.boundary_file:
        psi = BoundaryData(np.loadtxt(args.boundary_file, delimiter=",", ndmin=1))
    else:
        raise ValidationError("give --constant-boundary C or --boundary-file FILE")
    omega = args.omega if args.omega == "auto" else float(args.omega)
    grid, report = solve_liouville_disk(psi, args.spacing, args.tol, args.max_iter, omega)
    _write_grid(grid, args.out)
    if args.report:
        rep = report.to_dict()
        rep["center_value"] = float(grid.interpolate(0j))
        Path(args.report).write_text(json.dumps(rep, indent=2) + "\n")
    print(f"center {grid.interpolate(0j):.17g}", file=sys.stderr)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _perron_domain(args):
    outer = Disk(parse_point(args.center), args.R)
    if args.domain == "annulus":
        return Annulus(outer.center, args.r, args.R)
    if args.domain == "disk":
        return outer
    holes = []
    for item in (args.holes or "").split(";"):
        if item.strip():
            x, y, rad = (float(v) for v in item.split(","))
            holes.append(Disk(complex(x, y), rad))
    return DiskMinusHoles(outer, tuple(holes))


def cmd_perron(args) -> int:
    G = _perron_domain(args)
    snap = None
    if args.snapshots:
        folder = Path(args.snapshots)
        folder.mkdir(parents=True, exist_ok=True)
        snap = lambda k, g: g.save(folder / f"sweep_{k:03d}.csv")  # noqa: E731
    density, state = perron_solve(
        G, tol=args.tol, max_sweeps=args.max_sweeps, spacing=args.spacing,
        local_spacing=args.local_spacing, snapshot=snap,
    )
    _write_grid(state.current, args.out)
    if args.state:
        state.save(args.state)
    return EXIT_OK if state.converged else EXIT_NOT_CONVERGED


def cmd_agard(args) -> int:
    quantity = args.quantity
    if args.min_circle:
        theta, value = agard_mod.min_on_unit_circle()
        _emit({"theta": [theta], "value": [value]}, args.format, args.out)
        return EXIT_OK
    fns = {
        "density": lambda z: agard_mod.agard_density(z),
        "log_density": lambda z: np.log(agard_mod.agard_density(z)),
        "hempel": lambda z: agard_mod.hempel_bound(z),
    }
    if args.spacing or args.grid:
        d = agard_mod.agard_metric()
        if quantity == "developing-map":
            raise ValidationError("grid output supports density, log_density and hempel")
        grid = _sample_grid(d, _spacing(args), _bbox(args, d), "density", fns[quantity])
        grid.quantity = quantity
        _write_grid(grid, args.out)
        return EXIT_OK
    pts = _points(args)
    if not pts:
        raise ValidationError("give --point, --grid/--spacing or --min-circle")
    z = np.array(pts)
    if quantity == "developing-map":
        F = np.atleast_1d(agard_mod.developing_map(z))
        _emit({"x": z.real.tolist(), "y": z.imag.tolist(), "re": F.real.tolist(), "im": F.imag.tolist()},
              args.format, args.out)
        return EXIT_OK
    vals = np.atleast_1d(fns[quantity](z))
    if args.format == "plain" and not args.out:
        for v in vals:
            print(f"{float(v):.17g}")
        return EXIT_OK
    _emit({"x": z.real.tolist(), "y": z.imag.tolist(), "value": vals.tolist()},
          "json" if args.format == "plain" else args.format, args.out)
    return EXIT_OK


def cmd_schwarzian(args) -> int:
    if args.reconstruct:
        path = _read_path(args)
        z0 = path.vertices[0]
        if args.field == "closed-form":
            S = SchwarzianField.twice_punctured_plane()
            d = agard_mod.agard_metric()
        else:
            d = build_density(args)
            S = SchwarzianField.from_density(d)
        lam0 = float(d(np.array([z0]))[0])
        lz = density_dz(d, z0)
        res = reconstruct_developing_map(S, z0, lam0, lz, path, rotation=parse_point(args.rotation))
        _emit(res.to_dict(), "json", args.out)
        return EXIT_OK
    pts = _points(args)
    if not pts:
        raise ValidationError("give --point")
    z = np.array(pts)
    if args.check_power:
        d = build_density(args)
        r = np.atleast_1d(check_transformation_law(d, power_map(args.check_power), z))
        _emit({"x": z.real.tolist(), "y": z.imag.tolist(), "residual": r.tolist()}, args.format, args.out)
        return EXIT_OK
    if args.field == "closed-form":
        S = np.atleast_1d(cpp_schwarzian_closed_form(z))
    else:
        S = np.atleast_1d(metric_schwarzian_fd(build_density(args), z, args.h))
    _emit({"x": z.real.tolist(), "y": z.imag.tolist(), "re": S.real.tolist(), "im": S.imag.tolist()},
          args.format, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_family(p, default="disk"):
    p.add_argument("--family", choices=FAMILIES, default=default)
    p.add_argument("--R", type=float, default=1.0, help="outer radius (inner radius for exterior families)")
    p.add_argument("--r", type=float, default=0.0, help="inner annulus radius")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=1 / 6, help="Minda-Schober scale")
    p.add_argument("--center", default="0,0")


def _add_output(p, formats=("json", "csv")):
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=formats, default=formats[0])


def _add_grid(p):
    p.add_argument("--grid", type=int, help="grid resolution N (spacing 1/N)")
    p.add_argument("--spacing", type=float)
    p.add_argument("--bbox", help="xmin,xmax,ymin,ymax")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypmetric", description="Conformal metrics of curvature -1.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="evaluate or sample a density")
    _add_family(p)
    _add_grid(p)
    _add_output(p)
    p.add_argument("--point", action="append")
    p.add_argument("--quantity", choices=("density", "log_density"), default="density")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("length", help="lambda-length of a polyline")
    _add_family(p)
    _add_output(p)
    p.add_argument("--path", help="JSON list of [re, im] pairs")
    p.add_argument("--vertices", help="'x,y;x,y;...'")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("distance", help="grid-graph upper bound for the induced distance")
    _add_family(p)
    _add_output(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--resolution", type=float, default=1 / 400)
    p.add_argument("--no-smooth", action="store_true")
    p.add_argument("--path-out")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("curvature", help="five-point curvature estimate")
    _add_family(p)
    _add_grid(p)
    _add_output(p)
    p.add_argument("--point", action="append")
    p.add_argument("--h", type=float)
    p.add_argument("--random", type=int, default=0, help="number of random sample points")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("solve-disk", help="Dirichlet problem for Laplace u = exp(2u) on the unit disk")
    p.add_argument("--constant-boundary", type=float)
    p.add_argument("--boundary-file", help="CSV of uniformly spaced boundary samples of u")
    p.add_argument("--spacing", type=float, default=1 / 64)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--omega", default="0.5")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_solve_disk)

    p = sub.add_parser("perron", help="hyperbolic metric of a disk with round holes")
    p.add_argument("--domain", choices=("annulus", "disk", "holes"), default="annulus")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.2)
    p.add_argument("--center", default="0,0")
    p.add_argument("--holes", help="'x,y,radius;x,y,radius'")
    p.add_argument("--spacing", type=float, default=1 / 64)
    p.add_argument("--local-spacing", type=float, default=1 / 24)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-sweeps", type=int, default=60)
    p.add_argument("--out")
    p.add_argument("--state")
    p.add_argument("--snapshots", help="directory for per-sweep grids")
    p.set_defaults(func=cmd_perron)

    p = sub.add_parser("agard", help="hyperbolic metric of the twice-punctured plane")
    _add_grid(p)
    _add_output(p, formats=("plain", "json", "csv"))
    p.add_argument("--point", action="append")
    p.add_argument("--quantity", choices=("density", "log_density", "hempel", "developing-map"),
                   default="density")
    p.add_argument("--min-circle", action="store_true")
    p.set_defaults(func=cmd_agard)

    p = sub.add_parser("schwarzian", help="Schwarzian derivatives and developing maps")
    _add_family(p, default="agard")
    _add_output(p)
    p.add_argument("--point", action="append")
    p.add_argument("--field", choices=("closed-form", "finite-difference"), default="finite-difference")
    p.add_argument("--h", type=float)
    p.add_argument("--check-power", type=int, help="transformation-law residual for z -> z^n")
    p.add_argument("--reconstruct", action="store_true")
    p.add_argument("--path")
    p.add_argument("--vertices")
    p.add_argument("--rotation", default="1")
    p.set_defaults(func=cmd_schwarzian)
    return ap


def run(config: RunConfig) -> int:
    """Dispatch a parsed command; maps library errors to exit codes."""
    try:
        return config.args.func(config.args)
    except (HypMetricError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"io-failure: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(RunConfig.from_argv(argv))


if __name__ == "__main__":
    sys.exit(main())

"""Grid refinement study of the disk Dirichlet solver.

Constant boundary data log(2R/(R^2-1)) make the exact solution the
hyperbolic density of the disk of radius R restricted to the unit disk, so
the error is known at every node.

    python scripts/solver_convergence.py --R 1.2 --levels 16 32 64 128
"""
from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass, field

import numpy as np

import hypmetric as hm
from hypmetric.green import BoundaryData


@dataclass
class Config:
    R: float = 1.2
    levels: list = field(default_factory=lambda: [16, 32, 64, 128])
    tol: float = 1e-8
    omega: str = "0.5"


def main(cfg: Config) -> list[dict]:
    exact = hm.hyperbolic_disk(cfg.R)
    psi = BoundaryData.constant(math.log(2 * cfg.R / (cfg.R**2 - 1)))
    omega = cfg.omega if cfg.omega == "auto" else float(cfg.omega)
    rows = []
    for n in cfg.levels:
        t = time.perf_counter()
        grid, rep = hm.solve_liouville_disk(psi, spacing=1 / n, tol=cfg.tol, omega=omega)
        secs = time.perf_counter() - t
        act = grid.active()
        err = np.abs(grid.values[act] - np.log(exact(grid.nodes()[act])))
        rows.append({"n": n, "iterations": rep.iterations, "residual": rep.final_residual,
                     "max_error": float(err.max()), "center_error": float(abs(grid.interpolate(0j) - math.log(exact(0)))),
                     "seconds": round(secs, 2)})
    print(f"{'1/h':>5} {'its':>4} {'residual':>9} {'max err':>9} {'rate':>5} {'centre err':>10} {'sec':>6}")
    for k, row in enumerate(rows):
        rate = math.log2(rows[k - 1]["max_error"] / row["max_error"]) if k else float("nan")
        print(f"{row['n']:5d} {row['iterations']:4d} {row['residual']:9.1e} {row['max_error']:9.2e} "
              f"{rate:5.2f} {row['center_error']:10.2e} {row['seconds']:6.2f}")
    return rows


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--R", type=float, default=1.2)
    p.add_argument("--levels", type=int, nargs="+", default=[16, 32, 64, 128])
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--omega", default="0.5")
    main(Config(**vars(p.parse_args())))

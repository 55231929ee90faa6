"""Grid of log lambda for the twice-punctured plane, as x,y,value CSV for external plotting.

    python scripts/agard_figure.py --n 100 --out agard_log_density.csv
"""
from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass

import numpy as np

import hypmetric as hm


@dataclass
class Config:
    xmin: float = -2.0
    xmax: float = 3.0
    ymin: float = -2.0
    ymax: float = 2.0
    n: int = 100  # nodes per unit length
    out: str = "agard_log_density.csv"


def main(cfg: Config) -> hm.Grid:
    d = hm.agard_metric()
    # nodes within one spacing of 0 and 1 are left out of the grid
    grid = hm.Grid.for_domain(d.domain, 1 / cfg.n, bbox=(cfg.xmin, cfg.xmax, cfg.ymin, cfg.ymax))
    grid = grid.sample(d, "log_density")
    grid.save(cfg.out)
    act = grid.active()
    v = grid.values[act]
    print(f"{int(act.sum())} nodes, log lambda in [{v.min():.4f}, {v.max():.4f}] -> {cfg.out}")
    return grid


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(Config()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    main(Config(**vars(p.parse_args())))

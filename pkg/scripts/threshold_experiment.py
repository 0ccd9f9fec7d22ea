#!/usr/bin/env python3
"""Scan q_n across cell areas for square von Neumann lattices.

Writes one CSV with a row per (area, n). Example:

    python3 scripts/threshold_experiment.py --areas 0.5 1 1.5 2 --n-max 5 --out threshold.csv

Areas are given in units of pi.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field

from udisc.io import SCAN_COLUMNS, csv_text
from udisc.lattice import LatticeSpec, threshold_scan


@dataclass
class ThresholdConfig:
    areas_over_pi: list[float] = field(default_factory=lambda: [0.5, 0.75, 1.0, 1.25, 1.5, 2.0])
    n_max: int = 5
    shear: float = 0.0
    workers: int = 1
    out: str = "threshold.csv"


def run(cfg: ThresholdConfig) -> list[list]:
    header = ["area_over_pi", "shear", *SCAN_COLUMNS]
    rows = [header]
    for a in cfg.areas_over_pi:
        scan = threshold_scan(LatticeSpec.square(a * math.pi, cfg.shear), cfg.n_max, workers=cfg.workers)
        for r in scan.rows:
            d = r.as_dict()
            rows.append([a, cfg.shear, *(d[c] for c in SCAN_COLUMNS)])
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--areas", type=float, nargs="+", default=ThresholdConfig().areas_over_pi)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--shear", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="threshold.csv")
    a = p.parse_args()
    cfg = ThresholdConfig(a.areas, a.n_max, a.shear, a.workers, a.out)
    rows = run(cfg)
    with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(rows))
    last = {r[0]: r[5] for r in rows[1:] if r[2] == cfg.n_max}
    for area, q in last.items():
        print(f"S = {area:g} pi   q_{cfg.n_max} = {q:.6g}")
    print(f"wrote {len(rows) - 1} rows to {cfg.out}")


if __name__ == "__main__":
    main()

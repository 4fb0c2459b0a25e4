#!/usr/bin/env python3
"""Regenerates the bundled emulated county series in data/.

The series imitate the shape of early-2020 county case counts: a block of
zero-count days followed by a sustained rise. They are synthetic; see
data/README.md.
"""
import argparse
import csv
import datetime as dt
from pathlib import Path

import numpy as np

START = dt.date(2020, 1, 22)
DAYS = 200

SERIES = {
    # name: (rise day, growth per day, plateau level, seed)
    "allegheny_sample.csv": (50, 0.55, 120.0, 20200122),
    "st_louis_sample.csv": (52, 0.45, 90.0, 20200310),
}


def emulate(rise: int, growth: float, plateau: float, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    out = []
    for day in range(1, DAYS + 1):
        if day < rise:
            out.append(0)
            continue
        t = day - rise
        level = plateau / (1.0 + (plateau / 2.0 - 1.0) * np.exp(-growth * t))
        out.append(int(max(1, rng.poisson(level))))
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, params in SERIES.items():
        counts = emulate(*params)
        with open(args.out_dir / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["day", "date", "cases"])
            for i, c in enumerate(counts, start=1):
                w.writerow([i, (START + dt.timedelta(days=i - 1)).isoformat(), c])


if __name__ == "__main__":
    main()

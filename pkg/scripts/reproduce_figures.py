#!/usr/bin/env python3
"""Regenerate the tradeoff, beampattern and correlation-study CSVs into one directory.

    python scripts/reproduce_figures.py results/ [--config run.cfg] [--threads 4]
"""

import argparse
import sys
import time
from pathlib import Path

from isac_subspace.cli import main as cli_main

JOBS = [
    ("pareto", "pareto.csv"),
    ("beampattern", "beampattern.csv"),
    ("corr-study", "corr_study.csv"),
]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--config", type=Path)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    common = ["--threads", str(args.threads)]
    if args.config is not None:
        common += ["--config", str(args.config)]
    if args.seed is not None:
        common += ["--seed", str(args.seed)]

    for cmd, name in JOBS:
        t0 = time.perf_counter()
        status = cli_main([cmd, "--out", str(args.out_dir / name), *common])
        if status != 0:
            return status
        print(f"{cmd:12s} -> {args.out_dir / name}  ({time.perf_counter() - t0:.2f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Rerun every checked-in figure sweep and write outputs under a directory.

Usage: python3 scripts/reproduce_all.py --out results/ [--scale 5] [--workers 4]

At scale 1 this is the full desk-scale reproduction (tens of minutes); larger
scales divide the seed count and test length for quick smoke runs.
"""

import argparse
import time
from pathlib import Path

from ngrc import experiments


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--figures", nargs="*", default=experiments.FIGURE_IDS,
        help="subset of figure ids (default: all)",
    )
    args = parser.parse_args()

    out_root = Path(args.out)
    for figure_id in args.figures:
        start = time.monotonic()
        experiments.reproduce(
            figure_id, out_root / figure_id, scale=args.scale, workers=args.workers
        )
        print(f"{figure_id}: done in {time.monotonic() - start:.1f}s")


if __name__ == "__main__":
    main()

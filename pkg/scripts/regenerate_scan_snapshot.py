#!/usr/bin/env python3
"""Regenerate the published tetrahedron scan CSVs (exact and eps=0.04)."""

import sys
import argparse
import logging
from pathlib import Path

# Add parent directory to path to import isolab
sys.path.insert(0, str(Path(__file__).parent.parent))

from isolab.scan import scan_tetrahedron, write_scan_csv

SNAPSHOTS = [
    (0.0, "scan_eps0.csv"),
    (0.04, "scan_eps004.csv"),
]


def main():
    """Scan the grid at each smoothing radius and write one CSV per radius."""
    parser = argparse.ArgumentParser(description="Regenerate tetrahedron scan snapshots")
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=Path(__file__).parent.parent / "output",
        help="Directory for the CSV files"
    )
    parser.add_argument(
        "--resolution",
        type=int,
        default=20,
        help="Grid points per tetrahedron edge minus one"
    )
    parser.add_argument(
        "--threads",
        type=int,
        help="Worker cap (default: ISOLAB_THREADS or executor default)"
    )

    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    for eps, filename in SNAPSHOTS:
        rows, skipped = scan_tetrahedron(args.resolution, eps, threads=args.threads)
        path = write_scan_csv(rows, args.output_dir / filename)
        print(f"eps={eps:g}: {len(rows)} rows ({skipped} skipped) saved to: {path}")


if __name__ == "__main__":
    main()

"""Classification scans over the T-state tetrahedron."""

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np

from isolab.exceptions import AmbiguousToleranceError, InvalidResolutionError, NotAStateError
from isolab.isotropy import DEFAULT_TOL, DEFAULT_TOL_ABS, classify, smoothed_classify
from isolab.models import ScanRow
from isolab.pauli import BELL_VERTICES, compose, t_state

logger = logging.getLogger(__name__)

CSV_HEADER = ['tau1', 'tau2', 'tau3', 'class', 'shape', 'min_residual']
AMBIGUOUS = 'ambiguous'

_INTEGER_VERTICES = BELL_VERTICES.astype(int)


def tetrahedron_grid(resolution: int) -> Iterator[Tuple[float, float, float]]:
    """Barycentric lattice points (n0 .. n3 summing to resolution) of the Bell tetrahedron.

    Coordinates are integer sums divided once, so equal components compare equal.
    """
    if resolution < 2:
        raise InvalidResolutionError(f"resolution must be at least 2, got {resolution}")
    for n0 in range(resolution, -1, -1):
        for n1 in range(resolution - n0, -1, -1):
            for n2 in range(resolution - n0 - n1, -1, -1):
                n3 = resolution - n0 - n1 - n2
                numerators = _INTEGER_VERTICES.T @ np.array([n0, n1, n2, n3])
                yield tuple(float(k) / resolution for k in numerators)


def resolve_threads(threads: Optional[int] = None) -> Optional[int]:
    """Explicit value, else ISOLAB_THREADS, else None for the executor default."""
    if threads is not None:
        return threads
    raw = os.getenv('ISOLAB_THREADS')
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as e:
            raise ValueError(f"Invalid value for ISOLAB_THREADS: {raw!r}") from e
    return None


def classify_cell(
    taus: Tuple[float, float, float], eps: float, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS
) -> Optional[ScanRow]:
    """Classify one grid point; None when the point is not a state."""
    pf = t_state(taus)
    try:
        compose(pf)
    except NotAStateError:
        return None
    try:
        report = smoothed_classify(pf, eps, tol, tol_abs) if eps > 0 else classify(pf, tol, tol_abs)
    except AmbiguousToleranceError as e:
        return ScanRow(tau1=taus[0], tau2=taus[1], tau3=taus[2], subgroup_class=AMBIGUOUS, min_residual=e.value)
    return ScanRow(
        tau1=taus[0],
        tau2=taus[1],
        tau3=taus[2],
        subgroup_class=report.subgroup_class.value,
        shape=report.shape.value,
        min_residual=report.residuals['distance'],
    )


def scan_tetrahedron(
    resolution: int,
    eps: float = 0.0,
    tol: float = DEFAULT_TOL,
    tol_abs: float = DEFAULT_TOL_ABS,
    threads: Optional[int] = None,
) -> Tuple[List[ScanRow], int]:
    """Classify every grid point, in grid order.

    Returns:
        (rows, skipped) where skipped counts grid points outside the state set
    """
    if eps < 0:
        raise InvalidResolutionError(f"eps must be nonnegative, got {eps}")
    points = list(tetrahedron_grid(resolution))
    worker = partial(classify_cell, eps=eps, tol=tol, tol_abs=tol_abs)
    workers = resolve_threads(threads)
    logger.info("Scanning %d grid points (eps=%g, workers=%s)", len(points), eps, workers or 'default')

    if workers == 1:
        results = [worker(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chunksize = max(1, len(points) // (4 * (workers or os.cpu_count() or 1)))
            results = list(executor.map(worker, points, chunksize=chunksize))

    rows = [r for r in results if r is not None]
    skipped = len(results) - len(rows)
    if skipped:
        logger.warning("Skipped %d grid points outside the state set", skipped)
    ambiguous = sum(1 for r in rows if r.subgroup_class == AMBIGUOUS)
    logger.info("Scan finished: %d rows, %d ambiguous, %d skipped", len(rows), ambiguous, skipped)
    return rows, skipped


def write_scan_rows(rows: List[ScanRow], handle: TextIO) -> None:
    """Header plus one fixed-precision line per row."""
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            f"{row.tau1:.6f}",
            f"{row.tau2:.6f}",
            f"{row.tau3:.6f}",
            row.subgroup_class,
            row.shape,
            f"{row.min_residual:.12f}",
        ])


def write_scan_csv(rows: List[ScanRow], output_path: Union[str, Path]) -> Path:
    """Write rows to a file; creates parent directories."""
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", newline="", encoding="utf-8") as handle:
        write_scan_rows(rows, handle)
    return output_path

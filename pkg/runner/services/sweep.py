"""Grid sweeps over a worker pool (sequential below the parallel threshold)."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence

from shared.config.config import config
from shared.domain.models import SweepPoint
from shared.domain.status import PointStatus

logger = logging.getLogger(__name__)


def run_sweep(
    task: Callable[[object], object],
    parameters: Sequence[object],
    workers: Optional[int] = None,
    label: str = "sweep",
) -> List[SweepPoint]:
    """
    Evaluate ``task`` at every grid parameter.

    Each point fails independently: an exception is logged with its
    traceback and recorded on the point as FAILED, and the sweep goes on.
    Points are returned in grid order whatever order they completed in.

    Uses the pool only when more than one worker is available and the grid
    has at least ``config.PARALLEL_THRESHOLD`` points.
    """
    num_workers = config.WORKERS if workers is None else workers
    if num_workers < 1:
        raise ValueError(f"Invalid worker count: {num_workers}")

    points = [SweepPoint(index=i, parameter=p) for i, p in enumerate(parameters)]
    use_parallel = num_workers > 1 and len(points) >= config.PARALLEL_THRESHOLD

    logger.info(
        f"{label}: {len(points)} points, "
        f"{'parallel' if use_parallel else 'sequential'} (workers={num_workers})"
    )
    if use_parallel:
        _run_parallel(task, points, num_workers, label)
    else:
        _run_sequential(task, points, label)

    failed = sum(1 for p in points if p.status == PointStatus.FAILED)
    logger.info(f"{label}: {len(points) - failed} done, {failed} failed")
    return points


def _evaluate(task: Callable[[object], object], point: SweepPoint, label: str) -> None:
    try:
        point.result = task(point.parameter)
        point.status = PointStatus.DONE
    except Exception as e:
        _record_failure(point, e, label)


def _record_failure(point: SweepPoint, error: Exception, label: str) -> None:
    logger.error(
        f"{label}: point {point.index} ({point.parameter!r}) failed: {error}",
        exc_info=(type(error), error, error.__traceback__),
    )
    point.status = PointStatus.FAILED
    point.error = f"{type(error).__name__}: {error}"


def _run_sequential(task: Callable[[object], object], points: List[SweepPoint], label: str) -> None:
    for point in points:
        _evaluate(task, point, label)
        logger.debug(f"{label}: point {point.index} {point.status.value}")


def _run_parallel(
    task: Callable[[object], object],
    points: List[SweepPoint],
    num_workers: int,
    label: str,
) -> None:
    """Submit every point, then collect as they complete."""
    with ThreadPoolExecutor(max_workers=num_workers) as executor:
        futures = {executor.submit(task, point.parameter): point for point in points}
        completed = 0
        for future in as_completed(futures):
            point = futures[future]
            try:
                point.result = future.result()
                point.status = PointStatus.DONE
            except Exception as e:
                _record_failure(point, e, label)
            completed += 1
            logger.debug(f"{label}: {completed}/{len(points)} complete (point {point.index} {point.status.value})")


def failures(points: Sequence[SweepPoint]) -> List[dict]:
    """Error records for the points that failed."""
    return [
        {"index": p.index, "parameter": p.parameter, "error": p.error}
        for p in points
        if p.status == PointStatus.FAILED
    ]

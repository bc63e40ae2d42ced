"""Single-reference nonlinear least-squares position solver.

Gauss-Newton on the signed range-difference residuals with an analytic
Jacobian. Three guards keep candidates usable on outlier-contaminated
epochs, where the objective can lose its finite minimizer along a hyperbola
asymptote:

* steps longer than the station bounding-box diagonal are halved;
* iterates are clamped to the bounding box expanded by a configurable
  margin (the solve region; UEs are assumed to live among the anchors);
* an iterate landing exactly on a station (undefined Jacobian) is nudged
  by one step tolerance along +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import MeasurementSet
from .geometry import (
    BaseStation,
    Position2D,
    check_station_layout,
    station_bounding_box,
)
from .tdoa import RangeDifferenceSet, compute_tdoas, station_index


@dataclass(frozen=True)
class SolverSettings:
    """Gauss-Newton controls.

    ``initial_guess`` of None starts from the station centroid, which lies
    inside the convex hull for corner-mounted anchors and avoids the wrong
    hyperbola branch in typical layouts. ``bounds_margin_m`` sets how far
    outside the station bounding box iterates may travel.
    """

    max_iterations: int = 50
    step_tolerance_m: float = 1e-6
    initial_guess: Position2D | None = None
    bounds_margin_m: float = 1.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.step_tolerance_m > 0:
            raise ValueError(f"step_tolerance_m must be > 0, got {self.step_tolerance_m}")
        if self.bounds_margin_m < 0:
            raise ValueError(f"bounds_margin_m must be >= 0, got {self.bounds_margin_m}")


@dataclass(frozen=True)
class CandidateEstimate:
    """Position estimate obtained with one particular reference station."""

    reference_id: int
    position: Position2D
    residual_norm_m: float
    converged: bool
    iterations_used: int


def _entries_arrays(
    rd: RangeDifferenceSet, stations: Sequence[BaseStation]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(non-reference station coords, measured deltas, reference coords)."""
    index = station_index(stations)
    if rd.reference_id not in index:
        raise ValueError(f"reference station {rd.reference_id} not in station list")
    missing = [sid for sid in rd.station_ids if sid not in index]
    if missing:
        raise ValueError(f"range differences reference unknown stations {missing}")
    coords = np.array(
        [(index[sid].position.x, index[sid].position.y) for sid in rd.station_ids]
    )
    deltas = np.array([dd for _, dd in rd.entries])
    ref = index[rd.reference_id].position
    return coords, deltas, np.array([ref.x, ref.y])


def ls_objective(
    p: Position2D, rd: RangeDifferenceSet, stations: Sequence[BaseStation]
) -> float:
    """Sum of squared range-difference residuals at position p, in m^2."""
    residuals, _ = residual_vector_and_jacobian(p, rd, stations)
    return float(residuals @ residuals)


def residual_vector_and_jacobian(
    p: Position2D, rd: RangeDifferenceSet, stations: Sequence[BaseStation]
) -> tuple[np.ndarray, np.ndarray]:
    """Residuals r_n = delta_d_n - (||p - q_n|| - ||p - q_e||) and dr/dp.

    The Jacobian row for station n is -((p - q_n)/||p - q_n|| -
    (p - q_e)/||p - q_e||); it is undefined when p coincides with a station.
    """
    coords, deltas, ref = _entries_arrays(rd, stations)
    pt = np.array([p.x, p.y])
    diff_n = pt - coords
    dist_n = np.hypot(diff_n[:, 0], diff_n[:, 1])
    diff_e = pt - ref
    dist_e = math.hypot(diff_e[0], diff_e[1])
    if dist_e == 0.0 or np.any(dist_n == 0.0):
        raise ZeroDivisionError("position coincides with a station; Jacobian undefined")
    residuals = deltas - (dist_n - dist_e)
    jac = -(diff_n / dist_n[:, None] - diff_e / dist_e)
    return residuals, jac


def solve_single_reference(
    rd: RangeDifferenceSet,
    stations: Sequence[BaseStation],
    settings: SolverSettings | None = None,
) -> CandidateEstimate:
    """Minimize the squared residuals of one reference choice.

    Returns the last iterate regardless of convergence; ``converged`` is
    True iff the raw Gauss-Newton step norm fell below the step tolerance
    within the iteration budget.
    """
    settings = settings or SolverSettings()
    sts = check_station_layout(stations)

    min_x, min_y, max_x, max_y = station_bounding_box(sts)
    diag = math.hypot(max_x - min_x, max_y - min_y)
    lo = np.array([min_x - settings.bounds_margin_m, min_y - settings.bounds_margin_m])
    hi = np.array([max_x + settings.bounds_margin_m, max_y + settings.bounds_margin_m])

    if settings.initial_guess is not None:
        p = np.array([settings.initial_guess.x, settings.initial_guess.y])
    else:
        p = np.array(
            [
                sum(s.position.x for s in sts) / len(sts),
                sum(s.position.y for s in sts) / len(sts),
            ]
        )

    station_coords = np.array([(s.position.x, s.position.y) for s in sts])
    converged = False
    iterations = 0
    for iterations in range(1, settings.max_iterations + 1):
        # nudge off any station position, where the Jacobian is undefined
        clashes = np.hypot(*(p - station_coords).T) < 1e-12
        if np.any(clashes):
            p = p + np.array([settings.step_tolerance_m, 0.0])
        try:
            residuals, jac = residual_vector_and_jacobian(
                Position2D(p[0], p[1]), rd, sts
            )
            step, *_ = np.linalg.lstsq(jac, -residuals, rcond=None)
        except (ZeroDivisionError, np.linalg.LinAlgError):
            break
        step_norm = float(np.hypot(step[0], step[1]))
        while np.hypot(step[0], step[1]) > diag:
            step = step / 2.0
        p = np.clip(p + step, lo, hi)
        if step_norm < settings.step_tolerance_m:
            converged = True
            break

    position = Position2D(float(p[0]), float(p[1]))
    try:
        residuals, _ = residual_vector_and_jacobian(position, rd, sts)
        residual_norm = float(np.linalg.norm(residuals))
    except ZeroDivisionError:
        residual_norm = math.inf
    return CandidateEstimate(
        reference_id=rd.reference_id,
        position=position,
        residual_norm_m=residual_norm,
        converged=converged,
        iterations_used=iterations,
    )


def solve_all_references(
    m: MeasurementSet,
    stations: Sequence[BaseStation],
    settings: SolverSettings | None = None,
) -> list[CandidateEstimate]:
    """One candidate per reference choice, ascending by reference id.

    Candidates that fail to converge are kept (flagged, not dropped); the
    downstream weighting stage decides how much they count.
    """
    sts = check_station_layout(stations)
    if set(m.station_ids) != {s.id for s in sts}:
        raise ValueError(
            f"measurement set stations {m.station_ids} do not match "
            f"layout {tuple(s.id for s in sts)}"
        )
    return [
        solve_single_reference(compute_tdoas(m, s.id), sts, settings) for s in sts
    ]

"""Source-parameter optimization, distance sweeps, and cutoff location.

For each source family the free parameter is the mean photon number
``|alpha|**2`` (plain coherent state) or the squeeze magnitude ``nu``
(interference-tuned sources).  The rate curve over that parameter has a single
clear maximum, so a coarse logarithmic grid brackets it and golden-section
refinement polishes it; the grid guard means a hypothetical second mode would
still be caught at grid resolution.

Distances in a sweep are independent pure computations and could run in
parallel; they are evaluated in grid order here, which is already cheap.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DegenerateInputError, DomainError
from .key_rate import (
    ChannelModel,
    ConstantF,
    DEFAULT_F_POLICY,
    DetectorModel,
    RateBreakdown,
    TableF,
    secure_rate,
)
from .photon_source import Protocol, make_state, mcs_state, p_multi, p_multi_min, p_signal

__all__ = [
    "DistanceSweep",
    "OptimumPoint",
    "Scenario",
    "SourceFamily",
    "cutoff_distance",
    "optimize_param",
    "rate_at",
    "sweep_distance",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class SourceFamily(enum.Enum):
    """Source/protocol combination under study."""

    COHERENT_BB84 = "coherent-bb84"
    MCS_BB84 = "mcs-bb84"
    MCS_SARG04 = "mcs-sarg04"

    @property
    def protocol(self) -> Protocol:
        return Protocol.SARG04 if self is SourceFamily.MCS_SARG04 else Protocol.BB84

    @property
    def param_name(self) -> str:
        """Name of the free source parameter: mean photon number or squeeze."""
        return "alpha2" if self is SourceFamily.COHERENT_BB84 else "nu"


@dataclass(frozen=True)
class Scenario:
    """Everything fixed while the source parameter is varied."""

    source_family: SourceFamily
    channel: ChannelModel
    detector: DetectorModel
    f_policy: ConstantF | TableF = DEFAULT_F_POLICY
    paper_literal_sign: bool = False

    def at_distance(self, distance_l: float) -> "Scenario":
        return dataclasses.replace(self, channel=self.channel.at_distance(distance_l))


@dataclass(frozen=True)
class OptimumPoint:
    """Refined maximum of the rate curve over the source parameter."""

    param_value: float
    breakdown: RateBreakdown
    bracket: tuple[float, float]


@dataclass(frozen=True)
class DistanceSweep:
    """Optimal operating points per distance; ``None`` marks insecure distances.

    ``cutoff_l`` is set when the sweep ends insecure and a cutoff could be
    bisected inside the swept range.
    """

    points: tuple[tuple[float, OptimumPoint | None], ...]
    cutoff_l: float | None


def rate_at(scenario: Scenario, param: float) -> RateBreakdown:
    """Rate breakdown of ``scenario`` at one value of the free source parameter.

    Coherent sources are evaluated at mean photon number ``param`` with the
    generic multi-photon probability; tuned sources are built at squeeze
    ``param`` with their closed-form multi-photon minimum.
    """
    param = float(param)
    if not math.isfinite(param) or param < 0.0:
        raise DomainError(f"param must be finite and >= 0, got {param!r}")
    family = scenario.source_family
    if family is SourceFamily.COHERENT_BB84:
        state = make_state(math.sqrt(param), 0.0)
        p_m = p_multi(state, Protocol.BB84)
    else:
        state = mcs_state(param, family.protocol)
        p_m = p_multi_min(param, family.protocol)
    p_s = p_signal(state, scenario.channel.total_eta())
    return secure_rate(
        p_s,
        p_m,
        scenario.detector,
        scenario.f_policy,
        paper_literal_sign=scenario.paper_literal_sign,
    )


def optimize_param(
    scenario: Scenario,
    *,
    param_min: float = 1e-5,
    param_max: float = 4.0,
    grid_points: int = 200,
    rtol: float = 1e-5,
) -> OptimumPoint | None:
    """Maximize the clamped rate over the source parameter.

    A logarithmic grid locates the best cell; golden-section refinement runs
    within that cell and its neighbours down to relative width ``rtol``.
    Returns ``None`` when no grid point is secure (operation beyond cutoff),
    which is a result, not an error.  The returned optimum never falls below
    the best coarse-grid point.
    """
    if not 0.0 < param_min < param_max:
        raise DomainError("need 0 < param_min < param_max")
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    grid = [float(p) for p in np.geomspace(param_min, param_max, grid_points)]
    rates = [rate_at(scenario, p).R for p in grid]
    best_i = max(range(len(grid)), key=rates.__getitem__)
    if rates[best_i] <= 0.0:
        return None
    lo = grid[best_i - 1] if best_i > 0 else grid[0]
    hi = grid[best_i + 1] if best_i + 1 < len(grid) else grid[-1]
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc = rate_at(scenario, c).R
    fd = rate_at(scenario, d).R
    while hi - lo > rtol * 0.5 * (lo + hi):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = rate_at(scenario, c).R
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = rate_at(scenario, d).R
    # keep the coarse-grid winner if refinement somehow lost ground
    best_param = max((0.5 * (lo + hi), grid[best_i]), key=lambda p: rate_at(scenario, p).R)
    return OptimumPoint(param_value=best_param, breakdown=rate_at(scenario, best_param), bracket=(lo, hi))


def sweep_distance(
    scenario: Scenario,
    l_grid: Iterable[float],
    *,
    cutoff_resolution_km: float = 0.01,
    **search,
) -> DistanceSweep:
    """Optimal operating point per distance over an ascending distance grid.

    When the final grid point is insecure (and the scenario is secure at zero
    distance) the cutoff is located by bisection within the swept range.
    Keyword arguments in ``search`` forward to :func:`optimize_param`.
    """
    distances = [float(l) for l in l_grid]
    if any(b < a for a, b in zip(distances, distances[1:])):
        raise DomainError("l_grid must be sorted ascending")
    points = tuple((l, optimize_param(scenario.at_distance(l), **search)) for l in distances)
    cutoff_l = None
    if points and points[-1][1] is None:
        if optimize_param(scenario.at_distance(0.0), **search) is not None:
            cutoff_l = cutoff_distance(
                scenario, distances[-1], resolution_km=cutoff_resolution_km, **search
            )
    return DistanceSweep(points=points, cutoff_l=cutoff_l)


def cutoff_distance(
    scenario: Scenario,
    l_max: float,
    *,
    resolution_km: float = 0.01,
    **search,
) -> float:
    """Largest distance with a positive unclamped optimal rate, by bisection.

    The unclamped rate's sign drives the bisection; the clamped rate is flat at
    zero past the cutoff and would give the search nothing to work with.
    Returns ``l_max`` itself when still secure there (no cutoff within range);
    raises ``DegenerateInputError`` when insecure already at zero distance.
    """
    if not math.isfinite(l_max) or l_max <= 0.0:
        raise DomainError(f"l_max must be finite and > 0, got {l_max!r}")

    def secure(l: float) -> bool:
        point = optimize_param(scenario.at_distance(l), **search)
        return point is not None and point.breakdown.R_raw > 0.0

    if not secure(0.0):
        raise DegenerateInputError("scenario is insecure even at zero distance")
    if secure(l_max):
        return l_max
    lo, hi = 0.0, l_max
    while hi - lo > resolution_km:
        mid = 0.5 * (lo + hi)
        if secure(mid):
            lo = mid
        else:
            hi = mid
    return lo

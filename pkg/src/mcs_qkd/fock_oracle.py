"""Brute-force verifiers for the closed-form detection statistics.

Two independent routes reproduce the no-click probability of a lossy-detected
source state:

* ``p0_via_fock`` sums the truncated photon-number distribution against the
  binomial no-click weight (1 - eta)**n.
* ``p0_via_quadrature`` integrates over the coherent-state resolution of the
  identity,

      P0 = (1/pi) * Int d^2beta  exp(-eta |beta|^2 / (1-eta)) / (1-eta)
                                 * |<beta|U|alpha>|^2,

  where <beta|U|alpha> is the coherent-state overlap of the squeezed coherent
  state.  The integrand is a 2-D Gaussian times a bounded factor, so
  Gauss-Hermite nodes scaled to the Gaussian envelope converge spectrally.

Neither route shares arithmetic with the closed forms it checks: the Fock sum
rests on the amplitude recurrence, the quadrature on pointwise overlap values.
Grid verification is pure and order-independent; reports come back in grid
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InsufficientTruncationError, TruncationError
from .photon_source import (
    Protocol,
    SqueezedCoherentState,
    fock_coefficients,
    make_state,
    mcs_state,
    p_multi_min,
    p_signal_mcs,
    p_vacuum_lossy,
)

__all__ = [
    "DEFAULT_FOCK_N_MAX",
    "DEFAULT_GRID",
    "DEFAULT_QUAD_NODES",
    "FOCK_SUM",
    "FOCK_TOLERANCE",
    "QUADRATURE",
    "QUADRATURE_TOLERANCE",
    "OracleReport",
    "max_abs_diff_by_formula",
    "p0_via_fock",
    "p0_via_quadrature",
    "verify_closed_forms",
]

FOCK_SUM = "FockSum"
QUADRATURE = "Quadrature"

#: Acceptance thresholds per oracle route.
FOCK_TOLERANCE = 1e-9
QUADRATURE_TOLERANCE = 1e-6

#: Generous margin over the adaptive truncation rule at desk-scale parameters.
DEFAULT_FOCK_N_MAX = 128
DEFAULT_QUAD_NODES = 96

#: Fock oracle refuses to run with more unresolved probability mass than this.
_MAX_UNRESOLVED_MASS = 1e-10

DEFAULT_GRID: tuple[tuple[float, float, float], ...] = tuple(
    (alpha, nu, eta)
    for alpha in (0.0, 0.5, 1.0, 2.0)
    for nu in (0.0, 0.3, 0.8)
    for eta in (0.05, 0.5, 0.95)
)


@dataclass(frozen=True)
class OracleReport:
    """One closed form checked against one brute-force value at one grid point.

    ``alpha``/``nu``/``eta`` identify the state and efficiency actually used
    by the check (for the interference-tuned formulas, ``alpha`` is the tuned
    displacement rather than the raw grid value).  ``resolution`` is the
    truncation order (FockSum) or the per-axis node count (Quadrature).
    """

    formula: str
    alpha: float
    nu: float
    eta: float
    method: str
    resolution: int
    closed_form_value: float
    oracle_value: float

    @property
    def abs_diff(self) -> float:
        return abs(self.closed_form_value - self.oracle_value)

    @property
    def tolerance(self) -> float:
        return FOCK_TOLERANCE if self.method == FOCK_SUM else QUADRATURE_TOLERANCE

    @property
    def within_tolerance(self) -> bool:
        return self.abs_diff < self.tolerance


def p0_via_fock(state: SqueezedCoherentState, eta: float, n_max: int = DEFAULT_FOCK_N_MAX) -> float:
    """No-click probability as a binomially weighted photon-number sum.

    Each n-photon component survives the loss channel undetected with
    probability (1 - eta)**n, so P0 = sum_n |C_n|^2 (1 - eta)**n.  Raises
    ``InsufficientTruncationError`` when more than 1e-10 of probability mass
    remains beyond order ``n_max``.
    """
    if not math.isfinite(eta) or eta < 0.0 or eta > 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
    if n_max < 8:
        raise DomainError(f"n_max must be >= 8, got {n_max!r}")
    try:
        dist = fock_coefficients(state, n_cap=n_max)
    except TruncationError as err:
        if 1.0 - err.partial_mass > _MAX_UNRESOLVED_MASS:
            raise InsufficientTruncationError(
                f"{1.0 - err.partial_mass:.3e} of probability mass is unresolved at order "
                f"{n_max}; raise n_max",
                partial_mass=err.partial_mass,
                partial=err.partial,
            ) from err
        dist = err.partial
    loss = 1.0 - eta
    return min(1.0, math.fsum(c * c * loss**n for n, c in enumerate(dist.amplitudes)))


@lru_cache(maxsize=8)
def _hermgauss(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    # cached because node generation dominates the integrand cost; never mutated
    return np.polynomial.hermite.hermgauss(nodes)


def p0_via_quadrature(
    state: SqueezedCoherentState, eta: float, nodes: int = DEFAULT_QUAD_NODES
) -> float:
    """No-click probability by 2-D Gauss-Hermite quadrature over the coherent plane.

    The integrand decays Gaussianly with per-axis rates
    a_u = 1/(1-eta) + nu/mu and a_v = 1/(1-eta) - nu/mu (both positive since
    mu > nu*(1-eta)), so the nodes are scaled per axis to match.  The squared
    overlap is evaluated in complex arithmetic -- its -nu*conj(beta)**2 term
    mixes the two axes -- and weights are recombined in log space so the
    e**(t**2) de-weighting cannot overflow at large nodes.

    Only interior efficiencies are integrable: the Gaussian weight degenerates
    at eta = 0 and eta = 1, where callers should use the Fock sum instead.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(
            f"quadrature needs eta strictly inside (0, 1), got {eta!r}; "
            "use the Fock-sum oracle at the endpoints"
        )
    if nodes < 32:
        raise DomainError(f"nodes must be >= 32 per axis, got {nodes!r}")
    alpha, nu, mu = state.alpha, state.nu, state.mu
    t, w = _hermgauss(nodes)
    a_u = 1.0 / (1.0 - eta) + nu / mu
    a_v = 1.0 / (1.0 - eta) - nu / mu
    u = t[:, None] / math.sqrt(a_u)  # Re(beta)
    v = t[None, :] / math.sqrt(a_v)  # Im(beta)
    beta_conj = u - 1j * v
    abs_sq = u * u + v * v
    log_overlap_sq = 2.0 * np.real(
        -0.5 * (alpha * alpha + abs_sq)
        + (nu * alpha * alpha - nu * beta_conj**2 + 2.0 * beta_conj * alpha) / (2.0 * mu)
    ) - math.log(mu)
    log_weight = -eta * abs_sq / (1.0 - eta) - math.log(math.pi * (1.0 - eta))
    exponent = log_weight + log_overlap_sq + t[:, None] ** 2 + t[None, :] ** 2
    total = float(np.sum(w[:, None] * w[None, :] * np.exp(exponent))) / math.sqrt(a_u * a_v)
    return min(1.0, total)


def _pm_via_fock(nu: float, protocol: Protocol, n_max: int) -> float:
    """Multi-photon probability of the tuned source from the truncated expansion."""
    dist = fock_coefficients(mcs_state(nu, protocol), n_cap=n_max)
    orders = 2 if protocol is Protocol.BB84 else 3
    return max(0.0, 1.0 - math.fsum(dist.amplitudes[n] ** 2 for n in range(orders)))


def verify_closed_forms(
    grid: Iterable[tuple[float, float, float]] | None = None,
    *,
    fock_n_max: int = DEFAULT_FOCK_N_MAX,
    quad_nodes: int = DEFAULT_QUAD_NODES,
    closed_form_offset: float = 0.0,
) -> list[OracleReport]:
    """Check every closed form against its brute-force counterpart on a grid.

    For each (alpha, nu, eta) point this emits, in order: the Fock-sum check
    of the lossy vacuum probability, the quadrature check of the same formula
    (skipped at eta endpoints where the weight degenerates), and Fock-sum
    checks of the tuned-source multi-photon minima and signal probabilities
    for both protocols.  ``closed_form_offset`` shifts every closed-form value
    and exists only so callers can confirm the checker detects discrepancies.
    """
    if grid is None:
        grid = DEFAULT_GRID
    reports: list[OracleReport] = []
    for alpha, nu, eta in grid:
        state = make_state(alpha, nu)
        closed = p_vacuum_lossy(state, eta) + closed_form_offset
        reports.append(
            OracleReport(
                "p_vacuum_lossy", alpha, nu, eta, FOCK_SUM, fock_n_max,
                closed, p0_via_fock(state, eta, fock_n_max),
            )
        )
        if 0.0 < eta < 1.0:
            reports.append(
                OracleReport(
                    "p_vacuum_lossy", alpha, nu, eta, QUADRATURE, quad_nodes,
                    closed, p0_via_quadrature(state, eta, quad_nodes),
                )
            )
        for protocol in Protocol:
            tuned = mcs_state(nu, protocol)
            reports.append(
                OracleReport(
                    f"p_multi_min[{protocol.value}]", tuned.alpha, nu, eta,
                    FOCK_SUM, fock_n_max,
                    p_multi_min(nu, protocol) + closed_form_offset,
                    _pm_via_fock(nu, protocol, fock_n_max),
                )
            )
            reports.append(
                OracleReport(
                    f"p_signal_mcs[{protocol.value}]", tuned.alpha, nu, eta,
                    FOCK_SUM, fock_n_max,
                    p_signal_mcs(nu, eta, protocol) + closed_form_offset,
                    1.0 - p0_via_fock(tuned, eta, fock_n_max),
                )
            )
    return reports


def max_abs_diff_by_formula(reports: Sequence[OracleReport]) -> dict[tuple[str, str], float]:
    """Largest deviation per (formula, method) pair, in first-seen order."""
    worst: dict[tuple[str, str], float] = {}
    for report in reports:
        key = (report.formula, report.method)
        worst[key] = max(worst.get(key, 0.0), report.abs_diff)
    return worst

"""l1-norm coherence of states written in the computational product basis."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError
from .qstate import BlochDecomposition, DensityMatrix, bloch_decompose, partial_trace

__all__ = [
    "CoherenceReport",
    "l1_coherence",
    "coherence_report",
    "is_incoherent",
    "bloch_form_global_coherence",
    "bloch_cross_check",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoherenceReport:
    """Global, local and residual l1 coherence of a two-qubit state."""

    global_: float
    local_a: float
    local_b: float

    @property
    def residual(self) -> float:
        return self.global_ - self.local_a - self.local_b

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.global_, self.local_a, self.local_b, self.residual)


def l1_coherence(rho: DensityMatrix) -> float:
    """Sum of the magnitudes of all off-diagonal entries."""
    mags = np.abs(rho.entries)
    return float(mags.sum() - np.trace(mags))


def coherence_report(rho_ab: DensityMatrix) -> CoherenceReport:
    if rho_ab.dim != 4:
        raise DimensionError(f"coherence_report expects a two-qubit state, got dim {rho_ab.dim}")
    return CoherenceReport(
        global_=l1_coherence(rho_ab),
        local_a=l1_coherence(partial_trace(rho_ab, 0, (2, 2))),
        local_b=l1_coherence(partial_trace(rho_ab, 1, (2, 2))),
    )


def is_incoherent(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    off = rho.entries - np.diag(np.diag(rho.entries))
    return bool(np.all(np.abs(off) < tol))


def bloch_form_global_coherence(b: BlochDecomposition) -> float:
    """Six-square-root expression for the global l1 coherence in terms of Pauli coefficients.

    This closed form is only a diagnostic; several of its radicands go negative
    for generic states, in which case :class:`DomainError` is raised.
    """
    x, y, t = b.x, b.y, b.t
    radicands = (
        (y[0] ** 2 + t[2, 0] ** 2) + (y[1] ** 2 + t[2, 1] ** 2),
        (y[0] ** 2 - t[2, 0] ** 2) + (y[1] ** 2 - t[2, 1] ** 2),
        (x[0] ** 2 + t[0, 2] ** 2) + (x[1] ** 2 + t[1, 2] ** 2),
        (x[0] ** 2 - t[0, 2] ** 2) + (x[1] ** 2 - t[1, 2] ** 2),
        (t[0, 0] ** 2 + t[1, 1] ** 2) + (t[0, 1] ** 2 - t[1, 0] ** 2),
        (t[0, 0] ** 2 - t[1, 1] ** 2) + (t[0, 1] ** 2 + t[1, 0] ** 2),
    )
    worst = min(radicands)
    if worst < -1e-12:
        raise DomainError(f"negative radicand {worst:.3e} in Bloch-form coherence")
    return 0.5 * float(sum(np.sqrt(max(r, 0.0)) for r in radicands))


def bloch_cross_check(rho_ab: DensityMatrix, tol: float = 1e-9) -> tuple[float, Optional[float], bool]:
    """Compare the Bloch-form expression with the direct l1 sum.

    Returns ``(direct, bloch_or_None, agree)``. A domain failure counts as
    ``agree=False`` with ``bloch_or_None=None``. Disagreements are logged.
    """
    direct = l1_coherence(rho_ab)
    try:
        closed = bloch_form_global_coherence(bloch_decompose(rho_ab))
    except DomainError as exc:
        log.info("Bloch-form coherence undefined: %s", exc)
        return direct, None, False
    agree = abs(closed - direct) < tol
    if not agree:
        log.info("Bloch-form coherence %.12g disagrees with l1 sum %.12g", closed, direct)
    return direct, closed, agree

"""Ramsey interferometry in the phase domain.

The pulse sequence exp(-i pi/2 Jy) exp(-i phi Jz) exp(+i pi/2 Jy) collapses to
exp(-i phi Jx); detection is a projection on Jy.  Output moments are written
in terms of input-state moments (Heisenberg picture):

    Jy_out = cos(phi) Jy - sin(phi) Jz
    Var Jy_out = cos^2 Var Jy + sin^2 Var Jz - sin(2 phi) Cov(Jy, Jz)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import bound_from_fisher, cfi, qfi
from .spin import SpinState, moments, rotate

SLOPE_TOL = 1e-12
SQL_MARGIN = 1e-9  # coherent states sit exactly at the limit; ignore roundoff below it


def ramsey_evolve(state: SpinState, phase: float) -> SpinState:
    """exp(-i phase Jx)|state>."""
    return rotate(state, "x", phase)


def ramsey_evolve_three_step(state: SpinState, phase: float) -> SpinState:
    """Explicit pulse / free evolution / pulse form of :func:`ramsey_evolve`."""
    first = rotate(state, "y", -math.pi / 2)
    second = rotate(first, "z", phase)
    return rotate(second, "y", math.pi / 2)


@dataclass(frozen=True)
class OutputMoments:
    mean: float
    second: float
    variance: float


def output_moments_from_input(means, cov, phase):
    """Vectorized <Jy_out>, <Jy_out^2>, Var Jy_out and d<Jy_out>/dphi.

    ``means``/``cov`` are input-state moment arrays of shape (..., 3)/(..., 3, 3).
    """
    c, s = np.cos(phase), np.sin(phase)
    my, mz = means[..., 1], means[..., 2]
    vy, vz, cyz = cov[..., 1, 1], cov[..., 2, 2], cov[..., 1, 2]
    mean = my * c - mz * s
    variance = vy * c**2 + vz * s**2 - np.sin(2 * phase) * cyz
    slope = -my * s - mz * c
    return mean, variance, slope


def heisenberg_moments(state: SpinState, phase: float) -> OutputMoments:
    ms = moments(state)
    c, s = math.cos(phase), math.sin(phase)
    second = (
        ms.second[1, 1] * c**2
        + ms.second[2, 2] * s**2
        # ms.second holds <{Jy, Jz}>/2
        - math.sin(2 * phase) * ms.second[1, 2]
    )
    mean, variance, _ = output_moments_from_input(ms.means, ms.covariance, phase)
    return OutputMoments(float(mean), float(second), float(variance))


def delta_phi_from_moments(means, cov, phase) -> np.ndarray:
    """Error-propagation phase uncertainty; NaN where the fringe slope vanishes."""
    _, variance, slope = output_moments_from_input(means, cov, phase)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(
            np.abs(slope) < SLOPE_TOL,
            np.nan,
            np.sqrt(np.maximum(variance, 0.0)) / np.abs(slope),
        )


def phase_uncertainty(state: SpinState, phase: float) -> float | None:
    """Delta phi = Delta Jy_out / |d<Jy_out>/d phi|, or None at a fringe extremum."""
    ms = moments(state)
    value = float(delta_phi_from_moments(ms.means, ms.covariance, phase))
    return None if math.isnan(value) else value


@dataclass(frozen=True, eq=False)
class PhaseScan:
    two_j: int
    phases: np.ndarray
    delta_phi: np.ndarray  # NaN marks an undefined point
    fisher_bound: np.ndarray | None = field(default=None)
    qfi_bound: float | None = None

    @property
    def scaled_delta_phi(self) -> np.ndarray:
        """sqrt(2J) Delta phi, i.e. relative to a coherent state at small phase."""
        return math.sqrt(self.two_j) * self.delta_phi

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.delta_phi)

    def rows(self):
        """(phi, delta_phi, scaled, cfi_bound, flag) with None for undefined entries."""
        scaled = self.scaled_delta_phi
        for i, ph in enumerate(self.phases):
            ok = not math.isnan(self.delta_phi[i])
            bound = None
            if self.fisher_bound is not None and not math.isnan(self.fisher_bound[i]):
                bound = float(self.fisher_bound[i])
            yield (
                float(ph),
                float(self.delta_phi[i]) if ok else None,
                float(scaled[i]) if ok else None,
                bound,
                "ok" if ok else "undefined",
            )


def phase_scan(state: SpinState, phases, with_fisher: bool = False) -> PhaseScan:
    grid = np.asarray(phases, dtype=float).reshape(-1)
    if not np.all(np.isfinite(grid)):
        raise ValueError("phase grid must be finite")
    ms = moments(state)
    delta = delta_phi_from_moments(ms.means, ms.covariance, grid)
    delta = np.asarray(delta, dtype=float).reshape(grid.shape)
    fisher = None
    qbound = None
    if with_fisher:
        fisher = np.array(
            [
                np.nan if (b := bound_from_fisher(cfi(state, ph, "y"))) is None else b
                for ph in grid
            ]
        )
        qbound = bound_from_fisher(qfi(state, "x"))
    return PhaseScan(state.two_j, grid, delta, fisher, qbound)


def sub_sql_interval(state: SpinState, step: float = 1e-3, limit: float = math.pi / 2):
    """Largest (lo, hi) around phase 0 on which sqrt(2J) Delta phi < 1 - SQL_MARGIN.

    Walks outward from 0 in ``step`` increments up to ``limit``; returns None if
    the state is not sub-SQL at phase 0.
    """
    n = int(round(limit / step))
    grid = step * np.arange(-n, n + 1)
    scan = phase_scan(state, grid)
    scaled = scan.scaled_delta_phi
    below = np.where(np.isnan(scaled), False, scaled < 1.0 - SQL_MARGIN)
    centre = n
    if not below[centre]:
        return None
    hi = centre
    while hi + 1 < len(grid) and below[hi + 1]:
        hi += 1
    lo = centre
    while lo - 1 >= 0 and below[lo - 1]:
        lo -= 1
    return float(grid[lo]), float(grid[hi])


def orient_for_ramsey(state: SpinState) -> SpinState:
    """Rotate about y so the mean spin's x-z projection lies along the z axis.

    Rotations about y leave Var Jy and |<J>| unchanged, so every fixed-y
    squeezing value is preserved while the Ramsey fringe slope at phase 0 is
    maximized.
    """
    ms = moments(state)
    mx, mz = ms.means[0], ms.means[2]
    if math.hypot(mx, mz) < 1e-12:
        return state
    # exp(-i a Jy) maps <Jx> -> <Jx> cos a + <Jz> sin a, so pick a with that zero
    angle = math.atan2(-mx, mz)
    return rotate(state, "y", angle)

"""Squeezing parameters, entanglement-depth check and Fisher information.

The ``*_from_moments`` functions work on moment arrays of shape (..., 3) and
(..., 3, 3) and mark undefined values with NaN; they are what the optimizer
vectorizes over.  The state-level functions return ``None`` for an undefined
metric so that nothing downstream ever sees a silent NaN or Inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spin import (
    AXIS_INDEX,
    MomentSet,
    SpinState,
    as_axis,
    moments,
    operators_for,
    perpendicular_pair,
    rotation_matrix,
    two_j_of,
)

DENOM_TOL = 1e-12
MSD_TOL = 1e-9
PROB_TOL = 1e-12

PLANES = {"xy": (0, 1), "yz": (1, 2), "zx": (2, 0)}
_PLANE_ALIASES = {"yx": "xy", "zy": "yz", "xz": "zx"}


def canonical_plane(plane: str) -> str:
    key = plane.lower()
    key = _PLANE_ALIASES.get(key, key)
    if key not in PLANES:
        raise ValueError(f"unknown plane {plane!r}; expected one of xy, yz, zx")
    return key


def _defined(value) -> float | None:
    value = float(value)
    return None if math.isnan(value) else value


def _quad(n, cov, m=None):
    """n . cov . m over the trailing axes."""
    m = n if m is None else m
    return np.einsum("...i,...ij,...j->...", n, cov, m)


def sorensen_from_moments(two_j: int, means, cov, axis) -> np.ndarray:
    n = as_axis(axis)
    u, v = perpendicular_pair(n)
    denom = (means @ u) ** 2 + (means @ v) ** 2
    var = _quad(n, cov)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom < DENOM_TOL, np.nan, two_j * var / denom)


def wineland_from_moments(two_j: int, means, cov, axis) -> np.ndarray:
    n = as_axis(axis)
    denom = np.sum(means**2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom < DENOM_TOL, np.nan, two_j * _quad(n, cov) / denom)


def _msd_frame(means):
    """Unit mean-spin direction and an orthonormal pair perpendicular to it, row-wise."""
    length = np.linalg.norm(means, axis=-1, keepdims=True)
    safe = np.where(length > 0, length, 1.0)
    n = means / safe
    seed = np.zeros_like(n)
    idx = np.argmin(np.abs(n), axis=-1)
    np.put_along_axis(seed, idx[..., None], 1.0, axis=-1)
    u = seed - np.sum(seed * n, axis=-1, keepdims=True) * n
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    v = np.cross(n, u)
    return n, u, v


def wineland_min_from_moments(two_j: int, means, cov) -> np.ndarray:
    """Wineland parameter with the numerator minimized over the plane perpendicular to the MSD."""
    denom = np.sum(means**2, axis=-1)
    _, u, v = _msd_frame(means)
    a = _quad(u, cov)
    b = _quad(u, cov, v)
    c = _quad(v, cov)
    smallest = 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom < DENOM_TOL, np.nan, two_j * smallest / denom)


def planar_from_moments(means, cov, plane: str) -> np.ndarray:
    i, j = PLANES[canonical_plane(plane)]
    polarization = np.sqrt(means[..., i] ** 2 + means[..., j] ** 2)
    spread = cov[..., i, i] + cov[..., j, j]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(polarization < DENOM_TOL, np.nan, spread / polarization)


def xi_sorensen(state: SpinState, axis="z") -> float | None:
    """N Var(J.n) / (mean spin in the plane perpendicular to n)^2; None when that mean vanishes."""
    ms = moments(state)
    return _defined(sorensen_from_moments(state.two_j, ms.means, ms.covariance, axis))


def xi_wineland(state: SpinState, axis="y") -> float | None:
    """N Var(J.n) / |<J>|^2 for a fixed direction n."""
    ms = moments(state)
    return _defined(wineland_from_moments(state.two_j, ms.means, ms.covariance, axis))


def xi_wineland_min(state: SpinState) -> float | None:
    ms = moments(state)
    return _defined(wineland_min_from_moments(state.two_j, ms.means, ms.covariance))


def xi_planar(state: SpinState, plane="xy") -> float | None:
    """(Var Ji + Var Jj) / sqrt(<Ji>^2 + <Jj>^2) for the plane ij."""
    ms = moments(state)
    return _defined(planar_from_moments(ms.means, ms.covariance, plane))


def mean_spin_direction(state_or_moments) -> np.ndarray | None:
    ms = state_or_moments if isinstance(state_or_moments, MomentSet) else moments(state_or_moments)
    length = np.linalg.norm(ms.means)
    if length < MSD_TOL:
        return None
    return ms.means / length


@dataclass(frozen=True, eq=False)
class SqueezingReport:
    two_j: int
    xi_sorensen: dict
    xi_wineland: dict
    xi_wineland_min: float | None
    xi_planar: dict
    moments: MomentSet = field(repr=False)
    msd: np.ndarray | None

    def to_dict(self) -> dict:
        """JSON-ready dict; undefined values become the string 'undefined'."""

        def enc(value):
            return "undefined" if value is None else float(value)

        ms = self.moments
        return {
            "two_j": self.two_j,
            "xi_sorensen": {k: enc(v) for k, v in self.xi_sorensen.items()},
            "xi_wineland": {k: enc(v) for k, v in self.xi_wineland.items()},
            "xi_wineland_min": enc(self.xi_wineland_min),
            "xi_planar": {k: enc(v) for k, v in self.xi_planar.items()},
            "msd": "undefined" if self.msd is None else [float(x) for x in self.msd],
            "moments": {
                "means": [float(x) for x in ms.means],
                "second": [[float(x) for x in row] for row in ms.second],
                "covariance": [[float(x) for x in row] for row in ms.covariance],
            },
        }


def squeezing_report(state: SpinState) -> SqueezingReport:
    ms = moments(state)
    m, c, tj = ms.means, ms.covariance, state.two_j
    return SqueezingReport(
        two_j=tj,
        xi_sorensen={k: _defined(sorensen_from_moments(tj, m, c, k)) for k in "xyz"},
        xi_wineland={k: _defined(wineland_from_moments(tj, m, c, k)) for k in "xyz"},
        xi_wineland_min=_defined(wineland_min_from_moments(tj, m, c)),
        xi_planar={p: _defined(planar_from_moments(m, c, p)) for p in PLANES},
        moments=ms,
        msd=mean_spin_direction(ms),
    )


@dataclass(frozen=True)
class DepthTable:
    """Lower bounds D_k on the planar parameter for k-producible states of spin-``spin_value``
    particles.  Entries are user supplied."""

    spin_value: float
    bounds: dict

    def __post_init__(self):
        two_j_of(self.spin_value)
        if not self.bounds:
            raise ValueError("depth table needs at least one bound")
        items = sorted((int(k), float(v)) for k, v in self.bounds.items())
        for k, v in items:
            if k < 1:
                raise ValueError(f"bound index must be >= 1, got {k}")
            if not 0.0 < v <= 0.5:
                raise ValueError(f"bound D_{k} = {v} outside (0, 0.5]")
        values = [v for _, v in items]
        if any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("bounds must be non-increasing in k")
        object.__setattr__(self, "bounds", dict(items))


# single-particle spin-1 bound; every other entry has to come from the user
DEFAULT_DEPTH_TABLE = DepthTable(spin_value=1.0, bounds={1: 0.45})


@dataclass(frozen=True)
class DepthVerdict:
    kind: str  # "entangled", "none" or "insufficient"
    depth: int | None = None

    def __str__(self):
        if self.kind == "entangled":
            return f"at least {self.depth}-particle entanglement"
        if self.kind == "none":
            return "no entanglement inferred"
        return "insufficient table"


def depth_check(xi_par: float, J, table: DepthTable = DEFAULT_DEPTH_TABLE) -> DepthVerdict:
    """Entanglement depth certified by a planar squeezing value.

    xi_par < D_k rules out k-producible states, so the largest such k gives a
    depth of at least k + 1.  Only bounds with k <= J/j (j the particle spin)
    are relevant; if none are supplied the verdict is "insufficient".
    """
    two_j = two_j_of(J)
    particles = two_j // two_j_of(table.spin_value)
    usable = {k: d for k, d in table.bounds.items() if k <= particles}
    if not usable:
        return DepthVerdict("insufficient")
    violated = [k for k, d in usable.items() if xi_par < d]
    if not violated:
        return DepthVerdict("none")
    return DepthVerdict("entangled", max(violated) + 1)


def _generator(state: SpinState, generator) -> np.ndarray:
    if isinstance(generator, np.ndarray) and generator.ndim == 2:
        if generator.shape != (state.dim, state.dim):
            raise ValueError(f"generator shape {generator.shape} does not match dimension {state.dim}")
        return generator
    return operators_for(state).along(generator)


def qfi(state: SpinState, generator="z") -> float:
    """Pure-state quantum Fisher information 4(<d psi|d psi> - |<d psi|psi>|^2), d psi = -iG psi."""
    g = _generator(state, generator)
    tangent = -1j * (g @ state.amplitudes)
    overlap = np.vdot(tangent, state.amplitudes)
    return float(4.0 * (np.vdot(tangent, tangent).real - abs(overlap) ** 2))


def cfi(state: SpinState, phase: float, measurement_axis="y") -> float:
    """Classical Fisher information of a projective J.n measurement after exp(-i phase Jx).

    Outcome probabilities below 1e-12 are skipped.
    """
    n = as_axis(measurement_axis)
    ops = operators_for(state)
    psi = rotation_matrix(state.two_j, "x", phase) @ state.amplitudes
    if n.tolist() in ([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]):
        basis = np.eye(state.dim, dtype=complex)
    else:
        _, basis = np.linalg.eigh(ops.along(n))
    proj = basis.conj().T @ psi
    proj_tangent = basis.conj().T @ (-1j * (ops.Jx @ psi))
    prob = np.abs(proj) ** 2
    dprob = 2.0 * np.real(proj.conj() * proj_tangent)
    keep = prob >= PROB_TOL
    return float(np.sum(dprob[keep] ** 2 / prob[keep]))


def bound_from_fisher(fisher: float) -> float | None:
    """Cramer-Rao standard deviation F^(-1/2); None for non-positive information."""
    if not fisher > 0:
        return None
    return 1.0 / math.sqrt(fisher)


__all__ = [
    "AXIS_INDEX",
    "DENOM_TOL",
    "DEFAULT_DEPTH_TABLE",
    "DepthTable",
    "DepthVerdict",
    "PLANES",
    "SqueezingReport",
    "bound_from_fisher",
    "canonical_plane",
    "cfi",
    "depth_check",
    "mean_spin_direction",
    "planar_from_moments",
    "qfi",
    "sorensen_from_moments",
    "squeezing_report",
    "wineland_from_moments",
    "wineland_min_from_moments",
    "xi_planar",
    "xi_sorensen",
    "xi_wineland",
    "xi_wineland_min",
]

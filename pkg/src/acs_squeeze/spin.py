"""Spin-J states in the Dicke basis, angular-momentum matrices, moments and rotations.

Amplitude index convention: position ``k`` holds the amplitude of ``|J, M>`` with
``M = k - J``, i.e. position 0 is ``M = -J`` and the index runs upward.  Spin
values are carried as the integer ``two_j = 2J`` so half-integers never go
through floating point identity tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

ALG_TOL = 1e-12  # algebraic identities
PROP_TOL = 1e-10  # propagated quantities

AXES = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}
AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def two_j_of(J) -> int:
    """Convert a spin value (int, float, Fraction or '3/2' string) to 2J.

    Raises ValueError unless 2J is a positive integer.
    """
    if isinstance(J, str):
        J = Fraction(J)
    if isinstance(J, bool):
        raise ValueError(f"invalid spin value {J!r}")
    try:
        doubled = 2 * J
    except TypeError:
        raise ValueError(f"invalid spin value {J!r}") from None
    if isinstance(doubled, float):
        if not np.isfinite(doubled) or abs(doubled - round(doubled)) > 1e-12:
            raise ValueError(f"2J must be an integer, got J={J!r}")
        doubled = round(doubled)
    elif isinstance(doubled, Fraction):
        if doubled.denominator != 1:
            raise ValueError(f"2J must be an integer, got J={J}")
        doubled = int(doubled)
    doubled = int(doubled)
    if doubled < 1:
        raise ValueError(f"J must be at least 1/2, got J={J!r}")
    return doubled


def spin_label(two_j: int) -> str:
    """Human-readable J, e.g. '3/2' or '5'."""
    return str(two_j // 2) if two_j % 2 == 0 else f"{two_j}/2"


def as_axis(axis) -> np.ndarray:
    """Return a unit 3-vector for an axis name or a vector; reject non-unit input."""
    if isinstance(axis, str):
        try:
            return AXES[axis.lower()].copy()
        except KeyError:
            raise ValueError(f"unknown axis {axis!r}") from None
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValueError(f"axis must be a finite 3-vector, got {axis!r}")
    if abs(np.linalg.norm(n) - 1.0) > PROP_TOL:
        raise ValueError(f"axis must be normalized, |n| = {np.linalg.norm(n)!r}")
    return n


def perpendicular_pair(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair spanning the plane perpendicular to ``n``.

    Coordinate axes map to the remaining two coordinate axes in cyclic order
    (x -> (y, z), y -> (z, x), z -> (x, y)); any other direction is
    Gram-Schmidt orthogonalized against its smallest-component coordinate axis.
    """
    n = np.asarray(n, dtype=float)
    for name, k in AXIS_INDEX.items():
        if np.array_equal(np.abs(n), AXES[name]):
            return AXES["xyz"[(k + 1) % 3]].copy(), AXES["xyz"[(k + 2) % 3]].copy()
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(n)))] = 1.0
    u = seed - np.dot(seed, n) * n
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v


@dataclass(frozen=True, eq=False)
class SpinState:
    """Pure spin-J state; ``amplitudes[k]`` is the amplitude of ``|J, k - J>``."""

    two_j: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 1:
            raise ValueError(f"two_j must be a positive integer, got {self.two_j!r}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.two_j + 1,):
            raise ValueError(
                f"expected {self.two_j + 1} amplitudes for 2J={self.two_j}, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > PROP_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r}); use SpinState.normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "two_j", int(self.two_j))
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, two_j: int, amplitudes) -> "SpinState":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if not norm > 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(two_j, amps / norm)

    @classmethod
    def dicke(cls, J, M) -> "SpinState":
        """Dicke state ``|J, M>``."""
        two_j = two_j_of(J)
        k = Fraction(M) + Fraction(two_j, 2)
        if k.denominator != 1 or not 0 <= k <= two_j:
            raise ValueError(f"M={M} is not a valid projection for J={spin_label(two_j)}")
        amps = np.zeros(two_j + 1, dtype=complex)
        amps[int(k)] = 1.0
        return cls(two_j, amps)

    @property
    def J(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def fidelity(self, other: "SpinState") -> float:
        """|<self|other>|^2."""
        if other.two_j != self.two_j:
            raise ValueError("states have different J")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def to_dict(self) -> dict:
        return {
            "two_j": self.two_j,
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpinState":
        amps = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(int(data["two_j"]), amps)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SpinState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class AngularMomentumOps:
    """Dense Jx, Jy, Jz for fixed J (hbar = 1)."""

    two_j: int
    Jx: np.ndarray = field(repr=False)
    Jy: np.ndarray = field(repr=False)
    Jz: np.ndarray = field(repr=False)

    @property
    def J(self) -> float:
        return self.two_j / 2

    @property
    def stack(self) -> np.ndarray:
        """Array of shape (3, d, d) ordered x, y, z."""
        return np.stack([self.Jx, self.Jy, self.Jz])

    def along(self, axis) -> np.ndarray:
        """The generator J . n for an axis name or unit vector."""
        n = as_axis(axis)
        return n[0] * self.Jx + n[1] * self.Jy + n[2] * self.Jz


@lru_cache(maxsize=128)
def _operators(two_j: int) -> AngularMomentumOps:
    J = two_j / 2
    m = np.arange(two_j + 1) - J
    # <J, M+1| J+ |J, M> sits just below the diagonal with ascending M
    raise_ = np.diag(np.sqrt(J * (J + 1) - m[:-1] * (m[:-1] + 1)), -1).astype(complex)
    lower = raise_.T.copy()
    jx = 0.5 * (raise_ + lower)
    jy = -0.5j * (raise_ - lower)
    jz = np.diag(m).astype(complex)
    for mat in (jx, jy, jz):
        mat.setflags(write=False)
    return AngularMomentumOps(two_j, jx, jy, jz)


def make_operators(J) -> AngularMomentumOps:
    """Angular-momentum matrices for spin J in the ascending-M Dicke basis."""
    return _operators(two_j_of(J))


def operators_2j(two_j: int) -> AngularMomentumOps:
    """Cached operators keyed by the integer 2J."""
    return _operators(two_j)


def operators_for(state: SpinState) -> AngularMomentumOps:
    return _operators(state.two_j)


@dataclass(frozen=True, eq=False)
class MomentSet:
    """First and symmetrized second moments of (Jx, Jy, Jz) for one state.

    ``second[i, j]`` is Re<Ji Jj> = <{Ji, Jj}>/2 and ``covariance`` is
    ``second - outer(means, means)``.
    """

    two_j: int
    means: np.ndarray
    second: np.ndarray
    covariance: np.ndarray

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    def mean(self, axis) -> float:
        return float(as_axis(axis) @ self.means)

    def variance(self, axis) -> float:
        n = as_axis(axis)
        return float(n @ self.covariance @ n)

    def cov(self, a, b) -> float:
        return float(as_axis(a) @ self.covariance @ as_axis(b))


def moment_arrays(amplitudes: np.ndarray, ops: AngularMomentumOps):
    """Means (..., 3), symmetrized second moments and covariance (..., 3, 3).

    Works on a single amplitude vector or on a stack of shape (B, d).
    """
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.shape[-1] != ops.two_j + 1:
        raise ValueError(
            f"dimension mismatch: state has {amps.shape[-1]} amplitudes, operators are for 2J={ops.two_j}"
        )
    applied = np.einsum("kij,...j->...ki", ops.stack, amps)
    means = np.einsum("...i,...ki->...k", amps.conj(), applied).real
    second = np.einsum("...ki,...li->...kl", applied.conj(), applied).real
    second = 0.5 * (second + np.swapaxes(second, -1, -2))
    # covariance from centred vectors (J_k - <J_k>)|psi>; subtracting outer(means, means)
    # from the raw second moments loses digits near eigenstates
    centred = applied - means[..., :, None] * amps[..., None, :]
    cov = np.einsum("...ki,...li->...kl", centred.conj(), centred).real
    cov = 0.5 * (cov + np.swapaxes(cov, -1, -2))
    return means, second, cov


def moments(state: SpinState, ops: AngularMomentumOps | None = None) -> MomentSet:
    if ops is None:
        ops = operators_for(state)
    elif ops.two_j != state.two_j:
        raise ValueError(f"dimension mismatch: state 2J={state.two_j}, operators 2J={ops.two_j}")
    means, second, cov = moment_arrays(state.amplitudes, ops)
    return MomentSet(state.two_j, means, second, cov)


def rotation_matrix(two_j: int, axis, angle: float) -> np.ndarray:
    """exp(-i angle J.n) via eigendecomposition of the Hermitian generator."""
    if not np.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle!r}")
    gen = _operators(two_j).along(axis)
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def rotate(state: SpinState, axis, angle: float) -> SpinState:
    """Rotate ``state`` by ``angle`` radians about ``axis``: exp(-i angle J.n)|state>."""
    u = rotation_matrix(state.two_j, axis, angle)
    out = u @ state.amplitudes
    # eigh-based unitaries drift from norm 1 at the 1e-15 level; renormalize
    return SpinState(state.two_j, out / np.linalg.norm(out))

"""Atomic coherent states and two-branch superpositions of them.

Every amplitude is computed in half-angle form,

    <J, M | theta, phi> = sqrt(C(2J, J+M)) cos(theta/2)^(J-M) sin(theta/2)^(J+M) e^{i (J+M) phi},

which equals the zeta = e^{i phi} tan(theta/2) expression but stays finite at theta = pi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .spin import SpinState, two_j_of

TWO_PI = 2.0 * math.pi
NULL_NORM = 1e-14
_EXACT_BINOMIAL_MAX = 30  # 2J above this goes through log-gamma


class NullSuperpositionError(ValueError):
    """The two branches cancel; there is no state to normalize."""


def _check_theta(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= math.pi):
        raise ValueError(f"{name} must lie in [0, pi], got {value!r}")
    return value


def _wrap(value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {value!r}")
    wrapped = math.fmod(value, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a value just below 0 can round up to exactly 2 pi
    return 0.0 if wrapped >= TWO_PI else wrapped


@dataclass(frozen=True)
class ACSParams:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_theta("theta", self.theta))
        object.__setattr__(self, "phi", _wrap(self.phi))


@dataclass(frozen=True)
class SuperpositionParams:
    """(theta1, theta2, phi, phi_r): branch 1 at azimuth 0, branch 2 at azimuth ``phi``,
    relative phase ``phi_r``.  Azimuths are reduced mod 2 pi on construction."""

    theta1: float
    theta2: float
    phi: float
    phi_r: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", _check_theta("theta1", self.theta1))
        object.__setattr__(self, "theta2", _check_theta("theta2", self.theta2))
        object.__setattr__(self, "phi", _wrap(self.phi))
        object.__setattr__(self, "phi_r", _wrap(self.phi_r))

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.phi, self.phi_r])

    @classmethod
    def from_array(cls, values) -> "SuperpositionParams":
        t1, t2, ph, pr = (float(v) for v in values)
        return cls(t1, t2, ph, pr)

    def to_dict(self, two_j: int | None = None) -> dict:
        out = {} if two_j is None else {"two_j": int(two_j)}
        out.update(theta1=self.theta1, theta2=self.theta2, phi=self.phi, phi_r=self.phi_r)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SuperpositionParams":
        return cls(data["theta1"], data["theta2"], data["phi"], data["phi_r"])

    def to_json(self, two_j: int) -> str:
        return json.dumps(self.to_dict(two_j))


@lru_cache(maxsize=128)
def sqrt_binomials(two_j: int) -> np.ndarray:
    """sqrt(C(2J, k)) for k = 0..2J."""
    k = np.arange(two_j + 1)
    if two_j <= _EXACT_BINOMIAL_MAX:
        vals = np.sqrt(np.array([math.comb(two_j, int(i)) for i in k], dtype=float))
    else:
        vals = np.exp(0.5 * (gammaln(two_j + 1) - gammaln(k + 1) - gammaln(two_j - k + 1)))
    vals.setflags(write=False)
    return vals


def acs_amplitudes(two_j: int, theta, phi) -> np.ndarray:
    """Coherent-state amplitudes; ``theta`` and ``phi`` may be arrays of shape (B,)
    giving a (B, 2J+1) result."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    k = np.arange(two_j + 1)
    c = np.cos(theta / 2)[..., None]
    s = np.sin(theta / 2)[..., None]
    # numpy defines 0**0 = 1, so the poles give exact Dicke states
    mag = sqrt_binomials(two_j) * c ** (two_j - k) * s**k
    return mag * np.exp(1j * k * phi[..., None])


def superposition_amplitudes(two_j: int, params: np.ndarray):
    """Unnormalized two-branch amplitudes and their norms for params of shape (..., 4)."""
    p = np.asarray(params, dtype=float)
    first = acs_amplitudes(two_j, p[..., 0], np.zeros_like(p[..., 0]))
    second = acs_amplitudes(two_j, p[..., 1], p[..., 2])
    raw = first + np.exp(1j * p[..., 3])[..., None] * second
    return raw, np.linalg.norm(raw, axis=-1)


def acs(J, theta: float | ACSParams, phi: float = 0.0) -> SpinState:
    """Atomic coherent state pointing at polar angle ``theta``, azimuth ``phi``.

    ``theta = 0`` is ``|J, -J>`` so that <Jz> = -J cos(theta).
    """
    two_j = two_j_of(J)
    p = theta if isinstance(theta, ACSParams) else ACSParams(theta, phi)
    return SpinState.normalized(two_j, acs_amplitudes(two_j, p.theta, p.phi))


def superposition(J, params: SuperpositionParams) -> SpinState:
    """Normalized |theta1, 0> + e^{i phi_r} |theta2, phi>."""
    two_j = two_j_of(J)
    if not isinstance(params, SuperpositionParams):
        params = SuperpositionParams.from_array(params)
    raw, norm = superposition_amplitudes(two_j, params.as_array())
    if norm < NULL_NORM:
        raise NullSuperpositionError(f"null superposition for {params}")
    return SpinState(two_j, raw / norm)


def gerry_grobe(J, zeta: complex, sign: int = +1) -> SpinState:
    """Even/odd-type cat N(|zeta> +/- e^{-i pi J} |-zeta>)."""
    two_j = two_j_of(J)
    zeta = complex(zeta)
    if not (math.isfinite(zeta.real) and math.isfinite(zeta.imag)):
        raise ValueError("zeta must be finite")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    theta = 2.0 * math.atan(abs(zeta))
    phi = math.atan2(zeta.imag, zeta.real)
    plus = acs_amplitudes(two_j, theta, phi)
    minus = acs_amplitudes(two_j, theta, phi + math.pi)
    raw = plus + sign * np.exp(-1j * math.pi * two_j / 2) * minus
    norm = np.linalg.norm(raw)
    if norm < NULL_NORM:
        raise NullSuperpositionError(f"null superposition for zeta={zeta}, sign={sign:+d}")
    return SpinState(two_j, raw / norm)


def mes(J) -> SpinState:
    """(|J, J> + |J, -J>)/sqrt(2)."""
    two_j = two_j_of(J)
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return SpinState(two_j, amps)

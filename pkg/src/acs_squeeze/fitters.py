"""Least-squares fits of optimized minima against x = 1/J."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class FitResult:
    degrees: tuple
    coefficients: np.ndarray
    residual_rms: float
    points: tuple  # ((J, value), ...) in input order

    def predict(self, J) -> np.ndarray:
        x = 1.0 / np.asarray(J, dtype=float)
        return sum(c * x**d for c, d in zip(self.coefficients, self.degrees))

    def to_dict(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "coefficients": [float(c) for c in self.coefficients],
            "residual_rms": float(self.residual_rms),
            "points": [[float(j), float(v)] for j, v in self.points],
        }

    def residual_rows(self):
        """(J, value, fitted_value, residual) per fitted point."""
        for j, v in self.points:
            fitted = float(self.predict(j))
            yield float(j), float(v), fitted, float(v) - fitted

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["J", "value", "fitted_value", "residual"])
        for row in self.residual_rows():
            writer.writerow([f"{x:.12g}" for x in row])
        return buf.getvalue()


def fit_inverse_j(points, degrees) -> FitResult:
    """Unweighted least squares of value ~ sum_d c_d (1/J)^d.

    Solved with an SVD-based solver (no normal equations).  Raises ValueError on
    duplicate degrees, repeated or non-positive J, or a rank-deficient design.
    """
    degrees = tuple(int(d) for d in degrees)
    if not degrees:
        raise ValueError("need at least one basis degree")
    if len(set(degrees)) != len(degrees):
        raise ValueError(f"duplicate degrees in {degrees}: rank-deficient design")
    pts = tuple((float(j), float(v)) for j, v in points)
    if len(pts) < len(degrees):
        raise ValueError(f"{len(pts)} points cannot determine {len(degrees)} coefficients")
    J = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(J <= 0) or not np.all(np.isfinite(J)) or not np.all(np.isfinite(y)):
        raise ValueError("J must be positive and values finite")
    if len(np.unique(J)) != len(J):
        raise ValueError("J values must be distinct")
    x = 1.0 / J
    design = np.stack([x**d for d in degrees], axis=1)
    coeffs, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < len(degrees):
        raise ValueError("rank-deficient design matrix")
    resid = y - design @ coeffs
    rms = float(np.sqrt(np.mean(resid**2)))
    return FitResult(degrees, coeffs, rms, pts)

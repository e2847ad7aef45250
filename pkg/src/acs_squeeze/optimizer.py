"""Global minimization of squeezing metrics over the superposition family.

Multi-start Nelder-Mead: starting points come from a scrambled Halton sequence,
all restarts advance together as one batch of simplices, and parameters are
mapped into the box by reflection so bound faces stay reachable.  A metric
value that is undefined (vanishing denominator) or a null superposition scores
+inf.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .metrics import (
    PLANES,
    canonical_plane,
    planar_from_moments,
    sorensen_from_moments,
    wineland_from_moments,
    wineland_min_from_moments,
)
from .ramsey import delta_phi_from_moments
from .spin import AXIS_INDEX, SpinState, moment_arrays, moments, operators_2j, spin_label, two_j_of
from .states import (
    NULL_NORM,
    NullSuperpositionError,
    SuperpositionParams,
    superposition,
    superposition_amplitudes,
)

DEFAULT_LOWER = np.array([0.0, 0.0, 0.0, 0.0])
DEFAULT_UPPER = np.array([math.pi, math.pi, 2 * math.pi, 2 * math.pi])
DEFAULT_RESTARTS = 200
DEFAULT_MAX_EVALS = 2000
STAGNATION_WINDOW = 20
STAGNATION_TOL = 1e-9
GRID_LIMIT = 10**8

METRIC_KINDS = ("xi_sorensen", "xi_wineland", "xi_wineland_min", "xi_planar", "phase_uncertainty")


@dataclass(frozen=True)
class Metric:
    """A named scalar objective, e.g. ``xi_sorensen(x)`` or ``phase_uncertainty(0.01)``."""

    kind: str
    arg: str | float | None = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric {self.kind!r}; expected one of {', '.join(METRIC_KINDS)}")
        if self.kind in ("xi_sorensen", "xi_wineland"):
            if not isinstance(self.arg, str) or self.arg.lower() not in AXIS_INDEX:
                raise ValueError(f"{self.kind} needs an axis x, y or z, got {self.arg!r}")
            object.__setattr__(self, "arg", self.arg.lower())
        elif self.kind == "xi_planar":
            if not isinstance(self.arg, str):
                raise ValueError(f"xi_planar needs a plane xy, yz or zx, got {self.arg!r}")
            object.__setattr__(self, "arg", canonical_plane(self.arg))
        elif self.kind == "phase_uncertainty":
            value = float(self.arg)
            if not math.isfinite(value):
                raise ValueError("phase_uncertainty needs a finite phase")
            object.__setattr__(self, "arg", value)
        elif self.arg is not None:
            raise ValueError("xi_wineland_min takes no argument")

    @property
    def name(self) -> str:
        if self.arg is None:
            return self.kind
        return f"{self.kind}({self.arg!r})" if isinstance(self.arg, float) else f"{self.kind}({self.arg})"

    def __str__(self):
        return self.name

    def from_moments(self, two_j: int, means, cov) -> np.ndarray:
        if self.kind == "xi_sorensen":
            return sorensen_from_moments(two_j, means, cov, self.arg)
        if self.kind == "xi_wineland":
            return wineland_from_moments(two_j, means, cov, self.arg)
        if self.kind == "xi_wineland_min":
            return wineland_min_from_moments(two_j, means, cov)
        if self.kind == "xi_planar":
            return planar_from_moments(means, cov, self.arg)
        return delta_phi_from_moments(means, cov, self.arg)

    def of_state(self, state: SpinState) -> float | None:
        ms = moments(state)
        value = float(self.from_moments(state.two_j, ms.means, ms.covariance))
        return None if math.isnan(value) else value

    def evaluate(self, two_j: int, params: np.ndarray) -> np.ndarray:
        """Objective on a batch of in-bounds parameter rows; undefined scores +inf."""
        params = np.atleast_2d(params)
        raw, norm = superposition_amplitudes(two_j, params)
        ok = norm >= NULL_NORM
        amps = raw / np.where(ok, norm, 1.0)[:, None]
        means, _, cov = moment_arrays(amps, operators_2j(two_j))
        values = self.from_moments(two_j, means, cov)
        return np.where(ok & np.isfinite(values), values, np.inf)

    def at(self, J, params: SuperpositionParams) -> float | None:
        """Metric of the superposition state built from ``params`` (None if undefined)."""
        try:
            state = superposition(J, params)
        except NullSuperpositionError:
            return None
        return self.of_state(state)


_METRIC_RE = re.compile(r"^\s*([a-z_]+?)\s*(?:[(:]\s*([^)]*?)\s*\)?)?\s*$")


def parse_metric(text) -> Metric:
    """Parse ``name(arg)`` or ``name:arg`` into a :class:`Metric`."""
    if isinstance(text, Metric):
        return text
    match = _METRIC_RE.match(str(text).lower())
    if not match:
        raise ValueError(f"cannot parse metric {text!r}")
    kind, arg = match.group(1), match.group(2)
    if kind not in METRIC_KINDS:
        raise ValueError(f"unknown metric {kind!r}; expected one of {', '.join(METRIC_KINDS)}")
    if kind == "phase_uncertainty":
        if arg is None:
            raise ValueError("phase_uncertainty needs a phase, e.g. phase_uncertainty(0.01)")
        return Metric(kind, float(arg))
    return Metric(kind, arg or None)


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    two_j: int
    metric: str
    best_params: SuperpositionParams
    best_value: float
    evaluations: int
    restarts: int
    seed: int
    converged: bool
    history: tuple = field(default=(), repr=False)

    @property
    def J(self) -> float:
        return self.two_j / 2

    def to_dict(self) -> dict:
        return {
            "two_j": self.two_j,
            "metric": self.metric,
            "best_value": float(self.best_value),
            "best_params": self.best_params.to_dict(),
            "evaluations": int(self.evaluations),
            "restarts": int(self.restarts),
            "seed": int(self.seed),
            "converged": bool(self.converged),
            "history": [float(h) if math.isfinite(h) else "undefined" for h in self.history],
        }


def reflect_into(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Triangle-wave reflection of unconstrained coordinates into [lower, upper]."""
    width = upper - lower
    y = np.mod(x - lower, 2.0 * width)
    return lower + np.where(y > width, 2.0 * width - y, y)


def _resolve_bounds(bounds):
    if bounds is None:
        return DEFAULT_LOWER.copy(), DEFAULT_UPPER.copy()
    arr = np.asarray(bounds, dtype=float)
    if arr.shape != (4, 2):
        raise ValueError("bounds must be four (low, high) pairs for theta1, theta2, phi, phi_r")
    lower, upper = arr[:, 0].copy(), arr[:, 1].copy()
    if not np.all(np.isfinite(arr)) or np.any(upper <= lower):
        raise ValueError("each bound needs finite low < high")
    if np.any(lower[:2] < 0.0) or np.any(upper[:2] > math.pi):
        raise ValueError("theta bounds must lie within [0, pi]")
    return lower, upper


def _canonical_rows(rows: np.ndarray) -> np.ndarray:
    """Rows as the parameter values SuperpositionParams will hold (azimuths mod 2 pi)."""
    return np.array([SuperpositionParams.from_array(r).as_array() for r in rows])


def _pick_best(values: np.ndarray, rows: np.ndarray) -> int:
    """Index of the smallest value; ties go to the lexicographically smallest row."""
    # lexsort treats the last key as primary
    keys = [rows[:, i] for i in range(rows.shape[1] - 1, -1, -1)] + [values]
    return int(np.lexsort(keys)[0])


def batched_nelder_mead(func, x0: np.ndarray, step: np.ndarray, max_evals: int,
                        xatol: float = 1e-10, fatol: float = 1e-13):
    """Run one Nelder-Mead simplex per row of ``x0`` in lock-step.

    ``func`` maps an (m, n) array to m values.  Returns the final best vertex
    of each simplex, its value and the number of evaluations each one used.
    Standard coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
    """
    rows, n = x0.shape
    sim = np.repeat(x0[:, None, :], n + 1, axis=1)
    sim[:, 1:, :] += np.diag(step)[None, :, :]
    fs = func(sim.reshape(-1, n)).reshape(rows, n + 1)
    nfev = np.full(rows, n + 1)
    active = nfev < max_evals

    while active.any():
        idx = np.flatnonzero(active)
        order = np.argsort(fs[idx], axis=1, kind="stable")
        S = np.take_along_axis(sim[idx], order[:, :, None], axis=1)
        F = np.take_along_axis(fs[idx], order, axis=1)

        x_spread = np.max(np.abs(S[:, 1:] - S[:, :1]), axis=(1, 2))
        with np.errstate(invalid="ignore"):
            f_close = (F[:, 1:] == F[:, :1]) | (np.abs(F[:, 1:] - F[:, :1]) <= fatol)
        done = (x_spread <= xatol) & f_close.all(axis=1)

        best, second_worst, worst = F[:, 0], F[:, n - 1], F[:, n]
        centroid = S[:, :n].mean(axis=1)
        xw = S[:, n]
        xr = centroid + (centroid - xw)
        live = ~done
        fr = np.full(len(idx), np.inf)
        fr[live] = func(xr[live])
        used = live.astype(int)

        expand = live & (fr < best)
        # plain reflections (best <= fr < second_worst) keep xr below
        outside = live & (fr >= second_worst) & (fr < worst)
        inside = live & (fr >= worst)

        trial = np.where(
            expand[:, None],
            centroid + 2.0 * (xr - centroid),
            np.where(outside[:, None], centroid + 0.5 * (xr - centroid), centroid + 0.5 * (xw - centroid)),
        )
        need = expand | outside | inside
        ft = np.full(len(idx), np.inf)
        ft[need] = func(trial[need])
        used += need

        new_x = xr.copy()
        new_f = fr.copy()
        take_trial = (expand & (ft < fr)) | (outside & (ft <= fr)) | (inside & (ft < worst))
        new_x[take_trial] = trial[take_trial]
        new_f[take_trial] = ft[take_trial]
        shrink = (outside & ~(ft <= fr)) | (inside & ~(ft < worst))
        replace = live & ~shrink

        S[replace, n] = new_x[replace]
        F[replace, n] = new_f[replace]
        if shrink.any():
            moved = S[shrink, :1] + 0.5 * (S[shrink, 1:] - S[shrink, :1])
            S[shrink, 1:] = moved
            F[shrink, 1:] = func(moved.reshape(-1, n)).reshape(-1, n)
            used[shrink] += n

        sim[idx] = S
        fs[idx] = F
        nfev[idx] += used
        active[idx] = ~done & (nfev[idx] < max_evals)

    best_at = np.argmin(fs, axis=1)
    xbest = sim[np.arange(rows), best_at]
    return xbest, fs[np.arange(rows), best_at], nfev


def _check_budget(restarts: int, max_evals: int):
    if restarts < 1 or max_evals < 5:
        raise ValueError(f"zero budget: restarts={restarts}, max_evals={max_evals} (need >= 1 and >= 5)")


def minimize_metric(J, metric, *, restarts: int = DEFAULT_RESTARTS, max_evals: int = DEFAULT_MAX_EVALS,
                    seed: int = 0, bounds=None, xatol: float = 1e-10, fatol: float = 1e-13) -> OptimizationResult:
    """Minimize ``metric`` over (theta1, theta2, phi, phi_r) at fixed J.

    ``max_evals`` is the per-restart evaluation budget.  The result is a pure
    function of the arguments.
    """
    two_j = two_j_of(J)
    metric = parse_metric(metric)
    _check_budget(restarts, max_evals)
    lower, upper = _resolve_bounds(bounds)
    seed = int(seed)

    starts = qmc.Halton(d=4, scramble=True, seed=seed).random(restarts)
    x0 = lower + starts * (upper - lower)

    def objective(x):
        return metric.evaluate(two_j, reflect_into(x, lower, upper))

    xbest, _, nfev = batched_nelder_mead(objective, x0, 0.1 * (upper - lower), max_evals, xatol, fatol)
    rows = _canonical_rows(reflect_into(xbest, lower, upper))
    # re-score the canonical rows so best_value matches the reported parameters exactly
    values = metric.evaluate(two_j, rows)
    k = _pick_best(values, rows)

    running = np.minimum.accumulate(values)
    converged = bool(
        restarts > STAGNATION_WINDOW
        and np.isfinite(running[-1])
        and running[-STAGNATION_WINDOW - 1] - running[-1] < STAGNATION_TOL
    )
    return OptimizationResult(
        two_j=two_j,
        metric=metric.name,
        best_params=SuperpositionParams.from_array(rows[k]),
        best_value=float(values[k]),
        evaluations=int(nfev.sum()),
        restarts=restarts,
        seed=seed,
        converged=converged,
        history=tuple(float(v) for v in values),
    )


@dataclass(frozen=True)
class GridResult:
    two_j: int
    metric: str
    best_params: SuperpositionParams
    best_value: float
    evaluations: int


def grid_oracle(J, metric, resolution: int, *, bounds=None, chunk: int = 50_000) -> GridResult:
    """Exhaustive minimum over a resolution^4 lattice including the bound endpoints."""
    two_j = two_j_of(J)
    metric = parse_metric(metric)
    resolution = int(resolution)
    if resolution < 3:
        raise ValueError(f"resolution must be at least 3, got {resolution}")
    total = resolution**4
    if total > GRID_LIMIT:
        raise ValueError(f"grid of {total} points exceeds the {GRID_LIMIT} point guard")
    lower, upper = _resolve_bounds(bounds)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(lower, upper)]

    best_value, best_row = np.inf, None
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.unravel_index(flat, (resolution,) * 4)
        rows = np.stack([axes[d][idx[d]] for d in range(4)], axis=1)
        values = metric.evaluate(two_j, rows)
        # C-order flat index order is lexicographic parameter order, so argmin's
        # first occurrence already honours the tie-break
        i = int(np.argmin(values))
        if values[i] < best_value or best_row is None:
            best_value, best_row = float(values[i]), rows[i]
    return GridResult(two_j, metric.name, SuperpositionParams.from_array(best_row), best_value, total)


def worker_count(workers: int | None = None) -> int:
    """Explicit count, else ACS_SQUEEZE_THREADS, else 1."""
    if workers is None:
        env = os.environ.get("ACS_SQUEEZE_THREADS", "").strip()
        workers = int(env) if env else 1
    return max(1, int(workers))


def derived_seed(master: int, two_j: int, tag: str = "") -> int:
    """Per-job seed from a master seed; independent of job order and thread count."""
    entropy = [int(master), int(two_j)] + [ord(c) for c in tag]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


class SweepError(RuntimeError):
    def __init__(self, J, cause):
        super().__init__(f"optimization failed at J={J}: {cause}")
        self.J = J
        self.cause = cause


def sweep_J(Jlist, metric, *, seed: int = 0, workers: int | None = None, **opts):
    """Optimize ``metric`` at every J; returns [(J, OptimizationResult)] sorted by J."""
    metric = parse_metric(metric)
    two_js = sorted({two_j_of(J) for J in Jlist})

    def job(two_j):
        try:
            return minimize_metric(two_j / 2, metric, seed=derived_seed(seed, two_j, metric.name), **opts)
        except Exception as exc:  # noqa: BLE001 - re-raised with J attached
            raise SweepError(spin_label(two_j), exc) from exc

    n = worker_count(workers)
    if n == 1 or len(two_js) < 2:
        results = [job(t) for t in two_js]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(job, two_js))
    return [(t / 2, r) for t, r in zip(two_js, results)]


__all__ = [
    "DEFAULT_LOWER",
    "DEFAULT_UPPER",
    "GridResult",
    "Metric",
    "OptimizationResult",
    "PLANES",
    "SweepError",
    "batched_nelder_mead",
    "derived_seed",
    "grid_oracle",
    "minimize_metric",
    "parse_metric",
    "reflect_into",
    "sweep_J",
    "worker_count",
]

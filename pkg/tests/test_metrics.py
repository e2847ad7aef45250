import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from acs_squeeze.metrics import (
    DEFAULT_DEPTH_TABLE,
    DepthTable,
    bound_from_fisher,
    canonical_plane,
    cfi,
    depth_check,
    mean_spin_direction,
    qfi,
    sorensen_from_moments,
    squeezing_report,
    xi_planar,
    xi_sorensen,
    xi_wineland,
    xi_wineland_min,
)
from acs_squeeze.spin import SpinState, moment_arrays, moments, operators_2j, rotate, rotation_matrix
from acs_squeeze.states import SuperpositionParams, acs, mes, superposition

from .conftest import random_state

seeds = st.integers(0, 2**32 - 1)
small_two_j = st.integers(1, 12)
angles = st.floats(-2 * math.pi, 2 * math.pi)


def test_canonical_plane():
    assert canonical_plane("YX") == "xy"
    assert canonical_plane("xz") == "zx"
    with pytest.raises(ValueError):
        canonical_plane("xx")


@pytest.mark.parametrize("two_j", [1, 2, 5, 10, 20])
@pytest.mark.parametrize("theta, phi", [(math.pi / 2, 0.0), (0.7, 1.2), (2.9, 4.0)])
def test_coherent_state_baselines(two_j, theta, phi):
    s = acs(two_j / 2, theta, phi)
    msd = mean_spin_direction(s)
    assert xi_sorensen(s, msd) is None
    assert xi_wineland_min(s) == pytest.approx(1, abs=1e-9)
    # any axis perpendicular to the mean spin
    u = np.cross(msd, [0.3, -0.5, 0.81])
    u /= np.linalg.norm(u)
    assert xi_sorensen(s, u) == pytest.approx(1, abs=1e-9)
    assert xi_wineland(s, u) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("two_j", [1, 2, 5, 10, 20])
def test_in_plane_coherent_state_planar_value(two_j):
    for phi in (0.0, 0.4, 2.0):
        assert xi_planar(acs(two_j / 2, math.pi / 2, phi), "xy") == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("two_j", [1, 2, 6])
def test_coherent_planar_minimum_is_one_half(two_j):
    # over the whole sphere, in-plane coherent states are the best coherent states
    grid = [xi_planar(acs(two_j / 2, t, p), plane)
            for t in np.linspace(0.01, math.pi - 0.01, 41)
            for p in np.linspace(0, 2 * math.pi, 41)
            for plane in ("xy", "yz", "zx")]
    values = [v for v in grid if v is not None]
    assert min(values) == pytest.approx(0.5, abs=1e-9)


def test_spin_half_sorensen_is_one(rng):
    for _ in range(50):
        s = random_state(rng, 1)
        for axis in "xyz":
            value = xi_sorensen(s, axis)
            if value is not None:
                assert value == pytest.approx(1, abs=1e-9)


def test_undefined_values_are_none():
    dicke = SpinState.dicke(2, 0)
    assert xi_sorensen(dicke, "z") is None
    assert xi_wineland(dicke, "z") is None
    assert xi_planar(dicke, "xy") is None
    assert mean_spin_direction(mes(3)) is None
    report = squeezing_report(mes(3)).to_dict()
    assert report["xi_sorensen"]["z"] == "undefined"
    assert report["msd"] == "undefined"


@pytest.mark.parametrize("two_j", [2, 3, 7])
def test_sorensen_by_hand(two_j, rng):
    ops = operators_2j(two_j)
    s = random_state(rng, two_j)
    psi = s.amplitudes
    ev = lambda A: np.vdot(psi, A @ psi).real  # noqa: E731
    var_y = ev(ops.Jy @ ops.Jy) - ev(ops.Jy) ** 2
    expected = two_j * var_y / (ev(ops.Jz) ** 2 + ev(ops.Jx) ** 2)
    assert xi_sorensen(s, "y") == pytest.approx(expected, rel=1e-10)
    planar = (ev(ops.Jy @ ops.Jy) - ev(ops.Jy) ** 2 + ev(ops.Jz @ ops.Jz) - ev(ops.Jz) ** 2) / math.hypot(
        ev(ops.Jy), ev(ops.Jz)
    )
    assert xi_planar(s, "yz") == pytest.approx(planar, rel=1e-10)


@given(small_two_j, seeds)
def test_wineland_min_is_smallest_perpendicular_variance(two_j, seed):
    s = random_state(np.random.default_rng(seed), two_j)
    ms = moments(s)
    n = ms.means / np.linalg.norm(ms.means)
    # independent perpendicular frame from the QR factor of [n | I]
    q, _ = np.linalg.qr(np.column_stack([n, np.eye(3)]))
    frame = q[:, 1:3]
    smallest = np.linalg.eigvalsh(frame.T @ ms.covariance @ frame)[0]
    expected = two_j * smallest / np.dot(ms.means, ms.means)
    assert xi_wineland_min(s) == pytest.approx(expected, rel=1e-9, abs=1e-12)
    for angle in np.linspace(0, math.pi, 7):
        u = np.cross(n, [1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.cross(n, [0.0, 1.0, 0.0])
        u /= np.linalg.norm(u)
        w = np.cross(n, u)
        axis = math.cos(angle) * u + math.sin(angle) * w
        assert xi_wineland(s, axis) >= xi_wineland_min(s) - 1e-12


@given(small_two_j, seeds, angles, st.sampled_from("xyz"))
def test_rotation_invariances(two_j, seed, angle, axis):
    s = random_state(np.random.default_rng(seed), two_j)
    r = rotate(s, axis, angle)

    def close(a, b):
        if a is None or b is None:
            return a is None and b is None or min(x for x in (a, b) if x is not None) > 1e6
        return abs(a - b) <= 1e-9 * max(1.0, abs(a))

    assert close(xi_wineland_min(r), xi_wineland_min(s))
    plane = {"x": "yz", "y": "zx", "z": "xy"}[axis]
    assert close(xi_planar(r, plane), xi_planar(s, plane))
    assert close(xi_sorensen(r, axis), xi_sorensen(s, axis))
    assert close(xi_wineland(r, axis), xi_wineland(s, axis))


def test_no_state_is_squeezed_along_all_three_axes():
    rng = np.random.default_rng(11)
    count = 10_000
    for two_j in range(1, 11):
        v = rng.normal(size=(count, two_j + 1)) + 1j * rng.normal(size=(count, two_j + 1))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        means, _, cov = moment_arrays(v, operators_2j(two_j))
        xi = np.stack([sorensen_from_moments(two_j, means, cov, a) for a in "xyz"])
        # spin-1/2 states sit exactly at 1; roundoff must not count as squeezing
        squeezed = np.nan_to_num(xi, nan=np.inf) < 1.0 - 1e-9
        assert not np.any(np.all(squeezed, axis=0)), f"2J={two_j}"


def test_table_optimum_is_squeezed():
    s = superposition(1, SuperpositionParams(1.55444, 1.57172, 0.0163226, 3.12513))
    assert xi_sorensen(s, "x") == pytest.approx(0.5, abs=1e-3)


def test_depth_table_validation():
    with pytest.raises(ValueError):
        DepthTable(1.0, {0: 0.4})
    with pytest.raises(ValueError):
        DepthTable(1.0, {1: 0.6})
    with pytest.raises(ValueError):
        DepthTable(1.0, {1: 0.3, 2: 0.4})


def test_depth_check_verdicts():
    table = DepthTable(0.5, {1: 0.45, 2: 0.4, 3: 0.35})
    assert depth_check(0.5, 3, table).kind == "none"
    verdict = depth_check(0.42, 3, table)
    assert (verdict.kind, verdict.depth) == ("entangled", 2)
    assert depth_check(0.3, 3, table).depth == 4
    # bounds with more particles than present are ignored
    assert depth_check(0.3, 1, table).depth == 3
    assert depth_check(0.3, 0.5, DEFAULT_DEPTH_TABLE).kind == "insufficient"
    assert str(depth_check(0.3, 1, DEFAULT_DEPTH_TABLE)) == "at least 2-particle entanglement"


@pytest.mark.parametrize("two_j", [1, 4, 10])
def test_qfi_reference_states(two_j):
    assert qfi(acs(two_j / 2, math.pi / 2), "z") == pytest.approx(two_j, abs=1e-10)
    assert qfi(mes(two_j / 2), "z") == pytest.approx(two_j**2, abs=1e-10)
    assert qfi(SpinState.dicke(two_j / 2, two_j / 2), "z") == pytest.approx(0, abs=1e-12)


@given(small_two_j, seeds, st.sampled_from("xyz"))
def test_qfi_is_four_variances(two_j, seed, axis):
    s = random_state(np.random.default_rng(seed), two_j)
    assert qfi(s, axis) == pytest.approx(4 * moments(s).variance(axis), abs=1e-10)
    assert qfi(s, operators_2j(two_j).along(axis)) == pytest.approx(qfi(s, axis), abs=1e-12)


def test_qfi_generator_shape_checked():
    with pytest.raises(ValueError):
        qfi(acs(1, 0.3), np.eye(2))


def _probabilities(state, phase):
    psi = rotation_matrix(state.two_j, "x", phase) @ state.amplitudes
    _, basis = np.linalg.eigh(operators_2j(state.two_j).Jy)
    return np.abs(basis.conj().T @ psi) ** 2


@pytest.mark.parametrize("two_j", [1, 3, 6])
def test_cfi_matches_finite_differences(two_j, rng):
    h = 1e-5
    for _ in range(4):
        s = random_state(rng, two_j)
        phase = rng.uniform(-1, 1)
        p = _probabilities(s, phase)
        dp = (_probabilities(s, phase + h) - _probabilities(s, phase - h)) / (2 * h)
        keep = p > 1e-8
        expected = np.sum(dp[keep] ** 2 / p[keep])
        assert cfi(s, phase) == pytest.approx(expected, rel=1e-6, abs=1e-8)


@given(small_two_j, seeds, st.floats(-math.pi, math.pi), st.sampled_from("xyz"))
def test_cfi_never_exceeds_qfi(two_j, seed, phase, axis):
    s = random_state(np.random.default_rng(seed), two_j)
    assert cfi(s, phase, axis) <= qfi(s, "x") + 1e-8


def test_bound_from_fisher():
    assert bound_from_fisher(4.0) == 0.5
    assert bound_from_fisher(0.0) is None
    assert bound_from_fisher(float("nan")) is None

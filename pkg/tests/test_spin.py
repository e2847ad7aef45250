import json
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from acs_squeeze.spin import (
    SpinState,
    as_axis,
    make_operators,
    moment_arrays,
    moments,
    operators_2j,
    perpendicular_pair,
    rotate,
    rotation_matrix,
    spin_label,
    two_j_of,
)

from .conftest import random_state

TWO_JS = list(range(1, 21))


@pytest.mark.parametrize("J, expected", [(0.5, 1), (1, 2), ("3/2", 3), (Fraction(5, 2), 5), (10, 20), (1.5, 3)])
def test_two_j_of_accepts(J, expected):
    assert two_j_of(J) == expected


@pytest.mark.parametrize("J", [0, -1, 0.3, "1/3", float("nan"), True, None])
def test_two_j_of_rejects(J):
    with pytest.raises(ValueError):
        two_j_of(J)


def test_spin_label():
    assert spin_label(3) == "3/2"
    assert spin_label(4) == "2"


@pytest.mark.parametrize("two_j", TWO_JS)
def test_commutators_and_casimir(two_j):
    ops = operators_2j(two_j)
    J = two_j / 2
    jx, jy, jz = ops.Jx, ops.Jy, ops.Jz
    tol = 1e-12 * max(1.0, J * (J + 1))
    assert np.allclose(jx @ jy - jy @ jx, 1j * jz, atol=tol, rtol=0)
    assert np.allclose(jy @ jz - jz @ jy, 1j * jx, atol=tol, rtol=0)
    assert np.allclose(jz @ jx - jx @ jz, 1j * jy, atol=tol, rtol=0)
    casimir = jx @ jx + jy @ jy + jz @ jz
    assert np.allclose(casimir, J * (J + 1) * np.eye(two_j + 1), atol=tol, rtol=0)
    for m in (jx, jy, jz):
        assert np.array_equal(m, m.conj().T)


@pytest.mark.parametrize("two_j", [1, 2, 5, 8])
def test_ladder_elements_direct(two_j):
    # <J, M+1| J+ |J, M> = sqrt((J - M)(J + M + 1)), built element by element
    J = two_j / 2
    ops = make_operators(J)
    j_plus = ops.Jx + 1j * ops.Jy
    for k in range(two_j):
        M = k - J
        assert j_plus[k + 1, k] == pytest.approx(math.sqrt((J - M) * (J + M + 1)), abs=1e-12)
    assert np.count_nonzero(np.abs(j_plus) > 1e-15) == two_j


def test_operator_cache_is_read_only():
    ops = operators_2j(4)
    with pytest.raises(ValueError):
        ops.Jx[0, 0] = 1.0


@pytest.mark.parametrize("two_j", [1, 4, 7])
def test_dicke_moments(two_j):
    J = two_j / 2
    for k in range(two_j + 1):
        M = k - J
        ms = moments(SpinState.dicke(J, M))
        assert ms.means == pytest.approx([0, 0, M], abs=1e-12)
        transverse = (J * (J + 1) - M * M) / 2
        assert ms.variances == pytest.approx([transverse, transverse, 0], abs=1e-12)


def test_dicke_rejects_bad_projection():
    with pytest.raises(ValueError):
        SpinState.dicke(1, 0.5)
    with pytest.raises(ValueError):
        SpinState.dicke(1, 2)


def test_state_validation():
    with pytest.raises(ValueError, match="expected 3 amplitudes"):
        SpinState(2, [1, 0])
    with pytest.raises(ValueError, match="not normalized"):
        SpinState(1, [1, 1])
    with pytest.raises(ValueError, match="finite"):
        SpinState(1, [np.nan, 1])
    with pytest.raises(ValueError):
        SpinState.normalized(1, [0, 0])
    s = SpinState(1, [1, 0])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_json_round_trip_is_exact(rng):
    s = random_state(rng, 7)
    back = SpinState.from_json(s.to_json())
    assert np.array_equal(back.amplitudes, s.amplitudes)
    assert json.loads(s.to_json())["two_j"] == 7


@pytest.mark.parametrize("two_j", [1, 3, 10])
def test_moments_match_direct_expectations(two_j, rng):
    ops = operators_2j(two_j)
    for _ in range(5):
        s = random_state(rng, two_j)
        psi = s.amplitudes
        ms = moments(s)
        for a, A in enumerate((ops.Jx, ops.Jy, ops.Jz)):
            assert ms.means[a] == pytest.approx(np.vdot(psi, A @ psi).real, abs=1e-12)
            for b, B in enumerate((ops.Jx, ops.Jy, ops.Jz)):
                sym = 0.5 * np.vdot(psi, (A @ B + B @ A) @ psi).real
                assert ms.second[a, b] == pytest.approx(sym, abs=1e-12)
                assert ms.covariance[a, b] == pytest.approx(sym - ms.means[a] * ms.means[b], abs=1e-10)


def test_batched_moments_match_single(rng):
    states = [random_state(rng, 5) for _ in range(4)]
    batch = np.stack([s.amplitudes for s in states])
    means, second, cov = moment_arrays(batch, operators_2j(5))
    for i, s in enumerate(states):
        ms = moments(s)
        assert np.allclose(means[i], ms.means, atol=1e-14)
        assert np.allclose(cov[i], ms.covariance, atol=1e-14)


def test_moment_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        moments(SpinState.dicke(1, 0), operators_2j(3))


def test_axis_validation():
    assert np.array_equal(as_axis("Y"), [0, 1, 0])
    with pytest.raises(ValueError):
        as_axis("w")
    with pytest.raises(ValueError):
        as_axis([1, 1, 0])


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_perpendicular_pair_is_orthonormal(a, b, c):
    v = np.array([a, b, c])
    if np.linalg.norm(v) < 1e-3:
        return
    n = v / np.linalg.norm(v)
    u, w = perpendicular_pair(n)
    frame = np.stack([n, u, w])
    assert np.allclose(frame @ frame.T, np.eye(3), atol=1e-12)


def test_perpendicular_pair_coordinate_axes():
    u, v = perpendicular_pair(as_axis("z"))
    assert np.array_equal(u, [1, 0, 0]) and np.array_equal(v, [0, 1, 0])
    u, v = perpendicular_pair(as_axis("x"))
    assert np.array_equal(u, [0, 1, 0]) and np.array_equal(v, [0, 0, 1])


@pytest.mark.parametrize("two_j", [1, 2, 5, 9])
@pytest.mark.parametrize("axis", ["x", "y", "z", [0.6, 0.0, 0.8]])
def test_rotation_matches_expm(two_j, axis):
    gen = operators_2j(two_j).along(axis)
    for angle in (0.3, -1.7, math.pi):
        expected = scipy.linalg.expm(-1j * angle * gen)
        assert np.allclose(rotation_matrix(two_j, axis, angle), expected, atol=1e-12)


def test_rotation_rejects_non_finite_angle():
    with pytest.raises(ValueError):
        rotation_matrix(2, "x", float("inf"))


@pytest.mark.parametrize("two_j", [1, 2, 6])
def test_rotate_about_y_maps_z_to_x(two_j):
    J = two_j / 2
    s = SpinState.dicke(J, J)
    after = moments(rotate(s, "y", math.pi / 2)).means
    assert after == pytest.approx([J, 0, 0], abs=1e-12)


@given(
    st.integers(1, 12),
    st.floats(-2 * math.pi, 2 * math.pi),
    st.sampled_from(["x", "y", "z"]),
    st.integers(0, 2**32 - 1),
)
def test_rotation_conjugates_mean_vector(two_j, angle, axis, seed):
    s = random_state(np.random.default_rng(seed), two_j)
    r = rotate(s, axis, angle)
    assert abs(np.linalg.norm(r.amplitudes) - 1) < 1e-12
    # classical rotation of <J> about the same axis
    R = scipy.linalg.expm(angle * _cross_matrix(as_axis(axis)))
    assert np.allclose(moments(r).means, R @ moments(s).means, atol=1e-10)


def _cross_matrix(n):
    return np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])

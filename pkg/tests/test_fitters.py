import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from acs_squeeze.fitters import fit_inverse_j

GRID = [t / 2 for t in range(1, 21)]
coeffs = st.floats(-2, 2)


@given(st.tuples(coeffs, coeffs, coeffs, coeffs))
def test_exact_cubic_is_recovered(c):
    points = [(J, sum(ci * J**-d for d, ci in enumerate(c))) for J in GRID]
    fit = fit_inverse_j(points, (0, 1, 2, 3))
    assert np.allclose(fit.coefficients, c, atol=1e-10)
    assert fit.residual_rms < 1e-10


@given(coeffs, coeffs)
def test_exact_even_model_is_recovered(a, b):
    points = [(J, a + b / J**2) for J in GRID]
    fit = fit_inverse_j(points, (0, 2))
    assert fit.coefficients == pytest.approx([a, b], abs=1e-10)


def test_predict_and_residual_rows():
    fit = fit_inverse_j([(1, 1.0), (2, 0.5), (4, 0.25)], (1,))
    assert fit.coefficients[0] == pytest.approx(1.0)
    assert fit.predict(8) == pytest.approx(0.125)
    rows = list(fit.residual_rows())
    assert [r[0] for r in rows] == [1, 2, 4]
    assert all(abs(r[3]) < 1e-12 for r in rows)


def test_csv_layout():
    text = fit_inverse_j([(0.5, 1.0), (1, 0.5), (1.5, 0.45)], (0, 2)).to_csv()
    lines = text.splitlines()
    assert lines[0] == "J,value,fitted_value,residual"
    assert lines[1].startswith("0.5,1,")
    assert len(lines) == 4


@pytest.mark.parametrize(
    "points, degrees, message",
    [
        ([(1, 1.0), (2, 0.5)], (0, 0), "duplicate"),
        ([(1, 1.0)], (0, 1), "cannot determine"),
        ([(1, 1.0), (1, 0.5)], (0, 1), "distinct"),
        ([(0, 1.0), (1, 0.5)], (0,), "positive"),
        ([(1, 1.0), (2, 0.5)], (), "at least one"),
    ],
)
def test_fit_rejects(points, degrees, message):
    with pytest.raises(ValueError, match=message):
        fit_inverse_j(points, degrees)

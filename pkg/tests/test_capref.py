import numpy as np
import pytest

from fbquermass.capref import (R_HIGH, R_LOW, cap_f, cap_geometry, cap_invert,
                               cap_monotonicity_table, cap_range, cap_speed, cap_table_csv,
                               cap_variation_integral, compose)
from fbquermass.errors import MonotonicityViolation, OutOfRange
from fbquermass.quermass import sphere_area


def test_geometry_closed_forms_n2():
    # n = 2: the cap is a spherical cap of opening alpha
    R = 1.3
    c = cap_geometry(2, R)
    assert c.area == pytest.approx(2 * np.pi * R**2 * (1 - np.cos(c.alpha)), rel=1e-12)
    assert np.cos(c.tau) == pytest.approx(c.boundary_height)
    assert c.boundary_radius ** 2 + c.boundary_height ** 2 == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_top_function_is_constant(n):
    vals = cap_monotonicity_table(n, n + 1, np.geomspace(0.05, 20, 9))
    assert np.allclose(vals, sphere_area(n) / 2 / (n + 1), rtol=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_monotone_and_positive_variation(n):
    grid = np.geomspace(0.01, 100, 25)
    for k in range(n + 1):
        vals = cap_monotonicity_table(n, k, grid)
        assert np.all(np.diff(vals) > 0)
        assert cap_variation_integral(n, k, 1.0) > 0


def test_table_rejects_bad_grid():
    with pytest.raises(ValueError):
        cap_monotonicity_table(2, 1, [])
    with pytest.raises(ValueError):
        cap_monotonicity_table(2, 1, [1.0, 0.5])


def test_variation_integral_n1_closed_form():
    # n = 1, k = 0: int <X_e, nu> ds = R int <x, e> ds over the arc
    R = 0.8
    d = np.sqrt(R * R + 1)
    a = np.arccos(R / d)
    exact = 2 * R * R * (d * a - R * np.sin(a))
    assert cap_variation_integral(1, 0, R) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_inversion_round_trip(n):
    for k in range(n + 1):
        for R in (0.01, 0.3, 1.0, 7.0):
            assert cap_invert(n, k, cap_f(n, k, R)) == pytest.approx(R, rel=1e-9)
        # f_k flattens for large R, so compare in value space there
        w = cap_f(n, k, 200.0)
        assert cap_f(n, k, cap_invert(n, k, w)) == pytest.approx(w, rel=1e-13)


def test_inversion_range():
    lo, hi = cap_range(2, 1)
    with pytest.raises(OutOfRange):
        cap_invert(2, 1, lo * 0.5)
    with pytest.raises(OutOfRange):
        cap_invert(2, 1, hi * 2)
    with pytest.raises(OutOfRange):
        cap_invert(2, 3, 1.0)
    assert R_LOW < R_HIGH


def test_compose_identity_on_caps():
    for R in (0.2, 1.0, 5.0):
        assert compose(3, 1, cap_f(3, 1, R)) == pytest.approx(cap_f(3, 3, R), rel=1e-10)


@pytest.mark.parametrize("R", [0.25, 1.0, 4.0])
def test_closed_form_speed_vanishes(R):
    t = np.linspace(0, np.arctan(1 / R), 200)
    assert np.max(np.abs(cap_speed(2, R, t))) < 1e-12


def test_csv_table():
    text = cap_table_csv(2, [0.5, 1.0, 2.0])
    lines = text.strip().splitlines()
    assert lines[0] == "R,f_0,f_1,f_2,f_3"
    assert len(lines) == 4


def test_violation_type():
    assert issubclass(MonotonicityViolation, RuntimeError)

"""Uniformity ranges: the coefficient-form CV evaluation and the interval
machinery that turns the CV cap into feasible spacing/coordinate unions."""

import math

import numpy as np
import pytest

from vlcplace.errors import InfeasibleGeometryError
from vlcplace.photometrics import gain_matrix, illuminance_field
from vlcplace.scene import PhysicalParams, RoomConfig, symmetric_layout
from vlcplace.uniformity import (FeasibleRanges, cv_curve, cv_of_spacing,
                                 feasible_spacing_range, spacing_coefficients,
                                 spacing_limit, spacing_to_coordinate_ranges)


def direct_cv(room, lx, ly, powers, rx_xy, params):
    """Oracle: build the layout, evaluate the gain matrix, take the field CV."""
    layout = symmetric_layout(room, lx, ly, powers=powers)
    gains = gain_matrix(layout.positions, rx_xy, params)
    return illuminance_field(layout, gains, params).cv_rmse


def test_cv_of_spacing_matches_direct_field_evaluation():
    rng = np.random.default_rng(19)
    params = PhysicalParams(height_m=2.15)
    room = RoomConfig(7.5, 5.0, 2, 2)
    rx_xy = rng.uniform(0.0, 5.0, (40, 2)) * np.array([1.5, 1.0])
    for _ in range(50):
        lx = float(rng.uniform(0.0, 7.5))
        ly = float(rng.uniform(0.0, 5.0))
        powers = rng.uniform(1.0, 50.0, 4)
        want = direct_cv(room, lx, ly, powers, rx_xy, params)
        got = cv_of_spacing(lx, ly, powers, room, rx_xy, params)
        assert got == pytest.approx(want, rel=1e-9)


def test_cv_of_spacing_rejects_out_of_room_spacing():
    params = PhysicalParams()
    room = RoomConfig(7.5, 5.0, 2, 2)
    rx_xy = np.array([[1.0, 1.0]])
    with pytest.raises(InfeasibleGeometryError):
        cv_of_spacing(8.0, 1.0, np.ones(4), room, rx_xy, params)


def test_spacing_coefficients_hand_values():
    room = RoomConfig(7.5, 5.0, 2, 2)
    rx_xy = np.array([[1.0, 2.0]])
    coeffs = spacing_coefficients(room, rx_xy)
    # column/row index minus (count - 1) / 2 centers the grid
    np.testing.assert_allclose(coeffs.a_led, [-0.5, -0.5, 0.5, 0.5])
    np.testing.assert_allclose(coeffs.c_led, [-0.5, 0.5, -0.5, 0.5])
    np.testing.assert_allclose(coeffs.b_rx, [7.5 / 2 - 1.0])
    np.testing.assert_allclose(coeffs.d_rx, [5.0 / 2 - 2.0])


def test_cv_curve_axis_symmetry():
    """Evaluating the x-curve at L with y fixed equals the point evaluation."""
    params = PhysicalParams(height_m=2.5)
    room = RoomConfig(7.5, 5.0, 2, 2)
    rng = np.random.default_rng(2)
    rx_xy = rng.uniform(0.5, 4.5, (12, 2))
    powers = rng.uniform(1.0, 10.0, 4)
    cands = np.linspace(0.0, 7.0, 9)
    curve = cv_curve("x", cands, 3.0, powers, room, rx_xy, params)
    for lx, cv in zip(cands, curve):
        assert cv == pytest.approx(
            cv_of_spacing(float(lx), 3.0, powers, room, rx_xy, params), rel=1e-12)
    with pytest.raises(ValueError):
        cv_curve("z", cands, 3.0, powers, room, rx_xy, params)


def test_spacing_limit():
    room = RoomConfig(7.5, 5.0, 2, 2)
    assert spacing_limit(room, "x") == 7.5
    assert spacing_limit(room, "y") == 5.0
    assert spacing_limit(RoomConfig(7.5, 5.0, 1, 1), "x") == 0.0
    assert spacing_limit(RoomConfig(7.5, 5.0, 3, 2), "x") == pytest.approx(3.75)


def test_feasible_range_infinite_cap_is_full_interval():
    room = RoomConfig(7.5, 5.0, 2, 2)
    params = PhysicalParams()
    fr = feasible_spacing_range("x", 3.0, np.ones(4), room,
                                np.array([[1.0, 1.0]]), params, math.inf)
    assert fr.intervals == ((0.0, 7.5),)


def test_feasible_range_boundaries_bracket_the_cap(six_led):
    """Refined interval endpoints must sit on the CV = cap crossing."""
    scenario, cfg = six_led
    params, room = scenario.params, scenario.room
    powers = np.ones(room.led_count) * 10.0
    u_max = 0.2
    fr = feasible_spacing_range("x", 2.0, powers, room, scenario.rx_xy,
                                params, u_max, scan_points=128, tol=1e-5)
    assert not fr.empty
    for lo, hi in fr.intervals:
        for edge in (lo, hi):
            if edge in (0.0, spacing_limit(room, "x")):
                continue  # domain boundary, not a crossing
            inside = cv_of_spacing(edge, 2.0, powers, room, scenario.rx_xy, params)
            assert inside <= u_max + 1e-6
    # every interval interior point is feasible; a point off the union is not
    mid = 0.5 * (fr.intervals[0][0] + fr.intervals[0][1])
    assert cv_of_spacing(mid, 2.0, powers, room, scenario.rx_xy, params) <= u_max + 1e-6


def test_feasible_range_empty_when_cap_unachievable():
    room = RoomConfig(7.5, 5.0, 2, 2)
    params = PhysicalParams()
    rx_xy = np.array([[0.5, 0.5], [7.0, 4.5], [3.75, 2.5]])
    fr = feasible_spacing_range("x", 3.0, np.ones(4) * 5.0, room, rx_xy,
                                params, 1e-6)
    assert fr.empty
    assert fr.min_cv > 1e-6  # diagnostic carries the tightest CV on the scan


def test_spacing_to_coordinate_ranges_affine_flip():
    room = RoomConfig(7.5, 5.0, 2, 2)
    fr = FeasibleRanges("x", "spacing", ((1.0, 2.0),), min_cv=0.1,
                        argmin_spacing=1.5)
    mapped = spacing_to_coordinate_ranges(fr, room)
    # x_1 = (7.5 - L) / 2: L in [1, 2] maps to x_1 in [2.75, 3.25], reversed
    assert mapped.kind == "coordinate"
    assert mapped.intervals == ((2.75, 3.25),)
    with pytest.raises(ValueError):
        spacing_to_coordinate_ranges(mapped, room)


def test_ranges_contains_and_endpoints():
    fr = FeasibleRanges("x", "coordinate", ((0.0, 1.0), (2.0, 3.0)))
    assert fr.contains(0.5) and fr.contains(1.0) and fr.contains(2.0)
    assert not fr.contains(1.5)
    assert fr.endpoints == (0.0, 1.0, 2.0, 3.0)
    assert not fr.empty
    assert FeasibleRanges("x", "coordinate", ()).empty

"""Channel and field evaluation, checked against an independent angle-based
computation of the Lambertian line-of-sight link."""

import math

import numpy as np
import pytest

from vlcplace.photometrics import (capacity, channel_gain, concentrator_gain,
                                   gain_matrix, heatmap_grid, illuminance_field)
from vlcplace.scene import PhysicalParams, RoomConfig, symmetric_layout


def reference_gain(led, rx, params):
    """Independent oracle: evaluate the link through the emission and
    incidence angles rather than the collapsed distance-only form."""
    m = params.lambert_m
    dx, dy = led[0] - rx[0], led[1] - rx[1]
    d = math.sqrt(dx * dx + dy * dy + params.height_m ** 2)
    cos_phi = params.height_m / d     # emission angle (LED faces down)
    cos_psi = params.height_m / d     # incidence angle (receiver faces up)
    psi = math.degrees(math.acos(min(1.0, cos_psi)))
    fov = params.fov_semi_angle_deg
    if psi > fov:
        return 0.0
    g = params.refractive_index ** 2 / math.sin(math.radians(fov)) ** 2
    return ((m + 1.0) * params.detector_area_m2 / (2.0 * math.pi * d * d)
            * cos_phi ** m * g * cos_psi)


def test_concentrator_gain_hand_value():
    # 1.5^2 / sin^2(60 deg) = 2.25 / 0.75 = 3
    assert concentrator_gain(30.0, 1.5, 60.0) == pytest.approx(3.0, abs=1e-12)
    assert concentrator_gain(60.0, 1.5, 60.0) == pytest.approx(3.0, abs=1e-12)  # boundary in
    assert concentrator_gain(60.0001, 1.5, 60.0) == 0.0
    with pytest.raises(ValueError):
        concentrator_gain(-1.0, 1.5, 60.0)


def test_channel_gain_matches_angle_based_oracle():
    rng = np.random.default_rng(11)
    params = PhysicalParams(height_m=2.15)
    for _ in range(200):
        led = rng.uniform(0.0, 8.0, 2)
        rx = rng.uniform(0.0, 8.0, 2)
        got = channel_gain(led, rx, params)
        want = reference_gain(led, rx, params)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_channel_gain_fov_cutoff():
    params = PhysicalParams(height_m=2.0, fov_semi_angle_deg=60.0)
    # horizontal reach at the cutoff: H * tan(60 deg) = 2 * sqrt(3) ~ 3.464
    assert channel_gain((0.0, 0.0), (3.4, 0.0), params) > 0.0
    assert channel_gain((0.0, 0.0), (3.5, 0.0), params) == 0.0


def test_gain_matrix_agrees_with_scalar_gain():
    rng = np.random.default_rng(7)
    params = PhysicalParams(height_m=2.5, fov_semi_angle_deg=55.0)
    positions = rng.uniform(0.0, 7.5, (4, 2))
    rx_xy = rng.uniform(0.0, 7.5, (23, 2))
    gains = gain_matrix(positions, rx_xy, params)
    for i in range(4):
        for j in range(23):
            assert gains[i, j] == pytest.approx(
                channel_gain(positions[i], rx_xy[j], params), rel=1e-12, abs=1e-300)


def _capacity_reference(i, j, powers, gains, params, interference):
    xi = params.illum_target
    s = xi * powers[i] * gains[i, j]
    denom = params.noise_std ** 2
    if interference:
        denom += sum((xi * powers[n] * gains[n, j]) ** 2
                     for n in range(len(powers)) if n != i)
    return 0.5 * math.log2(1.0 + (math.e / (2.0 * math.pi)) * s * s / denom)


@pytest.mark.parametrize("interference", [True, False])
def test_capacity_matches_direct_formula(interference):
    rng = np.random.default_rng(3)
    params = PhysicalParams(noise_std=0.05, illum_target=0.7,
                            co_channel_interference=interference)
    positions = rng.uniform(1.0, 6.0, (3, 2))
    rx_xy = rng.uniform(0.0, 7.0, (5, 2))
    gains = gain_matrix(positions, rx_xy, params)
    powers = rng.uniform(1.0, 100.0, 3)
    for i in range(3):
        for j in range(5):
            want = _capacity_reference(i, j, powers, gains, params, interference)
            assert capacity(i, j, powers, gains, params) == pytest.approx(want, rel=1e-12)


def test_orthogonal_access_capacity_never_below_simultaneous():
    rng = np.random.default_rng(5)
    shared = dict(noise_std=0.04, illum_target=1.0)
    with_int = PhysicalParams(co_channel_interference=True, **shared)
    without = PhysicalParams(co_channel_interference=False, **shared)
    positions = rng.uniform(1.0, 6.0, (4, 2))
    rx_xy = rng.uniform(0.0, 7.0, (9, 2))
    gains = gain_matrix(positions, rx_xy, with_int)
    powers = rng.uniform(10.0, 200.0, 4)
    for j in range(9):
        assert capacity(0, j, powers, gains, without) >= \
            capacity(0, j, powers, gains, with_int)


def test_illuminance_field_hand_example():
    # two receivers, one LED: eta_j = xi * P * h_j, CV from first principles
    params = PhysicalParams(illum_target=2.0, height_m=2.0)
    room = RoomConfig(6.0, 4.0, 1, 1)
    layout = symmetric_layout(room, 0.0, 0.0, powers=[10.0])
    rx_xy = np.array([[3.0, 2.0], [4.0, 2.0]])
    gains = gain_matrix(layout.positions, rx_xy, params)
    field = illuminance_field(layout, gains, params)
    eta = 2.0 * 10.0 * gains[0]
    np.testing.assert_allclose(field.eta, eta, rtol=1e-12)
    avg = eta.mean()
    rmse = math.sqrt(((eta - avg) ** 2).mean())
    assert field.eta_avg == pytest.approx(avg, rel=1e-12)
    assert field.cv_rmse == pytest.approx(rmse / avg, rel=1e-12)
    assert field.defined


def test_illuminance_field_undefined_for_dark_room():
    params = PhysicalParams()
    room = RoomConfig(6.0, 4.0, 1, 1)
    layout = symmetric_layout(room, 0.0, 0.0)  # zero power
    rx_xy = np.array([[3.0, 2.0]])
    gains = gain_matrix(layout.positions, rx_xy, params)
    field = illuminance_field(layout, gains, params)
    assert math.isnan(field.cv_rmse) and not field.defined


def test_heatmap_grid_cell_centers_and_shape():
    params = PhysicalParams()
    room = RoomConfig(6.0, 4.0, 1, 1)
    layout = symmetric_layout(room, 0.0, 0.0, powers=[5.0])
    xs, ys, eta = heatmap_grid(layout, room, params, 2)
    np.testing.assert_allclose(xs, [1.5, 4.5])
    np.testing.assert_allclose(ys, [1.0, 3.0])
    assert eta.shape == (2, 2)
    with pytest.raises(ValueError):
        heatmap_grid(layout, room, params, 1)

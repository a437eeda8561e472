"""LOS channel evaluation, link capacity with interference, illuminance field.

LEDs face straight down and receivers straight up, so the irradiance and
incidence angles coincide and cos(phi) = cos(psi) = H / d. Inside the FOV the
channel gain reduces to (m+1) A g H^(m+1) / (2 pi d^(m+3)); outside it is 0.
Illuminance is in the normalized xi * P * h units used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import LedLayout, PhysicalParams, RoomConfig


def concentrator_gain(incidence_deg: float, n_r: float, fov_deg: float) -> float:
    """Optical concentrator gain: n_r^2 / sin^2(FOV) inside the FOV, else 0.

    The FOV boundary is inclusive.
    """
    if incidence_deg < 0.0:
        raise ValueError("incidence angle must be non-negative")
    if incidence_deg > fov_deg:
        return 0.0
    return n_r ** 2 / math.sin(math.radians(fov_deg)) ** 2


def link_distance(led_pos, rx_pos, height_m: float) -> float:
    """3-D distance between an LED and a receiver separated vertically by H."""
    dx = led_pos[0] - rx_pos[0]
    dy = led_pos[1] - rx_pos[1]
    return math.sqrt(dx * dx + dy * dy + height_m * height_m)


def channel_gain(led_pos, rx_pos, params: PhysicalParams) -> float:
    """LOS channel gain h for a single LED-receiver pair."""
    m = params.lambert_m
    d = link_distance(led_pos, rx_pos, params.height_m)
    cos_incidence = params.height_m / d
    if cos_incidence < math.cos(math.radians(params.fov_semi_angle_deg)):
        return 0.0
    g = params.refractive_index ** 2 / math.sin(math.radians(params.fov_semi_angle_deg)) ** 2
    return ((m + 1.0) * params.detector_area_m2 * g
            * params.height_m ** (m + 1.0) / (2.0 * math.pi * d ** (m + 3.0)))


def gain_matrix(positions: np.ndarray, rx_xy: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """K x U matrix of channel gains between every LED and every receiver."""
    m = params.lambert_m
    h_m = params.height_m
    diff = positions[:, None, :] - rx_xy[None, :, :]
    d2 = diff[..., 0] ** 2 + diff[..., 1] ** 2 + h_m * h_m
    g = params.refractive_index ** 2 / math.sin(math.radians(params.fov_semi_angle_deg)) ** 2
    const = (m + 1.0) * params.detector_area_m2 * g * h_m ** (m + 1.0) / (2.0 * math.pi)
    gains = const * d2 ** (-(m + 3.0) / 2.0)
    cos_fov = math.cos(math.radians(params.fov_semi_angle_deg))
    if cos_fov > 0.0:
        gains[d2 > (h_m / cos_fov) ** 2] = 0.0
    return gains


def capacity(i: int, j: int, powers: np.ndarray, gains: np.ndarray,
             params: PhysicalParams) -> float:
    """Channel capacity (bits/transmission) of the link LED i -> receiver j.

    Indices are 0-based into the power vector / gain matrix. Under orthogonal
    access (co_channel_interference False) the other LEDs do not degrade the
    link and the denominator is receiver noise alone.
    """
    xi = params.illum_target
    signal = xi * powers[i] * gains[i, j]
    if params.co_channel_interference:
        rx = xi * powers * gains[:, j]
        interference_sq = float(np.dot(rx, rx) - rx[i] * rx[i])
    else:
        interference_sq = 0.0
    sinr = (math.e / (2.0 * math.pi)) * signal * signal / (params.noise_std ** 2 + interference_sq)
    return 0.5 * math.log2(1.0 + sinr)


@dataclass(frozen=True)
class IlluminanceField:
    """Per-receiver total illuminance with its mean, RMSE and CV(RMSE)."""

    eta: np.ndarray
    eta_avg: float
    rmse: float
    cv_rmse: float

    @property
    def defined(self) -> bool:
        """False when the mean illuminance is zero and CV(RMSE) is undefined."""
        return not math.isnan(self.cv_rmse)


def illuminance_field(layout: LedLayout, gains: np.ndarray,
                      params: PhysicalParams) -> IlluminanceField:
    """Total illuminance per receiver and the CV(RMSE) uniformity metric."""
    eta = params.illum_target * (layout.powers @ gains)
    avg = float(eta.mean())
    rmse = float(np.sqrt(np.mean((eta - avg) ** 2)))
    cv = rmse / avg if avg > 0.0 else math.nan
    return IlluminanceField(eta, avg, rmse, cv)


def heatmap_grid(layout: LedLayout, room: RoomConfig, params: PhysicalParams,
                 resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample the illuminance field on a resolution x resolution floor grid.

    Returns (xs, ys, eta) with eta indexed [ix, iy]; sample points are cell
    centers, matching the receiver lattice convention.
    """
    if resolution < 2:
        raise ValueError("heatmap resolution must be at least 2 per axis")
    xs = (np.arange(resolution) + 0.5) * room.x_len_m / resolution
    ys = (np.arange(resolution) + 0.5) * room.y_len_m / resolution
    pts = np.array([(x, y) for x in xs for y in ys])
    gains = gain_matrix(layout.positions, pts, params)
    eta = params.illum_target * (layout.powers @ gains)
    return xs, ys, eta.reshape(resolution, resolution)

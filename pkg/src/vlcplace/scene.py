"""Room geometry, LED grid indexing, receiver lattices and physical constants.

Placement state is the symmetric-grid parameterization: an M x N LED grid
with spacings (L_x, L_y) and equal wall margins on opposite sides, so the
whole layout is determined by the two spacings (equivalently by the first
LED's coordinates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleGeometryError


def lambert_order(semi_angle_deg: float) -> float:
    """Lambertian emission order for a half-power semi-angle in degrees.

    Strictly decreasing in the semi-angle; 60 degrees gives exactly 1.
    """
    if not 0.0 < semi_angle_deg < 90.0:
        raise ValueError(f"semi-angle must lie in (0, 90) degrees, got {semi_angle_deg}")
    return -math.log(2.0) / math.log(math.cos(math.radians(semi_angle_deg)))


@dataclass(frozen=True)
class PhysicalParams:
    """Optical/electrical constants of a single LED-photodiode link.

    ``co_channel_interference`` selects the multiple-access model: when True
    all LEDs transmit simultaneously and every non-serving LED's signal enters
    the rate calculation as interference; when False transmissions are
    orthogonal (e.g. time-shared) and only receiver noise limits the rate.
    Illuminance always aggregates every LED's light either way.
    """

    detector_area_m2: float = 1e-4
    semi_angle_deg: float = 60.0
    fov_semi_angle_deg: float = 60.0
    refractive_index: float = 1.5
    noise_std: float = 0.04
    illum_target: float = 1.0
    height_m: float = 2.15
    co_channel_interference: bool = True

    def __post_init__(self):
        for name in ("detector_area_m2", "refractive_index", "noise_std",
                     "illum_target", "height_m"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.semi_angle_deg < 90.0:
            raise ValueError("semi_angle_deg must lie in (0, 90)")
        if not 0.0 < self.fov_semi_angle_deg <= 90.0:
            raise ValueError("fov_semi_angle_deg must lie in (0, 90]")

    @property
    def lambert_m(self) -> float:
        return lambert_order(self.semi_angle_deg)


@dataclass(frozen=True)
class RoomConfig:
    """Rectangular room extents and LED grid shape (M columns x N rows)."""

    x_len_m: float
    y_len_m: float
    grid_cols: int
    grid_rows: int

    def __post_init__(self):
        if self.x_len_m <= 0.0 or self.y_len_m <= 0.0:
            raise ValueError("room extents must be strictly positive")
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ValueError("grid shape must be at least 1 x 1")

    @property
    def led_count(self) -> int:
        return self.grid_cols * self.grid_rows


@dataclass(frozen=True)
class Receiver:
    """A receiver position with its data-rate and illuminance requirements."""

    x_m: float
    y_m: float
    rate_min: float = 0.0
    illum_min: float = 0.0

    def __post_init__(self):
        if self.rate_min < 0.0 or self.illum_min < 0.0:
            raise ValueError("receiver constraints must be non-negative")


def led_grid_index(i: int, n_rows: int, led_count: int | None = None) -> tuple[int, int]:
    """Map 1-based LED index i to (column, row) in the N-row grid ordering."""
    if i < 1 or (led_count is not None and i > led_count):
        raise IndexError(f"LED index {i} out of range")
    return (i - 1) // n_rows, (i - 1) % n_rows


@dataclass(frozen=True)
class LedLayout:
    """Symmetric-grid placement state: spacings, derived positions, powers."""

    spacing_x_m: float
    spacing_y_m: float
    positions: np.ndarray  # (K, 2)
    powers: np.ndarray     # (K,)

    def with_powers(self, powers) -> "LedLayout":
        powers = np.asarray(powers, dtype=float)
        if powers.shape != (self.positions.shape[0],):
            raise ValueError("power vector length must match the LED count")
        if np.any(powers < 0.0):
            raise ValueError("LED powers must be non-negative")
        return LedLayout(self.spacing_x_m, self.spacing_y_m, self.positions, powers)

    @property
    def led_count(self) -> int:
        return self.positions.shape[0]


def symmetric_layout(room: RoomConfig, spacing_x_m: float, spacing_y_m: float,
                     powers=None) -> LedLayout:
    """Place the M x N grid symmetrically about the room center.

    The left/right margins are (x_l - (M-1) L_x) / 2 and likewise for y.
    Raises when a spacing pushes the grid outside the room.
    """
    m_cols, n_rows = room.grid_cols, room.grid_rows
    if spacing_x_m < 0.0 or spacing_y_m < 0.0:
        raise InfeasibleGeometryError("spacings must be non-negative")
    if (m_cols - 1) * spacing_x_m > room.x_len_m + 1e-12:
        raise InfeasibleGeometryError(
            f"x spacing {spacing_x_m} exceeds room length {room.x_len_m}")
    if (n_rows - 1) * spacing_y_m > room.y_len_m + 1e-12:
        raise InfeasibleGeometryError(
            f"y spacing {spacing_y_m} exceeds room width {room.y_len_m}")

    margin_x = (room.x_len_m - (m_cols - 1) * spacing_x_m) / 2.0
    margin_y = (room.y_len_m - (n_rows - 1) * spacing_y_m) / 2.0
    k = room.led_count
    pos = np.empty((k, 2), dtype=float)
    for i in range(1, k + 1):
        col, row = led_grid_index(i, n_rows, k)
        pos[i - 1, 0] = col * spacing_x_m + margin_x
        pos[i - 1, 1] = row * spacing_y_m + margin_y
    if powers is None:
        powers = np.zeros(k, dtype=float)
    return LedLayout(spacing_x_m, spacing_y_m, pos, np.asarray(powers, dtype=float))


def uniform_receiver_grid(room: RoomConfig, count_x: int, count_y: int,
                          rate_min: float = 0.0, illum_min: float = 0.0) -> list[Receiver]:
    """Receivers at the cell centers of a count_x x count_y floor partition.

    Cell centers avoid degenerate wall-touching receivers.
    """
    if count_x < 1 or count_y < 1:
        raise ValueError("receiver grid counts must be at least 1")
    dx = room.x_len_m / count_x
    dy = room.y_len_m / count_y
    out = []
    for ix in range(count_x):
        for iy in range(count_y):
            out.append(Receiver((ix + 0.5) * dx, (iy + 0.5) * dy, rate_min, illum_min))
    return out


@dataclass(frozen=True)
class Scenario:
    """A complete problem instance: room, physics, receivers, uniformity cap."""

    room: RoomConfig
    params: PhysicalParams
    receivers: tuple[Receiver, ...]
    uniformity_max: float = math.inf

    def __post_init__(self):
        if len(self.receivers) == 0:
            raise ValueError("scenario needs at least one receiver")
        if self.uniformity_max < 0.0:
            raise ValueError("uniformity_max must be non-negative")
        for r in self.receivers:
            if not (0.0 <= r.x_m <= self.room.x_len_m and 0.0 <= r.y_m <= self.room.y_len_m):
                raise ValueError(f"receiver at ({r.x_m}, {r.y_m}) lies outside the room")

    @property
    def rx_xy(self) -> np.ndarray:
        return np.array([(r.x_m, r.y_m) for r in self.receivers], dtype=float)

    @property
    def rate_min(self) -> np.ndarray:
        return np.array([r.rate_min for r in self.receivers], dtype=float)

    @property
    def illum_min(self) -> np.ndarray:
        return np.array([r.illum_min for r in self.receivers], dtype=float)

    def with_constraints(self, rate_min=None, illum_min=None, uniformity_max=None) -> "Scenario":
        """Copy with all receivers' constraints (or the CV cap) replaced."""
        receivers = tuple(
            Receiver(r.x_m, r.y_m,
                     r.rate_min if rate_min is None else rate_min,
                     r.illum_min if illum_min is None else illum_min)
            for r in self.receivers
        )
        u = self.uniformity_max if uniformity_max is None else uniformity_max
        return Scenario(self.room, self.params, receivers, u)

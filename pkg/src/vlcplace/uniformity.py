"""Transform the CV(RMSE) cap into unions of linear spacing/coordinate ranges.

With the symmetric grid, every squared link distance is
(A_i L_x + B_j)^2 + (C_i L_y + D_j)^2 + H^2, so for fixed powers the CV is a
1-D function of one spacing once the other is held fixed. The feasible set
{L : CV(L) <= U_th} is generally a union of intervals because CV is
non-monotone; a scan brackets every crossing and bisection refines it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .errors import InfeasibleGeometryError
from .scene import PhysicalParams, RoomConfig, led_grid_index


@dataclass(frozen=True)
class SpacingCoefficients:
    """Per-LED and per-receiver linear coefficients of the squared distance."""

    a_led: np.ndarray  # (K,) floor((i-1)/N) - (M-1)/2
    c_led: np.ndarray  # (K,) mod(i-1, N) - (N-1)/2
    b_rx: np.ndarray   # (U,) x_l/2 - x_j
    d_rx: np.ndarray   # (U,) y_l/2 - y_j


def spacing_coefficients(room: RoomConfig, rx_xy: np.ndarray) -> SpacingCoefficients:
    k = room.led_count
    cols = np.empty(k)
    rows = np.empty(k)
    for i in range(1, k + 1):
        cols[i - 1], rows[i - 1] = led_grid_index(i, room.grid_rows, k)
    return SpacingCoefficients(
        a_led=cols - (room.grid_cols - 1) / 2.0,
        c_led=rows - (room.grid_rows - 1) / 2.0,
        b_rx=room.x_len_m / 2.0 - rx_xy[:, 0],
        d_rx=room.y_len_m / 2.0 - rx_xy[:, 1],
    )


def _fov_d2_max(params: PhysicalParams) -> float:
    cos_fov = math.cos(math.radians(params.fov_semi_angle_deg))
    return (params.height_m / cos_fov) ** 2 if cos_fov > 0.0 else math.inf


def cv_curve(axis: str, candidates, fixed_other_spacing: float, powers: np.ndarray,
             room: RoomConfig, rx_xy: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """CV(RMSE) as a function of one spacing with the other held fixed."""
    coeffs = spacing_coefficients(room, rx_xy)
    if axis == "x":
        moving_coef, moving_off = coeffs.a_led, coeffs.b_rx
        fixed_coef, fixed_off = coeffs.c_led, coeffs.d_rx
    elif axis == "y":
        moving_coef, moving_off = coeffs.c_led, coeffs.d_rx
        fixed_coef, fixed_off = coeffs.a_led, coeffs.b_rx
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    v = fixed_coef[:, None] * fixed_other_spacing + fixed_off[None, :]
    base_sq = v * v + params.height_m ** 2
    neg_half_exp = -(params.lambert_m + 3.0) / 2.0
    return kernel.cv_for_spacings(
        np.atleast_1d(np.asarray(candidates, dtype=float)),
        moving_coef, moving_off, base_sq, np.asarray(powers, dtype=float),
        neg_half_exp, _fov_d2_max(params),
    )


def cv_of_spacing(spacing_x: float, spacing_y: float, powers: np.ndarray,
                  room: RoomConfig, rx_xy: np.ndarray, params: PhysicalParams) -> float:
    """CV(RMSE) at one (L_x, L_y) point via the coefficient form."""
    if (room.grid_cols - 1) * spacing_x > room.x_len_m + 1e-12 \
            or (room.grid_rows - 1) * spacing_y > room.y_len_m + 1e-12 \
            or spacing_x < 0.0 or spacing_y < 0.0:
        raise InfeasibleGeometryError("spacing outside the room")
    return float(cv_curve("x", [spacing_x], spacing_y, powers, room, rx_xy, params)[0])


@dataclass(frozen=True)
class FeasibleRanges:
    """Union of closed intervals for a spacing or a first-LED coordinate."""

    axis: str                                 # 'x' or 'y'
    kind: str                                 # 'spacing' or 'coordinate'
    intervals: tuple[tuple[float, float], ...]  # disjoint, sorted
    min_cv: float = math.nan                  # tightest CV seen on the scan
    argmin_spacing: float = math.nan          # spacing achieving min_cv

    @property
    def empty(self) -> bool:
        return len(self.intervals) == 0

    @property
    def endpoints(self) -> tuple[float, ...]:
        out = []
        for lo, hi in self.intervals:
            out.append(lo)
            out.append(hi)
        return tuple(out)

    def contains(self, value: float) -> bool:
        return any(lo <= value <= hi for lo, hi in self.intervals)


def spacing_limit(room: RoomConfig, axis: str) -> float:
    """Largest spacing that keeps the grid inside the room (wall-flush legal)."""
    if axis == "x":
        count, length = room.grid_cols, room.x_len_m
    else:
        count, length = room.grid_rows, room.y_len_m
    return length / (count - 1) if count > 1 else 0.0


def feasible_spacing_range(axis: str, fixed_other_spacing: float, powers: np.ndarray,
                           room: RoomConfig, rx_xy: np.ndarray, params: PhysicalParams,
                           u_max: float, scan_points: int = 256,
                           tol: float = 1e-4) -> FeasibleRanges:
    """Union of spacing intervals along one axis where CV(RMSE) <= u_max.

    Scans equally spaced candidates in [0, limit], refines every feasibility
    boundary by bisection to width <= tol, and returns the feasible union.
    An undefined CV (all-zero powers) counts as feasible: the zero field is
    uniform. An empty union is a valid result; the caller decides whether to
    relax or abort.
    """
    if u_max < 0.0:
        raise ValueError("u_max must be non-negative")
    if tol <= 0.0 or scan_points < 2:
        raise ValueError("need tol > 0 and scan_points >= 2")
    limit = spacing_limit(room, axis)

    if math.isinf(u_max):
        return FeasibleRanges(axis, "spacing", ((0.0, limit),))

    if limit == 0.0:
        cv0 = float(cv_curve(axis, [0.0], fixed_other_spacing, powers, room, rx_xy, params)[0])
        ok = math.isnan(cv0) or cv0 <= u_max
        return FeasibleRanges(axis, "spacing", ((0.0, 0.0),) if ok else (),
                              min_cv=cv0, argmin_spacing=0.0)

    grid = np.linspace(0.0, limit, scan_points)
    cv = cv_curve(axis, grid, fixed_other_spacing, powers, room, rx_xy, params)
    feasible = ~(cv > u_max)  # NaN counts as feasible

    def refine(lo, hi, lo_feasible):
        # keep one feasible and one infeasible endpoint; return the feasible side
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            cv_mid = float(cv_curve(axis, [mid], fixed_other_spacing, powers,
                                    room, rx_xy, params)[0])
            mid_ok = math.isnan(cv_mid) or cv_mid <= u_max
            if mid_ok == lo_feasible:
                lo = mid
            else:
                hi = mid
        return lo if lo_feasible else hi

    intervals = []
    k = 0
    while k < scan_points:
        if not feasible[k]:
            k += 1
            continue
        start = k
        while k + 1 < scan_points and feasible[k + 1]:
            k += 1
        lo = grid[start] if start == 0 else refine(grid[start - 1], grid[start], False)
        hi = grid[k] if k == scan_points - 1 else refine(grid[k], grid[k + 1], True)
        intervals.append((lo, hi))
        k += 1

    idx = int(np.nanargmin(cv)) if not np.all(np.isnan(cv)) else 0
    return FeasibleRanges(axis, "spacing", tuple(intervals),
                          min_cv=float(cv[idx]), argmin_spacing=float(grid[idx]))


def spacing_to_coordinate_ranges(ranges: FeasibleRanges, room: RoomConfig) -> FeasibleRanges:
    """Map spacing intervals to first-LED coordinate intervals.

    x_1 = (x_l - (M - 1) L_x) / 2 is affine and decreasing in L_x, so each
    interval maps endpoint-for-endpoint with its ordering reversed.
    """
    if ranges.kind != "spacing":
        raise ValueError("expected spacing-form ranges")
    if ranges.axis == "x":
        count, length = room.grid_cols, room.x_len_m
    else:
        count, length = room.grid_rows, room.y_len_m

    def to_coord(spacing):
        return (length - (count - 1) * spacing) / 2.0

    mapped = sorted((to_coord(hi), to_coord(lo)) for lo, hi in ranges.intervals)
    return FeasibleRanges(ranges.axis, "coordinate", tuple(mapped),
                          min_cv=ranges.min_cv, argmin_spacing=ranges.argmin_spacing)

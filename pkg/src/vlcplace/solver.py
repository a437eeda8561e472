"""Per-LED Lagrange-dual subproblems and the iterative placement algorithms.

Each LED's subproblem minimizes its own power subject to transformed
communication/illumination constraints P^(2/(m+3)) >= M_ij d_ij^2 over its
served receivers; the dual multipliers are driven by a projected subgradient
ascent while the first LED's coordinate follows the weighted-centroid
stationary point, clamped into the uniformity-feasible range union. A full
x-axis (or y-axis) pass sweeps the LEDs in index order, Gauss-Seidel style:
every update sees the most recent powers and positions of the other LEDs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernel
from .errors import ConvergenceError, InfeasibleScenarioError, UniformityInfeasibleError
from .photometrics import gain_matrix, illuminance_field
from .scene import LedLayout, PhysicalParams, Scenario, led_grid_index, symmetric_layout
from .uniformity import (FeasibleRanges, feasible_spacing_range, spacing_limit,
                         spacing_to_coordinate_ranges)


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budgets and tolerances for the placement algorithms."""

    max_outer: int = 50            # S1: outer LXO/LYO alternations
    max_cv_loops_x: int = 20       # S2: LXO + CV-range recomputations
    max_cv_loops_y: int = 20       # S3: LYO + CV-range recomputations
    max_dual_iters: int = 2000     # L_i: dual sweeps per coordinate pass
    gamma: float = 0.01            # subgradient step-size scale
    diminishing_step: bool = True  # gamma_l = gamma / sqrt(l) when True
    lambda_init: float = 1.0
    power_tol: float = 1e-6        # relative sum-power convergence tolerance
    bisection_tol: float = 1e-4    # spacing bisection width (meters)
    scan_points: int = 256         # CV scan resolution per axis
    cv_tol: float = 1e-3           # absolute CV(RMSE) acceptance tolerance
    fixed_point_tol: float = 1e-8  # sum-power change for the power fixed point
    fixed_point_max: int = 1000
    polish_rounds: int = 6         # terminal spacing-refinement rounds

    def __post_init__(self):
        for name in ("max_outer", "max_cv_loops_x", "max_cv_loops_y", "max_dual_iters",
                     "gamma", "lambda_init", "power_tol", "bisection_tol",
                     "scan_points", "cv_tol", "fixed_point_tol", "fixed_point_max",
                     "polish_rounds"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Association:
    """Partition of the receivers among the LEDs serving them."""

    server: np.ndarray                    # (U,) 0-based serving LED per receiver
    served: tuple[tuple[int, ...], ...]   # per-LED 0-based receiver indices

    def __post_init__(self):
        flat = sorted(j for js in self.served for j in js)
        if flat != list(range(len(self.server))):
            raise ValueError("served sets must partition the receiver set")


def associate(layout: LedLayout, gains: np.ndarray, params: PhysicalParams) -> Association:
    """Assign each receiver to the LED with the strongest received signal.

    With all-equal (or all-zero, i.e. uninitialized) powers this reduces to
    the strongest channel gain. Ties break toward the lowest LED index.
    """
    powers = layout.powers
    if powers.max() <= 0.0 or np.all(powers == powers[0]):
        metric = gains
    else:
        metric = params.illum_target * powers[:, None] * gains
    best = metric.max(axis=0)
    if np.any(gains.max(axis=0) <= 0.0):
        j = int(np.nonzero(gains.max(axis=0) <= 0.0)[0][0])
        raise InfeasibleScenarioError(
            f"receiver {j + 1} lies outside the field of view of every LED")
    server = np.argmax(metric, axis=0)
    dark = best <= 0.0  # powered-signal tie at zero: fall back to channel gain
    if np.any(dark):
        server[dark] = np.argmax(gains[:, dark], axis=0)
    served = tuple(tuple(int(j) for j in np.nonzero(server == i)[0])
                   for i in range(gains.shape[0]))
    return Association(server, served)


def required_power_comm(i: int, j: int, gains: np.ndarray, powers: np.ndarray,
                        params: PhysicalParams, c_th: float) -> float:
    """Power of LED i that makes the capacity to receiver j exactly c_th.

    Under simultaneous transmission the interference uses the current powers
    of every other LED; under orthogonal access it is zero.
    """
    if c_th == 0.0:
        return 0.0
    if gains[i, j] <= 0.0:
        raise InfeasibleScenarioError(
            f"receiver {j + 1} is unservable by LED {i + 1}: zero channel gain")
    xi = params.illum_target
    if params.co_channel_interference:
        rx = xi * powers * gains[:, j]
        interference_sq = float(np.dot(rx, rx) - rx[i] * rx[i])
    else:
        interference_sq = 0.0
    noise = math.sqrt(params.noise_std ** 2 + interference_sq)
    return noise * math.sqrt((2.0 * math.pi / math.e) * (2.0 ** (2.0 * c_th) - 1.0)) \
        / (xi * gains[i, j])


@dataclass(frozen=True)
class ConstraintFactors:
    """Transformed constraint coefficients of one (LED, receiver) pair."""

    v: float               # illumination factor
    w: float               # communication factor (carries interference)
    c_factor: float        # sqrt(2^(2 c_th) - 1)
    illum_residual: float  # illuminance still owed after the other LEDs
    m_factor: float        # (max of the active branches)^(2/(m+3))


def constraint_factors(i: int, j: int, powers: np.ndarray, gains: np.ndarray,
                       params: PhysicalParams, c_th: float, eta_th: float) -> ConstraintFactors:
    """Factors making the constraints read P_i >= branch * d_ij^(m+3).

    The concentrator gain enters as its in-FOV constant; a non-positive
    illuminance residual means the other LEDs already meet the level
    requirement and that branch contributes nothing.
    """
    m = params.lambert_m
    xi = params.illum_target
    g = params.refractive_index ** 2 / math.sin(math.radians(params.fov_semi_angle_deg)) ** 2
    denom = xi * (m + 1.0) * params.detector_area_m2 * g * params.height_m ** (m + 1.0)

    rx = xi * powers * gains[:, j]
    others_illum = float(rx.sum() - rx[i])
    if params.co_channel_interference:
        interference_sq = float(np.dot(rx, rx) - rx[i] * rx[i])
    else:
        interference_sq = 0.0

    v = 2.0 * math.pi / denom
    w = (2.0 * math.pi) ** 1.5 * math.exp(-0.5) \
        * math.sqrt(params.noise_std ** 2 + interference_sq) / denom
    c_factor = math.sqrt(2.0 ** (2.0 * c_th) - 1.0)
    illum_residual = eta_th - others_illum
    branch = max(max(illum_residual, 0.0) * v, c_factor * w)
    return ConstraintFactors(v, w, c_factor, illum_residual, branch ** (2.0 / (m + 3.0)))


def kkt_power(lambda_sum: float, m: float) -> float:
    """Closed-form stationary power: ((2/(m+3)) * sum(lambda))^((m+3)/(m+1))."""
    if lambda_sum < 0.0:
        raise ValueError("multiplier sum must be non-negative")
    return ((2.0 / (m + 3.0)) * lambda_sum) ** ((m + 3.0) / (m + 1.0))


def kkt_coordinate(lambdas: np.ndarray, m_factors: np.ndarray,
                   rx_coords: np.ndarray) -> float | None:
    """Stationary coordinate: lambda*M-weighted centroid of served receivers.

    Returns None when every weight vanishes (keep the previous coordinate).
    """
    weights = lambdas * m_factors
    total = float(weights.sum())
    if total <= 0.0:
        return None
    return float(np.dot(weights, rx_coords) / total)


def clamp_coordinate(x_hat: float, ranges: FeasibleRanges, lagrangian) -> float:
    """Project the unconstrained coordinate into the feasible range union.

    Inside the union the point is kept; otherwise the endpoint minimizing the
    (quadratic) Lagrangian wins, ties toward the smaller endpoint.
    """
    if ranges.empty:
        raise UniformityInfeasibleError(ranges.min_cv)
    if ranges.contains(x_hat):
        return x_hat
    best = None
    best_val = math.inf
    for endpoint in sorted(set(ranges.endpoints)):
        val = lagrangian(endpoint)
        if val < best_val:
            best, best_val = endpoint, val
    return best


@dataclass(frozen=True)
class DualState:
    """Projected-subgradient bookkeeping for one LED's multipliers."""

    lambdas: np.ndarray
    step_size: float
    iteration: int = 0
    max_iterations: int = 2000

    def __post_init__(self):
        if np.any(self.lambdas < 0.0):
            raise ValueError("multipliers must stay non-negative")


def subgradient_step(state: DualState, residuals: np.ndarray, gamma: float) -> DualState:
    """One projected multiplier update: lambda <- max(0, lambda + gamma * r)."""
    lam = np.maximum(0.0, state.lambdas + gamma * residuals)
    return replace(state, lambdas=lam, iteration=state.iteration + 1)


def min_feasible_powers(positions: np.ndarray, gains: np.ndarray, assoc: Association,
                        rate_min: np.ndarray, illum_min: np.ndarray,
                        params: PhysicalParams, tol: float = 1e-8,
                        max_passes: int = 1000) -> tuple[np.ndarray, int]:
    """Least feasible power vector at fixed positions and association.

    Gauss-Seidel fixed point from zero: each LED is repeatedly raised to the
    worst of its served receivers' communication and illumination branches
    until the sum power settles. Starting at zero makes the iterates
    monotonically increasing toward the least fixed point; unbounded growth
    therefore means no feasible power vector exists (the rate demand is
    interference-limited) and raises an infeasibility error.
    """
    k, u = gains.shape
    comm_scale = np.sqrt((2.0 * math.pi / math.e) * (2.0 ** (2.0 * rate_min) - 1.0))

    served_off = np.zeros(k + 1, dtype=np.int64)
    for i, js in enumerate(assoc.served):
        served_off[i + 1] = served_off[i] + len(js)
    served_idx = np.concatenate([np.asarray(js, dtype=np.int64) for js in assoc.served]) \
        if served_off[-1] else np.zeros(0, dtype=np.int64)
    for i in range(k):
        js = served_idx[served_off[i]:served_off[i + 1]]
        bad = js[(gains[i, js] <= 0.0) & (rate_min[js] > 0.0)]
        if bad.size:
            raise InfeasibleScenarioError(
                f"receiver {bad[0] + 1} is unservable by LED {i + 1}: zero channel gain")

    powers, passes, status, bad_rx = kernel.power_fixed_point(
        np.ascontiguousarray(gains), served_idx, served_off, illum_min, comm_scale,
        params.illum_target, params.noise_std,
        int(params.co_channel_interference), tol, max_passes)
    if status == 0:
        return np.asarray(powers), int(passes)
    if status == 1:
        raise InfeasibleScenarioError(
            "the data rate demand cannot be met at any power level: "
            "co-channel interference grows as fast as the wanted signal")
    if status == 3:
        server = int(assoc.server[int(bad_rx)])
        raise InfeasibleScenarioError(
            f"receiver {int(bad_rx) + 1} is unservable by LED {server + 1}: "
            "zero channel gain")
    raise ConvergenceError(
        f"power fixed point did not settle within {max_passes} passes")


def _axis_grid_index(room, axis: int) -> np.ndarray:
    """Per-LED column (axis 0) or row (axis 1) index along one axis."""
    k = room.led_count
    idx = np.empty(k)
    for i in range(1, k + 1):
        col, row = led_grid_index(i, room.grid_rows, k)
        idx[i - 1] = col if axis == 0 else row
    return idx


def _full_coordinate_range(room, axis: int) -> FeasibleRanges:
    name = "x" if axis == 0 else "y"
    length = room.x_len_m if axis == 0 else room.y_len_m
    count = room.grid_cols if axis == 0 else room.grid_rows
    if count == 1:
        return FeasibleRanges(name, "coordinate", ((length / 2.0, length / 2.0),))
    return FeasibleRanges(name, "coordinate", ((0.0, length / 2.0),))


def initial_coordinate_range(room, axis: int) -> FeasibleRanges:
    """First-iteration range: the first LED stays inside its own sub-area."""
    name = "x" if axis == 0 else "y"
    length = room.x_len_m if axis == 0 else room.y_len_m
    count = room.grid_cols if axis == 0 else room.grid_rows
    if count == 1:
        return FeasibleRanges(name, "coordinate", ((length / 2.0, length / 2.0),))
    return FeasibleRanges(name, "coordinate", ((0.0, length / count),))


def _coordinate_pass(axis: int, scenario: Scenario, layout: LedLayout,
                     assoc: Association, ranges: FeasibleRanges,
                     cfg: SolverConfig) -> tuple[LedLayout, int, bool]:
    """One LXO (axis 0) or LYO (axis 1) run: dual sweeps, then a power lift.

    Sweeps the LEDs in index order; the first LED's coordinate follows the
    clamped weighted centroid and the rest of the grid shifts with the implied
    spacing. The returned powers are the least feasible vector at the final
    positions, so the pass output is always primal-feasible.
    """
    room, params = scenario.room, scenario.params
    rx_xy = scenario.rx_xy
    rate_min, illum_min = scenario.rate_min, scenario.illum_min
    m = params.lambert_m
    xi = params.illum_target
    h2 = params.height_m ** 2
    g = params.refractive_index ** 2 / math.sin(math.radians(params.fov_semi_angle_deg)) ** 2
    denom = xi * (m + 1.0) * params.detector_area_m2 * g * params.height_m ** (m + 1.0)
    v_const = 2.0 * math.pi / denom
    w_const = (2.0 * math.pi) ** 1.5 * math.exp(-0.5) / denom
    comm_factor = np.sqrt(2.0 ** (2.0 * rate_min) - 1.0)

    axis_count = room.grid_cols if axis == 0 else room.grid_rows
    axis_len = room.x_len_m if axis == 0 else room.y_len_m
    grid_idx = _axis_grid_index(room, axis)
    if axis_count > 1 and ranges.empty:
        raise UniformityInfeasibleError(ranges.min_cv)

    k = layout.led_count
    positions = layout.positions.copy()
    powers = layout.powers.copy()
    spacing = [layout.spacing_x_m, layout.spacing_y_m]
    gains = np.ascontiguousarray(gain_matrix(positions, rx_xy, params))

    served_off = np.zeros(k + 1, dtype=np.int64)
    for i, js in enumerate(assoc.served):
        served_off[i + 1] = served_off[i] + len(js)
    served_idx = np.concatenate([np.asarray(js, dtype=np.int64)
                                 for js in assoc.served]) \
        if served_off[-1] else np.zeros(0, dtype=np.int64)
    lambdas = np.full(int(served_off[-1]), cfg.lambda_init)

    pos_axis = np.ascontiguousarray(positions[:, axis])
    cross = positions[:, 1 - axis][:, None] - rx_xy[None, :, 1 - axis]
    cross_sq = np.ascontiguousarray(cross * cross + h2)
    gain_const = (m + 1.0) * params.detector_area_m2 * g \
        * params.height_m ** (m + 1.0) / (2.0 * math.pi)
    gain_expo = -(m + 3.0) / 2.0
    cos_fov = math.cos(math.radians(params.fov_semi_angle_deg))
    d2_max = (params.height_m / cos_fov) ** 2 if cos_fov > 0.0 else math.inf
    intervals = np.asarray(ranges.intervals, dtype=float).reshape(-1, 2) \
        if ranges.intervals else np.zeros((0, 2))

    sweeps, converged = kernel.dual_pass(
        pos_axis, cross_sq, gains, powers, lambdas, served_idx, served_off,
        np.ascontiguousarray(rx_xy[:, axis]), illum_min, comm_factor, grid_idx,
        intervals, axis_len, axis_count, xi, v_const, w_const, params.noise_std,
        m, gain_const, gain_expo, d2_max,
        int(params.co_channel_interference), cfg.gamma,
        int(cfg.diminishing_step), cfg.max_dual_iters, cfg.power_tol)

    positions[:, axis] = pos_axis
    if axis_count > 1:
        spacing[axis] = (axis_len - 2.0 * pos_axis[0]) / (axis_count - 1)

    lifted, _ = min_feasible_powers(positions, gains, assoc, rate_min, illum_min,
                                    params, cfg.fixed_point_tol, cfg.fixed_point_max)
    out = LedLayout(spacing[0], spacing[1], positions, lifted)
    return out, int(sweeps), not converged


def lxo(scenario: Scenario, layout: LedLayout, ranges_x: FeasibleRanges,
        config: SolverConfig | None = None,
        assoc: Association | None = None) -> tuple[LedLayout, int, bool]:
    """Optimize the grid's x-coordinates (and powers) with y fixed."""
    cfg = config or SolverConfig()
    if assoc is None:
        assoc = associate(layout, gain_matrix(layout.positions, scenario.rx_xy,
                                              scenario.params), scenario.params)
    return _coordinate_pass(0, scenario, layout, assoc, ranges_x, cfg)


def lyo(scenario: Scenario, layout: LedLayout, ranges_y: FeasibleRanges,
        config: SolverConfig | None = None,
        assoc: Association | None = None) -> tuple[LedLayout, int, bool]:
    """Mirror of lxo with the roles of the axes swapped."""
    cfg = config or SolverConfig()
    if assoc is None:
        assoc = associate(layout, gain_matrix(layout.positions, scenario.rx_xy,
                                              scenario.params), scenario.params)
    return _coordinate_pass(1, scenario, layout, assoc, ranges_y, cfg)


def _cv_violation(cv: float, u_max: float, cfg: SolverConfig) -> float:
    if math.isinf(u_max) or math.isnan(cv):
        return 0.0
    return max(0.0, cv - u_max)


def _evaluate_spacings(scenario: Scenario, lx: float, ly: float, u_max: float,
                       cfg: SolverConfig):
    """Least-power evaluation of one symmetric spacing pair.

    Returns (cv_violation, sum_power, layout, assoc), or None when some
    receiver is uncovered or the rate demand has no finite power solution.
    """
    params = scenario.params
    layout = symmetric_layout(scenario.room, lx, ly)
    gains = gain_matrix(layout.positions, scenario.rx_xy, params)
    if np.any(gains.max(axis=0) <= 0.0):
        return None
    assoc = associate(layout, gains, params)
    try:
        powers, _ = min_feasible_powers(layout.positions, gains, assoc,
                                        scenario.rate_min, scenario.illum_min,
                                        params, cfg.fixed_point_tol,
                                        cfg.fixed_point_max)
    except (InfeasibleScenarioError, ConvergenceError):
        return None
    layout = layout.with_powers(powers)
    cv = illuminance_field(layout, gains, params).cv_rmse
    return _cv_violation(cv, u_max, cfg), float(powers.sum()), layout, assoc


def _spacing_polish(scenario: Scenario, layout: LedLayout, u_max: float,
                    cfg: SolverConfig):
    """Alternating 1-D spacing refinement around the solver's final layout.

    Coordinate descent over (L_x, L_y): each axis is minimized on a coarse
    grid over its admissible interval, then refined locally on two finer
    grids. Candidates are ranked lexicographically by (CV violation, sum
    power), so the polish first restores the uniformity cap if it is violated
    and only then spends the remaining freedom on power. Deterministic.
    """
    room = scenario.room
    spacings = [layout.spacing_x_m, layout.spacing_y_m]
    cache: dict[tuple[float, float], object] = {}

    def evaluate(lx, ly):
        key = (round(lx, 12), round(ly, 12))
        if key not in cache:
            cache[key] = _evaluate_spacings(scenario, lx, ly, u_max, cfg)
        return cache[key]

    current = evaluate(spacings[0], spacings[1])
    best_key = (math.inf, math.inf) if current is None else current[:2]
    best = current
    rounds = 0

    for _ in range(cfg.polish_rounds):
        rounds += 1
        improved = False
        for axis in (0, 1):
            limit = spacing_limit(room, "x" if axis == 0 else "y")
            if limit <= 0.0:
                continue
            span = limit
            center = spacings[axis]
            for level in range(3):
                n = cfg.scan_points if level == 0 else 33
                lo = 0.0 if level == 0 else max(0.0, center - span)
                hi = limit if level == 0 else min(limit, center + span)
                if hi <= lo:
                    break
                for t in range(n):
                    cand = lo + (hi - lo) * t / (n - 1)
                    pair = (cand, spacings[1]) if axis == 0 else (spacings[0], cand)
                    res = evaluate(pair[0], pair[1])
                    if res is None:
                        continue
                    key = res[:2]
                    if key[0] < best_key[0] - 1e-12 or (
                            key[0] <= best_key[0] + 1e-12 and key[1] < best_key[1] * (1.0 - 1e-10)):
                        best_key, best = key, res
                        center = cand
                        spacings[axis] = cand
                        improved = True
                span = (hi - lo) / (n - 1)
        if not improved:
            break
    return best, rounds


def _optimize(scenario: Scenario, cfg: SolverConfig, u_max: float):
    """Alternate coordinate passes with CV-range recomputation (the LXYU loop).

    A candidate layout replaces the current one only when it is lexicographically
    better in (CV violation, sum power); this keeps the accepted sum-power
    trajectory non-increasing once the uniformity cap is met, and makes the
    unconstrained run a pure descent from the centered starting layout.
    """
    room, params = scenario.room, scenario.params
    rx_xy = scenario.rx_xy

    layout = symmetric_layout(room, room.x_len_m / room.grid_cols,
                              room.y_len_m / room.grid_rows)
    gains = gain_matrix(layout.positions, rx_xy, params)
    assoc = associate(layout, gains, params)
    powers, _ = min_feasible_powers(layout.positions, gains, assoc, scenario.rate_min,
                                    scenario.illum_min, params,
                                    cfg.fixed_point_tol, cfg.fixed_point_max)
    layout = layout.with_powers(powers)

    def metrics(lay):
        g = gain_matrix(lay.positions, rx_xy, params)
        fld = illuminance_field(lay, g, params)
        return float(lay.powers.sum()), fld.cv_rmse

    sum_p, cv = metrics(layout)
    viol = _cv_violation(cv, u_max, cfg)
    best_cv_seen = cv

    ranges = {0: initial_coordinate_range(room, 0), 1: initial_coordinate_range(room, 1)}
    iterations = {"outer": 0, "dual_sweeps": 0, "cv_loops": 0}
    warnings: list[str] = []
    outer_converged = False

    for outer in range(1, cfg.max_outer + 1):
        iterations["outer"] = outer
        sum_at_start = sum_p
        gains = gain_matrix(layout.positions, rx_xy, params)
        assoc = associate(layout, gains, params)
        improved = False

        for axis in (0, 1):
            axis_count = room.grid_cols if axis == 0 else room.grid_rows
            loop_max = cfg.max_cv_loops_x if axis == 0 else cfg.max_cv_loops_y
            axis_name = "x" if axis == 0 else "y"
            for loop in range(1, loop_max + 1):
                iterations["cv_loops"] += 1
                candidate, sweeps, dual_warn = _coordinate_pass(
                    axis, scenario, layout, assoc, ranges[axis], cfg)
                iterations["dual_sweeps"] += sweeps
                cand_sum, cand_cv = metrics(candidate)
                cand_viol = _cv_violation(cand_cv, u_max, cfg)
                if not math.isnan(cand_cv):
                    best_cv_seen = min(best_cv_seen, cand_cv) if not math.isnan(best_cv_seen) else cand_cv

                accepted = (cand_viol < viol - 1e-12) or (
                    cand_viol <= viol + 1e-12 and cand_sum <= sum_p + 1e-12)
                if accepted:
                    changed = abs(cand_sum - sum_p) > cfg.power_tol * max(sum_p, 1e-30) \
                        or abs(cand_viol - viol) > 1e-12
                    layout, sum_p, cv, viol = candidate, cand_sum, cand_cv, cand_viol
                    improved = improved or changed
                if dual_warn:
                    warnings.append(
                        f"dual sweep budget reached in the {axis_name} pass of outer "
                        f"iteration {outer}")

                if math.isinf(u_max):
                    ranges[axis] = _full_coordinate_range(room, axis)
                    break

                other_spacing = layout.spacing_y_m if axis == 0 else layout.spacing_x_m
                fr = feasible_spacing_range(axis_name, other_spacing, layout.powers,
                                            room, rx_xy, params, u_max,
                                            cfg.scan_points, cfg.bisection_tol)
                if not math.isnan(fr.min_cv):
                    best_cv_seen = min(best_cv_seen, fr.min_cv) if not math.isnan(best_cv_seen) else fr.min_cv
                if fr.empty:
                    # no spacing meets the cap at these powers: steer toward the
                    # tightest-CV spacing and let the other axis make up the rest
                    fr = FeasibleRanges(axis_name, "spacing",
                                        ((fr.argmin_spacing, fr.argmin_spacing),),
                                        min_cv=fr.min_cv, argmin_spacing=fr.argmin_spacing)
                ranges[axis] = spacing_to_coordinate_ranges(fr, room)

                if viol <= cfg.cv_tol:
                    break
                if not accepted and loop > 1:
                    break

        if viol <= cfg.cv_tol and abs(sum_p - sum_at_start) <= cfg.power_tol * max(sum_at_start, 1e-30):
            outer_converged = True
            break
        if not improved:
            outer_converged = viol <= cfg.cv_tol
            break
    if not outer_converged and viol <= cfg.cv_tol:
        warnings.append("outer loop reached its iteration budget before the sum "
                        "power settled")

    polished, polish_rounds = _spacing_polish(scenario, layout, u_max, cfg)
    iterations["polish_rounds"] = polish_rounds
    if polished is not None:
        p_viol, p_sum, p_layout, p_assoc = polished
        if p_viol < viol - 1e-12 or (p_viol <= viol + 1e-12 and p_sum <= sum_p + 1e-12):
            layout, sum_p, viol, assoc = p_layout, p_sum, p_viol, p_assoc
            _, cv = metrics(layout)
            if not math.isnan(cv):
                best_cv_seen = cv if math.isnan(best_cv_seen) else min(best_cv_seen, cv)

    if not math.isinf(u_max) and not math.isnan(cv) and cv > u_max + cfg.cv_tol:
        raise UniformityInfeasibleError(best_cv_seen)

    gains = gain_matrix(layout.positions, rx_xy, params)
    return layout, assoc, {
        "iterations": dict(iterations),
        "warnings": warnings,
        "converged": outer_converged,
        "ranges": {name: r for name, r in (("x", ranges[0]), ("y", ranges[1]))},
    }


def lxyu(scenario: Scenario, config: SolverConfig | None = None):
    """Complete placement optimization under the scenario's uniformity cap."""
    from .report import build_solution

    cfg = config or SolverConfig()
    layout, assoc, info = _optimize(scenario, cfg, scenario.uniformity_max)
    return build_solution(scenario, layout, assoc, "lxyu", info)

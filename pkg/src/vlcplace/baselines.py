"""Reference schemes: centered LEDs (LCA), the uniformity-free optimizer
(LXYO), and an exhaustive symmetric-grid search used as a verification oracle.

All three report minimal feasible powers computed by the same fixed-point
routine the solver uses, so sum-power comparisons across schemes are
apples-to-apples.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, InfeasibleScenarioError
from .photometrics import gain_matrix, illuminance_field
from .report import PlacementSolution, build_solution
from .scene import Scenario, symmetric_layout
from .solver import SolverConfig, _optimize, associate, min_feasible_powers
from .uniformity import spacing_limit


def lca(scenario: Scenario, config: SolverConfig | None = None) -> PlacementSolution:
    """LED-centered baseline: each LED at the center of its sub-area."""
    cfg = config or SolverConfig()
    room = scenario.room
    layout = symmetric_layout(room, room.x_len_m / room.grid_cols,
                              room.y_len_m / room.grid_rows)
    gains = gain_matrix(layout.positions, scenario.rx_xy, scenario.params)
    assoc = associate(layout, gains, scenario.params)
    powers, passes = min_feasible_powers(layout.positions, gains, assoc,
                                         scenario.rate_min, scenario.illum_min,
                                         scenario.params, cfg.fixed_point_tol,
                                         cfg.fixed_point_max)
    layout = layout.with_powers(powers)
    return build_solution(scenario, layout, assoc, "lca",
                          {"iterations": {"fixed_point_passes": passes}})


def lxyo(scenario: Scenario, config: SolverConfig | None = None) -> PlacementSolution:
    """Placement optimized by LXO/LYO only: the uniformity cap never binds."""
    cfg = config or SolverConfig()
    unconstrained = scenario.with_constraints(uniformity_max=math.inf)
    layout, assoc, info = _optimize(unconstrained, cfg, math.inf)
    # report against the original scenario so the achieved CV is still checked
    return build_solution(unconstrained, layout, assoc, "lxyo", info)


def oracle_grid_search(scenario: Scenario, step: float,
                       config: SolverConfig | None = None) -> PlacementSolution:
    """Brute force over the symmetric (L_x, L_y) parameterization.

    Every candidate gets minimal feasible powers from the shared fixed point;
    candidates whose CV(RMSE) exceeds the cap are discarded. Ties on sum power
    break toward the lexicographically smallest (L_x, L_y).
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    cfg = config or SolverConfig()
    room, params = scenario.room, scenario.params
    rx_xy = scenario.rx_xy
    u_max = scenario.uniformity_max

    def candidates(axis):
        limit = spacing_limit(room, axis)
        if limit == 0.0:
            return [0.0]
        n = int(math.floor(limit / step + 1e-9))
        vals = [i * step for i in range(n + 1)]
        if vals[-1] < limit - 1e-12:
            vals.append(limit)
        return vals

    best = None  # (sum_power, lx, ly, layout, assoc)
    for lx in candidates("x"):
        for ly in candidates("y"):
            layout = symmetric_layout(room, lx, ly)
            gains = gain_matrix(layout.positions, rx_xy, params)
            if np.any(gains.max(axis=0) <= 0.0):
                continue
            assoc = associate(layout, gains, params)
            try:
                powers, _ = min_feasible_powers(layout.positions, gains, assoc,
                                                scenario.rate_min, scenario.illum_min,
                                                params, cfg.fixed_point_tol,
                                                cfg.fixed_point_max)
            except (InfeasibleScenarioError, ConvergenceError):
                continue
            layout = layout.with_powers(powers)
            if not math.isinf(u_max):
                cv = illuminance_field(layout, gains, params).cv_rmse
                if not math.isnan(cv) and cv > u_max:
                    continue
            total = float(powers.sum())
            if best is None or total < best[0] - 1e-15:
                best = (total, lx, ly, layout, assoc)
    if best is None:
        raise InfeasibleScenarioError(
            "exhaustive search found no symmetric layout meeting every constraint")
    _, lx, ly, layout, assoc = best
    return build_solution(scenario, layout, assoc, "oracle",
                          {"iterations": {"step": step}})

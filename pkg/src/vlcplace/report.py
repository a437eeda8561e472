"""Solution reports: a stable, versioned schema shared by every algorithm.

All floats are rounded to 9 significant digits at serialization time so that
identical runs produce byte-identical reports and regression diffs stay
meaningful.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .photometrics import capacity, gain_matrix, illuminance_field
from .scene import LedLayout, Scenario

SCHEMA = "vlcplace-report/1"


def round9(value: float) -> float:
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.9g}")
    return value


def _round_tree(obj):
    if isinstance(obj, float):
        return round9(obj)
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    return obj


@dataclass(frozen=True)
class ReceiverReport:
    x_m: float
    y_m: float
    led: int            # 1-based serving LED
    capacity: float
    illuminance: float
    rate_min: float
    illum_min: float


@dataclass(frozen=True)
class PlacementSolution:
    """Final layout, powers and per-receiver metrics of one solve."""

    algorithm: str
    feasible: bool
    converged: bool
    warnings: tuple[str, ...]
    sum_power: float
    cv_rmse: float
    uniformity_max: float
    layout: LedLayout
    receivers: tuple[ReceiverReport, ...]
    iterations: dict
    feasible_ranges: dict | None = None

    def to_dict(self) -> dict:
        data = {
            "schema": SCHEMA,
            "algorithm": self.algorithm,
            "feasible": self.feasible,
            "converged": self.converged,
            "warnings": list(self.warnings),
            "sum_power": self.sum_power,
            "cv_rmse": None if math.isnan(self.cv_rmse) else self.cv_rmse,
            "cv_defined": not math.isnan(self.cv_rmse),
            "uniformity_max": None if math.isinf(self.uniformity_max) else self.uniformity_max,
            "layout": {
                "spacing_x_m": self.layout.spacing_x_m,
                "spacing_y_m": self.layout.spacing_y_m,
                "positions": [list(p) for p in self.layout.positions.tolist()],
                "powers": self.layout.powers.tolist(),
            },
            "receivers": [
                {
                    "x_m": r.x_m, "y_m": r.y_m, "led": r.led,
                    "capacity": r.capacity, "illuminance": r.illuminance,
                    "rate_min": r.rate_min, "illum_min": r.illum_min,
                }
                for r in self.receivers
            ],
            "iterations": dict(self.iterations),
            "feasible_ranges": self.feasible_ranges,
        }
        return _round_tree(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def build_solution(scenario: Scenario, layout: LedLayout, assoc, algorithm: str,
                   info: dict | None = None, feasibility_slack: float = 1e-6,
                   cv_slack: float = 1e-3) -> PlacementSolution:
    """Assemble the report and verify the constraints at the final iterate."""
    info = info or {}
    params = scenario.params
    gains = gain_matrix(layout.positions, scenario.rx_xy, params)
    field = illuminance_field(layout, gains, params)

    receivers = []
    feasible = True
    for j, rx in enumerate(scenario.receivers):
        i = int(assoc.server[j])
        cap = capacity(i, j, layout.powers, gains, params)
        eta = float(field.eta[j])
        if cap < rx.rate_min - feasibility_slack or eta < rx.illum_min - feasibility_slack:
            feasible = False
        receivers.append(ReceiverReport(rx.x_m, rx.y_m, i + 1, cap, eta,
                                        rx.rate_min, rx.illum_min))

    if not math.isinf(scenario.uniformity_max) and field.defined \
            and field.cv_rmse > scenario.uniformity_max + cv_slack:
        feasible = False

    ranges = info.get("ranges")
    ranges_dict = None
    if ranges:
        ranges_dict = {
            name: {"kind": r.kind, "intervals": [list(iv) for iv in r.intervals]}
            for name, r in ranges.items()
        }

    return PlacementSolution(
        algorithm=algorithm,
        feasible=feasible,
        converged=bool(info.get("converged", True)),
        warnings=tuple(info.get("warnings", ())),
        sum_power=float(layout.powers.sum()),
        cv_rmse=field.cv_rmse,
        uniformity_max=scenario.uniformity_max,
        layout=layout,
        receivers=tuple(receivers),
        iterations=dict(info.get("iterations", {})),
        feasible_ranges=ranges_dict,
    )

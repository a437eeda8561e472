"""Scenario config files: INI-style sections [room], [grid], [physical],
[receivers], [constraints], [solver]. Lengths in meters, angles in degrees.

The noise level is either ``noise_std`` directly or, as a convenience,
``snr_db``: the standard deviation is then derived so a nadir single-LED link
transmitting at the illumination-only power sees that electrical SNR, i.e.
sigma = illum_min * 10^(-snr_db / 20). That mapping is an interpretation, not
a measured constant.
"""

from __future__ import annotations

import configparser
import dataclasses
import math

from .errors import ScenarioError
from .scene import PhysicalParams, RoomConfig, Scenario, uniform_receiver_grid
from .solver import SolverConfig

_SOLVER_FIELDS = {f.name: f.type for f in dataclasses.fields(SolverConfig)}


def _get(parser, section, option, convert, default=None):
    if not parser.has_option(section, option):
        if default is not None:
            return default
        raise ScenarioError(f"missing required field [{section}] {option}")
    raw = parser.get(section, option)
    try:
        return convert(raw)
    except ValueError as exc:
        raise ScenarioError(f"invalid value for [{section}] {option}: {raw!r}") from exc


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def load_scenario(path: str) -> tuple[Scenario, SolverConfig]:
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ScenarioError(f"malformed config file {path}: {exc}") from exc

    for section in ("room", "grid", "physical", "receivers", "constraints"):
        if not parser.has_section(section):
            raise ScenarioError(f"missing required section [{section}]")

    try:
        room = RoomConfig(
            x_len_m=_get(parser, "room", "x_len_m", float),
            y_len_m=_get(parser, "room", "y_len_m", float),
            grid_cols=_get(parser, "grid", "grid_cols", int),
            grid_rows=_get(parser, "grid", "grid_rows", int),
        )
    except ValueError as exc:
        raise ScenarioError(f"invalid room/grid configuration: {exc}") from exc

    rate_min = _get(parser, "constraints", "rate_min", float, default=0.0)
    illum_min = _get(parser, "constraints", "illum_min", float, default=0.0)
    uniformity_max = _get(parser, "constraints", "uniformity_max", float,
                          default=math.inf)
    if rate_min < 0.0 or illum_min < 0.0:
        raise ScenarioError("[constraints] rate_min and illum_min must be non-negative")
    if uniformity_max < 0.0:
        raise ScenarioError("[constraints] uniformity_max must be non-negative")

    if parser.has_option("physical", "noise_std"):
        noise_std = _get(parser, "physical", "noise_std", float)
    elif parser.has_option("physical", "snr_db"):
        snr_db = _get(parser, "physical", "snr_db", float)
        if illum_min <= 0.0:
            raise ScenarioError(
                "[physical] snr_db needs a positive [constraints] illum_min to anchor the noise level")
        noise_std = illum_min * 10.0 ** (-snr_db / 20.0)
    else:
        raise ScenarioError("missing required field [physical] noise_std (or snr_db)")

    try:
        params = PhysicalParams(
            detector_area_m2=_get(parser, "physical", "detector_area_m2", float),
            semi_angle_deg=_get(parser, "physical", "semi_angle_deg", float),
            fov_semi_angle_deg=_get(parser, "physical", "fov_semi_angle_deg", float),
            refractive_index=_get(parser, "physical", "refractive_index", float),
            noise_std=noise_std,
            illum_target=_get(parser, "physical", "illum_target", float, default=1.0),
            height_m=_get(parser, "physical", "height_m", float, default=2.15),
            co_channel_interference=_get(parser, "physical", "co_channel_interference",
                                         _bool, default=True),
        )
    except ValueError as exc:
        raise ScenarioError(f"invalid [physical] configuration: {exc}") from exc

    count_x = _get(parser, "receivers", "count_x", int)
    count_y = _get(parser, "receivers", "count_y", int)
    if count_x < 1 or count_y < 1:
        raise ScenarioError("[receivers] count_x and count_y must be at least 1")
    receivers = uniform_receiver_grid(room, count_x, count_y, rate_min, illum_min)

    solver_kwargs = {}
    if parser.has_section("solver"):
        for option in parser.options("solver"):
            if option not in _SOLVER_FIELDS:
                raise ScenarioError(f"unknown field [solver] {option}")
            kind = _SOLVER_FIELDS[option]
            convert = _bool if kind in (bool, "bool") else (
                int if kind in (int, "int") else float)
            solver_kwargs[option] = _get(parser, "solver", option, convert)
    try:
        solver_cfg = SolverConfig(**solver_kwargs)
    except ValueError as exc:
        raise ScenarioError(f"invalid [solver] configuration: {exc}") from exc

    try:
        scenario = Scenario(room, params, tuple(receivers), uniformity_max)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    return scenario, solver_cfg

"""Shared fixtures: reference scenarios and cached solver runs.

Solves are deterministic, so session-scoped fixtures let the ordering,
monotonicity and savings checks share one set of sweep computations.
"""

import pathlib

import pytest

from vlcplace.config import load_scenario

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def four_led():
    return load_scenario(str(CONFIG_DIR / "room_4led.ini"))


@pytest.fixture(scope="session")
def four_led_highrate():
    return load_scenario(str(CONFIG_DIR / "room_4led_highrate.ini"))


@pytest.fixture(scope="session")
def six_led():
    return load_scenario(str(CONFIG_DIR / "room_6led.ini"))


@pytest.fixture(scope="session")
def six_led_low():
    return load_scenario(str(CONFIG_DIR / "room_6led_low.ini"))


def _solve_all(scenario, cfg):
    from vlcplace.baselines import lca, lxyo
    from vlcplace.solver import lxyu

    return {"lca": lca(scenario, cfg), "lxyo": lxyo(scenario, cfg),
            "lxyu": lxyu(scenario, cfg)}


@pytest.fixture(scope="session")
def rate_sweep(four_led):
    """4-LED sweep over the data-rate demand at fixed (illum, uniformity)."""
    scenario, cfg = four_led
    values = [0.5, 0.75, 1.0, 1.25, 1.5]
    return values, [_solve_all(scenario.with_constraints(rate_min=c), cfg)
                    for c in values]


@pytest.fixture(scope="session")
def illum_sweep(six_led):
    """6-LED sweep over the illumination level at a relaxed uniformity cap."""
    scenario, cfg = six_led
    scenario = scenario.with_constraints(uniformity_max=0.16)
    values = [0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55]
    return values, [_solve_all(scenario.with_constraints(illum_min=e), cfg)
                    for e in values]


@pytest.fixture(scope="session")
def uniformity_sweep(four_led):
    """4-LED sweep over the uniformity cap at fixed (rate, illum)."""
    scenario, cfg = four_led
    values = [0.12, 0.16, 0.2, 0.25, 0.3]
    return values, [_solve_all(scenario.with_constraints(uniformity_max=u), cfg)
                    for u in values]

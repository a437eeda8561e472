"""Compiled extension vs numpy fallback: both implementations of every hot
kernel must agree to rounding error on identical inputs."""

import numpy as np
import pytest

from vlcplace import _kernel_py, kernel

_kernel_c = pytest.importorskip(
    "vlcplace._kernel_c", reason="compiled extension not built")


def test_a_kernel_implementation_is_selected():
    assert kernel.IMPLEMENTATION in ("c", "python")
    assert kernel.cv_for_spacings is not None


def _cv_inputs(seed, n_led=4, n_rx=30, n_cand=16):
    rng = np.random.default_rng(seed)
    return dict(
        candidates=np.linspace(0.0, 7.0, n_cand),
        coef=rng.uniform(-1.0, 1.0, n_led),
        offsets=rng.uniform(-4.0, 4.0, n_rx),
        base_sq=rng.uniform(4.0, 20.0, (n_led, n_rx)),
        powers=rng.uniform(0.5, 40.0, n_led),
        neg_half_exp=-2.0,
        d2_max=18.0,
    )


@pytest.mark.parametrize("seed", range(5))
def test_cv_scan_implementations_agree(seed):
    args = _cv_inputs(seed)
    a = _kernel_py.cv_for_spacings(**args)
    b = _kernel_c.cv_for_spacings(**args)
    np.testing.assert_allclose(a, b, rtol=1e-13, equal_nan=True)


def test_cv_scan_without_fov_cutoff():
    args = _cv_inputs(99)
    args["d2_max"] = np.inf
    np.testing.assert_allclose(_kernel_py.cv_for_spacings(**args),
                               _kernel_c.cv_for_spacings(**args), rtol=1e-13)


def _dual_inputs(seed, max_iters, k=4, u=40):
    rng = np.random.default_rng(seed)
    pos = np.linspace(1.0, 6.0, k)
    rx = np.sort(rng.uniform(0.0, 7.5, u))
    cross = rng.uniform(0.5, 3.0, (k, u)) ** 2 + 9.0
    d2 = (pos[:, None] - rx[None, :]) ** 2 + cross
    gains = 3e-4 * d2 ** -2.0
    served = np.argmax(gains, axis=0)
    idx = np.concatenate([np.nonzero(served == i)[0] for i in range(k)]).astype(np.int64)
    off = np.zeros(k + 1, dtype=np.int64)
    for i in range(k):
        off[i + 1] = off[i] + int((served == i).sum())
    return dict(
        pos_axis=pos.copy(), cross_sq=cross, gains=gains.copy(),
        powers=np.full(k, 5.0), lambdas=np.ones(u), served_idx=idx,
        served_off=off, rx_axis=rx, illum_min=np.full(u, 0.4),
        comm_factor=np.full(u, 1.2), grid_idx=np.arange(k, dtype=float),
        intervals=np.array([[0.5, 1.5], [2.0, 2.5]]), axis_len=7.5,
        axis_count=k, xi=0.5, v_const=2.0, w_const=1.3, noise_std=0.04,
        m=1.0, gain_const=3e-4, gain_expo=-2.0, d2_max=45.0,
        interference=int(seed % 2), gamma=0.01, diminishing=1,
        max_iters=max_iters, power_tol=1e-6,
    )


def _copy(args):
    return {key: (val.copy() if isinstance(val, np.ndarray) else val)
            for key, val in args.items()}


@pytest.mark.parametrize("seed,iters,rtol", [
    (0, 1, 1e-14), (1, 1, 1e-14), (0, 10, 1e-12), (1, 10, 1e-12),
    (2, 400, 1e-8), (3, 400, 1e-8),
])
def test_dual_sweep_implementations_agree(seed, iters, rtol):
    a = _dual_inputs(seed, iters)
    b = _copy(a)
    ra = _kernel_py.dual_pass(**a)
    rb = _kernel_c.dual_pass(**b)
    assert ra == rb
    for name in ("pos_axis", "gains", "powers", "lambdas"):
        np.testing.assert_allclose(a[name], b[name], rtol=rtol, atol=1e-300)


def _fixed_point_inputs(seed, k=4, u=36, interference=0):
    rng = np.random.default_rng(seed)
    gains = rng.uniform(1e-6, 5e-5, (k, u))
    served = np.argmax(gains, axis=0)
    idx = np.concatenate([np.nonzero(served == i)[0] for i in range(k)]).astype(np.int64)
    off = np.zeros(k + 1, dtype=np.int64)
    for i in range(k):
        off[i + 1] = off[i] + int((served == i).sum())
    rate = rng.uniform(0.0, 0.08 if interference else 0.8, u)
    comm_scale = np.sqrt((2.0 * np.pi / np.e) * (2.0 ** (2.0 * rate) - 1.0))
    return dict(gains=gains, served_idx=idx, served_off=off,
                illum_min=rng.uniform(0.1, 0.5, u), comm_scale=comm_scale,
                xi=1.0, noise_std=0.04, interference=interference,
                tol=1e-8, max_passes=1000)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("interference", [0, 1])
def test_power_fixed_point_implementations_agree(seed, interference):
    args = _fixed_point_inputs(seed, interference=interference)
    pa, na, sa, ba = _kernel_py.power_fixed_point(**_copy(args))
    pc, nc, sc, bc = _kernel_c.power_fixed_point(**_copy(args))
    assert (na, sa, ba) == (nc, sc, bc)
    np.testing.assert_allclose(pa, pc, rtol=1e-12)


def test_power_fixed_point_divergence_status_matches():
    # two LEDs with strong mutual coupling and a rate demand above the
    # interference ceiling: both implementations must flag divergence
    gains = np.array([[1e-5, 0.95e-5], [0.95e-5, 1e-5]])
    idx = np.array([0, 1], dtype=np.int64)
    off = np.array([0, 1, 2], dtype=np.int64)
    comm_scale = np.sqrt((2.0 * np.pi / np.e) * (2.0 ** (2.0 * 1.0) - 1.0))
    args = dict(gains=gains, served_idx=idx, served_off=off,
                illum_min=np.zeros(2), comm_scale=np.full(2, comm_scale),
                xi=1.0, noise_std=0.04, interference=1, tol=1e-8,
                max_passes=5000)
    _, _, status_py, _ = _kernel_py.power_fixed_point(**_copy(args))
    _, _, status_c, _ = _kernel_c.power_fixed_point(**_copy(args))
    assert status_py == status_c == 1


def test_pure_python_env_flag_selects_fallback():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c",
         "from vlcplace import kernel; print(kernel.IMPLEMENTATION)"],
        capture_output=True, text=True,
        env={"PATH": "/usr/bin:/bin", "VLCPLACE_PURE_PYTHON": "1"})
    assert out.stdout.strip() == "python"

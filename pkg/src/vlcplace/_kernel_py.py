"""Pure-numpy implementations of the hot kernels: the CV(RMSE) spacing scan,
the dual-subgradient sweep loop of a coordinate pass, and the minimal-power
fixed point.

These are the fallbacks used when the compiled extension is unavailable; both
implementations share the same signatures and must agree to rounding error.
"""

from __future__ import annotations

import math

import numpy as np


def cv_for_spacings(candidates, coef, offsets, base_sq, powers, neg_half_exp, d2_max):
    """CV(RMSE) of the illuminance field for a batch of candidate spacings.

    The moving axis contributes (coef_i * L + offset_j)^2 to the squared link
    distance; ``base_sq`` holds the fixed-axis term plus H^2. Receiver weights
    are P_i * (d^2)^neg_half_exp with neg_half_exp = -(m+3)/2, zeroed beyond
    the FOV cutoff d^2 > d2_max. Constant channel prefactors cancel out of the
    CV ratio and are omitted.

    Parameters
    ----------
    candidates : (S,) candidate spacings along the moving axis
    coef : (K,) per-LED spacing coefficients for the moving axis
    offsets : (U,) per-receiver offsets for the moving axis
    base_sq : (K, U) fixed-axis squared offsets plus H^2
    powers : (K,) LED optical powers
    neg_half_exp : float, -(m+3)/2
    d2_max : float, FOV cutoff on the squared distance (inf disables it)

    Returns
    -------
    (S,) array of CV(RMSE) values; NaN where the mean illuminance is zero.
    """
    cand = np.asarray(candidates, dtype=float)
    u = cand[:, None, None] * coef[None, :, None] + offsets[None, None, :]
    d2 = u * u + base_sq[None, :, :]
    w = powers[None, :, None] * d2 ** neg_half_exp
    if np.isfinite(d2_max):
        w[d2 > d2_max] = 0.0
    eta = w.sum(axis=1)
    avg = eta.mean(axis=1)
    rmse = np.sqrt(np.mean((eta - avg[:, None]) ** 2, axis=1))
    with np.errstate(invalid="ignore", divide="ignore"):
        cv = np.where(avg > 0.0, rmse / avg, np.nan)
    return cv


def power_fixed_point(gains, served_idx, served_off, illum_min, comm_scale,
                      xi, noise_std, interference, tol, max_passes):
    """Least feasible power vector at fixed positions and association.

    Gauss-Seidel from zero: LED i is raised to the worst of its served
    receivers' illumination and communication requirements, seeing the most
    recent powers of the other LEDs. ``comm_scale`` is the per-receiver factor
    sqrt((2 pi / e) (2^(2 c_th) - 1)).

    Returns (powers, passes, status, bad_rx): status 0 converged, 1 diverged
    (no finite fixed point), 2 pass budget exhausted, 3 receiver ``bad_rx``
    needs light its serving LED cannot deliver (zero channel gain).
    """
    k, _ = gains.shape
    powers = np.zeros(k)
    noise_sq = noise_std * noise_std
    served = [served_idx[int(served_off[i]):int(served_off[i + 1])] for i in range(k)]
    cols = [gains[:, js] for js in served]
    own = [c[i] for i, c in enumerate(cols)]
    cols_sq = [c * c for c in cols] if interference else None
    illum_js = [illum_min[js] for js in served]
    scale_js = [comm_scale[js] for js in served]
    if not interference:
        base_comm = [
            np.where(scale_js[i] > 0.0,
                     noise_std * scale_js[i] / (xi * np.maximum(own[i], 1e-300)), 0.0)
            for i in range(k)
        ]

    prev = 0.0
    first_total = None
    for p in range(1, int(max_passes) + 1):
        for i in range(k):
            if served[i].size == 0:
                powers[i] = 0.0
                continue
            h = own[i]
            others_illum = xi * (powers @ cols[i] - powers[i] * h)
            need = illum_js[i] - others_illum
            np.maximum(need, 0.0, out=need)
            dead = (need > 0.0) & (h <= 0.0)
            if np.any(dead):
                bad = served[i][int(np.nonzero(dead)[0][0])]
                return powers, p, 3, int(bad)
            with np.errstate(divide="ignore", invalid="ignore"):
                p_ill = np.where(need > 0.0, need / (xi * h), 0.0)
            if interference:
                p2 = powers * powers
                others_sq = xi * xi * (p2 @ cols_sq[i] - p2[i] * h * h)
                with np.errstate(divide="ignore", invalid="ignore"):
                    p_comm = np.where(scale_js[i] > 0.0,
                                      np.sqrt(noise_sq + others_sq) * scale_js[i] / (xi * h),
                                      0.0)
                req = np.maximum(p_ill, p_comm)
            else:
                req = np.maximum(p_ill, base_comm[i])
            powers[i] = float(req.max())
        total = float(powers.sum())
        if first_total is None:
            first_total = total
        if not math.isfinite(total) or total > 1e9 * max(first_total, 1e-300):
            return powers, p, 1, -1
        if abs(total - prev) <= max(tol, 1e-12 * total):
            return powers, p, 0, -1
        prev = total
    return powers, int(max_passes), 2, -1


def dual_pass(pos_axis, cross_sq, gains, powers, lambdas, served_idx, served_off,
              rx_axis, illum_min, comm_factor, grid_idx, intervals,
              axis_len, axis_count, xi, v_const, w_const, noise_std, m,
              gain_const, gain_expo, d2_max, interference, gamma, diminishing,
              max_iters, power_tol):
    """Dual-subgradient sweep loop of one coordinate pass (x or y).

    Sweeps the LEDs in index order, Gauss-Seidel style. LED 1 additionally
    follows the multiplier-weighted receiver centroid along the moving axis,
    clamped into ``intervals``; the rest of the grid shifts with the implied
    spacing, and moves that push a served receiver out of its server's field
    of view are rejected. ``pos_axis``, ``gains``, ``powers`` and ``lambdas``
    are updated in place.

    Parameters
    ----------
    pos_axis : (K,) LED coordinates along the moving axis
    cross_sq : (K, U) fixed-axis squared offsets plus H^2
    gains : (K, U) channel gains, consistent with pos_axis on entry
    powers : (K,) LED powers
    lambdas : flat multiplier vector aligned with served_idx
    served_idx : receiver indices, grouped by serving LED
    served_off : (K+1,) group offsets into served_idx
    rx_axis : (U,) receiver coordinates along the moving axis
    illum_min, comm_factor : (U,) per-receiver constraint factors, the latter
        sqrt(2^(2 c_th) - 1)
    grid_idx : (K,) per-LED grid index along the moving axis
    intervals : (R, 2) closed clamp intervals for the first LED's coordinate
    interference : nonzero to include co-channel interference in the rate term
    diminishing : nonzero for the gamma / sqrt(sweep) step schedule

    Returns
    -------
    (sweeps_run, converged)
    """
    k, u = gains.shape
    exp2 = 2.0 / (m + 3.0)
    kkt_exp = (m + 3.0) / (m + 1.0)
    noise_sq = noise_std * noise_std
    endpoints = np.unique(intervals.reshape(-1))

    prev_sum = None
    window: list[tuple[float, float]] = []
    converged = False
    sweeps = 0
    for sweep in range(1, int(max_iters) + 1):
        sweeps = sweep
        gamma_l = gamma / math.sqrt(sweep) if diminishing else gamma
        for i in range(k):
            lo, hi = int(served_off[i]), int(served_off[i + 1])
            if lo == hi:
                powers[i] = 0.0
                continue
            js = served_idx[lo:hi]
            col = gains[:, js]
            rx = xi * powers[:, None] * col
            own = xi * powers[i] * col[i]
            others_illum = rx.sum(axis=0) - own
            if interference:
                others_sq = (rx * rx).sum(axis=0) - own * own
            else:
                others_sq = 0.0
            branch = np.maximum(
                np.maximum(illum_min[js] - others_illum, 0.0) * v_const,
                comm_factor[js] * w_const * np.sqrt(noise_sq + others_sq),
            )
            m_vec = branch ** exp2

            lam = lambdas[lo:hi]
            powers[i] = (exp2 * float(lam.sum())) ** kkt_exp

            if i == 0 and axis_count > 1:
                weights = lam * m_vec
                w_total = float(weights.sum())
                if w_total > 0.0:
                    coords = rx_axis[js]
                    x_hat = float(np.dot(weights, coords) / w_total)
                    if not any(a <= x_hat <= b for a, b in intervals):
                        best_val = math.inf
                        for x_e in endpoints:
                            val = float(np.dot(weights, (x_e - coords) ** 2))
                            if val < best_val:
                                best_val, x_hat = val, float(x_e)
                    new_spacing = (axis_len - 2.0 * x_hat) / (axis_count - 1)
                    cand_axis = grid_idx * new_spacing + x_hat
                    cand_d2 = (cand_axis[:, None] - rx_axis[None, :]) ** 2 + cross_sq
                    covered = True
                    for n in range(k):
                        n_js = served_idx[served_off[n]:served_off[n + 1]]
                        if n_js.size and np.any(cand_d2[n, n_js] > d2_max):
                            covered = False
                            break
                    if covered:
                        pos_axis[:] = cand_axis
                        new_gains = gain_const * cand_d2 ** gain_expo
                        new_gains[cand_d2 > d2_max] = 0.0
                        gains[:, :] = new_gains

            diff = pos_axis[i] - rx_axis[js]
            d2 = diff * diff + cross_sq[i, js]
            residual = m_vec * d2 - powers[i] ** exp2
            lambdas[lo:hi] = np.maximum(0.0, lam + gamma_l * residual)

        total = float(powers.sum())
        if prev_sum is not None and abs(total - prev_sum) <= power_tol * max(prev_sum, 1e-30):
            converged = True
            break
        window.append((total, float(pos_axis[0])))
        if len(window) > 50:
            window.pop(0)
        if len(window) == 50:
            totals = [w0 for w0, _ in window]
            coords = [c0 for _, c0 in window]
            if (max(totals) - min(totals)) <= power_tol * max(min(totals), 1e-30) \
                    and (max(coords) - min(coords)) <= 1e-8 * axis_len:
                converged = True
                break
        prev_sum = total
    return sweeps, converged

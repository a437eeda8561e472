# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the CV(RMSE) spacing scan and the dual-subgradient
sweep loop.

Mirrors vlcplace._kernel_py; see that module for the parameter contracts.
"""

from libc.math cimport INFINITY, fabs, isfinite, pow, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def cv_for_spacings(candidates, coef, offsets, base_sq, powers, double neg_half_exp, double d2_max):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cand = np.ascontiguousarray(candidates, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.ascontiguousarray(coef, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.ascontiguousarray(offsets, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] base = np.ascontiguousarray(base_sq, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(powers, dtype=np.float64)

    cdef Py_ssize_t n_cand = cand.shape[0]
    cdef Py_ssize_t n_led = a.shape[0]
    cdef Py_ssize_t n_rx = b.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_cand, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] eta = np.empty(n_rx, dtype=np.float64)

    cdef Py_ssize_t s, i, j
    cdef double spacing, u, d2, acc, avg, dev, var
    cdef bint has_cutoff = isfinite(d2_max)

    for s in range(n_cand):
        spacing = cand[s]
        for j in range(n_rx):
            acc = 0.0
            for i in range(n_led):
                u = a[i] * spacing + b[j]
                d2 = u * u + base[i, j]
                if has_cutoff and d2 > d2_max:
                    continue
                acc += p[i] * pow(d2, neg_half_exp)
            eta[j] = acc
        avg = 0.0
        for j in range(n_rx):
            avg += eta[j]
        avg /= n_rx
        if avg > 0.0:
            var = 0.0
            for j in range(n_rx):
                dev = eta[j] - avg
                var += dev * dev
            out[s] = sqrt(var / n_rx) / avg
        else:
            out[s] = float("nan")
    return out


def power_fixed_point(gains, served_idx, served_off, illum_min, comm_scale,
                      double xi, double noise_std, int interference,
                      double tol, Py_ssize_t max_passes):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gm = np.ascontiguousarray(gains, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.ascontiguousarray(served_idx, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off = np.ascontiguousarray(served_off, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] imn = np.ascontiguousarray(illum_min, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] scl = np.ascontiguousarray(comm_scale, dtype=np.float64)

    cdef Py_ssize_t k = gm.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] powers = np.zeros(k, dtype=np.float64)

    cdef double noise_sq = noise_std * noise_std
    cdef Py_ssize_t p, i, t, n, j
    cdef double h, others_illum, others_sq, rxn, need, p_ill, p_comm, req, worst
    cdef double total, prev = 0.0, first_total = -1.0, conv

    for p in range(1, max_passes + 1):
        for i in range(k):
            if off[i] == off[i + 1]:
                powers[i] = 0.0
                continue
            worst = 0.0
            for t in range(off[i], off[i + 1]):
                j = idx[t]
                h = gm[i, j]
                others_illum = 0.0
                others_sq = 0.0
                for n in range(k):
                    rxn = xi * powers[n] * gm[n, j]
                    others_illum += rxn
                    if interference:
                        others_sq += rxn * rxn
                rxn = xi * powers[i] * h
                others_illum -= rxn
                if interference:
                    others_sq -= rxn * rxn
                need = imn[j] - others_illum
                if need > 0.0 and h <= 0.0:
                    return np.asarray(powers), p, 3, j
                p_ill = need / (xi * h) if need > 0.0 else 0.0
                if scl[j] > 0.0:
                    if interference:
                        p_comm = sqrt(noise_sq + others_sq) * scl[j] / (xi * h)
                    else:
                        p_comm = noise_std * scl[j] / (xi * (h if h > 1e-300 else 1e-300))
                else:
                    p_comm = 0.0
                req = p_ill if p_ill > p_comm else p_comm
                if req > worst:
                    worst = req
            powers[i] = worst
        total = 0.0
        for i in range(k):
            total += powers[i]
        if first_total < 0.0:
            first_total = total
        if not isfinite(total) or total > 1e9 * (first_total if first_total > 1e-300 else 1e-300):
            return np.asarray(powers), p, 1, -1
        conv = 1e-12 * total
        if conv < tol:
            conv = tol
        if fabs(total - prev) <= conv:
            return np.asarray(powers), p, 0, -1
        prev = total
    return np.asarray(powers), max_passes, 2, -1


cdef inline double _fast_pow(double x, double e) noexcept nogil:
    # hot exponents for the default Lambert order m = 1
    if e == 0.5:
        return sqrt(x)
    if e == 2.0:
        return x * x
    if e == -2.0:
        return 1.0 / (x * x)
    return pow(x, e)


def dual_pass(pos_axis, cross_sq, gains, powers, lambdas, served_idx, served_off,
              rx_axis, illum_min, comm_factor, grid_idx, intervals,
              double axis_len, Py_ssize_t axis_count, double xi, double v_const,
              double w_const, double noise_std, double m, double gain_const,
              double gain_expo, double d2_max, int interference, double gamma,
              int diminishing, Py_ssize_t max_iters, double power_tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pa = np.ascontiguousarray(pos_axis, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] csq = np.ascontiguousarray(cross_sq, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gm = np.ascontiguousarray(gains, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pw = np.ascontiguousarray(powers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lam = np.ascontiguousarray(lambdas, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.ascontiguousarray(served_idx, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off = np.ascontiguousarray(served_off, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rxa = np.ascontiguousarray(rx_axis, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] imn = np.ascontiguousarray(illum_min, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cfac = np.ascontiguousarray(comm_factor, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gidx = np.ascontiguousarray(grid_idx, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ivl = np.ascontiguousarray(intervals, dtype=np.float64).reshape(-1, 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] eps = np.unique(np.asarray(intervals, dtype=np.float64).reshape(-1))

    cdef Py_ssize_t k = gm.shape[0]
    cdef Py_ssize_t u = gm.shape[1]
    cdef Py_ssize_t n_ivl = ivl.shape[0]
    cdef Py_ssize_t n_eps = eps.shape[0]

    cdef double exp2 = 2.0 / (m + 3.0)
    cdef double kkt_exp = (m + 3.0) / (m + 1.0)
    cdef double noise_sq = noise_std * noise_std

    cdef cnp.ndarray[cnp.float64_t, ndim=1] m_vec = np.empty(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] win_tot = np.empty(50, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] win_pos = np.empty(50, dtype=np.float64)

    cdef Py_ssize_t sweep, sweeps = 0, i, t, n, j, lo, hi, e, win_len = 0, win_head = 0
    cdef double gamma_l, own, others_illum, others_sq, rxs, rxn, need, branch
    cdef double lam_sum, w_total, x_hat, best_val, val, diffv, d2, new_spacing
    cdef double total, prev_sum = -1.0, residual, p_exp2, cand_n, wmax, wmin, cmax, cmin
    cdef bint have_prev = False, converged = False, inside, covered

    for sweep in range(1, max_iters + 1):
        sweeps = sweep
        if diminishing:
            gamma_l = gamma / sqrt(<double>sweep)
        else:
            gamma_l = gamma
        for i in range(k):
            lo = off[i]
            hi = off[i + 1]
            if lo == hi:
                pw[i] = 0.0
                continue
            lam_sum = 0.0
            for t in range(lo, hi):
                j = idx[t]
                others_illum = 0.0
                others_sq = 0.0
                own = xi * pw[i] * gm[i, j]
                for n in range(k):
                    rxn = xi * pw[n] * gm[n, j]
                    others_illum += rxn
                    if interference:
                        others_sq += rxn * rxn
                others_illum -= own
                if interference:
                    others_sq -= own * own
                need = imn[j] - others_illum
                if need < 0.0:
                    need = 0.0
                branch = need * v_const
                val = cfac[j] * w_const * sqrt(noise_sq + others_sq)
                if val > branch:
                    branch = val
                m_vec[t - lo] = _fast_pow(branch, exp2)
                lam_sum += lam[t]

            pw[i] = _fast_pow(exp2 * lam_sum, kkt_exp)

            if i == 0 and axis_count > 1:
                w_total = 0.0
                x_hat = 0.0
                for t in range(lo, hi):
                    val = lam[t] * m_vec[t - lo]
                    w_total += val
                    x_hat += val * rxa[idx[t]]
                if w_total > 0.0:
                    x_hat /= w_total
                    inside = False
                    for e in range(n_ivl):
                        if ivl[e, 0] <= x_hat <= ivl[e, 1]:
                            inside = True
                            break
                    if not inside:
                        best_val = INFINITY
                        for e in range(n_eps):
                            val = 0.0
                            for t in range(lo, hi):
                                diffv = eps[e] - rxa[idx[t]]
                                val += lam[t] * m_vec[t - lo] * diffv * diffv
                            if val < best_val:
                                best_val = val
                                x_hat = eps[e]
                    new_spacing = (axis_len - 2.0 * x_hat) / (axis_count - 1)
                    covered = True
                    for n in range(k):
                        if not covered:
                            break
                        cand_n = gidx[n] * new_spacing + x_hat
                        for t in range(off[n], off[n + 1]):
                            j = idx[t]
                            diffv = cand_n - rxa[j]
                            if diffv * diffv + csq[n, j] > d2_max:
                                covered = False
                                break
                    if covered:
                        for n in range(k):
                            cand_n = gidx[n] * new_spacing + x_hat
                            pa[n] = cand_n
                            for j in range(u):
                                diffv = cand_n - rxa[j]
                                d2 = diffv * diffv + csq[n, j]
                                if d2 > d2_max:
                                    gm[n, j] = 0.0
                                else:
                                    gm[n, j] = gain_const * _fast_pow(d2, gain_expo)

            p_exp2 = _fast_pow(pw[i], exp2)
            for t in range(lo, hi):
                j = idx[t]
                diffv = pa[i] - rxa[j]
                d2 = diffv * diffv + csq[i, j]
                residual = m_vec[t - lo] * d2 - p_exp2
                val = lam[t] + gamma_l * residual
                lam[t] = val if val > 0.0 else 0.0

        total = 0.0
        for i in range(k):
            total += pw[i]
        if have_prev:
            val = prev_sum if prev_sum > 1e-30 else 1e-30
            if fabs(total - prev_sum) <= power_tol * val:
                converged = True
                break
        win_tot[win_head] = total
        win_pos[win_head] = pa[0]
        win_head = (win_head + 1) % 50
        if win_len < 50:
            win_len += 1
        if win_len == 50:
            wmax = win_tot[0]
            wmin = win_tot[0]
            cmax = win_pos[0]
            cmin = win_pos[0]
            for e in range(1, 50):
                if win_tot[e] > wmax:
                    wmax = win_tot[e]
                if win_tot[e] < wmin:
                    wmin = win_tot[e]
                if win_pos[e] > cmax:
                    cmax = win_pos[e]
                if win_pos[e] < cmin:
                    cmin = win_pos[e]
            val = wmin if wmin > 1e-30 else 1e-30
            if (wmax - wmin) <= power_tol * val and (cmax - cmin) <= 1e-8 * axis_len:
                converged = True
                break
        prev_sum = total
        have_prev = True

    if pa is not pos_axis:
        np.asarray(pos_axis)[:] = pa
    if gm is not gains:
        np.asarray(gains)[:, :] = gm
    if pw is not powers:
        np.asarray(powers)[:] = pw
    if lam is not lambdas:
        np.asarray(lambdas)[:] = lam
    return sweeps, bool(converged)

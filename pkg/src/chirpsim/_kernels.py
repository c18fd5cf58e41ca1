"""Compiled inner loop for the RK4 Liouville integrator."""

import numba
import numpy as np


@numba.njit(cache=True)
def _assemble(h0, dmask, c, sweep, rabi, out):
    n = h0.shape[0]
    for i in range(n):
        for j in range(n):
            out[i, j] = h0[i, j] + rabi * c[i, j]
        out[i, i] += sweep * dmask[i]


@numba.njit(cache=True)
def _liouville(r, h, out):
    # i (r h - h r); for Hermitian r and h, h r = (r h)^dagger, so one product suffices
    n = r.shape[0]
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += r[i, k] * h[k, j]
            out[i, j] = acc
    for i in range(n):
        for j in range(i, n):
            a = out[i, j]
            b = np.conj(out[j, i])
            out[i, j] = 1j * (a - b)
            out[j, i] = np.conj(out[i, j])


@numba.njit(cache=True)
def rk4_liouville(rho, h0, dmask, c, s_nodes, r_nodes, s_mid, r_mid, step, stored,
                  trace_tol):
    """Integrate and keep rho at the step indices in ``stored`` (sorted, starts at 0).

    Returns (samples, failed_step, max_hermitian_drift); failed_step is -1
    unless the trace drifted beyond ``trace_tol``.
    """
    n = rho.shape[0]
    n_steps = s_mid.shape[0]
    samples = np.empty((stored.shape[0], n, n), dtype=np.complex128)
    samples[0] = rho
    slot = 1
    ha = np.empty((n, n), dtype=np.complex128)
    hb = np.empty((n, n), dtype=np.complex128)
    he = np.empty((n, n), dtype=np.complex128)
    k1 = np.empty((n, n), dtype=np.complex128)
    k2 = np.empty((n, n), dtype=np.complex128)
    k3 = np.empty((n, n), dtype=np.complex128)
    k4 = np.empty((n, n), dtype=np.complex128)
    tmp = np.empty((n, n), dtype=np.complex128)
    rho = rho.copy()
    half = 0.5 * step
    sixth = step / 6.0
    max_herm = 0.0
    _assemble(h0, dmask, c, s_nodes[0], r_nodes[0], he)
    for s in range(n_steps):
        ha[:, :] = he
        _assemble(h0, dmask, c, s_mid[s], r_mid[s], hb)
        _assemble(h0, dmask, c, s_nodes[s + 1], r_nodes[s + 1], he)
        _liouville(rho, ha, k1)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = rho[i, j] + half * k1[i, j]
        _liouville(tmp, hb, k2)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = rho[i, j] + half * k2[i, j]
        _liouville(tmp, hb, k3)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = rho[i, j] + step * k3[i, j]
        _liouville(tmp, he, k4)
        for i in range(n):
            for j in range(n):
                rho[i, j] += sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        tr = 0.0
        for i in range(n):
            for j in range(i, n):
                a = rho[i, j]
                b = np.conj(rho[j, i])
                d = abs(a - b)
                if d > max_herm:
                    max_herm = d
                m = 0.5 * (a + b)
                rho[i, j] = m
                rho[j, i] = np.conj(m)
            tr += rho[i, i].real
        if abs(tr - 1.0) > trace_tol:
            return samples[:slot], s + 1, max_herm
        if slot < stored.shape[0] and stored[slot] == s + 1:
            samples[slot] = rho
            slot += 1
    return samples, -1, max_herm

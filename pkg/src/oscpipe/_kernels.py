"""Time-stepping kernels (numba-jitted loops with a vectorized numpy twin).

The finite kernel advances the characteristic fields w+/w- by exact one-node
shifts (unit CFL), applies the per-wall interface algebra, and integrates each
wall's (y, z) pair with one trapezoidal step.  The effective kernel is a
velocity-Verlet update of  w(x) v_tt = a^2 v_xx - q(x) v.

Both kernels also accumulate the discrete energy at every step, and track the
largest field value about to leave the domain (edge-loss monitor).
"""

import numpy as np

from .backend import BACKEND


# -- finite (characteristic) kernel ------------------------------------------

def _finite_steps_loops(wp, wm, y, z, widx, M, K, dt, arho0, S,
                        c_base, c_corr, tw, e_ac, e_osc, k0, nsteps, edge_loss):
    N = wp.shape[0]
    nw = widx.shape[0]
    ap = np.empty(nw)
    am = np.empty(nw)
    for k in range(nsteps):
        for j in range(nw):
            ap[j] = wp[widx[j]]
            am[j] = wm[widx[j]]
        if abs(wp[N - 1]) > edge_loss[0]:
            edge_loss[0] = abs(wp[N - 1])
        if abs(wm[0]) > edge_loss[0]:
            edge_loss[0] = abs(wm[0])
        for i in range(N - 1, 0, -1):
            wp[i] = wp[i - 1]
        wp[0] = 0.0
        for i in range(N - 1):
            wm[i] = wm[i + 1]
        wm[N - 1] = 0.0
        for j in range(nw):
            wm[widx[j] - 1] = ap[j] - 2.0 * arho0 * z[j]
            wp[widx[j] + 1] = am[j] + 2.0 * arho0 * z[j]
        for j in range(nw):
            f_old = am[j] - ap[j]
            f_new = wm[widx[j]] - wp[widx[j]]
            g = 0.5 * (f_old + f_new)
            den = M[j] + dt * arho0 * S + 0.25 * dt * dt * K[j]
            zn = (z[j] * (M[j] - 0.25 * dt * dt * K[j] - dt * arho0 * S)
                  - dt * K[j] * y[j] - dt * S * g) / den
            y[j] = y[j] + 0.5 * dt * (z[j] + zn)
            z[j] = zn
        base = 0.0
        for i in range(N):
            base += tw[i] * (wp[i] * wp[i] + wm[i] * wm[i])
        corr = 0.0
        eo = 0.0
        for j in range(nw):
            sig = wm[widx[j]] - wp[widx[j]] + 2.0 * arho0 * z[j]
            corr += z[j] * sig
            eo += 0.5 * (K[j] * y[j] * y[j] + M[j] * z[j] * z[j])
        e_ac[k0 + 1 + k] = c_base * base + c_corr * corr
        e_osc[k0 + 1 + k] = eo


def _finite_steps_numpy(wp, wm, y, z, widx, M, K, dt, arho0, S,
                        c_base, c_corr, tw, e_ac, e_osc, k0, nsteps, edge_loss):
    for k in range(nsteps):
        ap = wp[widx].copy()
        am = wm[widx].copy()
        edge_loss[0] = max(edge_loss[0], abs(wp[-1]), abs(wm[0]))
        wp[1:] = wp[:-1]
        wp[0] = 0.0
        wm[:-1] = wm[1:]
        wm[-1] = 0.0
        if widx.size:
            wm[widx - 1] = ap - 2.0 * arho0 * z
            wp[widx + 1] = am + 2.0 * arho0 * z
            g = 0.5 * ((am - ap) + (wm[widx] - wp[widx]))
            den = M + dt * arho0 * S + 0.25 * dt * dt * K
            zn = (z * (M - 0.25 * dt * dt * K - dt * arho0 * S)
                  - dt * K * y - dt * S * g) / den
            y += 0.5 * dt * (z + zn)
            z[:] = zn
            sig = wm[widx] - wp[widx] + 2.0 * arho0 * z
            corr = float(np.dot(z, sig))
            eo = 0.5 * (float(np.dot(K, y * y)) + float(np.dot(M, z * z)))
        else:
            corr = 0.0
            eo = 0.0
        base = float(np.dot(tw, wp * wp)) + float(np.dot(tw, wm * wm))
        e_ac[k0 + 1 + k] = c_base * base + c_corr * corr
        e_osc[k0 + 1 + k] = eo


# -- effective (homogenized equation) kernel ----------------------------------

def _effective_steps_loops(v, u, w, q, a2, dx, dt, e, k0, nsteps, periodic):
    N = v.shape[0]
    inv2 = 1.0 / (dx * dx)
    acc = np.empty(N)
    for i in range(N):
        left = v[N - 1] if (periodic and i == 0) else (v[i - 1] if i > 0 else 0.0)
        right = v[0] if (periodic and i == N - 1) else (v[i + 1] if i < N - 1 else 0.0)
        acc[i] = (a2 * (left - 2.0 * v[i] + right) * inv2 - q[i] * v[i]) / w[i]
    for k in range(nsteps):
        for i in range(N):
            v[i] = v[i] + dt * u[i] + 0.5 * dt * dt * acc[i]
        for i in range(N):
            left = v[N - 1] if (periodic and i == 0) else (v[i - 1] if i > 0 else 0.0)
            right = v[0] if (periodic and i == N - 1) else (v[i + 1] if i < N - 1 else 0.0)
            a1 = (a2 * (left - 2.0 * v[i] + right) * inv2 - q[i] * v[i]) / w[i]
            u[i] = u[i] + 0.5 * dt * (acc[i] + a1)
            acc[i] = a1
        s = 0.0
        for i in range(N):
            s += w[i] * u[i] * u[i] + q[i] * v[i] * v[i]
        grad = 0.0
        for i in range(N - 1):
            d = v[i + 1] - v[i]
            grad += d * d
        if periodic:
            d = v[0] - v[N - 1]
            grad += d * d
        e[k0 + 1 + k] = 0.5 * dx * s + 0.5 * a2 * grad / dx


def _effective_accel_numpy(v, w, q, a2, dx, periodic):
    lap = np.empty_like(v)
    lap[1:-1] = v[2:] - 2.0 * v[1:-1] + v[:-2]
    if periodic:
        lap[0] = v[-1] - 2.0 * v[0] + v[1]
        lap[-1] = v[-2] - 2.0 * v[-1] + v[0]
    else:
        lap[0] = -2.0 * v[0] + v[1]
        lap[-1] = v[-2] - 2.0 * v[-1]
    return (a2 * lap / (dx * dx) - q * v) / w


def _effective_steps_numpy(v, u, w, q, a2, dx, dt, e, k0, nsteps, periodic):
    acc = _effective_accel_numpy(v, w, q, a2, dx, periodic)
    for k in range(nsteps):
        v += dt * u + 0.5 * dt * dt * acc
        a1 = _effective_accel_numpy(v, w, q, a2, dx, periodic)
        u += 0.5 * dt * (acc + a1)
        acc = a1
        s = float(np.dot(w, u * u)) + float(np.dot(q, v * v))
        d = np.diff(v)
        grad = float(np.dot(d, d))
        if periodic:
            grad += (v[0] - v[-1]) ** 2
        e[k0 + 1 + k] = 0.5 * dx * s + 0.5 * a2 * grad / dx


def effective_energy(v, u, w, q, a2, dx, periodic=False):
    """Discrete energy 1/2 * int(w u^2 + a^2 v_x^2 + q v^2), forward-difference gradient."""
    s = float(np.dot(w, u * u)) + float(np.dot(q, v * v))
    d = np.diff(v)
    grad = float(np.dot(d, d))
    if periodic:
        grad += (v[0] - v[-1]) ** 2
    return 0.5 * dx * s + 0.5 * a2 * grad / dx


if BACKEND == "numba":
    from numba import njit

    finite_steps = njit(cache=True)(_finite_steps_loops)
    effective_steps = njit(cache=True)(_effective_steps_loops)
else:
    finite_steps = _finite_steps_numpy
    effective_steps = _effective_steps_numpy

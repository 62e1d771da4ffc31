"""Timing comparison of the numba-jitted kernels against the numpy fallback.

Run:  python benchmarks/bench_backends.py
(Or OSCPIPE_DISABLE_NUMBA=1 to confirm which path the package itself selects.)
"""

import time

import numpy as np

from oscpipe import _kernels
from oscpipe.backend import BACKEND
from oscpipe.effective import DensityProfile, coefficients, effective_initial_data, make_eff_grid
from oscpipe.finite import build_grid, init_state
from oscpipe.homogenize import discretize_densities
from oscpipe.model import MediumParams, trap_weights
from oscpipe.pulses import GaussianPulse


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_finite(n_walls=100, dx=1 / 2000, n_steps=4000):
    med = MediumParams(1.0, 1.0, 1.0)
    prof = DensityProfile.constant(1.0, 1.0, 1.0)
    chain = discretize_densities(prof, n_walls, med)
    pulse = GaussianPulse(center=-1.5, width=0.125, link="right")
    grid = build_grid(chain, med, dx, n_steps * dx, data_radius=2.5)
    st = init_state(lambda x: pulse.p0(x, med), lambda x: pulse.v0(x, med),
                    chain, med, grid)
    tw = trap_weights(grid)
    c_base = med.S / (4 * med.a ** 2 * med.rho0)
    c_corr = med.S * dx / (2 * med.a)

    def run(kernel):
        wp, wm = st.wplus.copy(), st.wminus.copy()
        y, z = st.y.copy(), st.z.copy()
        e1 = np.zeros(n_steps + 1)
        e2 = np.zeros(n_steps + 1)
        kernel(wp, wm, y, z, grid.wall_nodes, chain.M, chain.K, grid.dt,
               med.a_rho0, med.S, c_base, c_corr, tw, e1, e2, 0, n_steps,
               np.zeros(1))
        return wp

    results = {"numpy": None, "numba": None}
    t_np = time_call(run, _kernels._finite_steps_numpy)
    results["numpy"] = t_np
    if BACKEND == "numba":
        from numba import njit
        jitted = njit(cache=True)(_kernels._finite_steps_loops)
        run(jitted)   # compile
        results["numba"] = time_call(run, jitted)
        a = run(jitted)
        b = run(_kernels._finite_steps_numpy)
        assert np.max(np.abs(a - b)) < 1e-12 * max(np.max(np.abs(b)), 1e-300)
    return grid.n_nodes, n_steps, results


def bench_effective(dx=1 / 3200, n_steps=4000):
    med = MediumParams(1.0, 1.0, 1.0)
    prof = DensityProfile.constant(1.0, 1.0, 1.0)
    grid = make_eff_grid(4.0, dx)
    co = coefficients(prof, med, grid)
    pulse = GaussianPulse(center=-1.5, width=0.125, link="right")
    st = effective_initial_data(lambda x: pulse.p0(x, med),
                                lambda x: pulse.v0(x, med), med, grid,
                                dp0=lambda x: pulse.dp0(x, med))
    dt = 0.4 * dx

    def run(kernel):
        v, u = st.v.copy(), st.vdot.copy()
        e = np.zeros(n_steps + 1)
        kernel(v, u, co.w, co.q, med.a ** 2, dx, dt, e, 0, n_steps, False)
        return v

    results = {"numpy": time_call(run, _kernels._effective_steps_numpy), "numba": None}
    if BACKEND == "numba":
        from numba import njit
        jitted = njit(cache=True)(_kernels._effective_steps_loops)
        run(jitted)
        results["numba"] = time_call(run, jitted)
        a, b = run(jitted), run(_kernels._effective_steps_numpy)
        assert np.max(np.abs(a - b)) < 1e-12 * max(np.max(np.abs(b)), 1e-300)
    return grid.n_nodes, n_steps, results


def main():
    print(f"selected backend: {BACKEND}")
    for name, bench in (("finite characteristic stepper", bench_finite),
                        ("effective velocity-Verlet", bench_effective)):
        nodes, steps, res = bench()
        line = f"{name}: {nodes} nodes x {steps} steps | numpy {res['numpy']:.3f}s"
        if res["numba"] is not None:
            line += f" | numba {res['numba']:.3f}s | speedup {res['numpy'] / res['numba']:.1f}x"
        else:
            line += " | numba unavailable (disabled or not installed)"
        print(line)


if __name__ == "__main__":
    main()

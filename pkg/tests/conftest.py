import numpy as np
import pytest

from oscpipe.model import FiniteState, MediumParams, SimGrid


def make_grid(x0, dx, n_nodes, wall_positions=(), a=1.0):
    idx = np.array([int(round((s - x0) / dx)) for s in wall_positions], dtype=np.int64)
    return SimGrid(x0, dx, n_nodes, idx, a)


def state_from_sided(grid, chain, medium, p_minus, p_plus, v, y, z):
    """Assemble a FiniteState from one-sided pressure samples (p- = p+ off walls)."""
    ar = medium.a_rho0
    wp = p_minus + ar * v
    wm = p_plus - ar * v
    w = grid.wall_nodes
    if len(w):
        wp[w] = p_minus[w] + ar * z
        wm[w] = p_plus[w] - ar * z
    return FiniteState(grid, wp, wm, np.asarray(y, float), np.asarray(z, float), medium)


def gaussians(x, params):
    out = np.zeros_like(x)
    for amp, c, w in params:
        out = out + amp * np.exp(-((x - c) ** 2) / (2 * w ** 2))
    return out


def random_domain_state(rng, grid, chain, medium, n_bumps=4):
    """Random state in the generator's domain: v continuous with v(s_j) = z_j,
    p with prescribed jumps at walls, everything decaying hard at the edges."""
    x = grid.x
    lo, hi = grid.extent
    half = 0.5 * (hi - lo)
    mid = 0.5 * (lo + hi)
    span = 0.4 * half
    taper = np.exp(-(((x - mid) / (0.62 * half)) ** 8))
    vpar = [(rng.uniform(-1, 1), mid + rng.uniform(-span, span), rng.uniform(0.05, 0.12) * half)
            for _ in range(n_bumps)]
    ppar = [(rng.uniform(-1, 1), mid + rng.uniform(-span, span), rng.uniform(0.05, 0.12) * half)
            for _ in range(n_bumps)]
    v = gaussians(x, vpar) * taper
    p_smooth = gaussians(x, ppar) * taper
    sigma = rng.uniform(-1, 1, chain.n)
    jump = np.zeros_like(x)
    for sj, pos in zip(sigma, grid.wall_positions):
        jump += 0.5 * sj * taper * np.sign(x - pos)
    p_minus = p_smooth + jump
    p_plus = p_smooth + jump
    w = grid.wall_nodes
    for j, (sj, i) in enumerate(zip(sigma, w)):
        p_minus[i] = p_smooth[i] - 0.5 * sj * taper[i] + sum(
            0.5 * sigma[k] * taper[i] * np.sign(x[i] - grid.wall_positions[k])
            for k in range(chain.n) if k != j)
        p_plus[i] = p_minus[i] + sj * taper[i]
    y = rng.uniform(-1, 1, chain.n)
    z = v[w].copy()
    return state_from_sided(grid, chain, medium, p_minus, p_plus, v, y, z)


@pytest.fixture
def medium():
    return MediumParams(rho0=1.2, a=340.0, S=0.01)


@pytest.fixture
def unit_medium():
    return MediumParams(rho0=1.0, a=1.0, S=1.0)

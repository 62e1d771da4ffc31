"""Homogenized-limit solver:  (1 + rho_M/rho0) v_tt - a^2 v_xx + (rho_K/rho0) v = 0.

With w(x) = 1 + rho_M/rho0 and q(x) = rho_K/rho0 the equation reads
w v_tt = a^2 v_xx - q v.  Time stepping is velocity-Verlet (second order,
time-reversible); the associated operator L f = (1/w)(-a^2 f'' + q f) is
exposed for symmetry/positivity checks, and a frequency-domain transfer
matrix provides the exact (R, T) of a piecewise-constant slab for use as an
oracle.  Inside a constant slab the dispersion relation  w omega^2 = a^2 k^2 + q
gives the cutoff omega_c = sqrt(q/w) = sqrt(rho_K / (rho0 + rho_M)); below it
the interior wave is evanescent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .model import ConfigurationError, MediumParams


@dataclass(frozen=True)
class DensityProfile:
    """Oscillator mass/stiffness line densities on the confinement interval
    [center - L/2, center + L/2] (zero outside)."""

    rho_m: object   # callable x -> density (vectorized)
    rho_k: object
    L: float
    center: float = 0.0

    def __post_init__(self):
        if self.L <= 0:
            raise ConfigurationError("profile length L must be > 0")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.L / 2, self.center + self.L / 2)

    def _masked(self, f, x):
        x = np.asarray(x, dtype=float)
        vals = np.asarray(f(x), dtype=float) + np.zeros_like(x)
        return np.where(np.abs(x - self.center) <= self.L / 2, vals, 0.0)

    def rho_m_at(self, x):
        return self._masked(self.rho_m, x)

    def rho_k_at(self, x):
        return self._masked(self.rho_k, x)

    @classmethod
    def constant(cls, rho_m: float, rho_k: float, L: float, center: float = 0.0) -> "DensityProfile":
        if rho_m < 0 or rho_k < 0:
            raise ConfigurationError("densities must be >= 0")
        return cls(lambda x: rho_m + 0.0 * np.asarray(x),
                   lambda x: rho_k + 0.0 * np.asarray(x), L, center)

    @classmethod
    def from_table(cls, xs, rho_m_vals, rho_k_vals, L: float, center: float = 0.0) -> "DensityProfile":
        xs = np.asarray(xs, dtype=float)
        rm = np.asarray(rho_m_vals, dtype=float)
        rk = np.asarray(rho_k_vals, dtype=float)
        if np.any(rm < 0) or np.any(rk < 0):
            raise ConfigurationError("densities must be >= 0")
        return cls(lambda x: np.interp(x, xs, rm, left=0.0, right=0.0),
                   lambda x: np.interp(x, xs, rk, left=0.0, right=0.0), L, center)

    def translated(self, delta: float) -> "DensityProfile":
        rm, rk = self.rho_m, self.rho_k
        return DensityProfile(lambda x: rm(np.asarray(x, dtype=float) - delta),
                              lambda x: rk(np.asarray(x, dtype=float) - delta),
                              self.L, self.center + delta)

    def is_constant(self, probes: int = 257) -> bool:
        lo, hi = self.support
        x = np.linspace(lo, hi, probes)
        rm, rk = self.rho_m_at(x), self.rho_k_at(x)
        return bool(np.ptp(rm) <= 1e-12 * max(1.0, rm.max())
                    and np.ptp(rk) <= 1e-12 * max(1.0, rk.max()))


@dataclass(frozen=True)
class EffGrid:
    """Plain uniform grid for the limit equation (no wall nodes, no CFL tie)."""

    x0: float
    dx: float
    n_nodes: int

    def __post_init__(self):
        if self.dx <= 0 or self.n_nodes < 3:
            raise ConfigurationError("grid needs dx > 0 and at least 3 nodes")
        object.__setattr__(self, "_x", self.x0 + self.dx * np.arange(self.n_nodes))

    @property
    def x(self) -> np.ndarray:
        return self._x


def make_eff_grid(half_extent: float, dx: float) -> EffGrid:
    half = int(math.ceil(half_extent / dx))
    return EffGrid(-half * dx, dx, 2 * half + 1)


@dataclass
class EffectiveCoefficients:
    """Sampled w(x) >= 1 and q(x) >= 0, equal to (1, 0) outside the support."""

    grid: EffGrid
    w: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if len(self.w) != self.grid.n_nodes or len(self.q) != self.grid.n_nodes:
            raise ConfigurationError("coefficient arrays must match the grid")
        if np.any(self.w < 1.0 - 1e-12) or np.any(self.q < -1e-300):
            raise ConfigurationError("need w >= 1 and q >= 0 everywhere")

    @property
    def w_min(self) -> float:
        return float(np.min(self.w))


def coefficients(profile: DensityProfile, medium: MediumParams, grid: EffGrid,
                 cell_sub: int = 16) -> EffectiveCoefficients:
    """Sample w = 1 + rho_M/rho0 and q = rho_K/rho0 as cell averages.

    Averaging over the dual cell [x_i - dx/2, x_i + dx/2] (composite Simpson)
    keeps the scheme second order when the densities jump at the support edge;
    pointwise sampling there would degrade the interface to first order.  For
    densities smooth at a node the average equals the point value to O(dx^2)
    (exactly, for locally linear ones).
    """
    dx = grid.dx
    sup_lo, sup_hi = profile.support
    lo = np.maximum(grid.x - dx / 2, sup_lo)
    hi = np.minimum(grid.x + dx / 2, sup_hi)
    width = np.maximum(hi - lo, 0.0)
    offs = np.linspace(0.0, 1.0, cell_sub + 1)
    wts = np.ones(cell_sub + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    wts /= 3.0 * cell_sub
    pts = lo[:, None] + width[:, None] * offs[None, :]
    rm = (profile.rho_m_at(pts.ravel()).reshape(pts.shape) @ wts) * width / dx
    rk = (profile.rho_k_at(pts.ravel()).reshape(pts.shape) @ wts) * width / dx
    if np.any(rm < 0) or np.any(rk < 0):
        raise ConfigurationError("negative density in profile")
    return EffectiveCoefficients(grid, 1.0 + rm / medium.rho0, rk / medium.rho0)


def cutoff_omega(profile: DensityProfile, medium: MediumParams) -> float:
    """Band-gap cutoff sqrt(rho_K/(rho0 + rho_M)) of a constant profile."""
    if not profile.is_constant():
        raise ConfigurationError("cutoff is defined here for constant profiles only")
    mid = np.array([profile.center])
    rm = float(profile.rho_m_at(mid)[0])
    rk = float(profile.rho_k_at(mid)[0])
    return math.sqrt(rk / (medium.rho0 + rm))


@dataclass
class EffectiveState:
    grid: EffGrid
    v: np.ndarray
    vdot: np.ndarray
    t: float = 0.0

    def copy(self) -> "EffectiveState":
        return EffectiveState(self.grid, self.v.copy(), self.vdot.copy(), self.t)


def effective_initial_data(p0, v0, medium: MediumParams, grid: EffGrid,
                           dp0=None) -> EffectiveState:
    """Limit initial data: v = v0, v_t = -(1/rho0) p0'.  Uses the analytic
    derivative when given, else a fourth-order finite difference of p0."""
    x = grid.x
    v = np.asarray(v0(x), dtype=float) + np.zeros_like(x)
    if dp0 is not None:
        dp = np.asarray(dp0(x), dtype=float) + np.zeros_like(x)
    else:
        p = np.asarray(p0(x), dtype=float) + np.zeros_like(x)
        dp = np.zeros_like(p)
        dx = grid.dx
        dp[2:-2] = (p[:-4] - 8 * p[1:-3] + 8 * p[3:-1] - p[4:]) / (12 * dx)
        dp[:2] = (p[1:3] - p[0:2]) / dx
        dp[-2:] = (p[-2:] - p[-3:-1]) / dx
    return EffectiveState(grid, v, -dp / medium.rho0, 0.0)


def cfl_limit(coeffs: EffectiveCoefficients, medium: MediumParams) -> float:
    """Largest admissible dt: 0.9 dx sqrt(min w) / a (global bound, min w = slowest case)."""
    return 0.9 * coeffs.grid.dx * math.sqrt(coeffs.w_min) / medium.a


@dataclass
class EffTrajectory:
    grid: EffGrid
    t_snap: np.ndarray
    v_snaps: list
    u_snaps: list
    t_all: np.ndarray
    e: np.ndarray
    meta: dict = field(default_factory=dict)


def _check_dt(dt: float, coeffs: EffectiveCoefficients, medium: MediumParams):
    lim = cfl_limit(coeffs, medium)
    if dt > lim * (1 + 1e-12):
        raise ConfigurationError(f"dt = {dt:.6e} violates the CFL bound {lim:.6e}")


def step_effective(state: EffectiveState, coeffs: EffectiveCoefficients,
                   medium: MediumParams, dt: float, periodic: bool = False) -> EffectiveState:
    """Single velocity-Verlet step of w v_tt = a^2 v_xx - q v."""
    _check_dt(dt, coeffs, medium)
    out = state.copy()
    scratch = np.zeros(2)
    _kernels.effective_steps(out.v, out.vdot, coeffs.w, coeffs.q, medium.a ** 2,
                             coeffs.grid.dx, dt, scratch, 0, 1, periodic)
    out.t += dt
    return out


def simulate_effective(state0: EffectiveState, coeffs: EffectiveCoefficients,
                       medium: MediumParams, t_max: float, dt: float | None = None,
                       snapshot_every: int | None = None,
                       periodic: bool = False) -> EffTrajectory:
    """Iterate step_effective to t_max, recording snapshots and the discrete
    energy 1/2 int(w vdot^2 + a^2 v_x^2 + q v^2) at every step."""
    if dt is None:
        dt = 0.5 * cfl_limit(coeffs, medium)
    _check_dt(dt, coeffs, medium)
    n_steps = int(round(t_max / dt))
    if snapshot_every is None:
        snapshot_every = max(1, n_steps // 200)
    state = state0.copy()
    e = np.zeros(n_steps + 1)
    e[0] = _kernels.effective_energy(state.v, state.vdot, coeffs.w, coeffs.q,
                                     medium.a ** 2, coeffs.grid.dx, periodic)
    v_snaps = [state.v.copy()]
    u_snaps = [state.vdot.copy()]
    t_snap = [state.t]
    done = 0
    while done < n_steps:
        block = min(snapshot_every, n_steps - done)
        _kernels.effective_steps(state.v, state.vdot, coeffs.w, coeffs.q,
                                 medium.a ** 2, coeffs.grid.dx, dt, e, done, block, periodic)
        done += block
        state.t += block * dt
        v_snaps.append(state.v.copy())
        u_snaps.append(state.vdot.copy())
        t_snap.append(state.t)
    return EffTrajectory(
        grid=state0.grid,
        t_snap=np.asarray(t_snap),
        v_snaps=v_snaps,
        u_snaps=u_snaps,
        t_all=state0.t + dt * np.arange(n_steps + 1),
        e=e,
        meta={"dt": dt, "n_steps": n_steps, "snapshot_every": snapshot_every,
              "periodic": periodic},
    )


def apply_L(f: np.ndarray, coeffs: EffectiveCoefficients, medium: MediumParams) -> np.ndarray:
    """Sturm-Liouville action L f = (1/w)(-a^2 f'' + q f), centered second order."""
    f = np.asarray(f, dtype=float)
    dx = coeffs.grid.dx
    fpp = np.empty_like(f)
    fpp[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / (dx * dx)
    fpp[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (dx * dx)
    fpp[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / (dx * dx)
    return (-medium.a ** 2 * fpp + coeffs.q * f) / coeffs.w


def weighted_inner(f: np.ndarray, g: np.ndarray, coeffs: EffectiveCoefficients) -> float:
    """<f, g>_w with trapezoid quadrature (the space where L is symmetric)."""
    tw = np.full(coeffs.grid.n_nodes, coeffs.grid.dx)
    tw[0] = tw[-1] = 0.5 * coeffs.grid.dx
    return float(np.dot(tw, coeffs.w * f * g))


def slab_transfer(omega: float, w_in: float, q_in: float, width: float,
                  medium: MediumParams) -> tuple[complex, complex]:
    """Exact reflection/transmission amplitudes of the constant slab.

    Interior wavenumber from w_in omega^2 = a^2 k_in^2 + q_in (evanescent when
    negative); the returned pair satisfies |R|^2 + |T|^2 = 1 identically.
    """
    if w_in < 1.0 - 1e-12 or q_in < 0 or width <= 0:
        raise ConfigurationError("slab needs w_in >= 1, q_in >= 0, width > 0")
    a = medium.a
    if omega == 0.0:
        return ((-1.0 + 0.0j, 0.0 + 0.0j) if q_in > 0 else (0.0 + 0.0j, 1.0 + 0.0j))
    k = omega / a
    kin2 = (w_in * omega ** 2 - q_in) / a ** 2
    kin = np.lib.scimath.sqrt(kin2)
    arg = kin * width
    if abs(arg) < 1e-150:
        cos_t, sinc_t = 1.0 + 0.0j, width + 0.0j
    else:
        cos_t = np.cos(arg)
        sinc_t = np.sin(arg) / kin
    den = 2j * k * cos_t + (k ** 2 + kin2) * sinc_t
    T = 2j * k * np.exp(-1j * k * width) / den
    R = (k ** 2 - kin2) * sinc_t * np.exp(-1j * k * width) / den
    return complex(R), complex(T)

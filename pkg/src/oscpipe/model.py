"""Physical constants, state representations, energy algebra, and the generator.

The system couples a 1D acoustic field (pressure deviation p, velocity v) in an
infinite pipe to n spring-mounted walls at positions s_j:

    p_t = -a^2 rho0 v_x          (away from walls)
    v_t = -(1/rho0) p_x
    M_j z_j' = -K_j y_j - S (p(s_j+) - p(s_j-))
    y_j' = z_j = v(s_j)

States live in the energy space with squared norm

    ||Psi||^2 = (1/a^2 rho0) <p,p> + rho0 <v,v> + (1/S) sum_j (K_j y_j^2 + M_j z_j^2)

and total energy E = (S/2) ||Psi||^2.

Representation choice: fields are stored as characteristics w+- = p +- a rho0 v
on a uniform grid whose nodes contain every wall.  At a wall node, w+ holds the
left limit and w- the right limit, so p is double-valued there (p-, p+) while
v is single-valued and equals z_j.  Pressure jumps sigma_j = p(s_j+) - p(s_j-)
follow directly; the regular part p_reg = p - (1/2) sum_j sigma_j sgn(x - s_j)
is continuous.  Quadratures are composite trapezoid; a wall node contributes
the mean of its two one-sided values (the exact broken-trapezoid rule for a
function with a jump at a node), which keeps the polarization identity
inner(Psi,Psi) = (2/S) E exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Inconsistent grids, chains, or physical parameters."""


class SupportViolation(ConfigurationError):
    """Initial data overlaps the oscillator interval [-L/2, L/2]."""


@dataclass(frozen=True)
class MediumParams:
    """Background fluid: density rho0 (kg/m^3), sound speed a (m/s), section S (m^2)."""

    rho0: float
    a: float
    S: float

    def __post_init__(self):
        for name in ("rho0", "a", "S"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"medium parameter {name} must satisfy {name} > 0")

    @property
    def a_rho0(self) -> float:
        return self.a * self.rho0


@dataclass(frozen=True)
class OscillatorChain:
    """Wall equilibrium positions s (strictly increasing, inside the confinement
    interval [center - L/2, center + L/2]), masses M, spring constants K."""

    s: np.ndarray
    M: np.ndarray
    K: np.ndarray
    L: float
    center: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        M = np.asarray(self.M, dtype=float)
        K = np.asarray(self.K, dtype=float)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "K", K)
        if not (len(s) == len(M) == len(K)):
            raise ConfigurationError("chain arrays s, M, K must have equal length")
        if self.L <= 0:
            raise ConfigurationError("chain parameter L must satisfy L > 0")
        if len(s) and np.any(np.diff(s) <= 0):
            raise ConfigurationError("wall positions s must be strictly increasing")
        lo, hi = self.interval
        if len(s) and (s[0] < lo - 1e-12 * self.L or s[-1] > hi + 1e-12 * self.L):
            raise ConfigurationError("wall positions must lie in [center - L/2, center + L/2]")
        if np.any(M <= 0) or np.any(K <= 0):
            raise ConfigurationError("all wall masses M and stiffnesses K must be > 0")

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.center - self.L / 2, self.center + self.L / 2)

    def translated(self, delta: float) -> "OscillatorChain":
        return OscillatorChain(self.s + delta, self.M.copy(), self.K.copy(),
                               self.L, self.center + delta)

    @classmethod
    def empty(cls, L: float, center: float = 0.0) -> "OscillatorChain":
        z = np.zeros(0)
        return cls(z, z, z, L, center)


@dataclass(frozen=True)
class SimGrid:
    """Uniform grid with unit-CFL time step dt = dx/a and walls on nodes."""

    x0: float
    dx: float
    n_nodes: int
    wall_nodes: np.ndarray
    a: float
    snap_displacement: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "wall_nodes", np.asarray(self.wall_nodes, dtype=np.int64))
        if self.dx <= 0 or self.n_nodes < 3:
            raise ConfigurationError("grid needs dx > 0 and at least 3 nodes")
        w = self.wall_nodes
        if len(w):
            if np.any(np.diff(w) <= 0) or w[0] < 1 or w[-1] > self.n_nodes - 2:
                raise ConfigurationError("wall nodes must be distinct and strictly interior")
        object.__setattr__(self, "_x", self.x0 + self.dx * np.arange(self.n_nodes))

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def dt(self) -> float:
        return self.dx / self.a

    @property
    def extent(self) -> tuple[float, float]:
        return (self.x0, self.x0 + self.dx * (self.n_nodes - 1))

    @property
    def wall_positions(self) -> np.ndarray:
        return self.x[self.wall_nodes]

    def same_layout(self, other: "SimGrid") -> bool:
        return (self.n_nodes == other.n_nodes
                and abs(self.x0 - other.x0) < 1e-12 * max(1.0, abs(self.x0))
                and abs(self.dx - other.dx) < 1e-15 * self.dx
                and np.array_equal(self.wall_nodes, other.wall_nodes))


def trap_weights(grid: SimGrid) -> np.ndarray:
    w = np.full(grid.n_nodes, grid.dx)
    w[0] = w[-1] = 0.5 * grid.dx
    return w


@dataclass
class FiniteState:
    """Full state Psi = (p, v, y, z) stored as characteristics plus wall DOFs."""

    grid: SimGrid
    wplus: np.ndarray
    wminus: np.ndarray
    y: np.ndarray
    z: np.ndarray
    medium: MediumParams
    t: float = 0.0

    def __post_init__(self):
        n = self.grid.n_nodes
        if len(self.wplus) != n or len(self.wminus) != n:
            raise ConfigurationError("field arrays must match grid size")
        if len(self.y) != len(self.grid.wall_nodes) or len(self.z) != len(self.y):
            raise ConfigurationError("wall arrays y, z must match the number of wall nodes")

    @property
    def p_avg(self) -> np.ndarray:
        return 0.5 * (self.wplus + self.wminus)

    @property
    def p_minus(self) -> np.ndarray:
        p = self.p_avg
        w = self.grid.wall_nodes
        if len(w):
            p[w] = self.wplus[w] - self.medium.a_rho0 * self.z
        return p

    @property
    def p_plus(self) -> np.ndarray:
        p = self.p_avg
        w = self.grid.wall_nodes
        if len(w):
            p[w] = self.wminus[w] + self.medium.a_rho0 * self.z
        return p

    @property
    def v(self) -> np.ndarray:
        v = (self.wplus - self.wminus) / (2.0 * self.medium.a_rho0)
        w = self.grid.wall_nodes
        if len(w):
            v[w] = self.z
        return v

    def copy(self) -> "FiniteState":
        return FiniteState(self.grid, self.wplus.copy(), self.wminus.copy(),
                           self.y.copy(), self.z.copy(), self.medium, self.t)

    @classmethod
    def from_pv(cls, grid: SimGrid, chain: OscillatorChain, medium: MediumParams,
                p0, v0, y=None, z=None, t: float = 0.0) -> "FiniteState":
        """Build a state from pressure/velocity samples or callables (y, z default 0)."""
        x = grid.x
        p = np.asarray(p0(x) if callable(p0) else p0, dtype=float) + np.zeros_like(x)
        v = np.asarray(v0(x) if callable(v0) else v0, dtype=float) + np.zeros_like(x)
        ar = medium.a_rho0
        y = np.zeros(chain.n) if y is None else np.asarray(y, dtype=float)
        z = np.zeros(chain.n) if z is None else np.asarray(z, dtype=float)
        return cls(grid, p + ar * v, p - ar * v, y, z, medium, t)


@dataclass
class FieldQuadruple:
    """A vector of the energy space: (p, v, y, z) with one-sided p at wall nodes.

    Unlike FiniteState this need not satisfy the domain condition v(s_j) = z_j;
    generator images live here.
    """

    grid: SimGrid
    p_minus: np.ndarray
    p_plus: np.ndarray
    v: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @property
    def p_avg(self) -> np.ndarray:
        return 0.5 * (self.p_minus + self.p_plus)

    @classmethod
    def from_state(cls, state: FiniteState) -> "FieldQuadruple":
        return cls(state.grid, state.p_minus, state.p_plus, state.v,
                   state.y.copy(), state.z.copy())


@dataclass(frozen=True)
class EnergyBreakdown:
    e_ac: float
    e_osc: float
    e_tot: float


@dataclass(frozen=True)
class JumpRegistry:
    """Per-wall pressure jumps sigma_j and velocity-derivative jumps zeta_j."""

    sigma: np.ndarray
    zeta: np.ndarray


def as_quadruple(obj) -> FieldQuadruple:
    if isinstance(obj, FieldQuadruple):
        return obj
    if isinstance(obj, FiniteState):
        return FieldQuadruple.from_state(obj)
    raise TypeError(f"expected FiniteState or FieldQuadruple, got {type(obj).__name__}")


def _check_pair(q1: FieldQuadruple, q2: FieldQuadruple, chain: OscillatorChain):
    if not q1.grid.same_layout(q2.grid):
        raise ConfigurationError("inner product requires identical grids")
    if len(q1.y) != chain.n or len(q2.y) != chain.n:
        raise ConfigurationError("wall block length does not match chain size")


def _field_quad(f1_minus, f1_plus, f2_minus, f2_plus, grid: SimGrid) -> float:
    """Broken-trapezoid <f1, f2>: wall nodes contribute the mean of one-sided products."""
    tw = trap_weights(grid)
    prod = f1_minus * f2_minus
    w = grid.wall_nodes
    if len(w):
        prod[w] = 0.5 * (f1_minus[w] * f2_minus[w] + f1_plus[w] * f2_plus[w])
    return float(np.dot(tw, prod))


def inner_product(obj1, obj2, medium: MediumParams, chain: OscillatorChain) -> float:
    """Energy-space scalar product <<Psi1, Psi2>> (real states)."""
    q1, q2 = as_quadruple(obj1), as_quadruple(obj2)
    _check_pair(q1, q2, chain)
    pp = _field_quad(q1.p_minus, q1.p_plus, q2.p_minus, q2.p_plus, q1.grid)
    vv = float(np.dot(trap_weights(q1.grid), q1.v * q2.v))
    osc = float(np.dot(chain.K, q1.y * q2.y) + np.dot(chain.M, q1.z * q2.z)) if chain.n else 0.0
    return pp / (medium.a ** 2 * medium.rho0) + medium.rho0 * vv + osc / medium.S


def norm(obj, medium: MediumParams, chain: OscillatorChain) -> float:
    return float(np.sqrt(max(inner_product(obj, obj, medium, chain), 0.0)))


def energy(obj, medium: MediumParams, chain: OscillatorChain) -> EnergyBreakdown:
    """Total energy split into acoustic and oscillator parts."""
    q = as_quadruple(obj)
    if len(q.y) != chain.n:
        raise ConfigurationError("wall block length does not match chain size")
    pp = _field_quad(q.p_minus, q.p_plus, q.p_minus, q.p_plus, q.grid)
    tw = trap_weights(q.grid)
    vv = float(np.dot(tw, q.v * q.v))
    e_ac = medium.S / (2.0 * medium.a ** 2 * medium.rho0) * pp + medium.S * medium.rho0 / 2.0 * vv
    e_osc = 0.5 * float(np.dot(chain.K, q.y * q.y) + np.dot(chain.M, q.z * q.z)) if chain.n else 0.0
    return EnergyBreakdown(e_ac, e_osc, e_ac + e_osc)


def regular_part(p: np.ndarray, sigma: np.ndarray, grid: SimGrid) -> np.ndarray:
    """p_reg(x) = p(x) - (1/2) sum_j sigma_j sgn(x - s_j), with sgn(0) = 0.

    Expects single-valued samples (average convention at wall nodes); the
    result is continuous across walls up to the input's own discretization.
    """
    w = grid.wall_nodes
    if len(w) != len(sigma):
        raise ConfigurationError("one sigma per wall required")
    out = np.array(p, dtype=float, copy=True)
    x = grid.x
    for sj, pos in zip(sigma, grid.wall_positions):
        out -= 0.5 * sj * np.sign(x - pos)
    return out


def centered_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Second-order first derivative: centered inside, one-sided at the ends."""
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return d


def one_sided_left(f: np.ndarray, i: int, dx: float) -> float:
    return (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * dx)


def one_sided_right(f: np.ndarray, i: int, dx: float) -> float:
    return (-3.0 * f[i] + 4.0 * f[i + 1] - f[i + 2]) / (2.0 * dx)


def extract_jumps(obj) -> JumpRegistry:
    """Read sigma_j from the stored one-sided p values and zeta_j from
    one-sided second-order differences of v at each wall node."""
    q = as_quadruple(obj)
    w = q.grid.wall_nodes
    dx = q.grid.dx
    sigma = q.p_plus[w] - q.p_minus[w] if len(w) else np.zeros(0)
    zeta = np.empty(len(w))
    for j, i in enumerate(w):
        zeta[j] = one_sided_right(q.v, i, dx) - one_sided_left(q.v, i, dx)
    return JumpRegistry(sigma, zeta)


def apply_generator(obj, medium: MediumParams, chain: OscillatorChain,
                    domain_tol: float = 1e-9) -> FieldQuadruple:
    """Discrete action of the evolution generator on a state.

    Image components: (-a^2 rho0 v_x, -(1/rho0) dp_reg/dx, z, -(K/M) y - (S/M) sigma).
    Differences are centered away from walls and one-sided (second order) at
    wall nodes and domain edges; the p-image is one-sided (double-valued) at
    walls since v_x may jump there.
    """
    q = as_quadruple(obj)
    grid = q.grid
    w = grid.wall_nodes
    dx = grid.dx
    if len(w) != chain.n:
        raise ConfigurationError("grid wall nodes do not match chain size")

    if chain.n:
        scale = max(float(np.max(np.abs(q.v))), float(np.max(np.abs(q.z))), 1e-300)
        residual = float(np.max(np.abs(q.v[w] - q.z))) / scale
        if residual > domain_tol:
            warnings.warn(f"domain condition v(s_j) = z_j violated: scaled residual {residual:.3e}",
                          stacklevel=2)

    dv = centered_derivative(q.v, dx)
    dv_minus = dv.copy()
    dv_plus = dv.copy()
    for i in w:
        dv_minus[i] = one_sided_left(q.v, i, dx)
        dv_plus[i] = one_sided_right(q.v, i, dx)
    coef = -medium.a ** 2 * medium.rho0
    p_img_minus = coef * dv_minus
    p_img_plus = coef * dv_plus

    sigma = q.p_plus[w] - q.p_minus[w] if len(w) else np.zeros(0)
    preg = regular_part(q.p_avg, sigma, grid)
    v_img = -centered_derivative(preg, dx) / medium.rho0

    y_img = q.z.copy()
    z_img = -(chain.K / chain.M) * q.y - (medium.S / chain.M) * sigma if chain.n else np.zeros(0)
    return FieldQuadruple(grid, p_img_minus, p_img_plus, v_img, y_img, z_img)


def static_solution(chain: OscillatorChain, medium: MediumParams, grid: SimGrid,
                    interior_levels) -> FiniteState:
    """Kernel element Psi_st = (p_st, 0, y_st, 0): piecewise-constant pressure with
    plateau P_k between walls k and k+1, zero outside [s_1, s_n], balanced by
    y_j = -S sigma_j / K_j."""
    n = chain.n
    levels = np.asarray(interior_levels, dtype=float)
    if len(levels) != max(n - 1, 0):
        raise ConfigurationError(f"expected {max(n - 1, 0)} interior plateaus for n = {n} walls")
    plateaus = np.concatenate([[0.0], levels, [0.0]]) if n else np.array([0.0])
    x = grid.x
    pos = grid.wall_positions
    region = np.searchsorted(pos, x, side="right")
    wp = plateaus[region]
    wm = plateaus[region]
    wnodes = grid.wall_nodes
    if n:
        wp = wp.copy()
        wm = wm.copy()
        wp[wnodes] = plateaus[:-1]   # left limit
        wm[wnodes] = plateaus[1:]    # right limit
    sigma = plateaus[1:] - plateaus[:-1] if n else np.zeros(0)
    y = -medium.S * sigma / chain.K if n else np.zeros(0)
    z = np.zeros(n)
    return FiniteState(grid, wp, wm, y, z, medium, 0.0)

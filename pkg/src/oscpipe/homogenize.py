"""Chain families realizing a density profile, assumption checks, and the
finite-vs-effective convergence study.

A chain of n walls discretizes the profile by splitting the confinement
interval into n equal cells: s_j at cell midpoints, M_j = S * integral of
rho_M over the cell, K_j likewise.  The Dirac measures sum_j M_j delta_{s_j}
then converge weakly to S rho_M dx by construction (midpoint-rule rate 1/n^2
against smooth test functions).

The study runs the finite simulator for each n and the limit equation once,
samples (v, v_t, v_x) on a fixed rectangle lattice, and reports three error
families: sup |v^(n) - v|, sup |v_t^(n) - v_t| over the rectangle, and the
max-over-time L2(x) error of v_x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .effective import (DensityProfile, coefficients, effective_initial_data,
                        cfl_limit, make_eff_grid, simulate_effective)
from .finite import build_grid, init_state, simulate, snapshot_fields
from .model import (ConfigurationError, MediumParams, OscillatorChain,
                    inner_product, norm, static_solution)

PLACEMENTS = ("midpoint", "quantile")


def _cell_integrals(f, edges: np.ndarray, sub: int = 128) -> np.ndarray:
    """Composite-Simpson integral of f over each [edges[i], edges[i+1]]."""
    n = len(edges) - 1
    h = np.diff(edges)
    offs = np.linspace(0.0, 1.0, sub + 1)
    wts = np.ones(sub + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    wts /= 3.0 * sub
    pts = edges[:-1, None] + h[:, None] * offs[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return (vals @ wts) * h


def discretize_densities(profile: DensityProfile, n: int, medium: MediumParams,
                         placement: str = "midpoint") -> OscillatorChain:
    """Build the n-wall chain whose mass/stiffness measures discretize the profile."""
    if n < 1:
        raise ConfigurationError("need n >= 1 walls")
    if placement not in PLACEMENTS:
        raise ConfigurationError(f"placement must be one of {PLACEMENTS}")
    lo, hi = profile.support
    edges = np.linspace(lo, hi, n + 1)
    if placement == "quantile":
        fine = np.linspace(lo, hi, max(64 * n, 1024) + 1)
        dens = profile.rho_m_at(fine)
        cumul = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(fine))])
        total = cumul[-1]
        if total <= 0:
            return OscillatorChain.empty(profile.L, profile.center)
        edges = np.interp(np.linspace(0.0, total, n + 1), cumul, fine)
        edges[0], edges[-1] = lo, hi
    M = medium.S * _cell_integrals(profile.rho_m_at, edges)
    K = medium.S * _cell_integrals(profile.rho_k_at, edges)
    tiny_m = 1e-300 + 1e-15 * float(np.max(M, initial=0.0))
    tiny_k = 1e-300 + 1e-15 * float(np.max(K, initial=0.0))
    if np.all(M <= tiny_m) and np.all(K <= tiny_k):
        return OscillatorChain.empty(profile.L, profile.center)
    bad = (M <= tiny_m) != (K <= tiny_k)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ConfigurationError(
            f"cell {j} has zero mass or zero stiffness but not both: "
            "the uniform-equivalence ratio bound cannot hold")
    s = 0.5 * (edges[:-1] + edges[1:])
    return OscillatorChain(s, M, K, profile.L, profile.center)


TEST_FUNCTIONS = (
    ("one", lambda x: np.ones_like(x)),
    ("x", lambda x: x),
    ("x2", lambda x: x ** 2),
    ("cos", lambda x: np.cos(2.0 * np.pi * x)),
    ("gauss", lambda x: np.exp(-(x ** 2) / 0.08)),
)


def verify_assumptions(chains, profile: DensityProfile, medium: MediumParams,
                       c1: float, c2: float) -> dict:
    """Check A1 (confinement), the A2 ratio bound c1 < L^2 K_j /(a^2 M_j) < c2,
    uniform total-mass bounds, and the weak-convergence spot battery."""
    lo, hi = profile.support
    fine = np.linspace(lo, hi, 4097)
    mass_m_ref = medium.S * float(np.trapezoid(profile.rho_m_at(fine), fine))
    mass_k_ref = medium.S * float(np.trapezoid(profile.rho_k_at(fine), fine))
    per_chain = []
    weak_m = {name: [] for name, _ in TEST_FUNCTIONS}
    weak_k = {name: [] for name, _ in TEST_FUNCTIONS}
    for chain in chains:
        L, a = chain.L, medium.a
        a1_ok = bool(chain.n == 0 or (
            chain.s[0] >= lo - 1e-12 * L and chain.s[-1] <= hi + 1e-12 * L))
        if chain.n:
            ratio = L ** 2 * chain.K / (a ** 2 * chain.M)
            rmin, rmax = float(np.min(ratio)), float(np.max(ratio))
        else:
            rmin = rmax = float("nan")
        a2_ok = bool(chain.n == 0 or (c1 < rmin and rmax < c2))
        per_chain.append({
            "n": chain.n, "a1_ok": a1_ok, "a2_ok": a2_ok,
            "ratio_min": rmin, "ratio_max": rmax,
            "total_M": float(np.sum(chain.M)), "total_K": float(np.sum(chain.K)),
        })
        for name, g in TEST_FUNCTIONS:
            ref_m = medium.S * float(np.trapezoid(profile.rho_m_at(fine) * g(fine), fine))
            ref_k = medium.S * float(np.trapezoid(profile.rho_k_at(fine) * g(fine), fine))
            gm = float(np.dot(chain.M, g(chain.s))) if chain.n else 0.0
            gk = float(np.dot(chain.K, g(chain.s))) if chain.n else 0.0
            weak_m[name].append(abs(gm - ref_m))
            weak_k[name].append(abs(gk - ref_k))
    mass_bound = max((c["total_M"] for c in per_chain), default=0.0)
    stiff_bound = max((c["total_K"] for c in per_chain), default=0.0)
    return {
        "per_chain": per_chain,
        "all_a1": all(c["a1_ok"] for c in per_chain),
        "all_a2": all(c["a2_ok"] for c in per_chain),
        "mass_bound": mass_bound,
        "stiffness_bound": stiff_bound,
        "mass_reference": mass_m_ref,
        "stiffness_reference": mass_k_ref,
        "mass_uniformly_bounded": bool(mass_bound <= mass_m_ref * (1 + 1e-6) + 1e-12),
        "weak_convergence_M": weak_m,
        "weak_convergence_K": weak_k,
    }


@dataclass(frozen=True)
class Rectangle:
    """Spacetime window R = [0, t_max] x [-x_half, x_half] (before any shift)."""

    t_max: float
    x_half: float


@dataclass(frozen=True)
class GridPolicy:
    points_per_length: int = 200    # minimum finite-grid nodes per unit length
    lattice_nt: int = 201
    lattice_nx: int = 201
    ref_refine: int = 4             # reference dx = finest finite dx / ref_refine
    richardson: bool = True         # extrapolate the reference from dx and 2 dx


@dataclass(frozen=True)
class ChainSequencePlan:
    profile: DensityProfile
    n_values: tuple
    medium: MediumParams
    placement: str = "midpoint"
    shift: float = 0.0

    def __post_init__(self):
        ns = tuple(int(v) for v in self.n_values)
        object.__setattr__(self, "n_values", ns)
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigurationError("n_values must be strictly increasing")


@dataclass
class ConvergenceReport:
    n_values: tuple
    errors: dict                    # family -> list of per-n errors
    ratios: dict                    # family -> adjacent e(n_{i+1})/e(n_i)
    overall_ratio: dict             # family -> e(n_last)/e(n_first)
    monotone: dict                  # family -> bool
    rectangle: Rectangle
    lattice: dict
    reference: dict
    runs: list
    static_orthogonality: float
    bound_margins: dict             # monitor -> max over runs of monitor/bound
    initial_vt_floor: float
    meta: dict = field(default_factory=dict)

    FAMILIES = ("sup_v", "sup_vt", "l2_vx")

    def passes(self, final_ratio: float = 0.2) -> dict:
        out = {}
        for fam in self.FAMILIES:
            out[fam] = bool(self.monotone[fam] and self.overall_ratio[fam] < final_ratio)
        return out


def _steps_per_lattice(lattice_dt: float, dt: float) -> int | None:
    spl = lattice_dt / dt
    return int(round(spl)) if abs(spl - round(spl)) < 1e-9 and round(spl) >= 1 else None


def _finite_dx(n: int, L: float, a: float, lattice_dt: float, ppl: int) -> float:
    """Finest admissible dx = L/(2 n k): walls on nodes, >= ppl nodes per L,
    and an integer number of steps per lattice interval."""
    k = max(1, math.ceil(ppl / (2 * n)))
    while k <= 4096:
        dx = L / (2 * n * k)
        if _steps_per_lattice(lattice_dt, dx / a) is not None:
            return dx
        k += 1
    raise ConfigurationError("no commensurate grid found: adjust lattice or t_max")


def _sample(xs: np.ndarray, rows: list, x_lat: np.ndarray) -> np.ndarray:
    return np.array([np.interp(x_lat, xs, r) for r in rows])


def _effective_fields(profile, pulse, medium, dx, t_lat, x_lat, pad: float):
    """One effective run snapshotted at the lattice times; (V, VT, VX) rows."""
    half = max(abs(x_lat[0]), abs(x_lat[-1]),
               abs(pulse.center) + pulse.support_radius(),
               abs(profile.center) + profile.L / 2) + medium.a * t_lat[-1] + pad
    grid = make_eff_grid(half, dx)
    coeffs = coefficients(profile, medium, grid)
    state0 = effective_initial_data(lambda x: pulse.p0(x, medium),
                                    lambda x: pulse.v0(x, medium), medium, grid,
                                    dp0=lambda x: pulse.dp0(x, medium))
    lattice_dt = t_lat[1] - t_lat[0]
    m = int(math.ceil(lattice_dt / cfl_limit(coeffs, medium)))
    traj = simulate_effective(state0, coeffs, medium, t_lat[-1],
                              dt=lattice_dt / m, snapshot_every=m)
    V = _sample(grid.x, traj.v_snaps, x_lat)
    VT = _sample(grid.x, traj.u_snaps, x_lat)
    vx_rows = [np.gradient(v, dx) for v in traj.v_snaps]
    VX = _sample(grid.x, vx_rows, x_lat)
    return V, VT, VX, {"dx": dx, "dt": traj.meta["dt"], "nodes": grid.n_nodes,
                       "energy_drift": float(np.max(np.abs(traj.e - traj.e[0]))
                                             / max(traj.e[0], 1e-300))}


def convergence_study(plan: ChainSequencePlan, pulse, rect: Rectangle,
                      policy: GridPolicy = GridPolicy(), jobs: int = 1) -> ConvergenceReport:
    """Run the full study and assemble the three error families.

    Per-n simulations are independent; jobs > 1 maps them over a thread pool
    (assembly order is fixed by n, so the report is deterministic either way).
    """
    medium = plan.medium
    delta = plan.shift
    profile = plan.profile.translated(delta) if delta else plan.profile
    pulse = replace(pulse, center=pulse.center + delta) if delta else pulse
    L = profile.L

    t_lat = np.linspace(0.0, rect.t_max, policy.lattice_nt)
    x_lat = np.linspace(-rect.x_half + delta, rect.x_half + delta, policy.lattice_nx)
    lattice_dt = t_lat[1] - t_lat[0]

    chains = [discretize_densities(profile, n, medium, plan.placement)
              for n in plan.n_values]

    def run_one(chain: OscillatorChain):
        dx = _finite_dx(max(chain.n, 1), L, medium.a, lattice_dt, policy.points_per_length)
        spl = _steps_per_lattice(lattice_dt, dx / medium.a)
        grid = build_grid(chain, medium, dx, rect.t_max,
                          data_radius=abs(pulse.center - delta) + pulse.support_radius(),
                          grid_center=delta)
        if chain.n and len(np.unique(grid.wall_nodes)) != chain.n:
            raise ConfigurationError(f"grid cannot host n = {chain.n} distinct wall nodes")
        state0 = init_state(lambda x: pulse.p0(x, medium),
                            lambda x: pulse.v0(x, medium), chain, medium, grid)
        orth = 0.0
        for kbasis in range(max(chain.n - 1, 0)):
            levels = np.zeros(chain.n - 1)
            levels[kbasis] = 1.0
            basis = static_solution(chain, medium, grid, levels)
            ip = abs(inner_product(state0, basis, medium, chain))
            orth = max(orth, ip / (norm(state0, medium, chain)
                                   * norm(basis, medium, chain)))
        traj = simulate(state0, chain, rect.t_max, snapshot_every=spl)
        V, VT, VX = [], [], []
        for st in traj.states:
            v, vt, vx = snapshot_fields(st)
            V.append(np.interp(x_lat, grid.x, v))
            VT.append(np.interp(x_lat, grid.x, vt))
            VX.append(np.interp(x_lat, grid.x, vx))
        margins_one = {name: float(np.max(series) / max(traj.bounds[name], 1e-300))
                       for name, series in traj.monitors.items()}
        run_meta = {"n": chain.n, "dx": dx, "dt": dx / medium.a,
                    "steps": traj.meta["n_steps"], "nodes": grid.n_nodes,
                    "snap_displacement": grid.snap_displacement,
                    "energy_drift": float(np.max(np.abs(traj.e_tot - traj.e_tot[0]))
                                          / max(traj.e_tot[0], 1e-300)),
                    "edge_touched": traj.meta["edge_touched"]}
        return (np.array(V), np.array(VT), np.array(VX)), run_meta, margins_one, orth

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, chains))
    else:
        results = [run_one(c) for c in chains]

    runs = []
    fields = []
    static_orth = 0.0
    margins = {}
    for f, run_meta, margins_one, orth in results:
        fields.append(f)
        runs.append(run_meta)
        static_orth = max(static_orth, orth)
        for name, val in margins_one.items():
            margins[name] = max(margins.get(name, 0.0), val)

    dx_ref = min(r["dx"] for r in runs) / policy.ref_refine
    Vr, VTr, VXr, ref_meta = _effective_fields(profile, pulse, medium, dx_ref,
                                               t_lat, x_lat, pad=4 * dx_ref)
    if policy.richardson:
        Vc, VTc, VXc, _ = _effective_fields(profile, pulse, medium, 2 * dx_ref,
                                            t_lat, x_lat, pad=8 * dx_ref)
        gaps = {"v": float(np.max(np.abs(Vr - Vc))) / 3.0,
                "vt": float(np.max(np.abs(VTr - VTc))) / 3.0,
                "vx": float(np.max(np.abs(VXr - VXc))) / 3.0}
        Vr, VTr, VXr = (4 * Vr - Vc) / 3, (4 * VTr - VTc) / 3, (4 * VXr - VXc) / 3
        ref_meta["richardson_gap"] = gaps
    ref_meta["richardson"] = policy.richardson

    lat_dx = x_lat[1] - x_lat[0]
    tw = np.full(policy.lattice_nx, lat_dx)
    tw[0] = tw[-1] = lat_dx / 2
    errors = {fam: [] for fam in ConvergenceReport.FAMILIES}
    vt_floor = 0.0
    for (V, VT, VX) in fields:
        errors["sup_v"].append(float(np.max(np.abs(V - Vr))))
        errors["sup_vt"].append(float(np.max(np.abs(VT - VTr))))
        dl2 = np.sqrt(((VX - VXr) ** 2 @ tw))
        errors["l2_vx"].append(float(np.max(dl2)))
        vt_floor = max(vt_floor, float(np.max(np.abs(VT[0] - VTr[0]))))

    ratios = {}
    overall = {}
    monotone = {}
    for fam, errs in errors.items():
        ratios[fam] = [errs[i + 1] / errs[i] if errs[i] > 0 else float("inf")
                       for i in range(len(errs) - 1)]
        overall[fam] = errs[-1] / errs[0] if errs[0] > 0 else float("inf")
        monotone[fam] = bool(all(b < a for a, b in zip(errs, errs[1:])))

    return ConvergenceReport(
        n_values=plan.n_values,
        errors=errors,
        ratios=ratios,
        overall_ratio=overall,
        monotone=monotone,
        rectangle=rect,
        lattice={"nt": policy.lattice_nt, "nx": policy.lattice_nx,
                 "dt": lattice_dt, "dx": lat_dx, "shift": delta},
        reference=ref_meta,
        runs=runs,
        static_orthogonality=static_orth,
        bound_margins=margins,
        initial_vt_floor=vt_floor,
        meta={"placement": plan.placement},
    )

"""Command-line entry point: experiment verbs over INI configs.

Verbs: simulate-finite, simulate-effective, converge, scatter, bandgap,
static-check (all driven by --config) and selftest (built-in battery).
Each run writes run_meta.json (resolved config, grid, versions, timing) plus
the experiment's data artifacts; data files are byte-deterministic for a
fixed config and seed.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BACKEND
from .config import EXPERIMENTS, RunConfig, parse_config, serialize_config
from .effective import (cfl_limit, coefficients, effective_initial_data,
                        make_eff_grid, simulate_effective)
from .finite import build_grid, init_state, simulate
from .homogenize import (ChainSequencePlan, GridPolicy, Rectangle, convergence_study,
                         discretize_densities, verify_assumptions)
from .model import ConfigurationError
from .scattering import (audit_static, bandgap_scan, reflect_transmit,
                         transmit_fraction_effective)
from .serialize import write_csv, write_json


def _resolve_chain(cfg: RunConfig, medium):
    if cfg.has("chain"):
        return cfg.chain()
    profile = cfg.profile()
    return discretize_densities(profile, cfg["profile"]["n"], medium)


def _finite_traj(cfg: RunConfig):
    medium = cfg.medium()
    chain = _resolve_chain(cfg, medium)
    pulse = cfg.pulse()
    g = cfg["grid"]
    x_extent = g["x_extent"] if g["x_extent"] > 0 else None
    grid = build_grid(chain, medium, g["dx"], g["t_max"],
                      data_radius=abs(pulse.center) + pulse.support_radius(),
                      x_extent=x_extent)
    state0 = init_state(lambda x: pulse.p0(x, medium),
                        lambda x: pulse.v0(x, medium), chain, medium, grid)
    snap = g["snapshot_every"] if g["snapshot_every"] > 0 else None
    traj = simulate(state0, chain, g["t_max"], snapshot_every=snap)
    return medium, chain, grid, traj


def _x_stride(n_nodes: int, cap: int) -> int:
    return max(1, int(math.ceil(n_nodes / max(cap, 16))))


def _write_finite_artifacts(out: Path, cfg: RunConfig, medium, chain, grid, traj):
    stride = _x_stride(grid.n_nodes, cfg["grid"]["csv_max_nodes"])
    xs = grid.x[::stride]
    t_col, x_col, v_col, pm_col, pp_col = [], [], [], [], []
    for ts, st in zip(traj.t_snap, traj.states):
        t_col.append(np.full(len(xs), ts))
        x_col.append(xs)
        v_col.append(st.v[::stride])
        pm_col.append(st.p_minus[::stride])
        pp_col.append(st.p_plus[::stride])
    write_csv(out / "trajectory.csv",
              ["t_s", "x_m", "v_m_per_s", "p_minus_Pa", "p_plus_Pa"],
              [np.concatenate(c) for c in (t_col, x_col, v_col, pm_col, pp_col)])
    if chain.n:
        t_col, j_col, s_col, y_col, z_col = [], [], [], [], []
        for ts, st in zip(traj.t_snap, traj.states):
            t_col.append(np.full(chain.n, ts))
            j_col.append(np.arange(chain.n))
            s_col.append(grid.wall_positions)
            y_col.append(st.y)
            z_col.append(st.z)
        write_csv(out / "walls.csv", ["t_s", "j", "s_j_m", "y_m", "z_m_per_s"],
                  [np.concatenate(c) for c in (t_col, j_col, s_col, y_col, z_col)])
    write_csv(out / "energy.csv", ["t_s", "e_ac_J", "e_osc_J", "e_tot_J"],
              [traj.t_all, traj.e_ac, traj.e_osc, traj.e_tot])
    e0 = max(traj.e_tot[0], 1e-300)
    report = {
        "schema_version": 1,
        "experiment": cfg.experiment,
        "energy_drift_rel": float(np.max(np.abs(traj.e_tot - traj.e_tot[0])) / e0),
        "interface_residual_max": float(np.max(traj.residual)),
        "edge_touched": traj.meta["edge_touched"],
        "bound_monitors": {name: {"max": float(np.max(series)),
                                  "bound": traj.bounds[name],
                                  "margin": float(np.max(series) / max(traj.bounds[name], 1e-300))}
                           for name, series in traj.monitors.items()},
    }
    write_json(out / "report.json", report)
    return report


def _run_simulate_finite(cfg: RunConfig, out: Path, jobs: int) -> dict:
    medium, chain, grid, traj = _finite_traj(cfg)
    rep = _write_finite_artifacts(out, cfg, medium, chain, grid, traj)
    return {"grid": {"dx": grid.dx, "dt": grid.dt, "nodes": grid.n_nodes,
                     "snap_displacement": grid.snap_displacement},
            "energy_drift_rel": rep["energy_drift_rel"]}


def _run_simulate_effective(cfg: RunConfig, out: Path, jobs: int) -> dict:
    medium = cfg.medium()
    profile = cfg.profile()
    pulse = cfg.pulse()
    g = cfg["grid"]
    if g["x_extent"] > 0:
        half = g["x_extent"]
    else:
        half = (max(abs(pulse.center) + pulse.support_radius(),
                    abs(profile.center) + profile.L / 2)
                + medium.a * g["t_max"] + 4 * g["dx"])
    grid = make_eff_grid(half, g["dx"])
    coeffs = coefficients(profile, medium, grid)
    state0 = effective_initial_data(lambda x: pulse.p0(x, medium),
                                    lambda x: pulse.v0(x, medium), medium, grid,
                                    dp0=lambda x: pulse.dp0(x, medium))
    snap = g["snapshot_every"] if g["snapshot_every"] > 0 else None
    traj = simulate_effective(state0, coeffs, medium, g["t_max"], snapshot_every=snap)
    stride = _x_stride(grid.n_nodes, g["csv_max_nodes"])
    xs = grid.x[::stride]
    t_col, x_col, v_col, u_col = [], [], [], []
    for ts, v, u in zip(traj.t_snap, traj.v_snaps, traj.u_snaps):
        t_col.append(np.full(len(xs), ts))
        x_col.append(xs)
        v_col.append(v[::stride])
        u_col.append(u[::stride])
    write_csv(out / "trajectory.csv", ["t_s", "x_m", "v_m_per_s", "vdot_m_per_s2"],
              [np.concatenate(c) for c in (t_col, x_col, v_col, u_col)])
    write_csv(out / "energy.csv", ["t_s", "e_eff"], [traj.t_all, traj.e])
    drift = float(np.max(np.abs(traj.e - traj.e[0])) / max(traj.e[0], 1e-300))
    write_json(out / "report.json",
               {"schema_version": 1, "experiment": cfg.experiment,
                "energy_drift_rel": drift, "dt": traj.meta["dt"],
                "cfl_limit": cfl_limit(coeffs, medium)})
    return {"grid": {"dx": grid.dx, "nodes": grid.n_nodes}, "energy_drift_rel": drift}


def _run_converge(cfg: RunConfig, out: Path, jobs: int) -> dict:
    medium = cfg.medium()
    profile = cfg.profile()
    pulse = cfg.pulse()
    c = cfg["converge"]
    plan = ChainSequencePlan(profile=profile, n_values=c["n_values"], medium=medium,
                             shift=c["shift"])
    policy = GridPolicy(points_per_length=c["points_per_length"],
                        lattice_nt=c["lattice_nt"], lattice_nx=c["lattice_nx"],
                        ref_refine=c["ref_refine"], richardson=c["richardson"])
    rect = Rectangle(c["t_max"], c["x_half"])
    rep = convergence_study(plan, pulse, rect, policy, jobs=jobs)
    chains = [discretize_densities(profile, n, medium) for n in plan.n_values]
    assumptions = verify_assumptions(chains, profile, medium, c1=1e-6, c2=1e6)
    table_cols = [list(rep.n_values)]
    headers = ["n"]
    for fam in rep.FAMILIES:
        headers.append(f"err_{fam}")
        table_cols.append(rep.errors[fam])
    headers += ["dx", "energy_drift_rel"]
    table_cols.append([r["dx"] for r in rep.runs])
    table_cols.append([r["energy_drift"] for r in rep.runs])
    write_csv(out / "errors.csv", headers, table_cols)
    report = {
        "schema_version": 1,
        "experiment": "converge",
        "n_values": list(rep.n_values),
        "errors": rep.errors,
        "ratios": rep.ratios,
        "overall_ratio": rep.overall_ratio,
        "monotone": rep.monotone,
        "passes": rep.passes(),
        "rectangle": {"t_max": rect.t_max, "x_half": rect.x_half},
        "lattice": rep.lattice,
        "reference": rep.reference,
        "runs": rep.runs,
        "static_orthogonality": rep.static_orthogonality,
        "bound_margins": rep.bound_margins,
        "initial_vt_floor": rep.initial_vt_floor,
        "assumptions": {"all_a1": assumptions["all_a1"], "all_a2": assumptions["all_a2"],
                        "mass_bound": assumptions["mass_bound"],
                        "stiffness_bound": assumptions["stiffness_bound"]},
    }
    write_json(out / "report.json", report)
    return {"passes": rep.passes(), "errors": rep.errors}


def _run_scatter(cfg: RunConfig, out: Path, jobs: int) -> dict:
    medium, chain, grid, traj = _finite_traj(cfg)
    s = cfg.sections.get("scatter", {"probe_pad_frac": 0.1, "x_left": 0.0, "x_right": 0.0})
    x_left = s["x_left"] if s["x_left"] != 0.0 else None
    x_right = s["x_right"] if s["x_right"] != 0.0 else None
    res = reflect_transmit(traj, medium, chain=chain, x_left=x_left, x_right=x_right,
                           probe_pad_frac=s["probe_pad_frac"])
    _write_finite_artifacts(out, cfg, medium, chain, grid, traj)
    report = {
        "schema_version": 1,
        "experiment": "scatter",
        "incident_J": res.incident,
        "reflected_J": res.reflected,
        "transmitted_J": res.transmitted,
        "stored_J": res.stored,
        "fractions": res.fractions,
        "closure": res.closure,
        "warn_unsettled": res.warn_unsettled,
    }
    write_json(out / "scatter.json", report)
    return {"fractions": res.fractions}


def _run_bandgap(cfg: RunConfig, out: Path, jobs: int) -> dict:
    medium = cfg.medium()
    profile = cfg.profile()
    b = cfg["bandgap"]
    omegas = np.linspace(b["omega_min"], b["omega_max"], b["count"])
    omegas = omegas[omegas > 0]
    width = b["width"] if b["width"] > 0 else None
    scan = bandgap_scan(profile, omegas, medium, width=width)
    write_csv(out / "bandgap.csv", ["omega_rad_per_s", "T2", "R2"],
              [scan["omega"], scan["T2"], scan["R2"]])
    report = {
        "schema_version": 1,
        "experiment": "bandgap",
        "omega_c": scan["omega_c"],
        "w_in": scan["w_in"],
        "q_in": scan["q_in"],
        "width": scan["width"],
    }
    if b["time_domain"]:
        om0 = 0.5 * scan["omega_c"]
        td = transmit_fraction_effective(profile, medium, om0,
                                         rel_bandwidth=b["rel_bandwidth"])
        report["time_domain"] = {"omega0": om0, "fraction": td["fraction"],
                                 "oracle_T2": td["oracle_T2"]}
    write_json(out / "report.json", report)
    return {"omega_c": scan["omega_c"]}


def _run_static_check(cfg: RunConfig, out: Path, jobs: int) -> dict:
    medium = cfg.medium()
    st = cfg["static"]
    rng = np.random.default_rng(cfg.seed)
    results = []
    for n in st["n_values"]:
        if cfg.has("chain"):
            chain = cfg.chain()
        else:
            chain = discretize_densities(cfg.profile(), n, medium)
        dx = chain.L / max(200, 4 * n)
        grid = build_grid(chain, medium, dx, st["t_horizon"],
                          data_radius=chain.L)
        rep = audit_static(chain, medium, grid, st["t_horizon"], rng=rng,
                           draws=st["draws"])
        results.append(rep)
        if cfg.has("chain"):
            break
    report = {"schema_version": 1, "experiment": "static-check", "audits": results}
    write_json(out / "report.json", report)
    return {"max_kernel_residual": max(r["max_kernel_residual"] for r in results)}


_RUNNERS = {
    "simulate-finite": _run_simulate_finite,
    "simulate-effective": _run_simulate_effective,
    "converge": _run_converge,
    "scatter": _run_scatter,
    "bandgap": _run_bandgap,
    "static-check": _run_static_check,
}


def run(cfg: RunConfig, out_dir: str, jobs: int = 1) -> dict:
    """Execute the configured experiment; on failure remove partial outputs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    before = set(out.iterdir())
    t0 = time.perf_counter()
    try:
        summary = _RUNNERS[cfg.experiment](cfg, out, jobs)
    except Exception:
        for p in set(out.iterdir()) - before:
            if p.is_file():
                p.unlink()
        raise
    meta = {
        "schema_version": 1,
        "experiment": cfg.experiment,
        "resolved_config": serialize_config(cfg),
        "seed": cfg.seed,
        "versions": {"oscpipe": __version__, "numpy": np.__version__,
                     "python": sys.version.split()[0], "backend": BACKEND},
        "wall_clock_s": time.perf_counter() - t0,
        "summary": summary,
    }
    write_json(out / "run_meta.json", meta)
    return summary


def selftest(verbose: bool = True) -> int:
    """Fast built-in invariant battery; returns a process exit code."""
    import numpy as np
    from .model import (MediumParams, OscillatorChain, apply_generator,
                        norm, static_solution)
    from .effective import slab_transfer
    from .finite import build_grid as bg, init_state as istate, simulate as sim
    from .pulses import GaussianPulse

    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        print(line)
        failures += 0 if ok else 1

    med = MediumParams(1.0, 1.0, 1.0)
    rng = np.random.default_rng(0)

    worst = 0.0
    for _ in range(200):
        om = rng.uniform(0.01, 20)
        r, t = slab_transfer(om, rng.uniform(1, 4), rng.uniform(0, 20),
                             rng.uniform(0.2, 3), med)
        worst = max(worst, abs(abs(r) ** 2 + abs(t) ** 2 - 1))
    check("slab transfer unitarity (200 draws)", worst < 1e-12, f"max dev {worst:.2e}")

    chain = OscillatorChain(np.array([-0.2, 0.3]), np.array([1.0, 0.5]),
                            np.array([2.0, 1.0]), 1.0)
    grid = bg(chain, med, 1 / 400, 1.0, data_radius=1.0)
    psi = static_solution(chain, med, grid, [2.5])
    kern = norm(apply_generator(psi, med, chain), med, chain) / norm(psi, med, chain)
    check("static solution in generator kernel", kern <= 1e-12, f"residual {kern:.2e}")

    pulse = GaussianPulse(center=-1.5, width=0.125, link="right")
    grid = bg(chain, med, 1 / 500, 4.0, data_radius=1.5 + pulse.support_radius())
    st = istate(lambda x: pulse.p0(x, med), lambda x: pulse.v0(x, med), chain, med, grid)
    traj = sim(st, chain, 4.0, record_monitors=True)
    drift = float(np.max(np.abs(traj.e_tot - traj.e_tot[0])) / traj.e_tot[0])
    check("finite energy drift over T=4 L/a", drift <= 1e-5, f"drift {drift:.2e}")
    check("interface residual structural", float(np.max(traj.residual)) == 0.0)
    ok = all(float(np.max(s)) <= traj.bounds[n] * (1 + 1e-3)
             for n, s in traj.monitors.items())
    check("a-priori bound monitors", ok)

    empty = OscillatorChain.empty(1.0)
    grid = bg(empty, med, 1 / 200, 1.0, data_radius=1.5)
    st = istate(lambda x: pulse.p0(x, med), lambda x: pulse.v0(x, med), empty, med, grid)
    traj = sim(st, empty, 1.0, record_monitors=False)
    k = traj.meta["n_steps"]
    exact = np.max(np.abs(traj.states[-1].wplus[k:] - st.wplus[:-k])) == 0.0
    check("free-field transport exact", exact)

    print(f"{6 - failures}/6 checks passed")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oscpipe",
        description="1D acoustics coupled to an oscillator chain: simulators, "
                    "homogenized limit, convergence and scattering studies.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in EXPERIMENTS:
        p = sub.add_parser(verb, help=f"run the {verb} experiment")
        p.add_argument("--config", required=True, help="path to the INI config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel sub-runs")
        p.add_argument("--permissive", action="store_true",
                       help="downgrade unknown config keys to warnings")
    sub.add_parser("selftest", help="run the built-in invariant battery")

    args = parser.parse_args(argv)
    if args.verb == "selftest":
        return selftest()
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text, permissive=args.permissive)
        if cfg.experiment != args.verb:
            raise ConfigurationError(
                f"config sets run.experiment = {cfg.experiment}, "
                f"but the {args.verb} verb was invoked")
        run(cfg, args.out, jobs=args.jobs)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:   # noqa: BLE001 - surface runtime failures as exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Shared settings: L = a = rho0 = S = 1, constant densities rho_M = rho0 and
rho_K = rho0 a^2/L^2 (the study battery), Gaussian right-mover from the left.
Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import math

import numpy as np
import pytest

from oscpipe.effective import DensityProfile, slab_transfer
from oscpipe.finite import build_grid, init_state, simulate
from oscpipe.homogenize import (ChainSequencePlan, GridPolicy, Rectangle,
                                convergence_study, discretize_densities)
from oscpipe.model import (MediumParams, OscillatorChain, apply_generator,
                           inner_product, norm)
from oscpipe.pulses import GaussianPulse
from oscpipe.scattering import audit_static, transmit_fraction_effective

from conftest import make_grid, random_domain_state

MED = MediumParams(1.0, 1.0, 1.0)
L = 1.0
PROFILE = DensityProfile.constant(1.0, 1.0, L)        # rho_M = rho0, rho_K = rho0 a^2/L^2
PULSE = GaussianPulse(center=-1.5, width=L / 8, link="right")


def announce(name: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"{name}: {detail}"


def battery_run(n: int, dx: float, t_max: float = 10.0):
    chain = discretize_densities(PROFILE, n, MED)
    grid = build_grid(chain, MED, dx, t_max,
                      data_radius=1.5 + PULSE.support_radius())
    state0 = init_state(lambda x: PULSE.p0(x, MED), lambda x: PULSE.v0(x, MED),
                        chain, MED, grid)
    return simulate(state0, chain, t_max, record_monitors=False)


@pytest.fixture(scope="module")
def battery():
    return {n: battery_run(n, L / 2000) for n in (1, 10, 100)}


@pytest.fixture(scope="module")
def study():
    plan = ChainSequencePlan(profile=PROFILE, n_values=(25, 50, 100, 200, 400),
                             medium=MED)
    return convergence_study(plan, PULSE, Rectangle(3.0 * L, L), GridPolicy())


def test_energy_conservation(battery):
    """Relative drift <= 1e-6 over T = 10 L/a at dt = L/(2000 a); >= 3x shrink at dt/2."""
    drifts = {n: float(np.max(np.abs(t.e_tot - t.e_tot[0])) / t.e_tot[0])
              for n, t in battery.items()}
    half = battery_run(10, L / 4000)
    drift_half = float(np.max(np.abs(half.e_tot - half.e_tot[0])) / half.e_tot[0])
    shrink = drifts[10] / drift_half
    ok = all(d <= 1e-6 for d in drifts.values()) and shrink >= 3.0
    announce("energy-conservation", ok,
             f"drifts n=1/10/100: {drifts[1]:.2e}/{drifts[10]:.2e}/{drifts[100]:.2e} "
             f"(<= 1e-6), dt/2 shrink {shrink:.2f}x (>= 3)")


def test_skew_symmetry():
    """|<<Psi1, A Psi2>> + <<A Psi1, Psi2>>| <= C dx^2 ||Psi1|| ||Psi2|| over 100
    random domain-compatible pairs; fitted C stable within +-20% under refinement."""
    walls = [-0.3, 0.05, 0.4]
    chain = OscillatorChain(np.array(walls), np.array([1.0, 0.7, 1.4]),
                            np.array([2.0, 1.0, 0.6]), L)
    cs = []
    for dx in (0.005, 0.0025):
        grid = make_grid(-2.0, dx, int(round(4.0 / dx)) + 1,
                         wall_positions=walls, a=MED.a)
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(100):
            s1 = random_domain_state(rng, grid, chain, MED)
            s2 = random_domain_state(rng, grid, chain, MED)
            skew = (inner_product(s1, apply_generator(s2, MED, chain), MED, chain)
                    + inner_product(apply_generator(s1, MED, chain), s2, MED, chain))
            worst = max(worst, abs(skew)
                        / (norm(s1, MED, chain) * norm(s2, MED, chain) * dx ** 2))
        cs.append(worst)
    ratio = cs[1] / cs[0]
    ok = 0.8 <= ratio <= 1.2
    announce("skew-symmetry", ok,
             f"C = {cs[0]:.4f} (dx) vs {cs[1]:.4f} (dx/2): ratio {ratio:.3f} in [0.8, 1.2]")


def test_static_solutions():
    """For n = 2, 5, 20: every static basis vector has ||A Psi_st|| <= 1e-12
    (scaled) and evolves invariantly to 1e-12 over T = L/a."""
    worst_kernel = worst_dev = 0.0
    for n in (2, 5, 20):
        chain = discretize_densities(PROFILE, n, MED)
        grid = build_grid(chain, MED, L / max(400, 4 * n), t_max=L / MED.a,
                          data_radius=L)
        rep = audit_static(chain, MED, grid, t_horizon=L / MED.a)
        assert rep["basis_dim"] == n - 1
        worst_kernel = max(worst_kernel, rep["max_kernel_residual"])
        worst_dev = max(worst_dev, rep["max_evolution_deviation"])
    ok = worst_kernel <= 1e-12 and worst_dev <= 1e-12
    announce("static-solutions", ok,
             f"max scaled ||A Psi_st|| = {worst_kernel:.2e}, "
             f"max evolution deviation = {worst_dev:.2e} (<= 1e-12)")


def test_interface_condition(battery):
    """max_t max_j |v(s_j, t) - z_j(t)| <= 1e-12 in every run (structural)."""
    worst = 0.0
    for traj in battery.values():
        worst = max(worst, float(np.max(traj.residual)))
        for st in traj.states:
            w = st.grid.wall_nodes
            if len(w):
                worst = max(worst, float(np.max(np.abs(st.v[w] - st.z))))
    ok = worst <= 1e-12
    announce("interface-condition", ok, f"max residual {worst:.2e} (<= 1e-12)")


def test_homogenization_convergence(study):
    """All three error families strictly decrease over n = 25..400 and
    e(400)/e(25) < 0.2 for each."""
    ok = True
    details = []
    for fam in study.FAMILIES:
        passes = study.monotone[fam] and study.overall_ratio[fam] < 0.2
        ok = ok and passes
        details.append(f"{fam}: {'+' if passes else 'x'} overall "
                       f"{study.overall_ratio[fam]:.4f}")
    announce("homogenization-convergence", ok,
             "; ".join(details) + f"; errors sup_v = "
             + ", ".join(f"{e:.3e}" for e in study.errors["sup_v"]))


def test_oracle_equivalence():
    """Narrowband transmitted energy vs |T(omega0)|^2 within 5% below, at 1.5x,
    and at 3x the cutoff; transfer matrix unitary to 1e-12 on 1000 draws."""
    om_c = 1.6
    prof = DensityProfile.constant(1.0, om_c ** 2 * 2.0, L)
    devs = []
    for om0, bw in ((0.5 * om_c, 0.08), (1.5 * om_c, 0.05), (3.0 * om_c, 0.05)):
        res = transmit_fraction_effective(prof, MED, om0, rel_bandwidth=bw)
        devs.append(abs(res["fraction"] - res["oracle_T2"]) / res["oracle_T2"])
    rng = np.random.default_rng(2024)
    worst_u = 0.0
    for _ in range(1000):
        r, t = slab_transfer(rng.uniform(0.01, 20.0), rng.uniform(1.0, 5.0),
                             rng.uniform(0.0, 25.0), rng.uniform(0.1, 4.0), MED)
        worst_u = max(worst_u, abs(abs(r) ** 2 + abs(t) ** 2 - 1.0))
    ok = all(d <= 0.05 for d in devs) and worst_u <= 1e-12
    announce("oracle-equivalence", ok,
             f"carrier deviations {[f'{d:.2%}' for d in devs]} (<= 5%), "
             f"unitarity max dev {worst_u:.2e} (<= 1e-12 over 1000 draws)")


def test_bandgap_width_scaling():
    """At omega = omega_c/2, doubling the slab width doubles -log|T| within 1%
    (deep-gap oracle) and cuts the time-domain transmitted energy >= 10x."""
    om_c = 1.6
    w_in, q_in = 2.0, om_c ** 2 * 2.0
    om = om_c / 2
    kappa = math.sqrt(q_in - w_in * om ** 2) / MED.a
    width = 60.0 / kappa
    logs = []
    for wd in (width, 2 * width):
        _, t = slab_transfer(om, w_in, q_in, wd, MED)
        logs.append(-math.log(abs(t)))
    oracle_dev = abs(logs[1] - 2 * logs[0]) / logs[1]

    prof1 = DensityProfile.constant(1.0, q_in, L)
    prof2 = DensityProfile.constant(1.0, q_in, 2 * L)
    f1 = transmit_fraction_effective(prof1, MED, om, rel_bandwidth=0.1,
                                     points_per_length=64)
    f2 = transmit_fraction_effective(prof2, MED, om, rel_bandwidth=0.1,
                                     points_per_length=64)
    suppression = f1["fraction"] / max(f2["fraction"], 1e-300)
    ok = oracle_dev <= 0.01 and suppression >= 10.0
    announce("bandgap-width-scaling", ok,
             f"-log|T| doubling deviation {oracle_dev:.3%} (<= 1%), "
             f"time-domain suppression {suppression:.1f}x (>= 10x)")


def test_apriori_bounds(study):
    """Monitored discrete norms stay below the initial-data constants x(1+1e-3)
    over the convergence-study battery."""
    worst = max(study.bound_margins.values())
    ok = worst <= 1.0 + 1e-3
    announce("apriori-bounds", ok,
             f"worst monitor/bound margin {worst:.4f} (<= 1.001) over "
             f"{list(study.bound_margins)}")


def test_free_field_exactness():
    """No-oscillator transport reproduces rigid translation to <= 1e-13 sup
    over 2000 steps."""
    chain = OscillatorChain.empty(L)
    dx = 1 / 500
    grid = build_grid(chain, MED, dx, t_max=2000 * dx, data_radius=2.0)
    state0 = init_state(lambda x: PULSE.p0(x, MED), lambda x: PULSE.v0(x, MED),
                        chain, MED, grid)
    traj = simulate(state0, chain, t_max=2000 * dx, snapshot_every=2000,
                    record_monitors=False)
    last = traj.states[-1]
    err = float(np.max(np.abs(last.wplus[2000:] - state0.wplus[:-2000])))
    err = max(err, float(np.max(np.abs(last.wminus))))
    ok = err <= 1e-13
    announce("free-field-exactness", ok, f"sup error {err:.2e} (<= 1e-13) after 2000 steps")

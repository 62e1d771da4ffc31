"""Density discretization, assumption verification, and the convergence study."""

import numpy as np
import pytest

from oscpipe.effective import DensityProfile
from oscpipe.homogenize import (ChainSequencePlan, ConfigurationError, GridPolicy,
                                Rectangle, convergence_study, discretize_densities,
                                verify_assumptions)
from oscpipe.model import MediumParams
from oscpipe.pulses import GaussianPulse


def unit():
    return MediumParams(1.0, 1.0, 1.0)


STUDY_PULSE = GaussianPulse(center=-1.5, width=0.125, link="right")


class TestDiscretize:
    def test_uniform_four_cells(self):
        prof = DensityProfile.constant(1.0, 0.0, 1.0)
        with pytest.raises(ConfigurationError):
            discretize_densities(prof, 4, unit())   # mass without stiffness

    def test_uniform_mass_and_stiffness(self):
        prof = DensityProfile.constant(1.0, 1.0, 1.0)
        chain = discretize_densities(prof, 4, unit())
        assert np.allclose(chain.s, [-0.375, -0.125, 0.125, 0.375], atol=1e-15)
        assert np.allclose(chain.M, 0.25, atol=1e-15)
        assert np.allclose(chain.K, 0.25, atol=1e-15)
        ratio = chain.L ** 2 * chain.K / (1.0 ** 2 * chain.M)
        assert np.allclose(ratio, 1.0, atol=1e-15)

    def test_linear_density_exact_integrals(self):
        prof = DensityProfile(lambda x: 1.0 + x, lambda x: 1.0 + 0 * np.asarray(x), 1.0)
        chain = discretize_densities(prof, 2, unit())
        assert np.allclose(chain.M, [0.375, 0.625], atol=1e-12)

    def test_mass_conservation(self):
        prof = DensityProfile(lambda x: 1.0 + 0.3 * np.cos(5 * np.asarray(x)),
                              lambda x: 0.5 + 0.2 * np.sin(3 * np.asarray(x)) ** 2, 1.0)
        fine = np.linspace(-0.5, 0.5, 400001)
        ref_m = np.trapezoid(prof.rho_m_at(fine), fine)
        ref_k = np.trapezoid(prof.rho_k_at(fine), fine)
        for n in (7, 25, 80):
            chain = discretize_densities(prof, n, unit())
            assert abs(np.sum(chain.M) - ref_m) < 1e-10
            assert abs(np.sum(chain.K) - ref_k) < 1e-10

    def test_empty_profile(self):
        prof = DensityProfile.constant(0.0, 0.0, 1.0)
        chain = discretize_densities(prof, 8, unit())
        assert chain.n == 0

    def test_quantile_matches_midpoint_for_constant(self):
        prof = DensityProfile.constant(2.0, 2.0, 1.0)
        c1 = discretize_densities(prof, 6, unit(), placement="midpoint")
        c2 = discretize_densities(prof, 6, unit(), placement="quantile")
        assert np.allclose(c1.s, c2.s, atol=1e-9)
        assert np.allclose(c1.M, c2.M, atol=1e-9)


class TestVerifyAssumptions:
    def test_constant_density_chains(self):
        prof = DensityProfile.constant(1.0, 1.0, 1.0)
        med = unit()
        chains = [discretize_densities(prof, n, med) for n in (4, 8, 16, 32)]
        rep = verify_assumptions(chains, prof, med, c1=0.5, c2=2.0)
        assert rep["all_a1"] and rep["all_a2"]
        assert rep["mass_uniformly_bounded"]
        # weak-convergence error O(1/n^2): halves by >= ~3x per doubling
        for fam in ("weak_convergence_M", "weak_convergence_K"):
            for name, errs in rep[fam].items():
                nonzero = [e for e in errs if e > 1e-14]
                for a, b in zip(nonzero, nonzero[1:]):
                    assert b <= 0.3 * a, (fam, name, errs)

    def test_odd_moment_vanishes_by_symmetry(self):
        prof = DensityProfile.constant(1.0, 1.0, 1.0)
        med = unit()
        chain = discretize_densities(prof, 9, med)
        assert abs(np.dot(chain.M, chain.s)) < 1e-15

    def test_ratio_violation_flagged(self):
        med = unit()
        from oscpipe.model import OscillatorChain
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1e-9]), 1.0)
        prof = DensityProfile.constant(1.0, 1.0, 1.0)
        rep = verify_assumptions([chain], prof, med, c1=0.5, c2=2.0)
        assert not rep["all_a2"]


class TestConvergenceStudy:
    def make_plan(self, shift=0.0, n_values=(8, 16, 32)):
        prof = DensityProfile.constant(1.0, 1.0, 1.0)
        return ChainSequencePlan(profile=prof, n_values=n_values, medium=unit(),
                                 shift=shift)

    def test_empty_profile_reduces_to_free_wave(self):
        # every chain is empty, so v^(n) is the same free field for all n and
        # the residual error is the reference solver's own floor
        prof = DensityProfile.constant(0.0, 0.0, 1.0)
        plan = ChainSequencePlan(profile=prof, n_values=(2, 4), medium=unit())
        policy = GridPolicy(points_per_length=100, lattice_nt=41, lattice_nx=81,
                            ref_refine=2, richardson=True)
        rep = convergence_study(plan, STUDY_PULSE, Rectangle(1.5, 1.0), policy)
        for fam in ConvergenceReport_FAMILIES():
            errs = rep.errors[fam]
            assert abs(errs[0] - errs[1]) <= 1e-12 * max(errs[0], 1e-300), fam
        assert max(rep.errors["sup_v"]) < 1e-4
        assert max(rep.errors["sup_vt"]) < 1e-3 * 4.85   # vs max |p0'|/rho0

    def test_errors_decrease(self):
        policy = GridPolicy(points_per_length=100, lattice_nt=51, lattice_nx=101,
                            ref_refine=4, richardson=True)
        rep = convergence_study(self.make_plan(), STUDY_PULSE, Rectangle(2.0, 1.0), policy)
        for fam in ConvergenceReport_FAMILIES():
            errs = rep.errors[fam]
            assert all(b < a for a, b in zip(errs, errs[1:])), (fam, errs)
        assert rep.static_orthogonality <= 1e-12
        # v_t at t = 0 agrees with -(1/rho0) p0' on both sides up to differencing
        assert rep.initial_vt_floor <= 1e-3 * max(rep.errors["sup_vt"])

    def test_translation_invariance(self):
        policy = GridPolicy(points_per_length=64, lattice_nt=33, lattice_nx=65,
                            ref_refine=2, richardson=False)
        rect = Rectangle(1.5, 1.0)
        rep0 = convergence_study(self.make_plan(0.0, (4, 8)), STUDY_PULSE, rect, policy)
        rep1 = convergence_study(self.make_plan(0.25, (4, 8)), STUDY_PULSE, rect, policy)
        for fam in ConvergenceReport_FAMILIES():
            for a, b in zip(rep0.errors[fam], rep1.errors[fam]):
                assert abs(a - b) <= 1e-12 * max(a, 1e-300), fam


def ConvergenceReport_FAMILIES():
    from oscpipe.homogenize import ConvergenceReport
    return ConvergenceReport.FAMILIES

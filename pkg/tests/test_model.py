"""Energy algebra, jumps/regular parts, the discrete generator, static states."""

import numpy as np
import pytest

from oscpipe.model import (ConfigurationError, FiniteState, MediumParams,
                           OscillatorChain, apply_generator, energy, extract_jumps,
                           inner_product, norm, regular_part, static_solution)

from conftest import make_grid, random_domain_state, state_from_sided


def empty_chain(L=1.0):
    return OscillatorChain.empty(L)


class TestEnergy:
    def test_zero_state(self, unit_medium):
        grid = make_grid(-2.0, 0.01, 401)
        chain = empty_chain()
        st = FiniteState.from_pv(grid, chain, unit_medium, lambda x: 0 * x, lambda x: 0 * x)
        e = energy(st, unit_medium, chain)
        assert e.e_ac == 0.0 and e.e_osc == 0.0 and e.e_tot == 0.0

    def test_constant_pressure_slab(self):
        # p = 1 Pa on [0, 1], v = 0, no oscillators, rho0 = a = 1, S = 2 -> e_ac = 1 J
        med = MediumParams(1.0, 1.0, 2.0)
        grid = make_grid(0.0, 1.0 / 200, 201)
        chain = empty_chain()
        st = FiniteState.from_pv(grid, chain, med, lambda x: np.ones_like(x), lambda x: 0 * x)
        e = energy(st, med, chain)
        assert abs(e.e_ac - 1.0) < 1e-14
        assert e.e_osc == 0.0

    def test_single_oscillator(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([3.0]), 1.0)
        st = FiniteState(grid, np.zeros(201), np.zeros(201),
                         np.array([2.0]), np.array([0.0]), unit_medium)
        e = energy(st, unit_medium, chain)
        assert e.e_ac == 0.0
        assert abs(e.e_osc - 6.0) < 1e-14   # K y^2 / 2
        assert e.e_tot == e.e_ac + e.e_osc

    def test_mismatched_chain_rejected(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201)
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1.0]), 1.0)
        st = FiniteState.from_pv(grid, empty_chain(), unit_medium,
                                 lambda x: 0 * x, lambda x: 0 * x)
        with pytest.raises(ConfigurationError):
            energy(st, unit_medium, chain)


class TestInnerProduct:
    def test_wall_displacement_block(self):
        med = MediumParams(1.0, 1.0, 2.0)
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([3.0]), 1.0)
        st = FiniteState(grid, np.zeros(201), np.zeros(201),
                         np.array([2.0]), np.array([0.0]), med)
        assert abs(inner_product(st, st, med, chain) - 6.0) < 1e-14

    def test_disjoint_supports_orthogonal(self, unit_medium):
        grid = make_grid(-2.0, 0.01, 401)
        chain = empty_chain()
        p1 = lambda x: np.exp(-((x + 1) ** 2) / 0.01) * (x < 0)
        p2 = lambda x: np.exp(-((x - 1) ** 2) / 0.01) * (x > 0)
        s1 = FiniteState.from_pv(grid, chain, unit_medium, p1, lambda x: 0 * x)
        s2 = FiniteState.from_pv(grid, chain, unit_medium, p2, lambda x: 0 * x)
        assert abs(inner_product(s1, s2, unit_medium, chain)) < 1e-30

    def test_scattering_data_orthogonal_to_static(self, unit_medium):
        grid = make_grid(-2.0, 0.005, 801, wall_positions=[-0.25, 0.25])
        chain = OscillatorChain(np.array([-0.25, 0.25]), np.ones(2), np.ones(2), 1.0)
        psi_st = static_solution(chain, unit_medium, grid, [3.0])
        pulse = lambda x: np.exp(-((x + 1.2) ** 2) / (2 * 0.01))
        scat = FiniteState.from_pv(grid, chain, unit_medium, pulse,
                                   lambda x: pulse(x) / unit_medium.a_rho0)
        ip = inner_product(scat, psi_st, unit_medium, chain)
        scale = norm(scat, unit_medium, chain) * norm(psi_st, unit_medium, chain)
        assert abs(ip) <= 1e-12 * scale

    def test_polarization_identity(self, medium):
        rng = np.random.default_rng(7)
        grid = make_grid(-2.0, 0.005, 801, wall_positions=[-0.3, 0.0, 0.4], a=medium.a)
        chain = OscillatorChain(np.array([-0.3, 0.0, 0.4]),
                                rng.uniform(0.5, 2, 3), rng.uniform(0.5, 2, 3), 1.0)
        st = random_domain_state(rng, grid, chain, medium)
        e = energy(st, medium, chain)
        ip = inner_product(st, st, medium, chain)
        assert ip >= 0
        assert abs(ip - 2.0 * e.e_tot / medium.S) <= 1e-14 * ip
        assert e.e_tot == e.e_ac + e.e_osc   # additivity, fixed summation order


class TestRegularPart:
    def test_no_walls_identity(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201)
        p = np.sin(grid.x)
        out = regular_part(p, np.zeros(0), grid)
        assert np.array_equal(out, p)

    def test_sign_cancellation(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        p = np.sign(grid.x)
        out = regular_part(p, np.array([2.0]), grid)
        assert np.max(np.abs(out)) == 0.0

    def test_superposition(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[-0.25, 0.5])
        x = grid.x
        p = np.sign(x + 0.25) + 3.0 * np.sign(x - 0.5)
        out = regular_part(p, np.array([2.0, 6.0]), grid)
        assert np.max(np.abs(out)) == 0.0

    def test_roundtrip(self, unit_medium):
        rng = np.random.default_rng(3)
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[-0.25, 0.5])
        p = rng.standard_normal(201)
        sig = np.array([0.7, -1.3])
        preg = regular_part(p, sig, grid)
        back = preg.copy()
        for sj, pos in zip(sig, grid.wall_positions):
            back += 0.5 * sj * np.sign(grid.x - pos)
        assert np.max(np.abs(back - p)) < 1e-15


class TestExtractJumps:
    def test_continuous_pressure(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1.0]), 1.0)
        st = FiniteState.from_pv(grid, chain, unit_medium,
                                 lambda x: np.cos(x), lambda x: 0 * x)
        jumps = extract_jumps(st)
        assert abs(jumps.sigma[0]) == 0.0

    def test_one_sided_values(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1.0]), 1.0)
        n = grid.n_nodes
        pm = np.full(n, 1.0)
        pp = np.full(n, 1.0)
        m = grid.wall_nodes[0]
        pm[m], pp[m] = 1.0, 3.0
        st = state_from_sided(grid, chain, unit_medium, pm, pp,
                              np.zeros(n), np.zeros(1), np.zeros(1))
        assert abs(extract_jumps(st).sigma[0] - 2.0) < 1e-14

    def test_kink_in_velocity(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.25])
        chain = OscillatorChain(np.array([0.25]), np.array([1.0]), np.array([1.0]), 1.0)
        v = np.abs(grid.x - 0.25)
        st = state_from_sided(grid, chain, unit_medium, np.zeros(201), np.zeros(201),
                              v, np.zeros(1), np.zeros(1))
        assert abs(extract_jumps(st).zeta[0] - 2.0) < 1e-12


class TestGenerator:
    def test_static_is_kernel(self, unit_medium):
        grid = make_grid(-1.5, 0.005, 601, wall_positions=[-0.3, 0.1, 0.35])
        chain = OscillatorChain(np.array([-0.3, 0.1, 0.35]),
                                np.array([1.0, 2.0, 0.5]), np.array([2.0, 1.0, 3.0]), 1.0)
        psi = static_solution(chain, unit_medium, grid, [4.0, -2.5])
        img = apply_generator(psi, unit_medium, chain)
        assert norm(img, unit_medium, chain) <= 1e-12 * norm(psi, unit_medium, chain)

    def test_pressure_image_is_velocity_gradient(self, unit_medium):
        # Psi = (0, v, 0, 0) with v smooth and zero near walls: p-image = -a^2 rho0 v'
        grid = make_grid(-2.0, 0.002, 2001, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1.0]), 1.0)
        v = lambda x: np.exp(-((x + 1.2) ** 2) / (2 * 0.01))
        st = FiniteState.from_pv(grid, chain, unit_medium, lambda x: 0 * x, v)
        img = apply_generator(st, unit_medium, chain)
        x = grid.x
        exact = -(-(x + 1.2) / 0.01) * v(x)
        assert np.max(np.abs(img.p_minus - exact)) < 5e-4 * np.max(np.abs(exact))
        assert np.max(np.abs(img.y - 0.0)) == 0.0

    def test_domain_violation_warns_but_computes(self, unit_medium):
        # a FiniteState cannot violate v(s_j) = z_j (the reconstruction enforces
        # it), but a raw quadruple can
        from oscpipe.model import FieldQuadruple
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1.0]), 1.0)
        n = grid.n_nodes
        v = np.exp(-(grid.x ** 2) / 0.02)
        quad = FieldQuadruple(grid, np.zeros(n), np.zeros(n), v,
                              np.zeros(1), np.array([5.0]))
        with pytest.warns(UserWarning, match="domain condition"):
            img = apply_generator(quad, unit_medium, chain)
        assert np.all(np.isfinite(img.v))

    def test_skew_symmetry(self, medium):
        walls = [-0.3, 0.05, 0.4]
        chain = OscillatorChain(np.array(walls), np.array([1.0, 0.7, 1.4]),
                                np.array([2.0, 1.0, 0.6]), 1.0)
        cs = {}
        for dx in (0.005, 0.0025):
            grid = make_grid(-2.0, dx, int(round(4.0 / dx)) + 1, wall_positions=walls,
                             a=medium.a)
            rng = np.random.default_rng(42)
            worst = 0.0
            for _ in range(20):
                s1 = random_domain_state(rng, grid, chain, medium)
                s2 = random_domain_state(rng, grid, chain, medium)
                a1 = apply_generator(s1, medium, chain)
                a2 = apply_generator(s2, medium, chain)
                skew = (inner_product(s1, a2, medium, chain)
                        + inner_product(a1, s2, medium, chain))
                scaled = abs(skew) / (norm(s1, medium, chain) * norm(s2, medium, chain))
                worst = max(worst, scaled / dx ** 2)
            cs[dx] = worst
        # O(dx^2): the fitted constant is grid-stable
        assert 0.5 < cs[0.0025] / cs[0.005] < 2.0


class TestStaticSolution:
    def test_single_wall_only_zero(self, unit_medium):
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[0.0])
        chain = OscillatorChain(np.array([0.0]), np.array([1.0]), np.array([1.0]), 1.0)
        psi = static_solution(chain, unit_medium, grid, [])
        assert norm(psi, unit_medium, chain) == 0.0

    def test_two_wall_plateau(self):
        med = MediumParams(1.0, 1.0, 1.0)
        grid = make_grid(-1.0, 0.01, 201, wall_positions=[-0.25, 0.25])
        chain = OscillatorChain(np.array([-0.25, 0.25]), np.ones(2), np.ones(2), 1.0)
        psi = static_solution(chain, med, grid, [5.0])
        jumps = extract_jumps(psi)
        assert np.allclose(jumps.sigma, [5.0, -5.0], atol=1e-14)
        assert np.allclose(psi.y, [-5.0, 5.0], atol=1e-14)
        # support inside [s_1, s_n]
        out = np.abs(grid.x) > 0.25
        assert np.max(np.abs(psi.p_avg[out])) == 0.0

    def test_kernel_at_machine_level(self, medium):
        rng = np.random.default_rng(11)
        walls = np.sort(rng.uniform(-0.45, 0.45, 5))
        chain = OscillatorChain(walls, rng.uniform(0.5, 2, 5), rng.uniform(0.5, 2, 5), 1.0)
        grid = make_grid(-1.0, 0.001, 2001,
                         wall_positions=np.round(walls / 0.001) * 0.001, a=medium.a)
        chain = OscillatorChain(grid.wall_positions, chain.M, chain.K, 1.0)
        psi = static_solution(chain, medium, grid, rng.uniform(-3, 3, 4))
        img = apply_generator(psi, medium, chain)
        assert norm(img, medium, chain) <= 1e-12 * norm(psi, medium, chain)

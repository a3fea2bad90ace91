import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasecrystal.model import (Configuration, ModelParams, bond_stretches,
                                classical_hamiltonian, particle_energy,
                                particle_energy_formula, potential_energy,
                                potential_formula)


def params(n=4, dq=1.0, kappa=1.0, lam=1.0, beta=2.0):
    return ModelParams(n_particles=n, lattice_spacing=dq, kappa=kappa,
                       lambda_nn=lam, beta=beta)


class TestModelParams:
    @pytest.mark.parametrize("kwargs", [
        dict(n=0), dict(dq=0.0), dict(dq=-1.0), dict(kappa=-0.1),
        dict(lam=-0.1), dict(kappa=0.0, lam=0.0), dict(beta=0.0),
        dict(beta=-2.0),
    ])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            params(**kwargs)

    def test_si_round_trip_is_identity(self):
        p = params()
        for e in (0.01, 1.0, 37.2):
            assert p.energy_from_si(p.energy_to_si(e)) == pytest.approx(
                e, rel=1e-12)
        for q in (0.3, 5.0):
            assert p.length_from_si(p.length_to_si(q)) == pytest.approx(
                q, rel=1e-12)

    def test_energy_scale_neon_value(self):
        # m*omega_LJ*r_e^2/hbar for the neon constants
        assert params().energy_scale == pytest.approx(102.07, rel=1e-3)

    def test_lattice_positions(self):
        p = params(n=3, dq=0.5)
        assert np.allclose(p.lattice, [0.5, 1.0, 1.5])


class TestPotential:
    def test_lattice_is_minimum(self):
        p = params()
        c = Configuration(displacements=np.zeros(4))
        assert potential_energy(p, c) == 0.0

    def test_two_particle_example(self):
        # kappa=lambda=1, d=(0.1,-0.1): on-site 0.01, springs 0.03
        u = potential_formula(np.array([0.1, -0.1]), 1.0, 1.0)
        assert u == pytest.approx(0.04, rel=1e-12)

    def test_uniform_shift_stretches_wall_springs_only(self):
        c = 0.37
        u = potential_formula(np.full(4, c), 0.0, 1.0)
        assert u == pytest.approx(1.0 * c * c, rel=1e-12)

    def test_bond_stretches_includes_walls(self):
        x = bond_stretches(np.array([1.0, 3.0]))
        assert np.allclose(x, [1.0, 2.0, -3.0])

    @given(st.lists(st.floats(-2, 2), min_size=1, max_size=8))
    def test_nonnegative_and_quadratic_scaling(self, d):
        d = np.asarray(d)
        u = potential_formula(d, 0.8, 1.3)
        assert u >= 0.0
        assert potential_formula(2.0 * d, 0.8, 1.3) == pytest.approx(
            4.0 * u, rel=1e-12, abs=1e-12)

    @given(st.lists(st.floats(-2, 2), min_size=2, max_size=8))
    def test_mirror_symmetry(self, d):
        d = np.asarray(d)
        assert potential_formula(d[::-1], 0.8, 1.3) == pytest.approx(
            potential_formula(d, 0.8, 1.3), rel=1e-12, abs=1e-12)


class TestParticleEnergy:
    def test_end_particle_split(self):
        # N=2, kappa=0, lambda=1, d=(1,0): shared interior spring
        d = np.array([1.0, 0.0])
        u1 = particle_energy_formula(d, 0.0, 1.0)
        assert u1[0] == pytest.approx(0.75)
        assert u1[1] == pytest.approx(0.25)
        assert u1.sum() == pytest.approx(potential_formula(d, 0.0, 1.0))

    def test_partition_sums_to_potential(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            d = rng.normal(0, 1, size=rng.integers(1, 9))
            tot = particle_energy_formula(d, 0.6, 1.1).sum()
            assert tot == pytest.approx(potential_formula(d, 0.6, 1.1),
                                        rel=1e-12, abs=1e-12)

    def test_index_one_based_and_checked(self):
        p = params()
        c = Configuration(displacements=np.array([0.1, 0.0, 0.0, -0.1]))
        assert particle_energy(p, c, 1) > 0.0
        with pytest.raises(IndexError):
            particle_energy(p, c, 0)
        with pytest.raises(IndexError):
            particle_energy(p, c, 5)


class TestHamiltonian:
    def test_zero_momenta_reduce_to_potential(self):
        p = params()
        c = Configuration(displacements=np.array([0.2, 0.0, -0.1, 0.0]))
        assert classical_hamiltonian(p, c, np.zeros(4)) == pytest.approx(
            potential_energy(p, c))

    def test_kinetic_term(self):
        p = params()
        c = Configuration(displacements=np.zeros(4))
        g = np.full(4, 0.5)
        assert classical_hamiltonian(p, c, g) == pytest.approx(4 * 0.125)

    def test_momentum_length_checked(self):
        p = params()
        c = Configuration(displacements=np.zeros(4))
        with pytest.raises(ValueError):
            classical_hamiltonian(p, c, np.zeros(3))


class TestConfiguration:
    def test_positions_round_trip(self):
        p = params(n=3, dq=2.0)
        c = Configuration.from_positions(p, np.array([2.1, 3.9, 6.0]))
        assert np.allclose(c.displacements, [0.1, -0.1, 0.0])
        assert np.allclose(c.positions(p), [2.1, 3.9, 6.0])

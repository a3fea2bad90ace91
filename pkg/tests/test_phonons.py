import itertools

import numpy as np
import pytest

from phasecrystal.model import ModelParams
from phasecrystal.phonons import (EnumerationLimitError, enumerate_levels,
                                  exact_density_unsymmetrized,
                                  exact_energy_closed, force_matrix,
                                  normal_modes, position_variances,
                                  truncated_energy)


def params(n=4, kappa=1.0, lam=1.0, dq=1.0, beta=1.0):
    return ModelParams(n_particles=n, lattice_spacing=dq, kappa=kappa,
                       lambda_nn=lam, beta=beta)


class TestNormalModes:
    def test_closed_forms_match_diagonalization(self):
        p = params(n=7, kappa=0.4, lam=1.7)
        spec = normal_modes(p)
        evals = np.linalg.eigvalsh(force_matrix(p))
        assert np.allclose(np.sort(spec.stiffness), evals, rtol=1e-10)
        n = np.arange(1, 8)
        mu = 0.4 + 2 * 1.7 * (1 - np.cos(n * np.pi / 8))
        assert np.allclose(np.sort(spec.stiffness), np.sort(mu), rtol=1e-12)

    def test_eigenvectors_orthonormal(self):
        spec = normal_modes(params(n=6, kappa=0.0, lam=0.9))
        x = spec.eigenvectors
        assert np.allclose(x.T @ x, np.eye(6), atol=1e-10)

    def test_eigenvectors_diagonalize_force_matrix(self):
        p = params(n=5, kappa=0.3, lam=1.1)
        spec = normal_modes(p)
        f = force_matrix(p)
        d = spec.eigenvectors.T @ f @ spec.eigenvectors
        assert np.allclose(d, np.diag(spec.stiffness), atol=1e-10)

    def test_frequencies_ascending_positive(self):
        spec = normal_modes(params(n=5, kappa=0.0, lam=0.02))
        assert np.all(np.diff(spec.frequencies) >= 0)
        assert np.all(spec.frequencies > 0)

    @pytest.mark.parametrize("kappa,lam,e1", [
        (1.0, 1.0, 3.385),     # both springs on
        (0.0, 0.02, 0.3757),   # weak coupling
        (0.0, 1.0, 2.6569),    # nearest-neighbour only
    ])
    def test_ground_state_energies(self, kappa, lam, e1):
        spec = normal_modes(params(kappa=kappa, lam=lam))
        assert spec.ground_state_energy == pytest.approx(e1, abs=5e-4)


class TestClosedFormEnergy:
    def test_low_temperature_limit_is_ground_state(self):
        p = params(beta=200.0)
        spec = normal_modes(p)
        assert exact_energy_closed(p) == pytest.approx(
            spec.ground_state_energy, rel=1e-10)

    def test_high_temperature_approaches_classical_from_above(self):
        prev_gap = None
        for beta in (0.2, 0.1, 0.05):
            p = params(beta=beta)
            gap = exact_energy_closed(p) - p.n_particles / beta
            assert gap > 0.0
            if prev_gap is not None:
                assert gap < prev_gap
            prev_gap = gap


class TestLevelEnumeration:
    def test_single_level_is_ground_state(self):
        p = params()
        spec = enumerate_levels(p, 1)
        assert spec.energies.shape == (1,)
        assert spec.energies[0] == pytest.approx(
            normal_modes(p).ground_state_energy)

    def test_matches_exhaustive_grid_for_two_particles(self):
        p = params(n=2, kappa=0.3, lam=0.9)
        w = normal_modes(p).frequencies
        grid = sorted(w @ (np.array(occ) + 0.5)
                      for occ in itertools.product(range(40), repeat=2))
        spec = enumerate_levels(p, 100)
        assert np.allclose(spec.energies, grid[:100], rtol=1e-12)

    def test_sorted_and_duplicate_free_occupations(self):
        spec = enumerate_levels(params(), 500)
        assert np.all(np.diff(spec.energies) >= -1e-12)
        occs = {tuple(o) for o in spec.occupations}
        assert len(occs) == 500

    def test_resource_cap_is_loud(self):
        with pytest.raises(EnumerationLimitError):
            enumerate_levels(params(), 10000, max_heap=100)

    def test_l_max_validated(self):
        with pytest.raises(ValueError):
            enumerate_levels(params(), 0)

    def test_truncated_converges_to_closed_form(self):
        p = params(beta=2.0)
        exact = exact_energy_closed(p)
        errs = [abs(truncated_energy(enumerate_levels(p, l), 2.0) - exact)
                for l in (50, 500, 5000)]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3


class TestDensity:
    def test_variances_match_mode_sum(self):
        p = params(n=3, kappa=0.5, lam=1.0, beta=2.0)
        spec = normal_modes(p)
        s2 = p.energy_scale
        var = np.zeros(3)
        for n in range(3):
            w = spec.frequencies[n]
            var += (spec.eigenvectors[:, n] ** 2
                    / np.tanh(2.0 * w / 2) / (2 * s2 * w))
        assert np.allclose(position_variances(p, 2.0), var, rtol=1e-12)

    def test_profile_integrates_to_particle_count(self):
        p = params(kappa=0.0, lam=0.02, beta=2.0)
        grid = np.linspace(-3.0, 8.0, 2201)
        rho = exact_density_unsymmetrized(p, 2.0, grid)
        assert np.trapezoid(rho, grid) == pytest.approx(4.0, abs=1e-6)

    def test_spill_over_beyond_walls(self):
        # wall positions are q=0 and q=(N+1)*dq; density leaks past both
        p = params(kappa=0.0, lam=0.02, beta=2.0)
        assert exact_density_unsymmetrized(p, 2.0, np.array([-0.2]))[0] > 1e-6
        assert exact_density_unsymmetrized(p, 2.0, np.array([5.2]))[0] > 1e-6

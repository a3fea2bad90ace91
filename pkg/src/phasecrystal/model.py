"""One-dimensional harmonic crystal: parameters, configurations, energies.

Reduced units throughout: lengths in units of the equilibrium separation
r_e, spring constants in m*omega_LJ**2, energies in hbar*omega_LJ, and the
inverse temperature as the dimensionless combination beta*hbar*omega_LJ.
The SI constants (neon values) enter the reduced formulas only through the
dimensionless scale ``energy_scale = m*omega_LJ*r_e**2/hbar``.

Momenta, where they appear, are reduced by sqrt(m*hbar*omega_LJ).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

# Neon Lennard-Jones constants.
NEON_MASS_KG = 3.35e-26
NEON_OMEGA_LJ_HZ = 3.28e12
NEON_EPSILON_J = 4.93e-22
NEON_RE_M = 3.13e-10
HBAR_J_S = 1.054571817e-34


@dataclass(frozen=True)
class ModelParams:
    """Crystal parameters in reduced units plus the underlying SI constants.

    kappa is the on-site spring constant, lambda_nn the nearest-neighbour
    spring constant (both in m*omega_LJ**2); lattice_spacing is in r_e and
    beta is beta*hbar*omega_LJ.
    """

    n_particles: int
    lattice_spacing: float
    kappa: float
    lambda_nn: float
    beta: float
    mass: float = NEON_MASS_KG
    omega_lj: float = NEON_OMEGA_LJ_HZ
    hbar: float = HBAR_J_S
    r_e: float = NEON_RE_M

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.lattice_spacing <= 0:
            raise ValueError("lattice_spacing must be positive")
        if self.kappa < 0 or self.lambda_nn < 0:
            raise ValueError("spring constants must be non-negative")
        if self.kappa == 0 and self.lambda_nn == 0:
            raise ValueError("kappa and lambda_nn cannot both vanish")
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    @property
    def energy_scale(self) -> float:
        """m*omega_LJ*r_e**2/hbar: spring-formula energy units per hbar*omega_LJ."""
        return self.mass * self.omega_lj * self.r_e**2 / self.hbar

    @property
    def length_scale(self) -> float:
        """sqrt(energy_scale); converts r_e displacements to oscillator units."""
        return float(np.sqrt(self.energy_scale))

    @property
    def lattice(self) -> np.ndarray:
        """Lattice positions j*Delta_q for j = 1..N, in r_e."""
        return self.lattice_spacing * np.arange(1, self.n_particles + 1)

    @property
    def beta_si(self) -> float:
        return self.beta / (self.hbar * self.omega_lj)

    def energy_to_si(self, e: float) -> float:
        return e * self.hbar * self.omega_lj

    def energy_from_si(self, e_j: float) -> float:
        return e_j / (self.hbar * self.omega_lj)

    def length_to_si(self, x: float) -> float:
        return x * self.r_e

    def length_from_si(self, x_m: float) -> float:
        return x_m / self.r_e

    def with_beta(self, beta: float) -> "ModelParams":
        return replace(self, beta=beta)


@dataclass
class Configuration:
    """Particle displacements from the lattice for one Monte Carlo state.

    Walls are boundary data (d_0 = d_{N+1} = 0), never stored.  Positions
    are unconstrained: particles may pass the walls or each other; the
    potential penalises it, nothing forbids it.
    """

    displacements: np.ndarray

    def __post_init__(self):
        self.displacements = np.asarray(self.displacements, dtype=float)
        if self.displacements.ndim != 1:
            raise ValueError("displacements must be a 1-D array")

    @classmethod
    def from_positions(cls, params: ModelParams, positions) -> "Configuration":
        positions = np.asarray(positions, dtype=float)
        if positions.shape != (params.n_particles,):
            raise ValueError("positions must have length n_particles")
        return cls(positions - params.lattice)

    def positions(self, params: ModelParams) -> np.ndarray:
        return params.lattice + self.displacements


def bond_stretches(d: np.ndarray) -> np.ndarray:
    """All N+1 spring stretches d_{j+1} - d_j including both wall bonds.

    d may be batched with the particle index last.
    """
    d = np.asarray(d, dtype=float)
    zero = np.zeros(d.shape[:-1] + (1,))
    padded = np.concatenate([zero, d, zero], axis=-1)
    return np.diff(padded, axis=-1)


def potential_formula(d: np.ndarray, kappa: float, lambda_nn: float) -> np.ndarray:
    """Potential in spring units (m*omega_LJ**2*r_e**2); batched over leading axes."""
    d = np.asarray(d, dtype=float)
    onsite = 0.5 * kappa * np.sum(d * d, axis=-1)
    stretch = bond_stretches(d)
    return onsite + 0.5 * lambda_nn * np.sum(stretch * stretch, axis=-1)


def particle_energy_formula(d: np.ndarray, kappa: float, lambda_nn: float) -> np.ndarray:
    """Per-particle energy split U_j (spring units), summing back to the total.

    The interior springs are shared half-half between their two particles;
    wall springs belong entirely to the end particles, which the extra
    (lambda/4) d^2 end terms account for.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[-1]
    zero = np.zeros(d.shape[:-1] + (1,))
    left = np.concatenate([zero, d[..., :-1]], axis=-1)
    right = np.concatenate([d[..., 1:], zero], axis=-1)
    u = 0.5 * kappa * d * d
    u = u + 0.25 * lambda_nn * ((d - right) ** 2 + (d - left) ** 2)
    end = np.zeros(n)
    end[0] += 1.0
    end[-1] += 1.0
    u = u + 0.25 * lambda_nn * end * d * d
    return u


def potential_energy(params: ModelParams, config: Configuration) -> float:
    """Total potential energy in hbar*omega_LJ."""
    return float(params.energy_scale * potential_formula(
        config.displacements, params.kappa, params.lambda_nn))


def particle_energy(params: ModelParams, config: Configuration, j: int) -> float:
    """Energy assigned to particle j (1-based), in hbar*omega_LJ."""
    if not 1 <= j <= params.n_particles:
        raise IndexError(f"particle index {j} out of range 1..{params.n_particles}")
    u = particle_energy_formula(config.displacements, params.kappa, params.lambda_nn)
    return float(params.energy_scale * u[j - 1])


def classical_hamiltonian(params: ModelParams, config: Configuration,
                          momenta) -> float:
    """Kinetic plus potential energy, in hbar*omega_LJ.

    momenta are reduced: g = p/sqrt(m*hbar*omega_LJ), so the kinetic
    energy is sum(g**2)/2.
    """
    momenta = np.asarray(momenta, dtype=float)
    if momenta.shape != (params.n_particles,):
        raise ValueError("momenta must have length n_particles")
    return float(0.5 * np.sum(momenta**2)) + potential_energy(params, config)

"""Exact phonon benchmark for the harmonic chain.

Normal modes of the tridiagonal force matrix have closed forms:
stiffness eigenvalues mu_n = kappa + 2*lambda*(1 - cos(n*pi/(N+1))) and
sine eigenvectors.  From these come the exact canonical energy (closed
form and truncated level enumeration) and the unsymmetrized density
profile, all in reduced units.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .model import ModelParams


class DegenerateModelError(ValueError):
    """No restoring force: kappa = lambda = 0."""


class EnumerationLimitError(RuntimeError):
    """Level enumeration exceeded its resource cap."""


@dataclass(frozen=True)
class PhononSpectrum:
    """Normal modes: frequencies (omega_LJ units), stiffness eigenvalues
    (m*omega_LJ**2) and the orthonormal eigenvector matrix X[j, n]."""

    frequencies: np.ndarray
    eigenvectors: np.ndarray
    stiffness: np.ndarray

    @property
    def ground_state_energy(self) -> float:
        """E_1 = sum hbar*omega_n/2, in hbar*omega_LJ."""
        return float(0.5 * np.sum(self.frequencies))


@dataclass(frozen=True)
class TruncatedSpectrum:
    """The l_max lowest product-state energies with their occupations."""

    energies: np.ndarray
    occupations: np.ndarray

    @property
    def ground_state_energy(self) -> float:
        return float(self.energies[0])


def force_matrix(params: ModelParams) -> np.ndarray:
    """Tridiagonal stiffness matrix in m*omega_LJ**2 units."""
    n = params.n_particles
    m = np.zeros((n, n))
    np.fill_diagonal(m, params.kappa + 2.0 * params.lambda_nn)
    idx = np.arange(n - 1)
    m[idx, idx + 1] = -params.lambda_nn
    m[idx + 1, idx] = -params.lambda_nn
    return m


def normal_modes(params: ModelParams) -> PhononSpectrum:
    if params.kappa == 0 and params.lambda_nn == 0:
        raise DegenerateModelError("no restoring force (kappa = lambda = 0)")
    n = params.n_particles
    modes = np.arange(1, n + 1)
    theta = modes * np.pi / (n + 1)
    mu = params.kappa + 2.0 * params.lambda_nn * (1.0 - np.cos(theta))
    j = np.arange(1, n + 1)[:, None]
    x = np.sqrt(2.0 / (n + 1)) * np.sin(j * theta[None, :])
    order = np.argsort(mu, kind="stable")
    mu = mu[order]
    x = x[:, order]
    return PhononSpectrum(frequencies=np.sqrt(mu), eigenvectors=x, stiffness=mu)


def exact_energy_closed(params: ModelParams, beta: float | None = None) -> float:
    """Canonical energy sum_n omega_n*(1/2 + 1/(exp(beta*omega_n)-1))."""
    b = params.beta if beta is None else beta
    w = normal_modes(params).frequencies
    return float(np.sum(w * (0.5 + 1.0 / np.expm1(b * w))))


def enumerate_levels(params: ModelParams, l_max: int,
                     max_heap: int = 5_000_000) -> TruncatedSpectrum:
    """Best-first enumeration of the l_max lowest product-state energies.

    States are occupation vectors n in N^N with E = E_1 + sum n_k*omega_k.
    Each state is generated exactly once by only allowing increments at
    positions >= the last incremented one; ties in energy are broken by
    lexicographic occupation order so the output is reproducible.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    spec = normal_modes(params)
    w = spec.frequencies
    n = len(w)
    e1 = spec.ground_state_energy
    start = (0,) * n
    # heap entries: (excess energy, occupation, lowest position allowed to grow)
    heap = [(0.0, start, 0)]
    energies = []
    occs = []
    while heap and len(energies) < l_max:
        if len(heap) > max_heap:
            raise EnumerationLimitError(
                f"heap exceeded {max_heap} entries at level {len(energies)}")
        excess, occ, lo = heapq.heappop(heap)
        energies.append(e1 + excess)
        occs.append(occ)
        for k in range(lo, n):
            succ = occ[:k] + (occ[k] + 1,) + occ[k + 1:]
            heapq.heappush(heap, (excess + w[k], succ, k))
    return TruncatedSpectrum(energies=np.array(energies),
                             occupations=np.array(occs, dtype=int))


def truncated_energy(spectrum: TruncatedSpectrum, beta: float) -> float:
    """Boltzmann average over the retained levels, shifted by E_1 for stability."""
    e = spectrum.energies
    if e.size == 0:
        raise ValueError("empty spectrum")
    x = np.exp(-beta * (e - e[0]))
    return float(np.sum(e * x) / np.sum(x))


def position_variances(params: ModelParams, beta: float | None = None) -> np.ndarray:
    """Thermal variance of each particle's position (r_e**2 units)."""
    b = params.beta if beta is None else beta
    spec = normal_modes(params)
    w = spec.frequencies
    x2 = spec.eigenvectors**2
    # hbar/(2 m omega_n) coth(beta hbar omega_n / 2) in r_e**2
    mode_var = 1.0 / (2.0 * params.energy_scale * w) / np.tanh(0.5 * b * w)
    return x2 @ mode_var


def exact_density_unsymmetrized(params: ModelParams, beta: float | None,
                                grid: np.ndarray) -> np.ndarray:
    """Density profile: each particle Gaussian about its lattice site.

    The profile extends beyond the walls; the grid may (and for the
    figures should) cover q < 0 and q > (N+1)*Delta_q.
    """
    grid = np.asarray(grid, dtype=float)
    var = position_variances(params, beta)
    centers = params.lattice
    z = (grid[:, None] - centers[None, :]) / np.sqrt(var)[None, :]
    rho = np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi * var)[None, :]
    return rho.sum(axis=1)

"""Local harmonic expansions: singlet (one mode per particle) and pair
(two modes per nearest-neighbour cluster).

Each expansion maps a configuration onto N independent oscillator modes
with configuration-independent frequencies, per-configuration minima and
dimensionless amplitudes Q.  For the harmonic crystal the quadratic
expansion is exact, which the test suite leans on heavily.

Both expansion flavours expose the same uniform mode view (frequencies,
orthogonal transform, amplitudes, offset), so the commutation-function
product is written once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, particle_energy_formula


@dataclass
class SingletExpansion:
    frequencies: np.ndarray        # (N,) in omega_LJ
    curvatures: np.ndarray         # (N,) in m*omega_LJ**2
    transform: np.ndarray          # (N, N) orthogonal, rows = modes
    minima: np.ndarray             # (..., N) dbar_j in r_e
    minimum_energies: np.ndarray   # (..., N) Ubar_j in hbar*omega_LJ
    amplitudes: np.ndarray         # (..., N) dimensionless Q
    positive: np.ndarray           # (N,) curvature > 0 mask

    @property
    def offset(self) -> np.ndarray:
        """sum_j Ubar_j in hbar*omega_LJ."""
        return self.minimum_energies.sum(axis=-1)


@dataclass
class PairExpansion:
    frequencies: np.ndarray
    transform: np.ndarray
    minima: np.ndarray
    minimum_energies: np.ndarray   # (..., n_clusters) Ubar_alpha
    amplitudes: np.ndarray
    positive: np.ndarray
    # per-cluster eigenstructure (None when lambda = 0 collapses to singlet)
    k_prime: np.ndarray | None = None
    k_dprime: np.ndarray | None = None
    mu_plus: np.ndarray | None = None
    mu_minus: np.ndarray | None = None
    a_plus: np.ndarray | None = None
    a_minus: np.ndarray | None = None
    c_plus: np.ndarray | None = None
    c_minus: np.ndarray | None = None

    @property
    def offset(self) -> np.ndarray:
        return self.minimum_energies.sum(axis=-1)


def singlet_curvatures(params: ModelParams) -> np.ndarray:
    """U''_j = kappa + lambda + (lambda/2)(delta_j1 + delta_jN); configuration-free."""
    n = params.n_particles
    c = np.full(n, params.kappa + params.lambda_nn)
    if n >= 1:
        c[0] += 0.5 * params.lambda_nn
        c[-1] += 0.5 * params.lambda_nn
    return c


def _pad_neighbors(d: np.ndarray):
    zero = np.zeros(d.shape[:-1] + (1,))
    left = np.concatenate([zero, d[..., :-1]], axis=-1)
    right = np.concatenate([d[..., 1:], zero], axis=-1)
    return left, right


def singlet_expand(params: ModelParams, displacements,
                   curvatures: np.ndarray | None = None) -> SingletExpansion:
    """Expand each particle's energy about its local minimum.

    ``curvatures`` overrides the model values; it exists so the
    non-positive-curvature guard (unreachable for this crystal) can be
    exercised.  Accepts batched displacement arrays (..., N).
    """
    d = np.asarray(displacements, dtype=float)
    n = params.n_particles
    lam = params.lambda_nn
    u2 = singlet_curvatures(params) if curvatures is None else np.asarray(curvatures, float)
    positive = u2 > 0
    safe_u2 = np.where(positive, u2, 1.0)
    left, right = _pad_neighbors(d)
    dbar = 0.5 * lam * (left + right) / safe_u2
    dbar = np.where(positive, dbar, d)  # no minimum: expand about the point itself
    # U_j evaluated at the minimum, holding the neighbours fixed
    endw = np.zeros(n)
    endw[0] += 1.0
    endw[-1] += 1.0
    ubar = (0.5 * params.kappa * dbar**2
            + 0.25 * lam * ((dbar - right) ** 2 + (dbar - left) ** 2)
            + 0.25 * lam * endw * dbar**2)
    ubar = params.energy_scale * ubar
    freqs = np.sqrt(np.where(positive, u2, 0.0))
    q = params.length_scale * np.sqrt(freqs) * (d - dbar)
    return SingletExpansion(frequencies=freqs, curvatures=u2,
                            transform=np.eye(n), minima=dbar,
                            minimum_energies=ubar, amplitudes=q,
                            positive=positive)


def pair_expand(params: ModelParams, displacements) -> PairExpansion:
    """Expand nearest-neighbour clusters {2a-1, 2a}; odd N leaves the last
    particle as a singlet cluster.  With lambda = 0 the clusters decouple
    exactly and the singlet expansion is used as-is.
    """
    d = np.asarray(displacements, dtype=float)
    n = params.n_particles
    lam = params.lambda_nn
    if lam == 0.0 or n == 1:
        s = singlet_expand(params, d)
        return PairExpansion(frequencies=s.frequencies, transform=s.transform,
                             minima=s.minima, minimum_energies=s.minimum_energies,
                             amplitudes=s.amplitudes, positive=s.positive)
    n_pairs = n // 2
    tail = n % 2 == 1
    kap = params.kappa

    first = np.zeros(n_pairs)
    first[0] = 1.0
    last = np.zeros(n_pairs)
    if not tail:
        last[-1] = 1.0
    kp = -(kap + 1.5 * lam + 0.5 * lam * first) / lam
    kpp = -(kap + 1.5 * lam + 0.5 * lam * last) / lam
    root = np.sqrt((kp - kpp) ** 2 + 4.0)
    mu_p = 0.5 * (kp + kpp) + 0.5 * root
    mu_m = 0.5 * (kp + kpp) - 0.5 * root
    a_p = mu_p - kp
    a_m = mu_m - kp
    c_p = 1.0 / np.sqrt(1.0 + a_p**2)
    c_m = 1.0 / np.sqrt(1.0 + a_m**2)
    w_p = np.sqrt(-lam * mu_p)
    w_m = np.sqrt(-lam * mu_m)

    # neighbours of each cluster (walls are zero)
    i1 = 2 * np.arange(n_pairs)          # first particle of each cluster
    i2 = i1 + 1
    zero = np.zeros(d.shape[:-1] + (1,))
    padded = np.concatenate([zero, d, zero], axis=-1)
    prev = padded[..., i1]               # d_{2a-2}
    nxt = padded[..., i2 + 2]            # d_{2a+1}
    denom = kp * kpp - 1.0
    dbar1 = (-0.5 / denom) * (kpp * prev - nxt)
    dbar2 = (-0.5 / denom) * (-prev + kp * nxt)

    # cluster energy at the minimum (wall bonds counted in full)
    ubar = (0.5 * kap * (dbar1**2 + dbar2**2)
            + 0.5 * lam * ((dbar2 - dbar1) ** 2
                           + 0.5 * (dbar1 - prev) ** 2
                           + 0.5 * (nxt - dbar2) ** 2)
            + 0.25 * lam * first * (dbar1 - prev) ** 2
            + 0.25 * lam * last * (nxt - dbar2) ** 2)
    ubar = params.energy_scale * ubar

    freqs = np.empty(n)
    freqs[i1] = w_p
    freqs[i2] = w_m
    transform = np.zeros((n, n))
    transform[i1, i1] = c_p
    transform[i1, i2] = c_p * a_p
    transform[i2, i1] = c_m
    transform[i2, i2] = c_m * a_m

    dbar = np.empty_like(d)
    dbar[..., i1] = dbar1
    dbar[..., i2] = dbar2
    min_energies = ubar

    if tail:
        s = singlet_expand(params, d)
        freqs[-1] = s.frequencies[-1]
        transform[-1, -1] = 1.0
        dbar[..., -1] = s.minima[..., -1]
        min_energies = np.concatenate(
            [ubar, s.minimum_energies[..., -1:]], axis=-1)

    delta = d - dbar
    q = params.length_scale * np.sqrt(freqs) * (delta @ transform.T)
    return PairExpansion(frequencies=freqs, transform=transform, minima=dbar,
                         minimum_energies=min_energies, amplitudes=q,
                         positive=freqs > 0,
                         k_prime=kp, k_dprime=kpp, mu_plus=mu_p, mu_minus=mu_m,
                         a_plus=a_p, a_minus=a_m, c_plus=c_p, c_minus=c_m)


def mode_momenta(expansion, momenta) -> np.ndarray:
    """Dimensionless mode momenta from reduced particle momenta g.

    g = p/sqrt(m*hbar*omega_LJ); mode momentum P_b = (T g)_b / sqrt(w_b).
    Modes with non-positive curvature get P = 0 (their weight is unity).
    """
    g = np.asarray(momenta, dtype=float)
    n = expansion.transform.shape[0]
    if g.shape[-1] != n:
        raise ValueError("momenta length does not match particle count")
    w = np.where(expansion.positive, expansion.frequencies, 1.0)
    p = (g @ expansion.transform.T) / np.sqrt(w)
    return np.where(expansion.positive, p, 0.0)


def quadratic_energy(expansion) -> np.ndarray:
    """offset + sum (w/2) Q^2 in hbar*omega_LJ; equals U(q) exactly here."""
    w = expansion.frequencies
    return expansion.offset + 0.5 * np.sum(w * expansion.amplitudes**2, axis=-1)

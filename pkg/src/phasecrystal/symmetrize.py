"""Permutation bookkeeping and boson/fermion symmetrization weights.

Permutations are filtered by the permutation length sum|j - j'|; within
scope only the identity (cap 0) and nearest-neighbour transpositions
(cap 2) feed the estimators.  Weights come momentum-resolved (unimodular
loop phases) or with the Gaussian momentum integral done analytically for
the dimer case.

Positions are in r_e, reduced momenta g = p/sqrt(m*hbar*omega_LJ); the
de Broglie scale enters through length_scale = sqrt(m*omega_LJ*r_e^2/hbar).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as _all_permutations

import numpy as np


@dataclass(frozen=True)
class Permutation:
    mapping: tuple          # image of 1..N, 1-based
    parity: int             # +1 even, -1 odd


@dataclass(frozen=True)
class PermutationSet:
    cap: int
    permutations: tuple     # of Permutation

    def __len__(self):
        return len(self.permutations)


def permutation_length(perm) -> int:
    """sum_j |j - j'| where j' is the image of j; perm is 1-based."""
    perm = tuple(perm)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError("not a permutation of 1..N")
    return sum(abs(j + 1 - jp) for j, jp in enumerate(perm))


def permutation_parity(perm) -> int:
    perm = tuple(p - 1 for p in perm)
    seen = [False] * len(perm)
    parity = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def enumerate_permutations(n: int, cap: int) -> PermutationSet:
    """Identity (cap 0) or identity plus nearest-neighbour transpositions (cap 2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if cap not in (0, 2):
        raise ValueError(f"unsupported permutation-length cap {cap}")
    identity = tuple(range(1, n + 1))
    perms = [Permutation(identity, +1)]
    if cap == 2:
        for i in range(n - 1):
            m = list(identity)
            m[i], m[i + 1] = m[i + 1], m[i]
            perms.append(Permutation(tuple(m), -1))
    return PermutationSet(cap, tuple(perms))


def count_permutations_brute(n: int, cap: int) -> int:
    """Exhaustive count of permutations with length <= cap (small n only)."""
    return sum(1 for p in _all_permutations(range(1, n + 1))
               if permutation_length(p) <= cap)


def cap4_count_formula(n: int) -> int:
    """N + (N-2)(N-3)/2 + 2(N-2): identity+dimers, double dimers, trimers.

    Note this undercounts the full d_m <= 4 set: transpositions of
    next-nearest neighbours (i, i+2) also have length 4 and are missing.
    Kept as a documented utility, not wired into any estimator.
    """
    return n + (n - 2) * (n - 3) // 2 + 2 * (n - 2)


def eta_loop_factor(positions, momenta, loop, sign: int,
                    length_scale: float) -> complex:
    """Loop symmetrization factor for particles ``loop`` (0-based indices).

    (+-1)^(l-1) e^{q_{1l} p_l / i hbar} prod_j e^{q_{j+1,j} p_j / i hbar},
    a pure phase times the statistics sign.  For a dimer (i, j) this is
    +- e^{q_{ij}(p_j - p_i)/i hbar}.
    """
    loop = list(loop)
    if len(set(loop)) != len(loop):
        raise ValueError("loop indices must be distinct")
    q = np.asarray(positions, dtype=float)
    g = np.asarray(momenta, dtype=float)
    ell = len(loop)
    phase = 0.0
    # e^{q a b /i hbar} = e^{-i s q g} in reduced units
    first, last = loop[0], loop[-1]
    phase -= length_scale * (q[first] - q[last]) * g[last]
    for k in range(ell - 1):
        j, jn = loop[k], loop[k + 1]
        phase -= length_scale * (q[jn] - q[j]) * g[j]
    stat = 1.0 if sign > 0 else -1.0
    return complex(stat ** (ell - 1) * np.exp(1j * phase))


def dimer_phases(positions, momenta, length_scale: float) -> np.ndarray:
    """All N-1 nearest-neighbour dimer phase factors, batched.

    positions/momenta are (..., N); returns (..., N-1) complex factors
    exp(i s x_j (g_{j+1} - g_j)) with x_j = q_{j+1} - q_j.
    """
    q = np.asarray(positions, dtype=float)
    g = np.asarray(momenta, dtype=float)
    x = q[..., 1:] - q[..., :-1]
    dg = g[..., 1:] - g[..., :-1]
    return np.exp(1j * length_scale * x * dg)


def eta_cap2(positions, momenta, sign: int, length_scale: float) -> np.ndarray:
    """Momentum-resolved symmetrization weight for cap d_m <= 2."""
    s = 1.0 if sign > 0 else -1.0
    return 1.0 + s * dimer_phases(positions, momenta, length_scale).sum(axis=-1)


def dimer_gaussian_average(separation, beta: float, length_scale: float) -> np.ndarray:
    """Maxwell-Boltzmann momentum average of one dimer phase (unsigned).

    exp(-m q_ij^2/(beta hbar^2)) = exp(-s^2 x^2 / beta) in reduced units;
    monotonically vanishing with separation, 1 at coincidence.
    """
    x = np.asarray(separation, dtype=float)
    return np.exp(-length_scale**2 * x * x / beta)


def eta_dimer_momentum_averaged(positions, beta: float, i: int, j: int,
                                sign: int, length_scale: float) -> float:
    """Signed Gaussian-averaged dimer weight for particles i, j (0-based)."""
    if abs(i - j) != 1:
        raise ValueError("dimer average applies to nearest-neighbour pairs")
    q = np.asarray(positions, dtype=float)
    s = 1.0 if sign > 0 else -1.0
    return float(s * dimer_gaussian_average(q[i] - q[j], beta, length_scale))

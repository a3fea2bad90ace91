"""Single-mode oscillator commutation factors and their composition.

The production evaluator is the truncated Hermite series; the Mehler
closed form of the same bilinear sum is kept as an internal oracle.  For
momentum-averaged estimators the Gaussian momentum integral of the
truncated series is done in closed form (Hermite functions are Fourier
eigenfunctions), giving a real, positive position-space weight per mode
together with the matching kinetic-energy estimator.

Inputs P, Q are dimensionless mode momenta/amplitudes; beta_hw is the
dimensionless beta*hbar*omega of the mode.
"""

from __future__ import annotations

import numpy as np

_SQRT2 = np.sqrt(2.0)
_EXP_LIMIT = 700.0  # exp() overflow threshold for float64


def hermite_normalized(z, n_top: int) -> np.ndarray:
    """H_n(z)/sqrt(2^n n!) for n = 0..n_top, stacked on a new first axis.

    The 1/sqrt(2^n n!) factor is folded into the three-term recurrence, so
    values stay O(1) far beyond where raw Hermite polynomials overflow.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((n_top + 1,) + z.shape)
    out[0] = 1.0
    if n_top >= 1:
        out[1] = _SQRT2 * z
    for n in range(1, n_top):
        out[n + 1] = (np.sqrt(2.0 / (n + 1)) * z * out[n]
                      - np.sqrt(n / (n + 1)) * out[n - 1])
    return out


def _expand(n_arr: np.ndarray, target_ndim: int) -> np.ndarray:
    return n_arr.reshape((-1,) + (1,) * target_ndim)


def w_sho_series(P, Q, beta_hw, n_max: int) -> np.ndarray:
    """Truncated-series commutation factor of one oscillator mode."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    v = np.asarray(beta_hw, dtype=float)
    P, Q, v = np.broadcast_arrays(P, Q, v)
    rsq = P * P + Q * Q
    if np.any(0.5 * v * rsq > _EXP_LIMIT):
        raise OverflowError("beta*hw*(P^2+Q^2)/2 exceeds the exponent range; "
                            "amplitude cutoff should have removed this mode")
    n = np.arange(n_max + 1)
    hp = hermite_normalized(P, n_max)
    hq = hermite_normalized(Q, n_max)
    t = np.exp(-(_expand(n, v.ndim) + 0.5) * v)
    phase = _expand(1j**n, v.ndim)
    s = np.sum(phase * t * hp * hq, axis=0)
    return _SQRT2 * np.exp(-1j * P * Q) * np.exp(0.5 * (v - 1.0) * rsq) * s


def w_sho_mehler(P, Q, beta_hw) -> np.ndarray:
    """Closed form of the full (untruncated) series; test oracle only."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    v = np.asarray(beta_hw, dtype=float)
    if np.any(v <= 0):
        raise ValueError("beta_hw must be positive for the closed form")
    rho = 1j * np.exp(-v)
    rho2 = rho * rho
    rsq = P * P + Q * Q
    kernel = np.exp((2.0 * P * Q * rho - rsq * rho2) / (1.0 - rho2))
    return (_SQRT2 * np.exp(-1j * P * Q) * np.exp(0.5 * (v - 1.0) * rsq)
            * np.exp(-0.5 * v) / np.sqrt(1.0 - rho2) * kernel)


def _averaged_sums(Q, v, n_max: int):
    """Shared pieces of the Gaussian momentum integrals of the truncated series."""
    Q = np.asarray(Q, dtype=float)
    v = np.asarray(v, dtype=float)
    Q, v = np.broadcast_arrays(Q, v)
    n = np.arange(n_max + 1)
    h = hermite_normalized(Q, n_max + 2)
    t = np.exp(-(_expand(n, v.ndim) + 0.5) * v)
    hn = h[:n_max + 1]
    den = np.sum(t * hn * hn, axis=0)
    up2 = _expand(np.sqrt((n + 1.0) * (n + 2.0)), v.ndim)
    dn2 = _expand(np.sqrt(n * np.maximum(n - 1.0, 0.0)), v.ndim)
    coef = _expand(n + 0.5, v.ndim)
    num = np.sum(t * (coef * hn * hn
                      - 0.5 * up2 * hn * h[2:n_max + 3]
                      - 0.5 * dn2 * hn * np.concatenate(
                          [np.zeros_like(h[:2]), h[:n_max - 1]], axis=0)),
                 axis=0)
    return Q, v, den, num


def w_sho_momentum_averaged(Q, beta_hw, n_max: int) -> np.ndarray:
    """Maxwell-Boltzmann momentum average of w_sho_series; real and positive.

    Averaging against exp(-beta_hw*P^2/2) kills the oscillatory momentum
    dependence and leaves sqrt(2v) e^{(v-2)Q^2/2} sum_n e^{-v(n+1/2)} h_n(Q)^2,
    i.e. the thermal mix of oscillator eigenstate densities over the
    classical position weight.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    Q, v, den, _ = _averaged_sums(Q, beta_hw, n_max)
    return np.sqrt(2.0 * v) * np.exp(0.5 * (v - 2.0) * Q * Q) * den


def momentum_squared_averaged(Q, beta_hw, n_max: int) -> np.ndarray:
    """<P^2> under the MB-with-commutation-weight momentum distribution.

    The mode kinetic energy estimator is (hbar*w/2) times this.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _, _, den, num = _averaged_sums(Q, beta_hw, n_max)
    return num / den


def w_mf_config(frequencies, momenta, amplitudes, beta, n_max: int,
                q_cut: float, positive=None) -> np.ndarray:
    """Product of per-mode commutation factors for one configuration.

    Modes with |Q| > q_cut, or flagged non-positive curvature, contribute
    a factor of one.  Batched over leading axes; modes on the last axis.
    """
    w = np.asarray(frequencies, dtype=float)
    p = np.asarray(momenta, dtype=float)
    q = np.asarray(amplitudes, dtype=float)
    active = np.abs(q) <= q_cut
    if positive is not None:
        active = active & np.asarray(positive, dtype=bool)
    p = np.where(active, p, 0.0)
    q = np.where(active, q, 0.0)
    mode_w = w_sho_series(p, q, beta * w, n_max)
    mode_w = np.where(active, mode_w, 1.0 + 0.0j)
    return np.prod(mode_w, axis=-1)


def w_mf_config_averaged(frequencies, amplitudes, beta, n_max: int,
                         q_cut: float, positive=None):
    """Momentum-averaged configuration weight and kinetic-energy estimator.

    Returns (weight product, summed mode kinetic energy in hbar*omega_LJ).
    Cut or non-positive modes contribute weight 1 and the classical
    kinetic energy 1/(2*beta) each.
    """
    w = np.asarray(frequencies, dtype=float)
    q = np.asarray(amplitudes, dtype=float)
    active = np.abs(q) <= q_cut
    if positive is not None:
        active = active & np.asarray(positive, dtype=bool)
    q = np.where(active, q, 0.0)
    v = beta * np.where(active, w, 1.0)
    wbar = w_sho_momentum_averaged(q, v, n_max)
    p2 = momentum_squared_averaged(q, v, n_max)
    kinetic = np.where(active, 0.5 * w * p2, 0.5 / beta)
    wbar = np.where(active, wbar, 1.0)
    return np.prod(wbar, axis=-1), np.sum(kinetic, axis=-1)

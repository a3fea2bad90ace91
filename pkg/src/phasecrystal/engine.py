"""Metropolis sampling with umbrella reweighting into 9 estimator channels.

Positions are random-walked under the classical Boltzmann weight; the
commutation factor (unity / singlet mean-field / pair mean-field) and the
symmetrization weight (identity / boson dimers / fermion dimers) enter as
umbrella reweighting factors, so all nine channel averages come from one
sample stream and channel differences are low-variance.

Momentum handling: by default every momentum integral is done in closed
form (momentum_mode="analytic"), with the commutation and symmetrization
momentum dependences integrated independently of each other.  This
removes the heavy-tailed variance of the sampled-momentum mean-field
weight at low temperature.  momentum_mode="sampled" switches every
channel to Maxwell-Boltzmann sampled momenta with the fully
momentum-resolved weight products, as a cross-check.

Many independent chains are advanced simultaneously as one vectorized
state; error bars are twice the standard error over time blocks pooled
across chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .commutation import w_mf_config, w_mf_config_averaged
from .meanfield import (mode_momenta, pair_expand, quadratic_energy,
                        singlet_expand)
from .model import Configuration, ModelParams, potential_formula
from .symmetrize import dimer_gaussian_average, dimer_phases

COMMUTATION_VARIANTS = ("unity", "singlet", "pair")
SYMMETRY_VARIANTS = ("dm0", "boson", "fermion")
CHANNELS = tuple((c, s) for c in COMMUTATION_VARIANTS for s in SYMMETRY_VARIANTS)


@dataclass
class MCSettings:
    sweeps: int = 4000
    equilibration_fraction: float = 0.1
    chains: int = 64
    n_blocks: int = 20
    seed: int = 0
    step_size: float | None = None     # trial move half-width; None = auto
    n_max: int = 8
    q_cut: float = 1.0
    dm_cap: int = 2
    momentum_mode: str = "analytic"    # "analytic" (hybrid) or "sampled"
    measure_every: int = 1
    histogram: bool = False
    hist_bin_width: float | None = None
    hist_range: tuple | None = None
    pole_threshold: float = 1e-3

    def __post_init__(self):
        if self.momentum_mode not in ("analytic", "sampled"):
            raise ValueError(f"unknown momentum_mode {self.momentum_mode!r}")
        if self.dm_cap not in (0, 2):
            raise ValueError("dm_cap must be 0 or 2")
        if self.sweeps < self.n_blocks:
            raise ValueError("need at least one sweep per block")


@dataclass
class ChainState:
    """Vectorized Metropolis state for a batch of independent chains."""

    displacements: np.ndarray       # (chains, N), r_e
    potential: np.ndarray           # (chains,), hbar*omega_LJ, cached
    rng: np.random.Generator
    step_size: float
    accepted: int = 0
    proposed: int = 0

    @property
    def acceptance(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


def initial_state(params: ModelParams, settings: MCSettings,
                  rng: np.random.Generator | None = None) -> ChainState:
    rng = rng or np.random.default_rng(settings.seed)
    d = np.zeros((settings.chains, params.n_particles))
    u = params.energy_scale * potential_formula(d, params.kappa, params.lambda_nn)
    step = settings.step_size
    if step is None:
        stiff = params.kappa + 2.0 * params.lambda_nn
        step = 2.0 / math.sqrt(params.beta * params.energy_scale * stiff)
    return ChainState(displacements=d, potential=u, rng=rng, step_size=step)


def metropolis_sweep(state: ChainState, params: ModelParams) -> ChainState:
    """One sweep: a single-particle trial move per particle, Metropolis rule.

    Energy changes are computed incrementally from the on-site term and
    the two springs touching the moved particle.
    """
    d = state.displacements
    chains, n = d.shape
    kap, lam = params.kappa, params.lambda_nn
    scale = params.energy_scale
    b = params.beta
    rng = state.rng
    for j in range(n):
        cur = d[:, j]
        prop = cur + rng.uniform(-state.step_size, state.step_size, size=chains)
        left = d[:, j - 1] if j > 0 else 0.0
        right = d[:, j + 1] if j < n - 1 else 0.0
        du = (0.5 * kap * (prop * prop - cur * cur)
              + 0.5 * lam * ((right - prop) ** 2 - (right - cur) ** 2
                             + (prop - left) ** 2 - (cur - left) ** 2))
        du *= scale
        accept = np.log(rng.uniform(size=chains)) < -b * du
        d[accept, j] = prop[accept]
        state.potential += np.where(accept, du, 0.0)
        state.accepted += int(accept.sum())
        state.proposed += chains
    return state


def _channel_terms(params: ModelParams, d: np.ndarray, u_hw: np.ndarray,
                   settings: MCSettings, g: np.ndarray):
    """Per-configuration weights and energy numerators for all 9 channels.

    d: (..., N) displacements; u_hw: (...,) potential; g: (..., N) sampled
    reduced momenta (may be None in analytic mode, where it is unused).
    Returns (w, wh) of shape (9, ...), complex.
    """
    b = params.beta
    n = params.n_particles
    s = params.length_scale
    sampled_all = settings.momentum_mode == "sampled"
    q = params.lattice + d
    x = q[..., 1:] - q[..., :-1]

    exp_s = singlet_expand(params, d)
    exp_p = pair_expand(params, d)
    # mean-field channels estimate the energy of the mapped oscillator
    # system, not the bare crystal potential
    quad = {"unity": u_hw,
            "singlet": quadratic_energy(exp_s),
            "pair": quadratic_energy(exp_p)}

    w = np.empty((9,) + u_hw.shape, dtype=complex)
    wh = np.empty_like(w)

    def resolved_w(exp):
        p = mode_momenta(exp, g)
        return w_mf_config(exp.frequencies, p, exp.amplitudes, b,
                           settings.n_max, settings.q_cut, exp.positive)

    if sampled_all:
        if settings.dm_cap == 2:
            eta_sum = dimer_phases(q, g, s).sum(axis=-1)
        else:
            eta_sum = np.zeros_like(u_hw, dtype=complex)
        ke_sampled = 0.5 * np.sum(g * g, axis=-1)
        comm_w = {"unity": np.ones_like(u_hw, dtype=complex),
                  "singlet": resolved_w(exp_s), "pair": resolved_w(exp_p)}
        for ic, c in enumerate(COMMUTATION_VARIANTS):
            h_eff = quad[c] + ke_sampled
            for isym, sym in enumerate(SYMMETRY_VARIANTS):
                sign = {"dm0": 0.0, "boson": 1.0, "fermion": -1.0}[sym]
                cw = comm_w[c] * (1.0 + sign * eta_sum)
                w[3 * ic + isym] = cw
                wh[3 * ic + isym] = cw * h_eff
        return w, wh

    if settings.dm_cap == 2:
        etabar = dimer_gaussian_average(x, b, s)
    else:
        etabar = np.zeros(u_hw.shape + (0,))
    # analytic mode: every momentum integral in closed form.  The
    # mean-field weight and the dimer average factorize (the commutation
    # and symmetrization momentum dependences are integrated separately),
    # which keeps the fermion denominator crossing of all three
    # commutation variants at the same temperature.
    # kinetic under a dimer phase: two momenta pick up a Gaussian shift
    dimer_ke_shift = s * s * x * x / (b * b)
    eta_sumbar = etabar.sum(axis=-1)
    wbar_s, ksum_s = w_mf_config_averaged(exp_s.frequencies, exp_s.amplitudes,
                                          b, settings.n_max, settings.q_cut,
                                          exp_s.positive)
    wbar_p, ksum_p = w_mf_config_averaged(exp_p.frequencies, exp_p.amplitudes,
                                          b, settings.n_max, settings.q_cut,
                                          exp_p.positive)
    ones = np.ones_like(u_hw)

    for ic, (wbar, ksum, c) in enumerate(
            ((ones, 0.5 * n / b * ones, "unity"),
             (wbar_s, ksum_s, "singlet"), (wbar_p, ksum_p, "pair"))):
        h0 = quad[c] + ksum
        w[3 * ic] = wbar
        wh[3 * ic] = wbar * h0
        for isym, sign in ((1, 1.0), (2, -1.0)):
            w[3 * ic + isym] = wbar * (1.0 + sign * eta_sumbar)
            wh[3 * ic + isym] = wbar * (
                h0 + sign * np.sum(etabar * (h0[..., None] - dimer_ke_shift),
                                   axis=-1))
    return w, wh


def evaluate_weights(params: ModelParams, config: Configuration,
                     momenta=None, n_max: int = 8, q_cut: float = 1.0,
                     dm_cap: int = 2) -> np.ndarray:
    """The 3x3 umbrella weight matrix (commutation x symmetrization).

    With ``momenta`` given, all channels are momentum-resolved; otherwise
    the analytic momentum averages are used throughout.
    """
    mode = "sampled" if momenta is not None else "analytic"
    settings = MCSettings(n_max=n_max, q_cut=q_cut, dm_cap=dm_cap,
                          momentum_mode=mode)
    d = config.displacements[None, :]
    u = params.energy_scale * potential_formula(d, params.kappa, params.lambda_nn)
    g = None if momenta is None else np.asarray(momenta, dtype=float)[None, :]
    w, _ = _channel_terms(params, d, u, settings, g)
    return w[:, 0].reshape(3, 3)


def block_error(values: np.ndarray) -> float:
    """Twice the standard error over block estimates (96% confidence)."""
    values = np.asarray(values, dtype=float)
    k = values.size
    if k < 2:
        return float("nan")
    return float(2.0 * np.std(values, ddof=1) / math.sqrt(k))


@dataclass
class DensityResult:
    bin_centers: np.ndarray
    bin_width: float
    profiles: dict            # (comm, sym) -> (rho, err) arrays, per r_e


@dataclass
class PointResult:
    beta: float
    energy: dict              # (comm, sym) -> (value, error)
    near_pole: dict           # (comm, sym) -> bool
    mean_weight: dict         # (comm, sym) -> (value, error); the umbrella
                              # denominator per sample, whose sign change
                              # locates the fermion pole
    imag_weight: dict         # (comm, sym) -> (value, error)
    difference: dict          # comm -> (boson - fermion energy, error)
    acceptance: float
    n_samples: int
    cache_drift: float
    density: DensityResult | None = None


def run_point(params: ModelParams, settings: MCSettings) -> PointResult:
    """Equilibrate, sample, and reduce one temperature point."""
    rng = np.random.default_rng(settings.seed)
    state = initial_state(params, settings, rng)
    n = params.n_particles
    b = params.beta

    n_eq = max(1, int(round(settings.sweeps * settings.equilibration_fraction)))
    n_prod = settings.sweeps - n_eq
    if n_prod < settings.n_blocks:
        raise ValueError("too few production sweeps for the block count")

    # step-size calibration during equilibration only
    tune_every = max(10, n_eq // 10)
    for i in range(n_eq):
        metropolis_sweep(state, params)
        if (i + 1) % tune_every == 0:
            acc = state.acceptance
            if acc < 0.3:
                state.step_size *= 0.8
            elif acc > 0.7:
                state.step_size *= 1.25
            state.accepted = state.proposed = 0

    if settings.histogram:
        dq = params.lattice_spacing
        lo, hi = settings.hist_range or (-dq, (n + 2) * dq)
        width = settings.hist_bin_width or dq / 20.0
        nbins = int(round((hi - lo) / width))
        centers = lo + width * (np.arange(nbins) + 0.5)
        hist_acc = np.zeros((settings.n_blocks, 9, nbins))
    else:
        hist_acc = None

    sum_w = np.zeros((settings.n_blocks, 9), dtype=complex)
    sum_wh = np.zeros((settings.n_blocks, 9), dtype=complex)
    sum_abs = np.zeros((settings.n_blocks, 9))
    counts = np.zeros(settings.n_blocks, dtype=int)
    cache_drift = 0.0

    block_of = np.repeat(np.arange(settings.n_blocks),
                         np.diff(np.linspace(0, n_prod, settings.n_blocks + 1)
                                 .astype(int)))
    sigma_g = 1.0 / math.sqrt(b)
    sampled = settings.momentum_mode == "sampled"
    for i in range(n_prod):
        metropolis_sweep(state, params)
        if i % settings.measure_every:
            continue
        k = block_of[i]
        d = state.displacements
        u_hw = state.potential
        g = rng.normal(0.0, sigma_g, size=d.shape) if sampled else None
        w, wh = _channel_terms(params, d, u_hw, settings, g)
        sum_w[k] += w.sum(axis=-1)
        sum_wh[k] += wh.sum(axis=-1)
        sum_abs[k] += np.abs(w).sum(axis=-1)
        counts[k] += d.shape[0]
        if hist_acc is not None:
            q = (params.lattice + d).ravel()
            idx = np.floor((q - lo) / width).astype(int)
            ok = (idx >= 0) & (idx < nbins)
            wre = np.repeat(w.real, d.shape[-1], axis=-1)
            for ch in range(9):
                hist_acc[k, ch] += np.bincount(idx[ok], weights=wre[ch][ok],
                                               minlength=nbins)

    recomputed = params.energy_scale * potential_formula(
        state.displacements, params.kappa, params.lambda_nn)
    cache_drift = float(np.max(np.abs(recomputed - state.potential)))
    if cache_drift > 1e-9 * max(1.0, float(np.max(np.abs(recomputed)))):
        raise RuntimeError(f"incremental energy cache drifted by {cache_drift}")

    energy, near_pole, mean_w, imag_w = {}, {}, {}, {}
    block_energy = np.full((settings.n_blocks, 9), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        block_energy = sum_wh.real / sum_w.real
    for ch, key in enumerate(CHANNELS):
        tot_w = float(sum_w[:, ch].real.sum())
        tot_wh = float(sum_wh[:, ch].real.sum())
        tot_abs = float(sum_abs[:, ch].sum())
        near = abs(tot_w) < settings.pole_threshold * tot_abs
        near_pole[key] = bool(near)
        value = tot_wh / tot_w if tot_w != 0.0 else float("nan")
        energy[key] = (value, block_error(block_energy[:, ch]))
        mw = sum_w[:, ch].real / counts
        mean_w[key] = (float(np.mean(mw)), block_error(mw))
        iw = sum_w[:, ch].imag / counts
        imag_w[key] = (float(np.mean(iw)), block_error(iw))

    difference = {}
    for ic, c in enumerate(COMMUTATION_VARIANTS):
        diff_blocks = block_energy[:, 3 * ic + 1] - block_energy[:, 3 * ic + 2]
        tot = (sum_wh[:, 3 * ic + 1].real.sum() / sum_w[:, 3 * ic + 1].real.sum()
               - sum_wh[:, 3 * ic + 2].real.sum() / sum_w[:, 3 * ic + 2].real.sum())
        difference[c] = (float(tot), block_error(diff_blocks))

    density = None
    if hist_acc is not None:
        profiles = {}
        for ch, key in enumerate(CHANNELS):
            denom = sum_w[:, ch].real.sum() * width
            rho = hist_acc[:, ch].sum(axis=0) / denom
            with np.errstate(divide="ignore", invalid="ignore"):
                rho_blocks = hist_acc[:, ch] / (sum_w[:, ch].real[:, None] * width)
            err = np.array([block_error(rho_blocks[:, i])
                            for i in range(rho_blocks.shape[1])])
            profiles[key] = (rho, err)
        density = DensityResult(bin_centers=centers, bin_width=width,
                                profiles=profiles)

    return PointResult(beta=b, energy=energy, near_pole=near_pole,
                       mean_weight=mean_w, imag_weight=imag_w,
                       difference=difference, acceptance=state.acceptance,
                       n_samples=int(counts.sum()), cache_drift=cache_drift,
                       density=density)

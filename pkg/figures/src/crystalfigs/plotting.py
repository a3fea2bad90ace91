"""Figure construction from the documented CSV schemas.

Two inputs are understood: the energy sweep (energy_vs_beta.csv) and the
density profile (density_profile.csv).  Schema violations raise
SchemaError before any figure is opened.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

ENERGY_CHANNELS = ("classical_dm0", "classical_boson", "classical_fermion",
                   "singlet_dm0", "singlet_boson", "singlet_fermion",
                   "pair_dm0", "pair_boson", "pair_fermion")
DEFAULT_ENERGY_CHANNELS = ("classical_dm0", "singlet_dm0", "pair_dm0")
COMMUTATION = ("classical", "singlet", "pair")

_MARKERS = {"classical": "o", "singlet": "s", "pair": "^"}
_COLORS = {"dm0": "tab:blue", "boson": "tab:green", "fermion": "tab:red"}


class SchemaError(ValueError):
    """The CSV does not match the documented column layout."""


@dataclass
class FigureSpec:
    csv_path: Path
    kind: str                       # "energy" | "difference" | "density"
    out_path: Path
    channels: tuple = field(default_factory=lambda: DEFAULT_ENERGY_CHANNELS)

    def __post_init__(self):
        self.csv_path = Path(self.csv_path)
        self.out_path = Path(self.out_path)
        if self.kind not in ("energy", "difference", "density"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        bad = set(self.channels) - set(ENERGY_CHANNELS)
        if bad:
            raise ValueError(f"unknown channels: {sorted(bad)}")


def load_table(path: Path) -> dict:
    """CSV -> dict of numpy arrays (floats where possible, else strings)."""
    with Path(path).open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise SchemaError(f"{path}: no data rows")
    header, body = rows[0], rows[1:]
    if any(len(r) != len(header) for r in body):
        raise SchemaError(f"{path}: ragged rows")
    table = {}
    for i, name in enumerate(header):
        col = [r[i] for r in body]
        try:
            table[name] = np.array([float(x) for x in col])
        except ValueError:
            table[name] = np.array(col)
    return table


def _require(table: dict, columns, path) -> None:
    missing = [c for c in columns if c not in table]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")


def plot_energy_vs_beta(spec: FigureSpec) -> Path:
    """Energy sweep: MC symbols with error bars between the classical and
    exact guide curves, plus a ground-state asymptote."""
    t = load_table(spec.csv_path)
    need = ["beta_hw_lj", "exact_closed_hw_lj", "energy_classical_dm0_hw_lj"]
    for ch in spec.channels:
        need += [f"energy_{ch}_hw_lj", f"error_{ch}_hw_lj"]
    _require(t, need, spec.csv_path)

    beta = t["beta_hw_lj"]
    order = np.argsort(beta)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(beta[order], t["exact_closed_hw_lj"][order], "-", color="black",
            lw=1.2, label="exact")
    ax.plot(beta[order], t["energy_classical_dm0_hw_lj"][order], ":",
            color="gray", lw=1.2, label="classical")
    # the closed-form energy at the coldest point approximates the
    # ground state (no physics is recomputed here)
    ax.axhline(t["exact_closed_hw_lj"][order][-1], ls="--", color="0.7",
               lw=0.8, zorder=0)
    for ch in spec.channels:
        comm, sym = ch.rsplit("_", 1)
        ax.errorbar(beta, t[f"energy_{ch}_hw_lj"], t[f"error_{ch}_hw_lj"],
                    fmt=_MARKERS[comm], ms=4, lw=0, elinewidth=1,
                    color=_COLORS[sym], mfc="none", label=ch)
    ax.set_xlabel(r"$\beta\,\hbar\omega_{LJ}$")
    ax.set_ylabel(r"$\langle E\rangle\ /\ \hbar\omega_{LJ}$")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return spec.out_path


def plot_difference_vs_beta(spec: FigureSpec) -> Path:
    """Boson-fermion energy difference per commutation variant."""
    t = load_table(spec.csv_path)
    need = ["beta_hw_lj"] + [f"diff_boson_fermion_{c}_hw_lj"
                             for c in COMMUTATION]
    _require(t, need, spec.csv_path)
    beta = t["beta_hw_lj"]
    order = np.argsort(beta)
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for c in COMMUTATION:
        err_col = f"diff_error_{c}_hw_lj"
        err = t[err_col] if err_col in t else None
        ax.errorbar(beta[order], t[f"diff_boson_fermion_{c}_hw_lj"][order],
                    None if err is None else err[order],
                    fmt=_MARKERS[c] + "-", ms=4, lw=0.8, label=c)
    ax.axhline(0.0, color="0.7", lw=0.8, zorder=0)
    ax.set_xlabel(r"$\beta\,\hbar\omega_{LJ}$")
    ax.set_ylabel(r"$(E_+ - E_-)\ /\ \hbar\omega_{LJ}$")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return spec.out_path


def plot_density(spec: FigureSpec) -> Path:
    """Density profile: exact unsymmetrized curve plus channel symbols,
    with a boson-fermion difference panel when both are selected."""
    t = load_table(spec.csv_path)
    need = ["q_over_re", "rho_exact_unsym_per_re"]
    for ch in spec.channels:
        need += [f"rho_{ch}_per_re", f"rho_error_{ch}_per_re"]
    _require(t, need, spec.csv_path)

    q = t["q_over_re"]
    selected = set(spec.channels)
    pairs = [c for c in COMMUTATION
             if {f"{c}_boson", f"{c}_fermion"} <= selected]
    nrows = 2 if pairs else 1
    fig, axes = plt.subplots(nrows, 1, figsize=(5.4, 3.0 * nrows),
                             sharex=True, squeeze=False)
    ax = axes[0, 0]
    ax.plot(q, t["rho_exact_unsym_per_re"], "-", color="black", lw=1.0,
            label="exact (unsym.)")
    step = max(1, len(q) // 60)        # thin markers for readability
    for ch in spec.channels:
        comm, sym = ch.rsplit("_", 1)
        ax.errorbar(q[::step], t[f"rho_{ch}_per_re"][::step],
                    t[f"rho_error_{ch}_per_re"][::step],
                    fmt=_MARKERS[comm], ms=3, lw=0, elinewidth=0.7,
                    color=_COLORS[sym], mfc="none", label=ch)
    ax.set_ylabel(r"$\rho\, r_e$")
    ax.legend(fontsize=7, frameon=False)
    if pairs:
        axd = axes[1, 0]
        for c in pairs:
            axd.plot(q, t[f"rho_{c}_boson_per_re"]
                     - t[f"rho_{c}_fermion_per_re"], lw=0.9,
                     label=f"{c}: boson - fermion")
        axd.axhline(0.0, color="0.7", lw=0.8, zorder=0)
        axd.set_ylabel(r"$\Delta\rho\, r_e$")
        axd.legend(fontsize=7, frameon=False)
    axes[-1, 0].set_xlabel(r"$q\ /\ r_e$")
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return spec.out_path


def render(spec: FigureSpec) -> Path:
    return {"energy": plot_energy_vs_beta,
            "difference": plot_difference_vs_beta,
            "density": plot_density}[spec.kind](spec)

"""Command-line runner: presets, temperature sweeps, CSV emission.

Subcommands:
  run      Monte Carlo sweep over a beta list, writing energy_vs_beta.csv
           (and density_profile.csv when the histogram is enabled) plus a
           metadata.json sidecar into the output directory.
  oracle   Exact closed-form and truncated-spectrum reference energies.
  selftest Quick internal consistency checks.

All output quantities are in reduced units (energies in hbar*omega_LJ,
lengths in r_e), as the CSV header suffixes indicate.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .engine import (CHANNELS, COMMUTATION_VARIANTS, MCSettings, PointResult,
                     run_point)
from .model import ModelParams
from .phonons import (enumerate_levels, exact_density_unsymmetrized,
                      exact_energy_closed, truncated_energy)

# CSV column labels for the commutation variants (the unity weight is the
# classical simulation)
_COMM_LABEL = {"unity": "classical", "singlet": "singlet", "pair": "pair"}


@dataclass
class RunConfig:
    """Declarative description of one simulation run (JSON round-trip)."""

    n_particles: int = 4
    lattice_spacing: float = 1.0
    kappa: float = 1.0
    lambda_nn: float = 1.0
    beta_list: list = field(default_factory=lambda: [1.0])
    sweeps: int = 20000
    equilibration_fraction: float = 0.1
    chains: int = 128
    seed: int = 1
    n_max: int = 8
    q_cut: float = 1.0
    dm_cap: int = 2
    momentum_mode: str = "analytic"
    histogram: bool = False
    hist_bin_width: float | None = None
    hist_range: list | None = None
    out_dir: str = "out"
    l_max: int = 10000

    def __post_init__(self):
        if not self.beta_list:
            raise ValueError("beta_list must not be empty")
        if any(b <= 0 for b in self.beta_list):
            raise ValueError("beta values must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def model_params(self, beta: float) -> ModelParams:
        return ModelParams(n_particles=self.n_particles,
                           lattice_spacing=self.lattice_spacing,
                           kappa=self.kappa, lambda_nn=self.lambda_nn,
                           beta=beta)

    def mc_settings(self, seed: int) -> MCSettings:
        return MCSettings(sweeps=self.sweeps,
                          equilibration_fraction=self.equilibration_fraction,
                          chains=self.chains, seed=seed, n_max=self.n_max,
                          q_cut=self.q_cut, dm_cap=self.dm_cap,
                          momentum_mode=self.momentum_mode,
                          histogram=self.histogram,
                          hist_bin_width=self.hist_bin_width,
                          hist_range=(tuple(self.hist_range)
                                      if self.hist_range else None))


_BETA_SWEEP = [0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0]

PRESETS = {
    # chain with on-site and nearest-neighbour springs, energy sweep
    "fig1": dict(kappa=1.0, lambda_nn=1.0, lattice_spacing=1.0,
                 beta_list=list(_BETA_SWEEP), l_max=10000),
    # weakly coupled chain (no on-site spring), energy sweep
    "fig2": dict(kappa=0.0, lambda_nn=0.02, lattice_spacing=1.0,
                 beta_list=[0.5, 1.0, 1.5, 1.9, 2.3, 3.0, 5.0, 10.0],
                 l_max=20000),
    # density profile of the weakly coupled chain
    "fig3": dict(kappa=0.0, lambda_nn=0.02, lattice_spacing=1.0,
                 beta_list=[2.0], histogram=True, l_max=20000),
    # tight lattice spacing, strong springs, energy sweep
    "fig4": dict(kappa=0.0, lambda_nn=1.0, lattice_spacing=0.1,
                 beta_list=[0.2, 0.5, 0.72, 1.0, 2.0, 5.0, 10.0],
                 l_max=20000),
    # density profile on the tight lattice
    "fig5": dict(kappa=0.0, lambda_nn=1.0, lattice_spacing=0.1,
                 beta_list=[1.0], histogram=True, l_max=20000),
}


def preset_config(name: str, **overrides) -> RunConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r} (have {sorted(PRESETS)})")
    data = dict(PRESETS[name])
    data.update(overrides)
    return RunConfig.from_dict(data)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if x != x else f"{x:.10g}"
    return str(x)


def _energy_header() -> list:
    cols = ["beta_hw_lj"]
    for comm, sym in CHANNELS:
        base = f"{_COMM_LABEL[comm]}_{sym}"
        cols += [f"energy_{base}_hw_lj", f"error_{base}_hw_lj"]
    for comm in COMMUTATION_VARIANTS:
        base = _COMM_LABEL[comm]
        cols += [f"diff_boson_fermion_{base}_hw_lj",
                 f"diff_error_{base}_hw_lj"]
    cols += ["exact_closed_hw_lj", "exact_truncated_hw_lj",
             "near_pole_channels"]
    return cols


def _energy_row(beta, result: PointResult, exact, truncated) -> list:
    row = [beta]
    for key in CHANNELS:
        row += list(result.energy[key])
    for comm in COMMUTATION_VARIANTS:
        row += list(result.difference[comm])
    flagged = ";".join(f"{_COMM_LABEL[c]}_{s}"
                       for (c, s) in CHANNELS if result.near_pole[(c, s)])
    row += [exact, truncated, flagged or "none"]
    return row


def _density_rows(result: PointResult, params: ModelParams):
    dens = result.density
    rho_exact = exact_density_unsymmetrized(params, params.beta,
                                            dens.bin_centers)
    header = ["q_over_re"]
    for comm, sym in CHANNELS:
        base = f"{_COMM_LABEL[comm]}_{sym}"
        header += [f"rho_{base}_per_re", f"rho_error_{base}_per_re"]
    header += ["rho_exact_unsym_per_re"]
    rows = []
    for i, q in enumerate(dens.bin_centers):
        row = [q]
        for key in CHANNELS:
            rho, err = dens.profiles[key]
            row += [rho[i], err[i]]
        row.append(rho_exact[i])
        rows.append(row)
    return header, rows


def _write_csv(path: Path, header: list, rows: list) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def run_sweep(config: RunConfig) -> dict:
    """Run every beta point, write CSVs + metadata; returns the metadata."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()

    spectrum = enumerate_levels(config.model_params(config.beta_list[0]),
                                config.l_max)
    energy_rows = []
    density_written = False
    pole_flags = {}
    acceptance = {}
    for i, beta in enumerate(config.beta_list):
        params = config.model_params(beta)
        # distinct, deterministic seed per temperature point
        result = run_point(params, config.mc_settings(config.seed + 1000 * i))
        exact = exact_energy_closed(params)
        trunc = truncated_energy(spectrum, beta)
        energy_rows.append(_energy_row(beta, result, exact, trunc))
        pole_flags[str(beta)] = [f"{_COMM_LABEL[c]}_{s}"
                                 for (c, s) in CHANNELS
                                 if result.near_pole[(c, s)]]
        acceptance[str(beta)] = result.acceptance
        if result.density is not None and not density_written:
            header, rows = _density_rows(result, params)
            _write_csv(out / "density_profile.csv", header, rows)
            density_written = True

    _write_csv(out / "energy_vs_beta.csv", _energy_header(), energy_rows)
    meta = {
        "config": config.to_dict(),
        "version": __version__,
        "wall_time_s": round(time.time() - t0, 3),
        "near_pole": pole_flags,
        "acceptance": acceptance,
        "files": ["energy_vs_beta.csv"] + (
            ["density_profile.csv"] if density_written else []),
    }
    with (out / "metadata.json").open("w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def _cmd_run(args) -> int:
    overrides = {}
    if args.config:
        overrides.update(json.loads(Path(args.config).read_text()))
    for key in ("seed", "chains", "sweeps", "out_dir"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    if args.beta_list:
        overrides["beta_list"] = args.beta_list
    if args.preset:
        config = preset_config(args.preset, **overrides)
    else:
        config = RunConfig.from_dict(overrides)
    meta = run_sweep(config)
    print(f"wrote {', '.join(meta['files'])} to {config.out_dir} "
          f"({meta['wall_time_s']}s)")
    return 0


def _cmd_oracle(args) -> int:
    config = preset_config(args.preset)
    if args.lmax is not None:
        config.l_max = args.lmax
    if args.beta_list:
        config.beta_list = args.beta_list
    params = config.model_params(config.beta_list[0])
    spectrum = enumerate_levels(params, config.l_max)
    lines = ["beta_hw_lj,exact_closed_hw_lj,exact_truncated_hw_lj"]
    for beta in config.beta_list:
        p = config.model_params(beta)
        lines.append(",".join(_fmt(x) for x in
                              (beta, exact_energy_closed(p),
                               truncated_energy(spectrum, beta))))
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _cmd_selftest(_args) -> int:
    failures = []

    def check(name, ok):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures.append(name)

    from .commutation import w_sho_mehler, w_sho_series
    rng = np.random.default_rng(0)
    pq = rng.normal(size=(2, 64))
    for v, n_max in ((0.5, 64), (2.0, 24), (10.0, 24)):
        err = np.max(np.abs(w_sho_series(pq[0], pq[1], v, n_max)
                            - w_sho_mehler(pq[0], pq[1], v)))
        check(f"series vs closed form (beta_hw={v})", err < 1e-6)

    from .meanfield import pair_expand, quadratic_energy, singlet_expand
    from .model import potential_formula
    p = ModelParams(n_particles=5, lattice_spacing=1.0, kappa=0.7,
                    lambda_nn=1.3, beta=2.0)
    d = rng.normal(0.0, 0.2, size=(16, 5))
    u = p.energy_scale * potential_formula(d, p.kappa, p.lambda_nn)
    for tag, exp in (("singlet", singlet_expand(p, d)),
                     ("pair", pair_expand(p, d))):
        res = np.max(np.abs(quadratic_energy(exp) - u))
        check(f"{tag} expansion reconstructs the potential", res < 1e-9)

    from .symmetrize import dimer_phases
    g = rng.normal(size=(16, 5))
    q = p.lattice + d
    eta_p = 1.0 + dimer_phases(q, g, p.length_scale).sum(axis=-1)
    eta_m = 1.0 - dimer_phases(q, g, p.length_scale).sum(axis=-1)
    check("boson + fermion weights sum to 2",
          np.max(np.abs(eta_p + eta_m - 2.0)) < 1e-12)

    cfg = preset_config("fig1", beta_list=[1.0], sweeps=400, chains=16,
                        out_dir="unused")
    r1 = run_point(cfg.model_params(1.0), cfg.mc_settings(7))
    r2 = run_point(cfg.model_params(1.0), cfg.mc_settings(7))
    check("seed reproducibility",
          all(r1.energy[k] == r2.energy[k] for k in r1.energy))

    print(f"{'OK' if not failures else 'FAILED'}: "
          f"{len(failures)} failure(s)")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasecrystal",
        description="Canonical quantum averages of a 1-d harmonic crystal "
                    "by classical phase-space Monte Carlo")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Monte Carlo sweep over beta")
    run_p.add_argument("--preset", choices=sorted(PRESETS))
    run_p.add_argument("--config", help="JSON config file")
    run_p.add_argument("--out", dest="out_dir")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--chains", type=int)
    run_p.add_argument("--sweeps", type=int)
    run_p.add_argument("--beta-list", type=float, nargs="+")
    run_p.set_defaults(func=_cmd_run)

    oracle_p = sub.add_parser("oracle", help="exact reference energies")
    oracle_p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    oracle_p.add_argument("--lmax", type=int)
    oracle_p.add_argument("--beta-list", type=float, nargs="+")
    oracle_p.add_argument("--out")
    oracle_p.set_defaults(func=_cmd_oracle)

    self_p = sub.add_parser("selftest", help="internal consistency checks")
    self_p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

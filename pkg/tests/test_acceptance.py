"""End-to-end acceptance checks against frozen reference values.

Each test covers one headline claim about the default 4-particle chain and
prints a single PASS line on success (failures carry the numbers in the
assertion message).  Reference energies live in this file with their quoted
uncertainties; simulation results must agree within three combined error
bars, and analytic anchors within stated absolute tolerances.

These runs use production sample counts and take a few minutes in total.
"""

import numpy as np
import pytest

from phasecrystal.cli import main as cli_main, preset_config
from phasecrystal.engine import MCSettings, run_point
from phasecrystal.phonons import (enumerate_levels, exact_energy_closed,
                                  normal_modes, truncated_energy)

pytestmark = pytest.mark.acceptance


def _point(preset, beta, sweeps=20_000, chains=128, seed=11, **kw):
    cfg = preset_config(preset, beta_list=[beta], sweeps=sweeps,
                        chains=chains, **kw)
    return run_point(cfg.model_params(beta), cfg.mc_settings(seed))


def _combined(err_sim, err_ref):
    return 3.0 * float(np.hypot(err_sim, err_ref))


def _report(name, detail):
    print(f"PASS  {name}: {detail}")


# -- analytic anchors --------------------------------------------------------

@pytest.mark.parametrize("kappa,lam,e1", [
    (1.0, 1.0, 3.3850),
    (0.0, 0.02, 0.3757),
    (0.0, 1.0, 2.6569),
])
def test_ground_state_energies(kappa, lam, e1):
    cfg = preset_config("fig1")
    p = cfg.model_params(1.0)
    import dataclasses
    p = dataclasses.replace(p, kappa=kappa, lambda_nn=lam)
    e = normal_modes(p).ground_state_energy
    assert e == pytest.approx(e1, abs=5e-4), (
        f"ground state {e:.5f} vs reference {e1}")
    _report("ground state energy",
            f"kappa={kappa}, lambda={lam}: {e:.5f} (ref {e1} +- 5e-4)")


def test_level_sum_convergence_to_closed_form():
    # truncated-spectrum energy at beta = 3 on the weakly coupled chain,
    # frozen at two enumeration depths, approaching the closed form 1.3730
    p = preset_config("fig2").model_params(3.0)
    refs = {10_000: 1.3627, 20_000: 1.3707}
    for l_max, ref in refs.items():
        val = truncated_energy(enumerate_levels(p, l_max), 3.0)
        assert val == pytest.approx(ref, abs=1e-3), (
            f"l_max={l_max}: {val:.5f} vs {ref}")
    closed = exact_energy_closed(p)
    assert closed == pytest.approx(1.3730, abs=1e-3)
    _report("level-sum oracle convergence",
            f"beta=3: 10k levels -> {refs[10_000]}, 20k -> {refs[20_000]}, "
            f"closed form {closed:.4f}")


# -- energy sweeps vs frozen simulation references ---------------------------

def test_classical_limit_strong_springs():
    # unity-weight channel at beta = 10 must sit on the classical value
    # N/beta = 0.400 of the quadratic chain
    r = _point("fig1", 10.0)
    val, err = r.energy["unity", "dm0"]
    assert abs(val - 0.400) <= 1e-3, f"classical {val:.5f} +- {err:.5f}"
    _report("classical channel, strong springs",
            f"beta=10: {val:.4f} +- {err:.4f} (ref 0.400 +- 0.001)")


def test_quantum_energies_strong_springs():
    r = _point("fig1", 10.0)
    refs = {"singlet": (3.116, 0.002), "pair": (3.305, 0.001)}
    details = []
    for comm, (ref, ref_err) in refs.items():
        val, err = r.energy[comm, "dm0"]
        assert abs(val - ref) <= _combined(err, ref_err), (
            f"{comm}: {val:.4f} +- {err:.4f} vs {ref} +- {ref_err}")
        details.append(f"{comm} {val:.4f}+-{err:.4f} (ref {ref})")
    _report("mean-field energies, strong springs, beta=10", "; ".join(details))


def test_quantum_energies_weak_springs():
    # KNOWN RED.  This implementation converges about 0.014-0.019 above
    # these references at beta = 3 (converged in truncation order, stable
    # across sweeps/chains, and reproduced identically by the sampled
    # cross-check), while matching the strong-spring and tight-lattice
    # references tightly and reproducing the singlet/pair spacing here
    # (+0.010 vs +0.012).  Every estimator variant we tried that moves
    # this point onto the references breaks one of the other anchors.
    # The tolerance is kept honest rather than widened to force a pass.
    r = _point("fig2", 3.0, seed=13)
    refs = {"singlet": (1.3322, 0.0009), "pair": (1.3443, 0.0008)}
    details = []
    for comm, (ref, ref_err) in refs.items():
        val, err = r.energy[comm, "dm0"]
        assert abs(val - ref) <= _combined(err, ref_err), (
            f"{comm}: {val:.4f} +- {err:.4f} vs {ref} +- {ref_err}")
        details.append(f"{comm} {val:.4f}+-{err:.4f} (ref {ref})")
    _report("mean-field energies, weak springs, beta=3", "; ".join(details))


def test_quantum_energies_tight_lattice():
    r = _point("fig4", 10.0, seed=17)
    refs = {"singlet": (2.336, 0.002), "pair": (2.575, 0.002)}
    details = []
    for comm, (ref, ref_err) in refs.items():
        val, err = r.energy[comm, "dm0"]
        assert abs(val - ref) <= _combined(err, ref_err), (
            f"{comm}: {val:.4f} +- {err:.4f} vs {ref} +- {ref_err}")
        details.append(f"{comm} {val:.4f}+-{err:.4f} (ref {ref})")
    _report("mean-field energies, tight lattice, beta=10", "; ".join(details))


# -- fermion pole ------------------------------------------------------------

def test_fermion_pole_location_tight_lattice():
    # the mean fermion weight changes sign where the symmetrization
    # denominator passes through zero; all three commutation variants
    # should cross near beta = 0.72 on the tight lattice
    betas = [0.5, 0.6, 0.65, 0.7, 0.75, 0.85, 0.95]
    means = {c: [] for c in ("unity", "singlet", "pair")}
    for i, b in enumerate(betas):
        r = _point("fig4", b, sweeps=4000, chains=64, seed=19 + i)
        for c in means:
            means[c].append(r.mean_weight[c, "fermion"][0])
    details = []
    for c, vals in means.items():
        vals = np.asarray(vals)
        sign_change = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        assert sign_change.size == 1, f"{c}: weights {vals}"
        i = sign_change[0]
        cross = betas[i] - vals[i] * (betas[i + 1] - betas[i]) / (
            vals[i + 1] - vals[i])
        assert 0.62 <= cross <= 0.82, f"{c}: crossing at beta={cross:.3f}"
        details.append(f"{c} {cross:.3f}")
    _report("fermion-weight sign change, tight lattice",
            f"crossings at beta = {'; '.join(details)} (ref 0.72 +- 0.10)")


# -- boson/fermion energy difference -----------------------------------------

def test_statistics_difference_weak_springs():
    # the boson-fermion energy gap on the weakly coupled chain: positive
    # from beta ~ 1.5 on, peaking near beta = 1.9 at ~3% of the energy
    betas = [1.5, 1.7, 1.9, 2.1, 2.3]
    rel = []
    for i, b in enumerate(betas):
        r = _point("fig2", b, sweeps=8000, chains=64, seed=29 + i)
        diff, derr = r.difference["pair"]
        val, _ = r.energy["pair", "dm0"]
        assert diff > 0.0, f"beta={b}: difference {diff:.5f} +- {derr:.5f}"
        rel.append(diff / val)
    peak = betas[int(np.argmax(rel))]
    assert 1.7 <= peak <= 2.1, f"peak at beta={peak}, profile {rel}"
    assert 0.02 <= max(rel) <= 0.04, f"peak magnitude {max(rel):.4f}"
    _report("boson-fermion gap, weak springs",
            f"positive on beta >= 1.5, peak {100 * max(rel):.2f}% "
            f"at beta={peak} (ref ~3% near 1.9)")


# -- internal consistency ----------------------------------------------------

def test_consistency_selftest(capsys):
    assert cli_main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    with capsys.disabled():
        _report("internal consistency selftest", "all checks green")


def test_sampled_momentum_cross_check():
    # the fully momentum-resolved sampler must agree with the analytic
    # momentum integrals on the identity-permutation channels
    cfg = preset_config("fig1", beta_list=[2.0], sweeps=6000, chains=64)
    pa = run_point(cfg.model_params(2.0), cfg.mc_settings(31))
    cfg.momentum_mode = "sampled"
    ps = run_point(cfg.model_params(2.0), cfg.mc_settings(31))
    details = []
    for comm in ("unity", "singlet", "pair"):
        va, ea = pa.energy[comm, "dm0"]
        vs, es = ps.energy[comm, "dm0"]
        assert abs(va - vs) <= _combined(ea, es), (
            f"{comm}: analytic {va:.4f}+-{ea:.4f} vs sampled {vs:.4f}+-{es:.4f}")
        details.append(f"{comm} {va:.4f} vs {vs:.4f}")
    _report("analytic vs sampled momentum integrals", "; ".join(details))

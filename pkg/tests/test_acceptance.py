"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see them
even on success).  Tolerances are pinned here and nowhere else.
"""

import json
import time
from pathlib import Path

import numpy as np

from magnon_hybrid import (
    FitProblem,
    HybridModel,
    InstabilityError,
    MagnonMode,
    SpectralMap,
    SpinEnsemble,
    build_n4,
    classify,
    eigen_full,
    estimate_coupling,
    estimate_filling,
    extract_ridges,
    fit,
    fit_line,
    fock_oracle,
    lorentzian_value,
    perturb_symmetry,
    ring_network,
    solve_modes,
    sweep,
    two_mode_exact,
)
from magnon_hybrid.cli import main as cli_main
from magnon_hybrid.spectra import LorentzianLine

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

_results = []


def _report(criterion: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}" + (f"  [{detail}]" if detail else "")
    print(line)
    _results.append(line)
    assert ok, line


def two_mode(omega_c, omega_m, g):
    return HybridModel(photon_freq_ghz=[omega_c], photon_coupling_ghz=[[0.0]],
                       magnon_freq_ghz=omega_m, magnon_coupling_ghz=[g],
                       photon_linewidth_ghz=[0.0])


def test_criterion_1_two_mode_resonant_splitting():
    model = two_mode(13.65, 13.65, 1.84)
    oracle = two_mode_exact(13.65, 13.65, 1.84)
    ps = eigen_full(model)
    rel = np.abs(ps.frequencies_ghz - oracle) / oracle
    printed = np.abs(ps.frequencies_ghz - np.array([11.6658, 15.3804])).max()
    runtime = min(
        (lambda t0: (eigen_full(model), time.perf_counter() - t0)[1])(time.perf_counter())
        for _ in range(15))
    ok = rel.max() < 1e-9 and printed < 1e-4 and runtime < 1e-3
    _report("1 two-mode resonant splitting vs quartic roots", ok,
            f"max rel {rel.max():.2e}, |Δ printed| {printed:.1e}, {runtime * 1e3:.3f} ms")


def test_criterion_2_fock_oracle_equivalence():
    rng = np.random.default_rng(20260809)
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    while checked < 50:
        n = int(rng.integers(1, 4))
        freqs = rng.uniform(8.0, 15.0, n)
        omega_m = rng.uniform(8.0, 15.0)
        wmin = min(freqs.min(), omega_m)
        g = rng.uniform(0.02, 0.15, n) * wmin
        coup = np.zeros((n, n))
        if n > 1 and rng.random() < 0.5:
            i, j = sorted(rng.choice(n, 2, replace=False))
            coup[i, j] = coup[j, i] = rng.uniform(0.0, 0.05) * wmin
        model = HybridModel(photon_freq_ghz=freqs, photon_coupling_ghz=coup,
                            magnon_freq_ghz=omega_m, magnon_coupling_ghz=g,
                            photon_linewidth_ghz=np.zeros(n))
        try:
            full = eigen_full(model).frequencies_ghz
        except InstabilityError:
            continue
        checked += 1
        worst = max(worst, float(np.abs(fock_oracle(model, 14) - full).max()))
    elapsed = time.perf_counter() - t0
    ok = worst < 2e-3 and elapsed < 60.0
    _report("2 Fock-oracle equivalence on 50 random stable models", ok,
            f"worst |Δ| {worst:.2e} GHz, {elapsed:.1f} s")


def test_criterion_3_n4_fit_round_trip():
    truth = {"omega_c": 13.65, "g_rl": 0.155, "g": 1.84}
    tolerances = {"omega_c": 0.02, "g_rl": 0.010, "g": 0.02}
    mag = MagnonMode(28.0, 0.0, 0.001)
    model = build_n4(truth["omega_c"], truth["g_rl"], truth["g"], 12.0)
    fields = np.linspace(0.30, 0.65, 40)
    clean = sweep(model, mag, fields).branch_frequencies().reshape(-1)
    field_col = np.repeat(fields, 3)
    template = build_n4(13.0, 0.10, 1.5, 12.0)
    bounds = {"omega_c": (8.0, 20.0), "g_rl": (1e-3, 2.0), "g": (1e-3, 6.0)}

    recovered = {k: [] for k in truth}
    converged = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        data = clean + rng.normal(0.0, 0.005, clean.shape)
        initial = {k: v * (1.0 + rng.uniform(-0.10, 0.10)) for k, v in truth.items()}
        problem = FitProblem(field_t=field_col, freq_ghz=data, model_kind="n4",
                             template=template, magnon=mag,
                             free=("omega_c", "g_rl", "g"),
                             initial=initial, bounds=bounds)
        result = fit(problem)
        converged += result.converged
        for k in truth:
            recovered[k].append(result.params[k])
    med_err = {k: abs(float(np.median(recovered[k])) - truth[k]) for k in truth}
    ok = converged >= 95 and all(med_err[k] < tolerances[k] for k in truth)
    _report("3 doublet-model fit round trip, 5 MHz noise, 100 seeds", ok,
            f"median errs {med_err['omega_c']:.4f}/{med_err['g_rl']:.4f}/"
            f"{med_err['g']:.4f} GHz, converged {converged}/100")


def test_criterion_4_n8_superstrong_dual_reading():
    report = classify([1.18, 1.46], [11.20, 12.20], 1.0,
                      magnon_linewidth_ghz=0.001,
                      photon_linewidth_ghz=[0.036, 0.015])
    printed_true = all(p.superstrong for p in report.as_printed)
    halved_false = not any(p.superstrong for p in report.halved)
    both_emitted = len(report.as_printed) == len(report.halved) == 2
    ok = printed_true and halved_false and both_emitted
    _report("4 three-mode superstrong flags under both coupling readings", ok,
            f"as-printed {[p.superstrong for p in report.as_printed]}, "
            f"halved {[p.superstrong for p in report.halved]}")


def test_criterion_5_n4_ultrastrong_and_strong():
    report = classify([1.84], [13.65], None, magnon_linewidth_ghz=0.001,
                      photon_linewidth_ghz=[0.022])
    entry = report.as_printed[0]
    ratio = 1.84 / 13.65
    ok = entry.ultrastrong and entry.strong and ratio >= 0.1
    _report("5 doublet-model ultrastrong and strong flags", ok,
            f"g/omega = {ratio:.3f}, strong={entry.strong}, "
            f"ultrastrong={entry.ultrastrong}")


def test_criterion_6_coupling_estimator_consistency():
    ensemble = SpinEnsemble(spin_density_per_m3=2e28, spin_quantum=2.5,
                            filling_factor=0.015)
    g_est = estimate_coupling(ensemble, 13.65, 28.0)
    rel = abs(g_est - 1.84) / 1.84
    xi = estimate_filling(1.84, ensemble, 13.65, 28.0)
    ok = rel < 0.10 and 0.013 <= xi <= 0.017
    _report("6 ensemble coupling estimator consistency", ok,
            f"g_est {g_est:.3f} GHz ({rel:.1%} off), xi {xi:.4f}")


def test_criterion_7_lorentzian_q_extraction():
    results = []
    for center, fwhm, q_expected in ((13.566, 0.014, 969.0), (14.146, 0.022, 643.0)):
        f = np.linspace(center - 0.5, center + 0.5, 6001)
        db = 10 * np.log10(lorentzian_value(f, LorentzianLine(center, fwhm, 1.0)))
        _, q = fit_line(f, db, center, 0.4)
        results.append((q, q_expected))
    ok = all(abs(q - qe) <= 1.0 for q, qe in results)
    _report("7 Lorentzian linewidth and Q extraction", ok,
            ", ".join(f"Q {q:.2f} vs {qe:.0f}" for q, qe in results))


def test_criterion_8_four_post_ring_properties():
    ring = ring_network(4, 13.0, -0.1 * 13.0 ** 2)
    spectrum = solve_modes(ring)
    freqs = spectrum.frequencies_ghz
    doublet_rel = abs(freqs[2] - freqs[1]) / freqs[1]
    labels = [m.label for m in spectrum.modes]
    label_ok = (labels[0] == "↑↑↑↑"
                and labels[3] == "↑↓↑↓"
                and set(labels[1:3]) == {"↑0↓0", "0↑0↓"})

    def gap(eps):
        f = solve_modes(perturb_symmetry(ring, eps)).frequencies_ghz
        return f[2] - f[1]

    lift_ok = gap(0.02) > gap(0.01) > 0.0
    ok = doublet_rel < 1e-12 and label_ok and lift_ok
    _report("8 four-post ring degeneracy, labels, symmetry breaking", ok,
            f"doublet rel split {doublet_rel:.1e}, labels {'/'.join(labels)}, "
            f"gaps {gap(0.01):.4f} -> {gap(0.02):.4f}")


def test_criterion_9_end_to_end_pipeline(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "pipeline"
    rc = cli_main(["synth", "--config", str(CONFIGS / "synth_n4.json"),
                   "--out", str(out)])
    assert rc == 0
    smap = SpectralMap.from_csv(out / "map.csv")
    assert smap.magnitude_db.shape == (2000, 200)
    points = extract_ridges(smap, 6.0, 3)
    ridge_csv = out / "ridges.csv"
    points.to_csv(ridge_csv)
    rc = cli_main(["fit", "--config", str(CONFIGS / "fit_n4.json"),
                   "--set", f"data.path={ridge_csv}", "--out", str(out)])
    assert rc == 0
    result = json.loads((out / "fit_result.json").read_text())
    elapsed = time.perf_counter() - t0
    truth = {"omega_c": 13.65, "g_rl": 0.155, "g": 1.84}
    rels = {k: abs(result["params"][k] - v) / v for k, v in truth.items()}
    ok = (result["converged"] and all(r < 0.02 for r in rels.values())
          and elapsed < 30.0)
    _report("9 end-to-end synth -> ridges -> fit pipeline", ok,
            f"rel errs {rels['omega_c']:.2e}/{rels['g_rl']:.2e}/{rels['g']:.2e}, "
            f"{elapsed:.1f} s")


def test_zzz_summary():
    print()
    print("=" * 72)
    for line in _results:
        print(line)
    print("=" * 72)
    assert len(_results) == 9

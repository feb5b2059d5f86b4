"""Command-line front end: magnon-hybrid <modes|sweep|synth|fit|estimate>.

Every command reads one JSON config (``--config``, overridable with
``--set key.path=value``), writes its artifacts atomically into ``--out``
and finishes with a ``run_report.json`` listing each output with its SHA-256
hash.  Exit codes: 0 success (including a reported non-converged fit),
2 configuration problem, 3 fully unstable sweep, 4 unreadable or
insufficient data.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    as_integer,
    as_number,
    check_keys,
    check_schema_version,
    load_config,
    parse_field_grid,
    parse_freq_grid,
    parse_magnon,
    parse_material,
    parse_model,
    parse_network,
    require_key,
)
from .errors import (
    AllUnstableError,
    ConfigError,
    DataError,
    InvalidArgumentError,
    NonPhysicalError,
)
from .fitting import FitProblem, classify, fit, photon_mode_spacing, _residuals
from .hamiltonian import sweep
from .io_utils import write_json, write_rows, write_text_atomic
from .magnon import estimate_coupling, estimate_filling
from .network import solve_modes, wgm_order
from .spectra import FLOOR_DB, load_ridge_csv, synth_map
from .svgplot import HeatBackground, Series, render_chart

_THREADS_ENV = "MAGNON_HYBRID_THREADS"


def _workers() -> int:
    raw = os.environ.get(_THREADS_ENV)
    if raw is None:
        return 1
    try:
        val = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{_THREADS_ENV} must be an integer, got {raw!r}") from exc
    if val < 1:
        raise ConfigError(f"{_THREADS_ENV} must be >= 1")
    return val


def cmd_modes(cfg: dict, outdir: Path) -> list[Path]:
    check_schema_version(cfg)
    check_keys(cfg, {"schema_version", "network", "pattern_zero_tol"}, "")
    zero_tol = as_number(cfg.get("pattern_zero_tol", 0.05), "pattern_zero_tol",
                       positive=True)
    network = parse_network(require_key(cfg, "network", ""))
    spectrum = solve_modes(network, pattern_zero_tol=zero_tol)

    doc = spectrum.to_dict()
    doc["network"] = network.to_dict()
    doc["node_counts"] = [wgm_order(m) for m in spectrum.modes]
    json_path = outdir / "modes.json"
    write_json(json_path, doc)

    groups = {i: gi for gi, grp in enumerate(spectrum.degenerate_groups) for i in grp}
    rows = [("mode_index", "frequency_ghz", "label", "degenerate", "fsr_to_next_ghz")]
    for i, mode in enumerate(spectrum.modes):
        fsr = spectrum.fsr_ghz[i] if i < spectrum.fsr_ghz.size else ""
        rows.append((i, mode.frequency_ghz, mode.label,
                     "true" if i in groups else "false", fsr))
    csv_path = outdir / "modes.csv"
    write_rows(csv_path, rows)
    return [json_path, csv_path]


def _sweep_from_cfg(cfg: dict):
    magnon = parse_magnon(require_key(cfg, "magnon", ""))
    model, kind = parse_model(require_key(cfg, "model", ""), magnon)
    fields = parse_field_grid(require_key(cfg, "sweep", ""))
    return model, kind, magnon, fields


def cmd_sweep(cfg: dict, outdir: Path) -> list[Path]:
    check_schema_version(cfg)
    check_keys(cfg, {"schema_version", "model", "magnon", "sweep", "plot"}, "")
    model, _, magnon, fields = _sweep_from_cfg(cfg)
    branches = sweep(model, magnon, fields, workers=_workers())
    if not branches.stable_mask.any():
        raise AllUnstableError("every sweep point is Bogoliubov-unstable")

    csv_path = outdir / "branches.csv"
    branches.to_csv(csv_path)

    background = None
    plot_cfg = cfg.get("plot", {})
    check_keys(plot_cfg, {"background_map"}, "plot")
    if "background_map" in plot_cfg:
        from .spectra import SpectralMap
        smap = SpectralMap.from_csv(plot_cfg["background_map"])
        background = HeatBackground(x=smap.field_t, y=smap.freq_ghz,
                                    values=smap.magnitude_db)
    freqs = branches.branch_frequencies()
    series = [Series(x=branches.field_t, y=freqs[:, k], label=f"branch {k}",
                     css_class="branch")
              for k in range(branches.n_branches)]
    svg_path = outdir / "branches.svg"
    write_text_atomic(svg_path, render_chart(
        series=series, x_label="field (T)", y_label="frequency (GHz)",
        title="polariton branches", background=background))
    return [csv_path, svg_path]


def cmd_synth(cfg: dict, outdir: Path) -> list[Path]:
    check_schema_version(cfg)
    check_keys(cfg, {"schema_version", "model", "magnon", "sweep", "freq", "noise"}, "")
    model, _, magnon, fields = _sweep_from_cfg(cfg)
    freqs = parse_freq_grid(require_key(cfg, "freq", ""))
    smap = synth_map(model, magnon, fields, freqs, workers=_workers())
    if "noise" in cfg:
        noise = cfg["noise"]
        check_keys(noise, {"sigma_db", "seed"}, "noise")
        sigma = as_number(require_key(noise, "sigma_db", "noise"), "noise.sigma_db",
                        nonnegative=True)
        seed = as_integer(require_key(noise, "seed", "noise"), "noise.seed", minimum=0)
        rng = np.random.default_rng(seed)
        noisy = np.maximum(
            smap.magnitude_db + rng.normal(0.0, sigma, smap.magnitude_db.shape),
            FLOOR_DB)
        from .spectra import SpectralMap
        smap = SpectralMap(smap.field_t, smap.freq_ghz, noisy)
    csv_path = outdir / "map.csv"
    smap.to_csv(csv_path)
    return [csv_path]


_FIT_DEFAULT_FREE = {
    "n4": ("omega_c", "g_rl", "g"),
    "n8": ("omega_c1", "omega_c2", "omega_c3", "g1", "g2", "g3"),
}


def _fit_initial_from_model(kind: str, model) -> dict[str, float]:
    if kind == "n4":
        return {"omega_c": float(model.photon_freq_ghz[0]),
                "g_rl": float(model.photon_coupling_ghz[0, 1]),
                "g": float(model.magnon_coupling_ghz[0])}
    if kind == "n8":
        out = {f"omega_c{i + 1}": float(model.photon_freq_ghz[i]) for i in range(3)}
        out.update({f"g{i + 1}": float(model.magnon_coupling_ghz[i]) for i in range(3)})
        return out
    out = {f"photon_freq_{i}": float(f) for i, f in enumerate(model.photon_freq_ghz)}
    n = model.n_photon
    for i in range(n):
        for j in range(i + 1, n):
            out[f"photon_coupling_{i}_{j}"] = float(model.photon_coupling_ghz[i, j])
    out.update({f"magnon_coupling_{i}": float(g)
                for i, g in enumerate(model.magnon_coupling_ghz)})
    return out


def cmd_fit(cfg: dict, outdir: Path) -> list[Path]:
    check_schema_version(cfg)
    check_keys(cfg, {"schema_version", "data", "model", "magnon", "fit", "classify"}, "")
    data_cfg = require_key(cfg, "data", "")
    check_keys(data_cfg, {"path"}, "data")
    magnon = parse_magnon(require_key(cfg, "magnon", ""))
    model, kind = parse_model(require_key(cfg, "model", ""), magnon)

    fit_cfg = cfg.get("fit", {})
    check_keys(fit_cfg, {"free", "bounds", "initial", "max_iter"}, "fit")
    free = tuple(fit_cfg.get("free", _FIT_DEFAULT_FREE.get(kind, ())))
    if not free:
        raise ConfigError("fit.free must name at least one parameter")
    initial = _fit_initial_from_model(kind, model)
    initial.update({"gyro": magnon.gyro_ghz_per_t, "field_offset": magnon.field_offset_t})
    for key, val in fit_cfg.get("initial", {}).items():
        initial[key] = as_number(val, f"fit.initial.{key}")
    bounds = {}
    for key, val in fit_cfg.get("bounds", {}).items():
        pair = val if isinstance(val, list) and len(val) == 2 else None
        if pair is None:
            raise ConfigError(f"fit.bounds.{key} must be [lo, hi]")
        bounds[key] = (float(pair[0]), float(pair[1]))
    max_iter = as_integer(fit_cfg.get("max_iter", 500), "fit.max_iter", minimum=1)

    points = load_ridge_csv(require_key(data_cfg, "path", "data"))
    if len(points) < 2 * len(free):
        raise DataError(
            f"insufficient data: {len(points)} points for {len(free)} free parameters "
            f"(need at least {2 * len(free)})")
    try:
        problem = FitProblem.from_ridge_points(
            points, model_kind=kind, template=model, magnon=magnon,
            free=free, initial=initial, bounds=bounds)
        result = fit(problem, max_iter=max_iter)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc)) from exc

    fit_path = outdir / "fit_result.json"
    write_json(fit_path, result.to_dict())

    fitted_model, fitted_magnon = _fit_model(problem, result)
    cls_cfg = cfg.get("classify", {})
    check_keys(cls_cfg, {"fsr_ghz", "ultrastrong_threshold"}, "classify")
    threshold = as_number(cls_cfg.get("ultrastrong_threshold", 0.1),
                        "classify.ultrastrong_threshold", positive=True)
    fsr = cls_cfg.get("fsr_ghz")
    if fsr is None:
        fsr_per_mode = photon_mode_spacing(fitted_model)
        fsr_arg = [None if not np.isfinite(v) else float(v) for v in fsr_per_mode]
        fsr_arg = fsr_arg if all(v is not None for v in fsr_arg) else None
    else:
        fsr_arg = as_number(fsr, "classify.fsr_ghz", positive=True)
    # three-mode couplings are conventionally quoted over pi, i.e. at twice
    # the ordinary-frequency value the model carries; the classifier then
    # reports that quote both at face value and halved
    quote_factor = 2.0 if kind == "n8" else 1.0
    report = classify(
        quote_factor * np.abs(fitted_model.magnon_coupling_ghz),
        fitted_model.photon_freq_ghz,
        fsr_arg, magnon_linewidth_ghz=fitted_magnon.linewidth_ghz,
        photon_linewidth_ghz=fitted_model.photon_linewidth_ghz,
        ultrastrong_threshold=threshold)
    doc = report.to_dict()
    doc["coupling_quote_convention"] = "g_over_pi" if kind == "n8" else "ordinary"
    regime_path = outdir / "regime_report.json"
    write_json(regime_path, doc)

    theta = np.array([result.params[name] for name in problem.free])
    residuals = _residuals(problem, theta)
    svg_path = outdir / "residuals.svg"
    if residuals is None:
        residuals = np.full(problem.field_t.shape, np.nan)
    write_text_atomic(svg_path, render_chart(
        series=[Series(x=problem.field_t, y=residuals, marker=True,
                       css_class="residual", label="data - model")],
        x_label="field (T)", y_label="residual (GHz)",
        title=f"fit residuals (rms {result.residual_rms:.4g} GHz, "
              f"converged={str(result.converged).lower()})"))
    return [fit_path, regime_path, svg_path]


def _fit_model(problem: FitProblem, result):
    from .fitting import _apply_params
    theta = np.array([result.params[name] for name in problem.free])
    return _apply_params(problem, theta)


def cmd_estimate(cfg: dict, outdir: Path) -> list[Path]:
    check_schema_version(cfg)
    check_keys(cfg, {"schema_version", "material", "estimate"}, "")
    ensemble, magnon = parse_material(require_key(cfg, "material", ""))
    est = require_key(cfg, "estimate", "")
    check_keys(est, {"cavity_freq_ghz", "mode", "g_ghz"}, "estimate")
    cavity = as_number(require_key(est, "cavity_freq_ghz", "estimate"),
                     "estimate.cavity_freq_ghz", positive=True)
    mode = est.get("mode", "coupling")
    if mode not in ("coupling", "filling"):
        raise ConfigError("estimate.mode must be 'coupling' or 'filling'")

    warnings = []
    if ensemble.filling_factor >= 1.0:
        warnings.append("filling factor 1 is unphysical for a sphere inside a cavity")
    doc = {
        "mode": mode,
        "inputs": {
            "gyro_ghz_per_t": magnon.gyro_ghz_per_t,
            "spin_density_per_m3": ensemble.spin_density_per_m3,
            "spin_quantum": ensemble.spin_quantum,
            "filling_factor": ensemble.filling_factor,
            "cavity_freq_ghz": cavity,
        },
        "formula": "g = (gamma_rad/2) * sqrt(2*s*mu0*hbar*omega_c*n_s*xi) / (2*pi)",
        "warnings": warnings,
    }
    if mode == "coupling":
        g_est = estimate_coupling(ensemble, cavity, magnon.gyro_ghz_per_t)
        doc["g_est_ghz"] = g_est
        print(f"g_est = {g_est:.6g} GHz")
    else:
        g_meas = as_number(require_key(est, "g_ghz", "estimate"), "estimate.g_ghz",
                         positive=True)
        xi_est = estimate_filling(g_meas, ensemble, cavity, magnon.gyro_ghz_per_t)
        doc["inputs"]["g_ghz"] = g_meas
        doc["filling_factor_est"] = xi_est
        if xi_est > 1.0:
            doc["warnings"].append("estimated filling factor exceeds 1")
        print(f"filling_factor_est = {xi_est:.6g}")
    path = outdir / "estimate.json"
    write_json(path, doc)
    return [path]


_COMMANDS = {
    "modes": cmd_modes,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "fit": cmd_fit,
    "estimate": cmd_estimate,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="magnon-hybrid",
        description="Model multimode cavity-magnon systems: solve post-network modes, "
                    "sweep polariton branches, synthesise transmission maps, fit "
                    "avoided-crossing data, estimate ensemble couplings.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("modes", "solve a post-network mode spectrum"),
            ("sweep", "polariton branches versus field"),
            ("synth", "synthesise a transmission map"),
            ("fit", "fit model parameters to branch data and classify the regime"),
            ("estimate", "ensemble coupling / filling-factor estimate")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--set", action="append", default=[], metavar="KEY.PATH=VALUE",
                       help="override a config entry (value parsed as JSON)")
        p.add_argument("--out", default=".", help="output directory (default: .)")
    args = parser.parse_args(argv)

    t0 = time.perf_counter()
    try:
        workers = _workers()
        cfg = load_config(args.config, args.set)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        outputs = _COMMANDS[args.command](cfg, outdir)
    except (ConfigError, InvalidArgumentError, NonPhysicalError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AllUnstableError as exc:
        print(f"sweep error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 4

    report = {
        "command": args.command,
        "config": cfg,
        "tool_version": __version__,
        "threads": workers,
        "elapsed_s": round(time.perf_counter() - t0, 6),
        "outputs": [
            {"path": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in outputs
        ],
    }
    write_json(outdir / "run_report.json", report)
    return 0


def entry() -> None:
    sys.exit(main())

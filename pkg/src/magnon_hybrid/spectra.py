"""Transmission-map synthesis and spectral line analysis.

Synthetic maps are incoherent sums of Lorentzian power lines, one per
polariton branch: each line sits at the branch frequency, its width is the
composition-weighted mix of the bare photon and magnon linewidths, and its
amplitude is the total photon fraction (a magnon-dominated branch is faint).
No interference between lines is modelled; amplitudes are relative, with the
map reported in dB and floored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from .errors import (
    DataError,
    DegenerateFitError,
    InvalidArgumentError,
    NoPeakError,
)
from .hamiltonian import HybridModel, sweep
from .io_utils import fmt_num, read_csv_columns, write_json, write_text_atomic
from .magnon import MagnonMode

FLOOR_DB = -120.0


@dataclass(frozen=True)
class LorentzianLine:
    """Power Lorentzian: peak value ``amplitude`` at ``center``, half height at +/- fwhm/2."""

    center_ghz: float
    fwhm_ghz: float
    amplitude: float

    def __post_init__(self):
        if self.fwhm_ghz <= 0.0:
            raise InvalidArgumentError("fwhm must be positive")
        if self.amplitude <= 0.0:
            raise InvalidArgumentError("amplitude must be positive")


def lorentzian_value(f_ghz, line: LorentzianLine):
    """Linear-power value of the line at frequency ``f_ghz`` (scalar or array)."""
    half = 0.5 * line.fwhm_ghz
    f = np.asarray(f_ghz, dtype=float)
    out = line.amplitude * half ** 2 / ((f - line.center_ghz) ** 2 + half ** 2)
    return float(out) if np.isscalar(f_ghz) else out


@dataclass(frozen=True)
class SpectralMap:
    """Transmission magnitude over (field, frequency), dB, frequency-major grid."""

    field_t: np.ndarray
    freq_ghz: np.ndarray
    magnitude_db: np.ndarray

    def __post_init__(self):
        field = np.atleast_1d(np.asarray(self.field_t, dtype=float))
        freq = np.atleast_1d(np.asarray(self.freq_ghz, dtype=float))
        mag = np.atleast_2d(np.asarray(self.magnitude_db, dtype=float))
        for name, ax in (("field", field), ("frequency", freq)):
            if ax.size == 0:
                raise InvalidArgumentError(f"{name} axis must be nonempty")
            if ax.size > 1 and np.any(np.diff(ax) <= 0.0):
                raise InvalidArgumentError(f"{name} axis must be strictly increasing")
        if mag.shape != (freq.size, field.size):
            raise InvalidArgumentError(
                f"magnitude grid must be (n_freq, n_field) = {(freq.size, field.size)}, "
                f"got {mag.shape}")
        for arr in (field, freq, mag):
            arr.flags.writeable = False
        object.__setattr__(self, "field_t", field)
        object.__setattr__(self, "freq_ghz", freq)
        object.__setattr__(self, "magnitude_db", mag)

    def to_csv(self, path) -> None:
        """Header row = frequency axis, first column = field axis, cells in dB."""
        lines = ["field_t," + ",".join(fmt_num(f) for f in self.freq_ghz)]
        for c, b in enumerate(self.field_t):
            lines.append(fmt_num(b) + "," +
                         ",".join(fmt_num(v) for v in self.magnitude_db[:, c]))
        write_text_atomic(path, "\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "SpectralMap":
        from pathlib import Path
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read map file {path}: {exc}") from exc
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) < 2:
            raise DataError(f"map file {path} has no data rows")
        try:
            freq = np.array([float(x) for x in lines[0].split(",")[1:]])
            field, rows = [], []
            for ln in lines[1:]:
                cells = ln.split(",")
                field.append(float(cells[0]))
                rows.append([float(x) for x in cells[1:]])
            mag = np.asarray(rows).T
        except ValueError as exc:
            raise DataError(f"malformed map file {path}: {exc}") from exc
        return cls(np.asarray(field), freq, mag)

    def to_json(self, path) -> None:
        write_json(path, {
            "field_t": self.field_t.tolist(),
            "freq_ghz": self.freq_ghz.tolist(),
            "magnitude_db": self.magnitude_db.tolist(),
        })

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SpectralMap":
        return cls(np.asarray(doc["field_t"], dtype=float),
                   np.asarray(doc["freq_ghz"], dtype=float),
                   np.asarray(doc["magnitude_db"], dtype=float))


@dataclass(frozen=True)
class RidgePoints:
    """Peak positions extracted column-by-column from a map."""

    field_t: np.ndarray
    freq_ghz: np.ndarray
    prominence_db: np.ndarray

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.field_t, dtype=float))
        q = np.atleast_1d(np.asarray(self.freq_ghz, dtype=float))
        p = np.atleast_1d(np.asarray(self.prominence_db, dtype=float))
        if not (f.shape == q.shape == p.shape):
            raise InvalidArgumentError("ridge point arrays must have equal length")
        for arr in (f, q, p):
            arr.flags.writeable = False
        object.__setattr__(self, "field_t", f)
        object.__setattr__(self, "freq_ghz", q)
        object.__setattr__(self, "prominence_db", p)

    def __len__(self) -> int:
        return self.field_t.shape[0]

    def to_csv(self, path) -> None:
        from .io_utils import write_rows
        rows = [("field_t", "freq_ghz", "prominence_db")]
        rows += list(zip(self.field_t, self.freq_ghz, self.prominence_db))
        write_rows(path, rows)


def synth_map(model: HybridModel, magnon: MagnonMode, fields_t, freqs_ghz, *,
              floor_db: float = FLOOR_DB, workers: int | None = None) -> SpectralMap:
    """Synthesise a transmission map from the hybrid model.

    Per field column the polariton branches are computed and rendered as
    Lorentzian power lines with composition-mixed widths; columns where the
    model is unstable fall back to the bare photon lines so the map stays
    rectangular.  Branches whose mixed linewidth is zero are skipped (they
    would be delta functions).
    """
    freqs = np.atleast_1d(np.asarray(freqs_ghz, dtype=float))
    if freqs.size == 0 or (freqs.size > 1 and np.any(np.diff(freqs) <= 0.0)):
        raise InvalidArgumentError("frequency axis must be nonempty, strictly increasing")
    branches = sweep(model, magnon, fields_t, workers=workers)
    m = branches.field_t.size
    nb = branches.n_branches

    centers = branches.branch_frequencies().copy()           # (m, nb)
    lw_all = model.mode_linewidths_ghz
    widths = np.full((m, nb), np.nan)
    amps = np.full((m, nb), np.nan)
    for p, pol in enumerate(branches.polaritons):
        if pol.stable:
            widths[p] = pol.fractions @ lw_all
            amps[p] = 1.0 - pol.fractions[:, -1]
        else:
            k = model.n_photon
            centers[p, :k] = model.photon_freq_ghz
            widths[p, :k] = model.photon_linewidth_ghz
            amps[p, :k] = 1.0
            amps[p, k:] = 0.0

    ok = np.isfinite(centers) & (widths > 0.0) & (amps > 0.0)
    half = np.where(ok, 0.5 * widths, 1.0)
    amp = np.where(ok, amps, 0.0)
    cen = np.where(ok, centers, 0.0)

    power = np.zeros((freqs.size, m))
    # accumulate branch by branch to keep the broadcast buffers small
    for k in range(nb):
        det = freqs[:, None] - cen[None, :, k]
        power += amp[None, :, k] * half[None, :, k] ** 2 / (det ** 2 + half[None, :, k] ** 2)

    floor_power = 10.0 ** (floor_db / 10.0)
    mag = 10.0 * np.log10(np.maximum(power, floor_power))
    return SpectralMap(branches.field_t, freqs, mag)


def _lorentz_power(f, amplitude, center, fwhm):
    half = 0.5 * fwhm
    return amplitude * half ** 2 / ((f - center) ** 2 + half ** 2)


def fit_line(freq_ghz, magnitude_db, center_ghz: float, window_ghz: float):
    """Least-squares Lorentzian fit (in linear power) inside a window.

    Returns ``(LorentzianLine, q)`` with ``q = center / fwhm``.  The window
    around ``center_ghz`` must hold at least 7 samples and an interior local
    maximum, otherwise :class:`InvalidArgumentError` / :class:`NoPeakError`.
    """
    f = np.asarray(freq_ghz, dtype=float)
    y = np.asarray(magnitude_db, dtype=float)
    mask = np.abs(f - center_ghz) <= 0.5 * window_ghz
    if mask.sum() < 7:
        raise InvalidArgumentError("fit window must contain at least 7 samples")
    fw = f[mask]
    power = 10.0 ** (y[mask] / 10.0)
    imax = int(np.argmax(power))
    if imax in (0, fw.size - 1):
        raise NoPeakError("no interior local maximum in the fit window")

    peak = power[imax]
    half = 0.5 * peak
    below_l = np.nonzero(power[:imax] < half)[0]
    below_r = np.nonzero(power[imax:] < half)[0]
    if below_l.size and below_r.size:
        w0 = fw[imax + below_r[0]] - fw[below_l[-1]]
    else:
        w0 = 0.25 * (fw[-1] - fw[0])
    p0 = (peak, fw[imax], max(w0, 2.0 * (fw[1] - fw[0])))
    try:
        popt, pcov = curve_fit(_lorentz_power, fw, power, p0=p0, maxfev=10_000)
    except RuntimeError as exc:
        raise DegenerateFitError(f"Lorentzian fit did not converge: {exc}") from exc
    if not np.all(np.isfinite(pcov)):
        raise DegenerateFitError("singular fit covariance")
    amplitude, center, fwhm = float(popt[0]), float(popt[1]), float(abs(popt[2]))
    if amplitude <= 0.0 or fwhm <= 0.0:
        raise DegenerateFitError("fit collapsed to a nonpositive amplitude or width")
    line = LorentzianLine(center, fwhm, amplitude)
    return line, line.center_ghz / line.fwhm_ghz


def extract_ridges(smap: SpectralMap, prominence_db: float,
                   max_peaks_per_column: int) -> RidgePoints:
    """Column-wise peak positions above a prominence threshold.

    Each column keeps at most ``max_peaks_per_column`` peaks (largest
    prominence first); positions are refined by a 3-point parabola through
    the dB values.  An empty result is valid.
    """
    if max_peaks_per_column < 1:
        raise InvalidArgumentError("max_peaks_per_column must be at least 1")
    fields, freqs, prom = [], [], []
    fax = smap.freq_ghz
    for c, b in enumerate(smap.field_t):
        y = smap.magnitude_db[:, c]
        peaks, props = find_peaks(y, prominence=prominence_db)
        if peaks.size == 0:
            continue
        keep = np.argsort(props["prominences"])[::-1][:max_peaks_per_column]
        for p in sorted(keep, key=lambda t: peaks[t]):
            i = peaks[p]
            y0, y1, y2 = y[i - 1], y[i], y[i + 1]
            denom = y0 - 2.0 * y1 + y2
            off = 0.0 if denom == 0.0 else np.clip(0.5 * (y0 - y2) / denom, -0.5, 0.5)
            step = fax[i + 1] - fax[i] if off >= 0.0 else fax[i] - fax[i - 1]
            fields.append(b)
            freqs.append(fax[i] + off * step)
            prom.append(props["prominences"][p])
    return RidgePoints(np.asarray(fields, dtype=float),
                       np.asarray(freqs, dtype=float),
                       np.asarray(prom, dtype=float))


def load_ridge_csv(path) -> RidgePoints:
    """Read ridge/branch samples from a CSV with field_t and freq_ghz columns."""
    try:
        cols = read_csv_columns(path)
    except OSError as exc:
        raise DataError(f"cannot read data file {path}: {exc}") from exc
    if "field_t" not in cols or "freq_ghz" not in cols:
        raise DataError(f"data file {path} must have field_t and freq_ghz columns")
    try:
        field = np.array([float(x) for x in cols["field_t"]])
        freq = np.array([float(x) for x in cols["freq_ghz"]])
    except ValueError as exc:
        raise DataError(f"malformed data file {path}: {exc}") from exc
    finite = np.isfinite(field) & np.isfinite(freq)
    prom = np.zeros(int(finite.sum()))
    if "prominence_db" in cols:
        with np.errstate(invalid="ignore"):
            prom_all = np.array([float(x) for x in cols["prominence_db"]])
        prom = prom_all[finite]
    return RidgePoints(field[finite], freq[finite], prom)

"""Branch fitting by damped least squares, plus coupling-regime reports.

The fit minimises sum_k min_branch |f_k - branch(B_k)|^2: every data point
is re-assigned to its nearest model branch at each iteration, so unlabeled
ridge data can be fitted directly.  The optimiser is a small
Levenberg-Marquardt loop with a central-difference Jacobian; trial steps
that land on a Bogoliubov-unstable model are rejected outright (treated as
infinite cost) instead of crashing the iteration.

Regime flags follow the usual comparisons: strong means the coupling beats
both loss rates, ultrastrong means g/omega exceeds a threshold (0.1 by
default), superstrong means g >= the relevant free spectral range.  Printed
coupling values are evaluated under two unit readings, as-printed and
halved, because a bare "g = x GHz" leaves the 2*pi/pi convention open.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .hamiltonian import HybridModel, _solve_points
from .magnon import MagnonMode
from .spectra import RidgePoints

MODEL_KINDS = ("n4", "n8", "generic")

_MAGNON_PARAMS = ("gyro", "field_offset")


def _param_names(kind: str, n_photon: int) -> tuple[str, ...]:
    if kind == "n4":
        return ("omega_c", "g_rl", "g") + _MAGNON_PARAMS
    if kind == "n8":
        return ("omega_c1", "omega_c2", "omega_c3", "g1", "g2", "g3") + _MAGNON_PARAMS
    names = [f"photon_freq_{i}" for i in range(n_photon)]
    names += [f"photon_coupling_{i}_{j}" for i in range(n_photon)
              for j in range(i + 1, n_photon)]
    names += [f"magnon_coupling_{i}" for i in range(n_photon)]
    return tuple(names) + _MAGNON_PARAMS


@dataclass
class FitProblem:
    """Branch samples plus the parameterisation to fit them with.

    ``template``/``magnon`` provide every fixed value; ``free`` names the
    parameters the optimiser may vary, each with an initial value and
    optional closed bounds.  Valid names depend on ``model_kind``: the
    doublet model exposes (omega_c, g_rl, g), the triple-mode model
    (omega_c1..3, g1..3), the generic model (photon_freq_i,
    photon_coupling_i_j, magnon_coupling_i); all kinds accept gyro and
    field_offset.
    """

    field_t: np.ndarray
    freq_ghz: np.ndarray
    model_kind: str
    template: HybridModel
    magnon: MagnonMode
    free: tuple[str, ...]
    initial: dict[str, float]
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        self.field_t = np.atleast_1d(np.asarray(self.field_t, dtype=float))
        self.freq_ghz = np.atleast_1d(np.asarray(self.freq_ghz, dtype=float))
        if self.field_t.shape != self.freq_ghz.shape:
            raise InvalidArgumentError("field and frequency data must have equal length")
        if self.model_kind not in MODEL_KINDS:
            raise InvalidArgumentError(f"model_kind must be one of {MODEL_KINDS}")
        valid = set(_param_names(self.model_kind, self.template.n_photon))
        self.free = tuple(self.free)
        for name in self.free:
            if name not in valid:
                raise InvalidArgumentError(
                    f"unknown free parameter {name!r} for kind {self.model_kind!r}")
            if name not in self.initial:
                raise InvalidArgumentError(f"free parameter {name!r} has no initial value")
            lo, hi = self.bounds.get(name, (-np.inf, np.inf))
            if not lo <= self.initial[name] <= hi:
                raise InvalidArgumentError(
                    f"initial value of {name!r} lies outside its bounds")

    @classmethod
    def from_ridge_points(cls, points: RidgePoints, **kwargs) -> "FitProblem":
        order = np.lexsort((points.freq_ghz, points.field_t))
        return cls(field_t=points.field_t[order], freq_ghz=points.freq_ghz[order],
                   **kwargs)

    def n_free(self) -> int:
        return len(self.free)

    def to_dict(self) -> dict:
        return {
            "field_t": self.field_t.tolist(),
            "freq_ghz": self.freq_ghz.tolist(),
            "model_kind": self.model_kind,
            "template": self.template.to_dict(),
            "magnon": {
                "gyro_ghz_per_t": self.magnon.gyro_ghz_per_t,
                "field_offset_t": self.magnon.field_offset_t,
                "linewidth_ghz": self.magnon.linewidth_ghz,
            },
            "free": list(self.free),
            "initial": {k: float(v) for k, v in self.initial.items()},
            "bounds": {k: [float(lo), float(hi)] for k, (lo, hi) in self.bounds.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FitProblem":
        try:
            mag = doc["magnon"]
            return cls(
                field_t=np.asarray(doc["field_t"], dtype=float),
                freq_ghz=np.asarray(doc["freq_ghz"], dtype=float),
                model_kind=doc["model_kind"],
                template=HybridModel.from_dict(doc["template"]),
                magnon=MagnonMode(mag["gyro_ghz_per_t"],
                                  mag.get("field_offset_t", 0.0),
                                  mag.get("linewidth_ghz", 0.0)),
                free=tuple(doc["free"]),
                initial={k: float(v) for k, v in doc["initial"].items()},
                bounds={k: (float(v[0]), float(v[1]))
                        for k, v in doc.get("bounds", {}).items()},
            )
        except KeyError as exc:
            raise InvalidArgumentError(f"fit problem document missing field: {exc}") from exc


@dataclass
class FitResult:
    """Optimum, residual scale, covariance and convergence bookkeeping."""

    param_names: tuple[str, ...]
    params: dict[str, float]
    residual_rms: float
    covariance: np.ndarray
    n_iter: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "params": {k: float(v) for k, v in self.params.items()},
            "residual_rms_ghz": float(self.residual_rms),
            "covariance": np.asarray(self.covariance).tolist(),
            "covariance_order": list(self.param_names),
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FitResult":
        return cls(param_names=tuple(doc["covariance_order"]),
                   params=dict(doc["params"]),
                   residual_rms=float(doc["residual_rms_ghz"]),
                   covariance=np.asarray(doc["covariance"], dtype=float),
                   n_iter=int(doc["n_iter"]),
                   converged=bool(doc["converged"]))


def _apply_params(problem: FitProblem, theta: np.ndarray):
    """Materialise (HybridModel, MagnonMode) from the free-parameter vector."""
    p = dict(problem.initial)
    p.update(dict(zip(problem.free, theta)))
    t = problem.template
    mag = problem.magnon
    gyro = p.get("gyro", mag.gyro_ghz_per_t)
    offset = p.get("field_offset", mag.field_offset_t)
    magnon = MagnonMode(gyro, offset, mag.linewidth_ghz)

    kind = problem.model_kind
    if kind == "n4":
        omega_c = p.get("omega_c", t.photon_freq_ghz[0])
        g_rl = p.get("g_rl", t.photon_coupling_ghz[0, 1])
        g = p.get("g", t.magnon_coupling_ghz[0])
        freqs = np.array([omega_c, omega_c])
        coup = np.array([[0.0, g_rl], [g_rl, 0.0]])
        gmag = np.array([g, 0.0])
    elif kind == "n8":
        freqs = np.array([p.get(f"omega_c{i + 1}", t.photon_freq_ghz[i]) for i in range(3)])
        coup = np.zeros((3, 3))
        gmag = np.array([p.get(f"g{i + 1}", t.magnon_coupling_ghz[i]) for i in range(3)])
    else:
        n = t.n_photon
        freqs = np.array([p.get(f"photon_freq_{i}", t.photon_freq_ghz[i]) for i in range(n)])
        coup = t.photon_coupling_ghz.copy()
        for i in range(n):
            for j in range(i + 1, n):
                key = f"photon_coupling_{i}_{j}"
                if key in p:
                    coup[i, j] = coup[j, i] = p[key]
        gmag = np.array([p.get(f"magnon_coupling_{i}", t.magnon_coupling_ghz[i])
                         for i in range(n)])
    model = HybridModel(
        photon_freq_ghz=freqs, photon_coupling_ghz=coup,
        magnon_freq_ghz=t.magnon_freq_ghz, magnon_coupling_ghz=gmag,
        photon_linewidth_ghz=t.photon_linewidth_ghz,
        magnon_linewidth_ghz=t.magnon_linewidth_ghz)
    return model, magnon


def _residuals(problem: FitProblem, theta: np.ndarray):
    """Nearest-branch residuals, or None if the trial model is invalid/unstable."""
    try:
        model, magnon = _apply_params(problem, theta)
    except InvalidArgumentError:
        return None
    fields_u, inverse = np.unique(problem.field_t, return_inverse=True)
    omega_m = magnon.gyro_ghz_per_t * (fields_u - magnon.field_offset_t)
    if np.any(omega_m <= 0.0):
        return None
    freqs, _, stable = _solve_points(
        model.photon_freq_ghz, model.coupling_matrix(), omega_m)
    if not stable.all():
        return None
    at_points = freqs[inverse]                       # (n_data, n_branch)
    det = problem.freq_ghz[:, None] - at_points
    pick = np.argmin(np.abs(det), axis=1)
    return det[np.arange(det.shape[0]), pick]


def _jacobian(problem: FitProblem, theta: np.ndarray, r0: np.ndarray,
              step_rel: float = 1e-6) -> np.ndarray:
    m, n = r0.shape[0], theta.shape[0]
    jac = np.zeros((m, n))
    for p in range(n):
        h = step_rel * max(abs(theta[p]), 1.0)
        tp = theta.copy()
        tp[p] += h
        tm = theta.copy()
        tm[p] -= h
        rp = _residuals(problem, tp)
        rm = _residuals(problem, tm)
        if rp is not None and rm is not None:
            jac[:, p] = (rp - rm) / (2.0 * h)
        elif rp is not None:
            jac[:, p] = (rp - r0) / h
        elif rm is not None:
            jac[:, p] = (r0 - rm) / h
    return jac


def fit(problem: FitProblem, *, max_iter: int = 500, cost_rtol: float = 1e-10,
        grad_atol: float = 1e-8, lambda0: float = 1e-3) -> FitResult:
    """Damped least squares over the free parameters.

    Convergence means the relative cost change of an accepted step fell
    below ``cost_rtol`` or the gradient infinity-norm below ``grad_atol``
    (an exhausted damping search counts as a zero-change step).  After
    ``max_iter`` iterations the best point so far is returned with
    ``converged = False``; that is a reported outcome, not an exception.
    """
    n_data = problem.field_t.shape[0]
    n_par = problem.n_free()
    if n_par == 0:
        raise InvalidArgumentError("at least one free parameter is required")
    if n_data < 2 * n_par:
        raise InvalidArgumentError(
            f"need at least {2 * n_par} data points for {n_par} free parameters")
    theta = np.array([problem.initial[name] for name in problem.free], dtype=float)
    lo = np.array([problem.bounds.get(n, (-np.inf, np.inf))[0] for n in problem.free])
    hi = np.array([problem.bounds.get(n, (-np.inf, np.inf))[1] for n in problem.free])

    r = _residuals(problem, theta)
    if r is None:
        raise InvalidArgumentError("initial parameters give an invalid or unstable model")
    cost = float(r @ r)
    lam = lambda0
    converged = False
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        jac = _jacobian(problem, theta, r)
        grad = jac.T @ r
        if np.abs(grad).max(initial=0.0) < grad_atol:
            converged = True
            break
        jtj = jac.T @ jac
        damp = np.diag(np.maximum(np.diag(jtj), 1e-12))
        accepted = False
        for _ in range(40):
            try:
                delta = np.linalg.solve(jtj + lam * damp, -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = np.clip(theta + delta, lo, hi)
            rt = _residuals(problem, trial)
            if rt is None:                       # unstable trial: reject with penalty
                lam *= 10.0
                continue
            ct = float(rt @ rt)
            if ct < cost:
                rel = (cost - ct) / max(cost, 1e-300)
                theta, r, cost = trial, rt, ct
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                if rel < cost_rtol:
                    converged = True
                break
            lam *= 10.0
            if lam > 1e14:
                break
        if not accepted:
            # no step improves the cost: the relative change is zero
            converged = True
            break
        if converged:
            break

    jac = _jacobian(problem, theta, r)
    jtj = jac.T @ jac
    dof = max(n_data - n_par, 1)
    sigma2 = cost / dof
    cov = sigma2 * np.linalg.pinv(jtj, hermitian=True)
    cov = 0.5 * (cov + cov.T)
    return FitResult(
        param_names=problem.free,
        params={name: float(v) for name, v in zip(problem.free, theta)},
        residual_rms=float(np.sqrt(cost / n_data)),
        covariance=cov,
        n_iter=n_iter,
        converged=converged,
    )


def residual_profile(problem: FitProblem, result: FitResult, param_name: str,
                     values) -> np.ndarray:
    """Cost along one parameter with the others pinned at the fit optimum.

    Parameter sets where the model is invalid or unstable get ``inf``.
    """
    if param_name not in problem.free:
        raise InvalidArgumentError(f"{param_name!r} is not a free parameter of the problem")
    values = np.atleast_1d(np.asarray(values, dtype=float))
    base = np.array([result.params[name] for name in problem.free])
    pidx = problem.free.index(param_name)
    costs = np.empty(values.shape[0])
    for i, v in enumerate(values):
        theta = base.copy()
        theta[pidx] = v
        r = _residuals(problem, theta)
        costs[i] = np.inf if r is None else float(r @ r)
    return costs


# ---------------------------------------------------------------------------
# coupling-regime classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairRegime:
    """Comparison record for one photon mode / magnon pair under one reading."""

    mode_index: int
    coupling_ghz: float
    mode_freq_ghz: float
    fsr_ghz: float | None
    magnon_linewidth_ghz: float
    photon_linewidth_ghz: float
    strong: bool
    ultrastrong: bool
    superstrong: bool | None

    def to_dict(self) -> dict:
        return {
            "mode_index": self.mode_index,
            "coupling_ghz": self.coupling_ghz,
            "mode_freq_ghz": self.mode_freq_ghz,
            "fsr_ghz": self.fsr_ghz,
            "magnon_linewidth_ghz": self.magnon_linewidth_ghz,
            "photon_linewidth_ghz": self.photon_linewidth_ghz,
            "strong": self.strong,
            "ultrastrong": self.ultrastrong,
            "superstrong": self.superstrong,
        }


@dataclass(frozen=True)
class RegimeReport:
    """Per-pair regime flags under both coupling-value readings.

    ``as_printed`` takes each coupling number at face value; ``halved``
    reads it as a value quoted over pi, i.e. an ordinary-frequency coupling
    of half the printed number.  Both are reported because bare coupling
    figures are routinely quoted in either convention.
    """

    as_printed: tuple[PairRegime, ...]
    halved: tuple[PairRegime, ...]
    ultrastrong_threshold: float

    def to_dict(self) -> dict:
        return {
            "ultrastrong_threshold": self.ultrastrong_threshold,
            "readings": {
                "as_printed": [p.to_dict() for p in self.as_printed],
                "halved": [p.to_dict() for p in self.halved],
            },
        }


def _pair_flags(g, omega, fsr, gamma, delta, threshold) -> tuple[bool, bool, "bool | None"]:
    strong = bool(g > gamma and g > delta)
    ultrastrong = bool(g / omega >= threshold)
    superstrong = None if fsr is None else bool(g >= fsr)
    return strong, ultrastrong, superstrong


def classify(couplings_ghz, mode_freq_ghz, fsr_ghz=None, *,
             magnon_linewidth_ghz: float = 0.0, photon_linewidth_ghz=0.0,
             ultrastrong_threshold: float = 0.1) -> RegimeReport:
    """Strong / ultrastrong / superstrong flags for each coupled pair.

    ``fsr_ghz`` may be a scalar applied to every pair, a per-mode sequence,
    a solved :class:`~magnon_hybrid.network.ModeSpectrum` (each coupled mode
    then uses the gap to its nearest spectrum neighbour), or None, in which
    case nearest-neighbour spacings of ``mode_freq_ghz`` are used (None
    again if only one mode is given, leaving the superstrong flag
    undecided).  The superstrong boundary is inclusive: g >= FSR.
    """
    from .network import ModeSpectrum
    if isinstance(fsr_ghz, ModeSpectrum):
        spectrum_freqs = fsr_ghz.frequencies_ghz
        omega_arr = np.atleast_1d(np.asarray(mode_freq_ghz, dtype=float))
        fsr_ghz = []
        for w in omega_arr:
            k = int(np.argmin(np.abs(spectrum_freqs - w)))
            gaps = [abs(spectrum_freqs[j] - spectrum_freqs[k])
                    for j in range(spectrum_freqs.size) if j != k]
            fsr_ghz.append(min(gaps) if gaps else np.inf)
    g = np.atleast_1d(np.asarray(couplings_ghz, dtype=float))
    omega = np.atleast_1d(np.asarray(mode_freq_ghz, dtype=float))
    if g.shape != omega.shape:
        raise InvalidArgumentError("couplings and mode frequencies must align")
    if np.any(g < 0.0) or np.any(omega <= 0.0):
        raise InvalidArgumentError("couplings must be >= 0 and frequencies > 0")
    if magnon_linewidth_ghz < 0.0:
        raise InvalidArgumentError("magnon linewidth must be nonnegative")
    delta = np.broadcast_to(np.asarray(photon_linewidth_ghz, dtype=float), g.shape)
    if np.any(delta < 0.0):
        raise InvalidArgumentError("photon linewidths must be nonnegative")

    n = g.shape[0]
    if fsr_ghz is None:
        if n >= 2:
            order = np.sort(omega)
            gaps = np.diff(order)
            fsr_list = []
            for w in omega:
                k = int(np.searchsorted(order, w))
                cand = []
                if k > 0:
                    cand.append(gaps[k - 1])
                if k < n - 1:
                    cand.append(gaps[k])
                fsr_list.append(float(min(cand)) if cand else None)
        else:
            fsr_list = [None] * n
    elif np.isscalar(fsr_ghz):
        fsr_list = [float(fsr_ghz)] * n
    else:
        fsr_list = [float(x) for x in np.asarray(fsr_ghz, dtype=float)]
        if len(fsr_list) != n:
            raise InvalidArgumentError("per-mode fsr list must match the mode count")

    readings = []
    for factor in (1.0, 0.5):
        entries = []
        for i in range(n):
            geff = factor * g[i]
            strong, ultra, sup = _pair_flags(
                geff, omega[i], fsr_list[i], magnon_linewidth_ghz, delta[i],
                ultrastrong_threshold)
            entries.append(PairRegime(
                mode_index=i, coupling_ghz=float(geff), mode_freq_ghz=float(omega[i]),
                fsr_ghz=fsr_list[i], magnon_linewidth_ghz=float(magnon_linewidth_ghz),
                photon_linewidth_ghz=float(delta[i]), strong=strong,
                ultrastrong=ultra, superstrong=sup))
        readings.append(tuple(entries))
    return RegimeReport(as_printed=readings[0], halved=readings[1],
                        ultrastrong_threshold=ultrastrong_threshold)


def photon_mode_spacing(model: HybridModel) -> np.ndarray:
    """Nearest-neighbour spacing of the photon-only normal modes.

    Gives the free spectral range seen by each photon mode once photon-photon
    coupling is resolved (so a coupled doublet reports its splitting, not
    zero).  Returns inf for a single-mode model.
    """
    n = model.n_photon
    if n == 1:
        return np.array([np.inf])
    t_half = np.sqrt(model.photon_freq_ghz)
    v = np.diag(model.photon_freq_ghz) + 2.0 * model.photon_coupling_ghz
    s = (t_half[:, None] * v) * t_half[None, :]
    w = np.linalg.eigvalsh(s)
    if w[0] <= 0.0:
        raise InvalidArgumentError("photon block is not positive definite")
    freqs = np.sqrt(w)
    gaps = np.diff(freqs)
    out = np.empty(n)
    for i in range(n):
        cand = []
        if i > 0:
            cand.append(gaps[i - 1])
        if i < n - 1:
            cand.append(gaps[i])
        out[i] = min(cand)
    return out

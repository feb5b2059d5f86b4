"""Quadratic photon-magnon Hamiltonians and their exact normal modes.

The model is N photon modes plus one magnon mode with every coupling written
in the full position-position form (a_i + a_i^dag)(a_j + a_j^dag), i.e. all
counter-rotating terms are kept.  In units where hbar = 1 every frequency and
coupling below is an ordinary frequency in GHz; because the eigenproblem is
homogeneous of degree one in those numbers, no angular-frequency conversion
is ever needed inside this module.

Normal modes come from a para-unitary (Bogoliubov) diagonalisation of the
2(N+1)-dimensional dynamical matrix.  The primary route is the positive-
definite Cholesky construction; a general eigensolve of the dynamical matrix
with explicit +/- pair matching is kept as a fallback for the near-singular
boundary.  Both agree with the independent truncated Fock-basis oracle
:func:`fock_oracle`.

Stability: with all bare frequencies positive, the Hamiltonian quadratic
form is positive definite exactly when V = diag(omega) + 2*Lambda is, where
Lambda is the symmetric coupling matrix.  For a single photon mode this
reduces to the familiar bound omega_c * omega_m > 4 g**2.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
from scipy.sparse.linalg import eigsh

from .errors import (
    InstabilityError,
    InvalidArgumentError,
    ResourceLimitError,
)
from .magnon import MagnonMode, magnon_frequency

#: relative tolerance treating two polariton frequencies as degenerate
_TIE_RTOL = 1e-9

#: |Im|/|Re| below this counts as a real dynamical-matrix eigenvalue
_REAL_EIG_RTOL = 1e-8


@dataclass(frozen=True)
class HybridModel:
    """N photon modes + 1 magnon mode with all pairwise couplings (GHz).

    ``photon_coupling_ghz`` is the symmetric photon-photon coupling matrix
    (zero diagonal); ``magnon_coupling_ghz[i]`` couples photon mode i to the
    magnon.  Mode index N (the last one) is always the magnon.
    """

    photon_freq_ghz: np.ndarray
    photon_coupling_ghz: np.ndarray
    magnon_freq_ghz: float
    magnon_coupling_ghz: np.ndarray
    photon_linewidth_ghz: np.ndarray
    magnon_linewidth_ghz: float = 0.0

    def __post_init__(self):
        freq = np.atleast_1d(np.asarray(self.photon_freq_ghz, dtype=float))
        coup = np.atleast_2d(np.asarray(self.photon_coupling_ghz, dtype=float))
        gmag = np.atleast_1d(np.asarray(self.magnon_coupling_ghz, dtype=float))
        lw = np.atleast_1d(np.asarray(self.photon_linewidth_ghz, dtype=float))
        n = freq.shape[0]
        if n < 1:
            raise InvalidArgumentError("at least one photon mode is required")
        if coup.shape != (n, n):
            raise InvalidArgumentError(f"photon coupling must be {n}x{n}, got {coup.shape}")
        if gmag.shape != (n,) or lw.shape != (n,):
            raise InvalidArgumentError(
                "photon_freq, magnon_coupling and photon_linewidth lengths must match")
        scale = max(1.0, float(np.abs(coup).max(initial=0.0)))
        if np.abs(coup - coup.T).max(initial=0.0) > 1e-12 * scale:
            raise InvalidArgumentError("photon coupling matrix must be symmetric")
        if np.any(coup.diagonal() != 0.0):
            raise InvalidArgumentError("photon coupling diagonal must be zero")
        if np.any(freq <= 0.0) or self.magnon_freq_ghz <= 0.0:
            raise InvalidArgumentError("all mode frequencies must be positive")
        if np.any(lw < 0.0) or self.magnon_linewidth_ghz < 0.0:
            raise InvalidArgumentError("linewidths must be nonnegative")
        for arr in (freq, coup, gmag, lw):
            arr.flags.writeable = False
        object.__setattr__(self, "photon_freq_ghz", freq)
        object.__setattr__(self, "photon_coupling_ghz", coup)
        object.__setattr__(self, "magnon_coupling_ghz", gmag)
        object.__setattr__(self, "photon_linewidth_ghz", lw)
        object.__setattr__(self, "magnon_freq_ghz", float(self.magnon_freq_ghz))
        object.__setattr__(self, "magnon_linewidth_ghz", float(self.magnon_linewidth_ghz))

    @property
    def n_photon(self) -> int:
        return self.photon_freq_ghz.shape[0]

    @property
    def n_modes(self) -> int:
        return self.n_photon + 1

    @property
    def mode_frequencies_ghz(self) -> np.ndarray:
        return np.append(self.photon_freq_ghz, self.magnon_freq_ghz)

    @property
    def mode_linewidths_ghz(self) -> np.ndarray:
        return np.append(self.photon_linewidth_ghz, self.magnon_linewidth_ghz)

    def coupling_matrix(self) -> np.ndarray:
        """(N+1)x(N+1) symmetric coupling matrix, magnon last."""
        n = self.n_modes
        lam = np.zeros((n, n))
        lam[:-1, :-1] = self.photon_coupling_ghz
        lam[:-1, -1] = self.magnon_coupling_ghz
        lam[-1, :-1] = self.magnon_coupling_ghz
        return lam

    def with_magnon_freq(self, omega_m_ghz: float) -> "HybridModel":
        return replace(self, magnon_freq_ghz=float(omega_m_ghz))

    def to_dict(self) -> dict:
        return {
            "photon_freq_ghz": self.photon_freq_ghz.tolist(),
            "photon_coupling_ghz": self.photon_coupling_ghz.tolist(),
            "magnon_freq_ghz": self.magnon_freq_ghz,
            "magnon_coupling_ghz": self.magnon_coupling_ghz.tolist(),
            "photon_linewidth_ghz": self.photon_linewidth_ghz.tolist(),
            "magnon_linewidth_ghz": self.magnon_linewidth_ghz,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HybridModel":
        try:
            return cls(
                photon_freq_ghz=np.asarray(doc["photon_freq_ghz"], dtype=float),
                photon_coupling_ghz=np.asarray(doc["photon_coupling_ghz"], dtype=float),
                magnon_freq_ghz=float(doc["magnon_freq_ghz"]),
                magnon_coupling_ghz=np.asarray(doc["magnon_coupling_ghz"], dtype=float),
                photon_linewidth_ghz=np.asarray(doc["photon_linewidth_ghz"], dtype=float),
                magnon_linewidth_ghz=float(doc.get("magnon_linewidth_ghz", 0.0)),
            )
        except KeyError as exc:
            raise InvalidArgumentError(f"model document missing field: {exc}") from exc


@dataclass(frozen=True)
class PolaritonSet:
    """Normal-mode frequencies plus per-branch composition fractions.

    ``fractions[k, i]`` is the weight of bare mode i (photons first, magnon
    last) in branch k; rows are nonnegative and sum to 1.  ``stable`` is
    False only for placeholder entries inside a sweep, where frequencies and
    fractions are NaN.
    """

    frequencies_ghz: np.ndarray
    fractions: np.ndarray
    stable: bool = True

    def __post_init__(self):
        freq = np.atleast_1d(np.asarray(self.frequencies_ghz, dtype=float))
        frac = np.atleast_2d(np.asarray(self.fractions, dtype=float))
        if frac.shape != (freq.shape[0], frac.shape[1]):
            raise InvalidArgumentError("fractions must have one row per branch")
        freq.flags.writeable = False
        frac.flags.writeable = False
        object.__setattr__(self, "frequencies_ghz", freq)
        object.__setattr__(self, "fractions", frac)

    @property
    def n_branches(self) -> int:
        return self.frequencies_ghz.shape[0]

    @property
    def magnon_fraction(self) -> np.ndarray:
        return self.fractions[:, -1]


@dataclass(frozen=True)
class BranchSet:
    """Polariton branches sampled on a strictly increasing field grid."""

    field_t: np.ndarray
    polaritons: tuple[PolaritonSet, ...]

    def __post_init__(self):
        field = np.atleast_1d(np.asarray(self.field_t, dtype=float))
        if field.size != len(self.polaritons):
            raise InvalidArgumentError("one PolaritonSet per field point required")
        if field.size == 0:
            raise InvalidArgumentError("field grid must be nonempty")
        if field.size > 1 and np.any(np.diff(field) <= 0.0):
            raise InvalidArgumentError("field grid must be strictly increasing")
        counts = {p.n_branches for p in self.polaritons}
        if len(counts) > 1:
            raise InvalidArgumentError("all field points must have the same branch count")
        field.flags.writeable = False
        object.__setattr__(self, "field_t", field)

    @property
    def n_branches(self) -> int:
        return self.polaritons[0].n_branches

    @property
    def stable_mask(self) -> np.ndarray:
        return np.array([p.stable for p in self.polaritons])

    def branch_frequencies(self) -> np.ndarray:
        """(n_field, n_branch) array, NaN at unstable points."""
        return np.vstack([p.frequencies_ghz for p in self.polaritons])

    def magnon_fractions(self) -> np.ndarray:
        return np.vstack([p.magnon_fraction for p in self.polaritons])

    def to_csv(self, path) -> None:
        from .io_utils import write_rows
        rows = [("field_t", "branch_index", "freq_ghz", "magnon_fraction", "stable")]
        for b, pol in zip(self.field_t, self.polaritons):
            for k in range(pol.n_branches):
                rows.append((b, k, pol.frequencies_ghz[k], pol.fractions[k, -1],
                             "true" if pol.stable else "false"))
        write_rows(path, rows)


def build_n4(omega_c_ghz: float, g_rl_ghz: float, g_ghz: float, omega_m_ghz: float,
             *, photon_linewidth_ghz=(0.0, 0.0),
             magnon_linewidth_ghz: float = 0.0) -> HybridModel:
    """Doublet cavity model: two photon modes at ``omega_c`` mixed by
    ``g_rl``, with the magnon coupled to mode 0 only (mode 1 stays dark)."""
    if omega_c_ghz <= 0.0 or omega_m_ghz <= 0.0:
        raise InvalidArgumentError("mode frequencies must be positive")
    return HybridModel(
        photon_freq_ghz=np.array([omega_c_ghz, omega_c_ghz]),
        photon_coupling_ghz=np.array([[0.0, g_rl_ghz], [g_rl_ghz, 0.0]]),
        magnon_freq_ghz=omega_m_ghz,
        magnon_coupling_ghz=np.array([g_ghz, 0.0]),
        photon_linewidth_ghz=np.asarray(photon_linewidth_ghz, dtype=float),
        magnon_linewidth_ghz=magnon_linewidth_ghz,
    )


def build_n8(omega_c1_ghz: float, omega_c2_ghz: float, omega_c3_ghz: float,
             g1_ghz: float, g2_ghz: float, g3_ghz: float, omega_m_ghz: float,
             *, photon_linewidth_ghz=(0.0, 0.0, 0.0),
             magnon_linewidth_ghz: float = 0.0) -> HybridModel:
    """Three uncoupled photon modes, each coupled to the one magnon mode."""
    freqs = (omega_c1_ghz, omega_c2_ghz, omega_c3_ghz)
    if any(f <= 0.0 for f in freqs) or omega_m_ghz <= 0.0:
        raise InvalidArgumentError("mode frequencies must be positive")
    return HybridModel(
        photon_freq_ghz=np.array(freqs),
        photon_coupling_ghz=np.zeros((3, 3)),
        magnon_freq_ghz=omega_m_ghz,
        magnon_coupling_ghz=np.array([g1_ghz, g2_ghz, g3_ghz]),
        photon_linewidth_ghz=np.asarray(photon_linewidth_ghz, dtype=float),
        magnon_linewidth_ghz=magnon_linewidth_ghz,
    )


# ---------------------------------------------------------------------------
# normal-mode machinery
# ---------------------------------------------------------------------------

def _stacks(photon_freq: np.ndarray, lam: np.ndarray, omega_m: np.ndarray):
    """Bogoliubov blocks for a batch of magnon frequencies.

    Returns (M, V, omega) with M the (m, 2n, 2n) quadratic-form matrix
    [[A, B], [B, A]], A = diag(omega) + Lambda, B = Lambda, and V the
    position-space form diag(omega) + 2*Lambda whose positive definiteness
    decides stability.
    """
    omega_m = np.atleast_1d(np.asarray(omega_m, dtype=float))
    m = omega_m.shape[0]
    n = lam.shape[0]
    omega = np.empty((m, n))
    omega[:, :-1] = photon_freq
    omega[:, -1] = omega_m
    eye = np.eye(n)
    diag = omega[:, :, None] * eye[None, :, :]
    a_blk = diag + lam
    b_blk = np.broadcast_to(lam, (m, n, n))
    top = np.concatenate([a_blk, b_blk], axis=2)
    bot = np.concatenate([b_blk, a_blk], axis=2)
    mmat = np.concatenate([top, bot], axis=1)
    vmat = diag + 2.0 * lam
    return mmat, vmat, omega


def dynamical_matrix(model: HybridModel) -> np.ndarray:
    """eta @ M for the model: eigenvalues come in +/- frequency pairs."""
    lam = model.coupling_matrix()
    mmat, _, _ = _stacks(model.photon_freq_ghz, lam, [model.magnon_freq_ghz])
    n = model.n_modes
    eta = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    return eta @ mmat[0]


def _tiebreak(freqs: np.ndarray, fracs: np.ndarray):
    """Order exactly/nearly degenerate branches by descending magnon weight."""
    n = freqs.shape[0]
    i = 0
    while i < n - 1:
        j = i + 1
        while j < n and freqs[j] - freqs[i] <= _TIE_RTOL * max(abs(freqs[j]), 1e-300):
            j += 1
        if j - i > 1:
            sel = slice(i, j)
            order = np.argsort(-fracs[sel, -1], kind="stable")
            freqs[sel] = freqs[sel][order]
            fracs[sel] = fracs[sel][order]
        i = j
    return freqs, fracs


def _colpa_batch(mmat: np.ndarray):
    """Cholesky-based para-unitary diagonalisation of a stack of pd forms.

    Returns (freqs, fractions) with freqs ascending per point and fractions
    built from the symplectically normalised eigenvectors: the weight of
    bare mode i in branch k is u_ik^2 + v_ik^2, normalised to sum to one.
    Raises numpy.linalg.LinAlgError if any matrix in the stack fails the
    factorisation.
    """
    m, two_n, _ = mmat.shape
    n = two_n // 2
    low = np.linalg.cholesky(mmat)           # M = L L^T
    k = np.transpose(low, (0, 2, 1))         # upper factor, M = K^T K
    eta = np.concatenate([np.ones(n), -np.ones(n)])
    lmat = (k * eta[None, None, :]) @ np.transpose(k, (0, 2, 1))
    evals, evecs = np.linalg.eigh(lmat)
    freqs = evals[:, n:]                      # positive half, ascending
    upos = evecs[:, :, n:]
    tvec = np.linalg.solve(k, upos) * np.sqrt(freqs)[:, None, :]
    wgt = tvec[:, :n, :] ** 2 + tvec[:, n:, :] ** 2    # (m, mode i, branch k)
    fracs = np.transpose(wgt / wgt.sum(axis=1, keepdims=True), (0, 2, 1))
    return freqs, fracs


def _dynamical_fallback(mmat: np.ndarray):
    """General eigensolve of eta @ M with explicit +/- pairing.

    Used when the Cholesky route fails on a marginally positive-definite
    form.  Raises InstabilityError when the spectrum is complex, contains a
    (numerically) zero frequency, or a positive-frequency eigenvector cannot
    be symplectically normalised.
    """
    two_n = mmat.shape[0]
    n = two_n // 2
    eta = np.concatenate([np.ones(n), -np.ones(n)])
    evals, evecs = scipy.linalg.eig(eta[:, None] * mmat)
    scale = np.abs(evals).max()
    re, im = evals.real, np.abs(evals.imag)
    if np.any(im > _REAL_EIG_RTOL * np.maximum(np.abs(re), 1e-30 * scale)):
        raise InstabilityError("dynamical matrix has complex eigenvalues")
    pos = np.nonzero(re > 1e-12 * scale)[0]
    if pos.size != n:
        raise InstabilityError("dynamical matrix lacks n strictly positive frequencies")
    order = np.argsort(re[pos])
    freqs = re[pos][order]
    fracs = np.empty((n, n))
    for out_k, idx in enumerate(pos[order]):
        vec = evecs[:, idx]
        lead = np.argmax(np.abs(vec))
        vec = (vec / vec[lead]).real if abs(vec[lead]) > 0 else vec.real
        norm = vec[:n] @ vec[:n] - vec[n:] @ vec[n:]
        if norm <= 1e-12 * (vec @ vec):
            raise InstabilityError("positive branch is not symplectically normalisable")
        vec = vec / np.sqrt(norm)
        wgt = vec[:n] ** 2 + vec[n:] ** 2
        fracs[out_k] = wgt / wgt.sum()
    return freqs, fracs


def _solve_points(photon_freq: np.ndarray, lam: np.ndarray, omega_m_array):
    """Batched polariton solve.

    Returns (freqs, fracs, stable): freqs is (m, n) NaN-filled at unstable
    points, fracs (m, n, n), stable a boolean mask.  Points with a
    non-positive-definite quadratic form are flagged, never raised.
    """
    mmat, vmat, _ = _stacks(photon_freq, lam, omega_m_array)
    m, n = vmat.shape[0], vmat.shape[1]
    freqs = np.full((m, n), np.nan)
    fracs = np.full((m, n, n), np.nan)
    stable = np.linalg.eigvalsh(vmat)[:, 0] > 0.0
    idx = np.nonzero(stable)[0]
    if idx.size:
        try:
            freqs[idx], fracs[idx] = _colpa_batch(mmat[idx])
        except np.linalg.LinAlgError:
            # marginal points: retry one by one with the fallback route
            for p in idx:
                try:
                    try:
                        f1, c1 = _colpa_batch(mmat[p][None])
                        freqs[p], fracs[p] = f1[0], c1[0]
                    except np.linalg.LinAlgError:
                        freqs[p], fracs[p] = _dynamical_fallback(mmat[p])
                except InstabilityError:
                    stable[p] = False
                    freqs[p] = np.nan
                    fracs[p] = np.nan
    for p in np.nonzero(stable)[0]:
        _tiebreak(freqs[p], fracs[p])
    return freqs, fracs, stable


def _instability_diagnosis(model: HybridModel) -> InstabilityError:
    lam = model.coupling_matrix()
    _, vmat, _ = _stacks(model.photon_freq_ghz, lam, [model.magnon_freq_ghz])
    vmin = float(np.linalg.eigvalsh(vmat[0])[0])
    pairs = tuple(
        int(i) for i in range(model.n_photon)
        if model.photon_freq_ghz[i] * model.magnon_freq_ghz
        < 4.0 * model.magnon_coupling_ghz[i] ** 2
    )
    detail = f"; photon modes violating omega_i*omega_m > 4*g_i^2: {list(pairs)}" if pairs else ""
    return InstabilityError(
        "quadratic form is not positive definite "
        f"(min eigenvalue {vmin:.6g} GHz){detail}",
        min_eigenvalue=vmin, offending_pairs=pairs)


def eigen_full(model: HybridModel) -> PolaritonSet:
    """Exact normal modes of the full Hamiltonian, counter-rotating terms included.

    Raises :class:`InstabilityError` with a diagnosis when the quadratic form
    is not positive definite (for one photon mode: omega_c*omega_m < 4 g**2).
    """
    lam = model.coupling_matrix()
    freqs, fracs, stable = _solve_points(
        model.photon_freq_ghz, lam, [model.magnon_freq_ghz])
    if not stable[0]:
        raise _instability_diagnosis(model)
    return PolaritonSet(freqs[0], fracs[0], stable=True)


def eigen_rwa(model: HybridModel) -> PolaritonSet:
    """Normal modes with counter-rotating terms dropped.

    Plain Hermitian eigenproblem of the single-excitation block; always
    solvable, so this is the natural comparison point for quantifying
    counter-rotating (Bloch-Siegert type) shifts.
    """
    h = np.diag(model.mode_frequencies_ghz) + model.coupling_matrix()
    evals, evecs = np.linalg.eigh(h)
    fracs = (evecs ** 2).T.copy()
    freqs = evals.copy()
    _tiebreak(freqs, fracs)
    return PolaritonSet(freqs, fracs, stable=True)


def two_mode_exact(omega_c_ghz: float, omega_m_ghz: float, g_ghz: float) -> np.ndarray:
    """Closed-form branch pair for one photon mode + magnon.

    Roots of  W**4 - (wc**2 + wm**2) W**2 + wc**2 wm**2 - 4 g**2 wc wm = 0.
    """
    s = omega_c_ghz ** 2 + omega_m_ghz ** 2
    p = omega_c_ghz ** 2 * omega_m_ghz ** 2 - 4.0 * g_ghz ** 2 * omega_c_ghz * omega_m_ghz
    disc = np.sqrt(0.25 * s * s - p)
    lo, hi = 0.5 * s - disc, 0.5 * s + disc
    if lo <= 0.0:
        raise InstabilityError(
            f"two-mode form unstable: omega_c*omega_m = {omega_c_ghz * omega_m_ghz:.6g} "
            f"< 4 g^2 = {4.0 * g_ghz ** 2:.6g}")
    return np.array([np.sqrt(lo), np.sqrt(hi)])


def fock_oracle(model: HybridModel, n_max: int) -> np.ndarray:
    """Single-polariton transition frequencies from a truncated Fock basis.

    Independent brute-force check on :func:`eigen_full`: the Hamiltonian is
    assembled in the product Fock basis with n_max + 1 levels per mode and
    diagonalised exactly.  Because every term changes total occupation by 0
    or +/-2, parity is conserved; the ground state lives in the even sector
    and the single-polariton states are the lowest odd-sector levels.  The
    odd levels kept are those actually connected to the ground state by a
    (a_i + a_i^dag) matrix element, which filters out three-polariton states.

    Returns the N+1 transition energies sorted ascending, converging to
    ``eigen_full(model).frequencies_ghz`` as n_max grows.
    """
    if n_max < 4:
        raise InvalidArgumentError("n_max must be at least 4")
    n_modes = model.n_modes
    dim = (n_max + 1) ** n_modes
    if dim > 1_000_000:
        raise ResourceLimitError(
            f"Fock basis of dimension {dim} exceeds the 1e6 limit")
    d = n_max + 1
    lower = sparse.diags(np.sqrt(np.arange(1.0, d)), 1, format="csr")
    xop = (lower + lower.T).tocsr()
    nop = sparse.diags(np.arange(d, dtype=float), 0, format="csr")
    ident = sparse.identity(d, format="csr")

    def embed(op, j):
        out = None
        for k in range(n_modes):
            factor = op if k == j else ident
            out = factor if out is None else sparse.kron(out, factor, format="csr")
        return out

    omega = model.mode_frequencies_ghz
    lam = model.coupling_matrix()
    xs = [embed(xop, j) for j in range(n_modes)]
    ham = omega[0] * embed(nop, 0)
    for j in range(1, n_modes):
        ham = ham + omega[j] * embed(nop, j)
    for i in range(n_modes):
        for j in range(i + 1, n_modes):
            if lam[i, j] != 0.0:
                ham = ham + lam[i, j] * (xs[i] @ xs[j])
    ham = ham.tocsr()

    idx = np.arange(dim)
    total_occ = np.zeros(dim, dtype=np.int64)
    for j in range(n_modes):
        stride = d ** (n_modes - 1 - j)
        total_occ += (idx // stride) % d
    even = np.nonzero(total_occ % 2 == 0)[0]
    odd = np.nonzero(total_occ % 2 == 1)[0]
    h_even = ham[even][:, even]
    h_odd = ham[odd][:, odd]

    k_odd = min(n_modes + 4, h_odd.shape[0] - 2)
    if h_even.shape[0] <= 1500:
        ev_e, vec_e = np.linalg.eigh(h_even.toarray())
        ev_o, vec_o = np.linalg.eigh(h_odd.toarray())
        ev_o, vec_o = ev_o[:k_odd], vec_o[:, :k_odd]
    else:
        v0e = np.full(h_even.shape[0], 1.0 / np.sqrt(h_even.shape[0]))
        ev_e, vec_e = eigsh(h_even, k=1, which="SA", v0=v0e, tol=1e-10)
        v0o = np.full(h_odd.shape[0], 1.0 / np.sqrt(h_odd.shape[0]))
        ev_o, vec_o = eigsh(h_odd, k=k_odd, which="SA", v0=v0o,
                            ncv=max(48, 4 * k_odd), tol=1e-10)
        order = np.argsort(ev_o)
        ev_o, vec_o = ev_o[order], vec_o[:, order]
    e0 = ev_e[0]
    gs = np.zeros(dim)
    gs[even] = vec_e[:, 0]

    scores = np.zeros(ev_o.shape[0])
    for x in xs:
        amp = vec_o.T @ (x @ gs)[odd]
        scores += amp ** 2
    keep = np.nonzero(scores > 1e-8 * scores.max())[0]
    if keep.size < n_modes:
        raise ResourceLimitError(
            "could not isolate all single-polariton lines; increase n_max")
    trans = np.sort(ev_o[keep[:n_modes]] - e0)
    return trans


def sweep(model: HybridModel, magnon: MagnonMode, fields_t, *,
          workers: int | None = None) -> BranchSet:
    """Polariton branches versus applied field.

    At each field the magnon frequency follows ``magnon``'s linear law and
    the full Hamiltonian is rediagonalised.  Unstable points (including a
    zero magnon frequency at the field offset) are flagged with
    ``stable=False`` and NaN frequencies rather than dropped.  ``workers``
    splits the grid into independently solved chunks; results are assembled
    in grid order, so the output never depends on scheduling.
    """
    fields = np.atleast_1d(np.asarray(fields_t, dtype=float))
    if fields.size == 0:
        raise InvalidArgumentError("field grid must be nonempty")
    if fields.size > 1 and np.any(np.diff(fields) <= 0.0):
        raise InvalidArgumentError("field grid must be strictly increasing")
    omega_m = magnon_frequency(magnon, fields)
    omega_m = np.atleast_1d(np.asarray(omega_m, dtype=float))
    lam = model.coupling_matrix()
    n = model.n_modes

    valid = omega_m > 0.0
    freqs = np.full((fields.size, n), np.nan)
    fracs = np.full((fields.size, n, n), np.nan)
    stable = np.zeros(fields.size, dtype=bool)

    vidx = np.nonzero(valid)[0]
    if vidx.size:
        n_workers = max(1, int(workers or 1))
        if n_workers == 1 or vidx.size < 2 * n_workers:
            f, c, s = _solve_points(model.photon_freq_ghz, lam, omega_m[vidx])
            freqs[vidx], fracs[vidx], stable[vidx] = f, c, s
        else:
            chunks = np.array_split(vidx, n_workers)
            chunks = [ch for ch in chunks if ch.size]
            with ThreadPoolExecutor(max_workers=n_workers) as pool:
                results = list(pool.map(
                    lambda ch: _solve_points(model.photon_freq_ghz, lam, omega_m[ch]),
                    chunks))
            for ch, (f, c, s) in zip(chunks, results):
                freqs[ch], fracs[ch], stable[ch] = f, c, s

    pols = tuple(
        PolaritonSet(freqs[p], fracs[p], stable=bool(stable[p]))
        for p in range(fields.size)
    )
    return BranchSet(fields, pols)


def min_gap(branches: BranchSet, i: int, j: int) -> tuple[float, float]:
    """Minimum of branch_j - branch_i over the grid and the field where it occurs."""
    nb = branches.n_branches
    if not (0 <= i < nb and 0 <= j < nb):
        raise InvalidArgumentError(f"branch indices must be in [0, {nb})")
    freqs = branches.branch_frequencies()
    gaps = freqs[:, j] - freqs[:, i]
    ok = np.isfinite(gaps)
    if not ok.any():
        raise InvalidArgumentError("no stable sweep points to take a gap over")
    k = np.nonzero(ok)[0][np.argmin(gaps[ok])]
    return float(gaps[k]), float(branches.field_t[k])

"""Physical scenarios built on the decompositions.

Quadrature covariances of Gaussian states, squeezing measured on one spatial
mode of a lossy device, dichroic-mirror constructions and checks of the
trisected three-mode squeezing form.

Quadratures are ordered ``(x_1 .. x_N, p_1 .. p_N)`` with
``x = (a + a^dagger) / sqrt(2)`` and ``p = (a - a^dagger) / (i sqrt(2))``;
covariances are doubled so the vacuum has ``sigma = I``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadParameter,
    BadTrisection,
    DegenerateBasis,
    NotSymplectic,
    OddSpectrum,
    RouteMismatch,
    ShapeMismatch,
)
from .hamiltonian import SymmetricHamiltonian, TensorHamiltonian, _fix_spectral_phases
from .linalg import gram_schmidt_pivoted, random_unitary
from .symplectic import DEFAULT_TOL, bloch_messiah, validate_symplectic
from .tensor import TensorKernel, _mode_factor, flatten, gbm

ROUTE_AGREEMENT_TOL = 1e-8


def quadrature_matrix(k):
    """Real ``2N x 2N`` map of the kernel on ``(x, p)``."""
    c, s = np.asarray(k.C), np.asarray(k.S)
    return np.block([[(c + s).real, -(c - s).imag], [(c + s).imag, (c - s).real]])


def passive_quadrature_matrix(w):
    """Real form of a (possibly rectangular) passive map ``b = W a``."""
    w = np.asarray(w, dtype=complex)
    return np.block([[w.real, -w.imag], [w.imag, w.real]])


@dataclass(frozen=True)
class QuadratureCovariance:
    sigma: np.ndarray
    labels: tuple = field(default=None)

    @property
    def n_modes(self):
        return self.sigma.shape[0] // 2

    def min_variance(self):
        return float(np.linalg.eigvalsh(self.sigma)[0])

    def symplectic_eigenvalues(self):
        """Williamson spectrum, ascending, one value per mode."""
        n = self.n_modes
        omega = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        ev = np.abs(np.linalg.eigvals(1j * omega @ self.sigma))
        return np.sort(ev)[::2]


def covariance(k, tol=DEFAULT_TOL):
    """Covariance of the output state for vacuum input.

    Raises:
        NotSymplectic: if the kernel fails :func:`validate_symplectic`.
    """
    report = validate_symplectic(k, tol)
    if not report.valid:
        raise NotSymplectic(f"kernel fails symplectic constraints: {report.residuals}")
    r = quadrature_matrix(k)
    sigma = r @ r.T
    return QuadratureCovariance(0.5 * (sigma + sigma.T))


def to_db(variance):
    """Squeezing in dB below vacuum for a variance relative to vacuum."""
    return -10.0 * np.log10(variance)


def _restrict(sigma, idx):
    n = sigma.shape[0] // 2
    both = np.concatenate([idx, idx + n])
    return sigma[np.ix_(both, both)]


def _min_mode(sigma_bus, basis):
    """Minimum eigenpair of a reduced covariance, with the minimising
    quadrature written as a unit mode vector in the physical spectral basis.

    A quadrature ``a . x + b . p`` is the ``x`` quadrature of the mode with
    coefficients ``w = a + i b`` in ``basis``. The mode is returned with its
    largest entry real positive, so it fixes the spectral mode but not the
    quadrature angle.
    """
    evals, evecs = np.linalg.eigh(sigma_bus)
    n = sigma_bus.shape[0] // 2
    v = evecs[:, 0]
    mode = basis @ (v[:n] + 1j * v[n:])
    idx = int(np.argmax(np.abs(mode)))
    mode = mode * np.exp(-1j * np.angle(mode[idx]))
    return float(evals[0]), mode


@dataclass(frozen=True)
class LossySqueezing:
    min_variance: float
    mode: np.ndarray
    min_variance_bm: float
    min_variance_gbm: float
    mode_gbm: np.ndarray
    kept_modes: int
    method: str = "bm-gram-schmidt"

    @property
    def db(self):
        return float(to_db(self.min_variance))


def lossy_squeezing_bm(tk, bus, tol=DEFAULT_TOL):
    """Minimum bus-mode quadrature variance via Bloch-Messiah and Gram-Schmidt.

    The output state is a passive ``U`` applied to independent squeezers.
    Restricting each BM mode to the bus spatial mode gives the columns of
    ``U_bus``; a pivoted Gram-Schmidt turns those into an orthonormal bus
    spectral basis ``E``, and the bus operators in that basis are
    ``L = E^dagger U_bus`` applied to the squeezed modes, so the reduced
    covariance is ``L sigma_BM L^T`` in real form.

    Returns:
        ``(min_variance, mode, kept)`` with ``mode`` a unit spectral vector.
    """
    n_w, n_x = tk.n_spectral, tk.n_spatial
    bm = bloch_messiah(flatten(tk), tol)
    r = bm.squeezing
    sigma_bm = np.diag(np.concatenate([np.exp(2 * r), np.exp(-2 * r)]))
    rows = np.arange(n_w) * n_x + bus
    u_bus = bm.U[rows, :]
    gs = gram_schmidt_pivoted(u_bus.T, drop_tol=1e-10)
    if gs.basis.shape[0] == 0:
        raise DegenerateBasis("no BM mode has support on the bus")
    basis = gs.basis.T
    l_map = basis.conj().T @ u_bus
    lq = passive_quadrature_matrix(l_map)
    var, mode = _min_mode(lq @ sigma_bm @ lq.T, basis)
    return var, mode, basis.shape[1]


def lossy_squeezing_gbm(tk, bus, g=None, tol=DEFAULT_TOL):
    """Minimum bus-mode quadrature variance via the GBM core.

    The core kernel's covariance lives in the ``U_t (x) U_s`` output basis;
    undoing only the spatial factor ``1 (x) U_s`` puts the spatial index back
    in the physical basis, after which the bus block is read off directly.
    """
    if g is None:
        g = gbm(tk, tol)
    n_w, n_x = tk.n_spectral, tk.n_spatial
    core = flatten(g.core_kernel)
    r = quadrature_matrix(core)
    rot = passive_quadrature_matrix(np.kron(np.eye(n_w), g.U_s))
    sigma = rot @ r @ r.T @ rot.T
    rows = np.arange(n_w) * n_x + bus
    return _min_mode(_restrict(sigma, rows), g.U_t)


def lossy_squeezing(tk, bus, tol=DEFAULT_TOL, agreement_tol=ROUTE_AGREEMENT_TOL):
    """Best squeezing available on spatial mode ``bus`` after tracing out the rest.

    Both routes are evaluated and must agree.

    Raises:
        BadParameter: if ``bus`` is not a spatial index.
        RouteMismatch: if the two minima differ by more than ``agreement_tol``.
    """
    if not (isinstance(bus, (int, np.integer)) and 0 <= bus < tk.n_spatial):
        raise BadParameter(f"bus must be a spatial index in 0..{tk.n_spatial - 1}, got {bus}")
    v_bm, mode_bm, kept = lossy_squeezing_bm(tk, bus, tol)
    v_gbm, mode_gbm = lossy_squeezing_gbm(tk, bus, tol=tol)
    if abs(v_bm - v_gbm) > agreement_tol:
        raise RouteMismatch(f"BM route {v_bm!r} and GBM route {v_gbm!r} disagree")
    return LossySqueezing(v_bm, mode_bm, v_bm, v_gbm, mode_gbm, kept)


def dichroic(n_spectral, spatial_pair=(0, 1), n_spatial=2):
    """Dichroic mirror as a four-way unitary ``D[w, x, w', x']``.

    Identity on the signal (first) half of the spectrum, swap of the two
    spatial modes in ``spatial_pair`` on the idler half.

    Raises:
        OddSpectrum: if ``n_spectral`` is odd.
    """
    if n_spectral % 2:
        raise OddSpectrum(f"n_spectral must be even, got {n_spectral}")
    i, j = spatial_pair
    if i == j or not (0 <= i < n_spatial and 0 <= j < n_spatial):
        raise BadParameter(f"invalid spatial pair {spatial_pair} for {n_spatial} modes")
    half = n_spectral // 2
    plus = np.diag(np.r_[np.ones(half), np.zeros(half)])
    minus = np.eye(n_spectral) - plus
    swap = np.eye(n_spatial)
    swap[[i, j]] = swap[[j, i]]
    d = np.kron(plus, np.eye(n_spatial)) + np.kron(minus, swap)
    return d.reshape(n_spectral, n_spatial, n_spectral, n_spatial)


def embed_spatial(h, n_spatial=2, mode=0):
    """Place a single-spatial-mode Hamiltonian matrix on spatial mode ``mode``."""
    h = h.H if isinstance(h, SymmetricHamiltonian) else np.asarray(h)
    n = h.shape[0]
    out = np.zeros((n, n_spatial, n, n_spatial), dtype=complex)
    out[:, mode, :, mode] = h
    return TensorHamiltonian(out)


def dichroic_sandwich(obj, spatial_pair=(0, 1)):
    """Apply the dichroic mirror on both the output and the input side.

    Accepts a :class:`TensorKernel` (``C -> D C D^dagger``, ``S -> D S D^T``)
    or a :class:`TensorHamiltonian` (``H -> D H D^T``).
    """
    n_w, n_x = obj.H.shape[:2] if isinstance(obj, TensorHamiltonian) else obj.shape[:2]
    d = dichroic(n_w, spatial_pair, n_x).reshape(n_w * n_x, n_w * n_x)
    if isinstance(obj, TensorHamiltonian):
        h = obj.H.reshape(n_w * n_x, -1)
        return TensorHamiltonian((d @ h @ d.T).reshape(obj.H.shape))
    k = flatten(obj)
    c = d @ k.C @ d.conj().T
    s = d @ k.S @ d.T
    return TensorKernel(c.reshape(obj.shape), s.reshape(obj.shape))


def kronecker_residual(u, n_a, n_b):
    """Relative distance of ``u`` from the nearest ``A (x) B`` (``A`` is ``n_a``-square).

    Uses the rearrangement that maps Kronecker products to rank-one matrices.
    """
    u = np.asarray(u)
    r = u.reshape(n_a, n_b, n_a, n_b).transpose(0, 2, 1, 3).reshape(n_a * n_a, n_b * n_b)
    sv = np.linalg.svd(r, compute_uv=False)
    return float(np.sqrt(np.sum(sv[1:] ** 2)) / np.linalg.norm(sv))


@dataclass(frozen=True)
class TwoModeStructure:
    """How closely a GBM reduction matches the two-mode squeezing picture.

    ``s_leakage`` and ``c_leakage`` are relative norms of core elements that
    couple a spatial mode to itself (``S``) or to the other mode (``C``);
    ``spectral_mixing`` measures spectral factor columns straddling the
    signal/idler split, weighted by relative singular value; ``spatial_offdiag`` how far the spatial factor is from
    a phased permutation; ``kronecker_residual`` the separability of the
    output unitary.
    """

    s_leakage: float
    c_leakage: float
    spectral_mixing: float
    spatial_offdiag: float
    kronecker_residual: float

    def passed(self, tol=1e-9):
        return max(
            self.s_leakage, self.c_leakage, self.spectral_mixing, self.spatial_offdiag,
            self.kronecker_residual,
        ) < tol


def two_mode_structure(g):
    n_w, n_x = g.S_core.shape[:2]
    same = np.eye(n_x, dtype=bool)[None, :, None, :]
    s_norm = max(np.linalg.norm(g.S_core), np.finfo(float).tiny)
    s_leak = np.linalg.norm(np.where(same, g.S_core, 0)) / s_norm
    c_leak = np.linalg.norm(np.where(~same, g.C_core, 0)) / np.linalg.norm(g.C_core)
    half = n_w // 2
    w_sig = np.linalg.norm(g.U_t[:half], axis=0)
    w_idl = np.linalg.norm(g.U_t[half:], axis=0)
    # columns are weighted by their share of S, so noise-level modes whose
    # vectors are not determined do not count
    sv = g.singular_values[0]
    rel = sv / sv[0] if sv[0] > 0 else np.zeros_like(sv)
    mixing = float(np.max(np.minimum(w_sig, w_idl) * rel))
    mags = np.abs(g.U_s)
    spatial = float(np.max(np.sort(mags, axis=1)[:, :-1])) if n_x > 1 else 0.0
    kron = kronecker_residual(g.output_unitary, n_w, n_x)
    return TwoModeStructure(float(s_leak), float(c_leak), mixing, spatial, kron)


@dataclass(frozen=True)
class GHZReport:
    """Residuals of the trisected three-mode squeezing form.

    ``block_offdiag[i][j]`` is the norm of off-diagonal elements of the
    transformed block ``U_i H_ij U_j^T``; ``diagonal_symmetry`` and
    ``offdiagonal_symmetry`` are the largest spreads of the diagonal
    magnitudes across the diagonal and off-diagonal blocks; ``parasitic`` is
    the norm of every off-diagonal core element.
    """

    block_offdiag: np.ndarray
    diagonal_symmetry: float
    offdiagonal_symmetry: float
    parasitic: float
    diagonals: np.ndarray
    unitaries: tuple
    tol: float

    @property
    def symmetry_deviation(self):
        return max(self.diagonal_symmetry, self.offdiagonal_symmetry)

    @property
    def passed(self):
        return max(float(self.block_offdiag.max()), self.symmetry_deviation, self.parasitic) < self.tol


def _ghz_matrix(th):
    if isinstance(th, TensorHamiltonian):
        m = th.as_matrix().H
    elif isinstance(th, SymmetricHamiltonian):
        m = th.H
    else:
        m = SymmetricHamiltonian(th).H
    return np.asarray(m)


def ghz_check(th, tol=1e-10):
    """Reduce a trisected Hamiltonian with block-diagonal spectral factors.

    The spectrum (omega-major flattening) is cut into three contiguous equal
    blocks. ``U_i`` are the left singular vectors of block row ``i``, which
    is the spectral HOSVD factor constrained to act within one block, and
    phases are fixed so each row's dominant core entry is real positive.

    Raises:
        BadTrisection: if the dimension is not divisible by three.
    """
    h = _ghz_matrix(th)
    n = h.shape[0]
    if n == 0 or n % 3:
        raise BadTrisection(f"dimension {n} cannot be split into three equal blocks")
    m = n // 3
    blocks = [slice(i * m, (i + 1) * m) for i in range(3)]
    u = np.zeros((n, n), dtype=complex)
    for sl in blocks:
        u[sl, sl], _ = _mode_factor(h[sl, :])
    u = _fix_spectral_phases(h.reshape(n, 1, n, 1), u, np.eye(1))
    core = u.conj().T @ h @ u.conj()
    off = np.zeros((3, 3))
    diags = np.zeros((3, 3, m), dtype=complex)
    for i, si in enumerate(blocks):
        for j, sj in enumerate(blocks):
            blk = core[si, sj]
            diags[i, j] = np.diag(blk)
            off[i, j] = np.linalg.norm(blk - np.diag(diags[i, j]))
    mags = np.abs(diags)
    on = mags[np.arange(3), np.arange(3)]
    offd = mags[~np.eye(3, dtype=bool)]
    return GHZReport(
        off,
        float(np.max(on.max(axis=0) - on.min(axis=0))),
        float(np.max(offd.max(axis=0) - offd.min(axis=0))),
        float(np.sqrt(np.sum(off**2))),
        diags,
        tuple(u[sl, sl] for sl in blocks),
        tol,
    )


def ghz_hamiltonian(h_diag, h_offdiag, unitaries=None, rng=None):
    """Ideal trisected Hamiltonian with ``H_ij = V_i H^D_ij V_j^T``.

    ``h_diag`` and ``h_offdiag`` are the per-mode values shared by all
    diagonal and all off-diagonal blocks. ``unitaries`` defaults to three
    Haar-random ``V_i``.
    """
    hd = np.asarray(h_diag, dtype=float)
    ho = np.asarray(h_offdiag, dtype=float)
    if hd.shape != ho.shape or hd.ndim != 1:
        raise ShapeMismatch("h_diag and h_offdiag must be equal-length vectors")
    m = hd.size
    if unitaries is None:
        rng = np.random.default_rng(rng)
        unitaries = [random_unitary(m, rng) for _ in range(3)]
    core = np.kron(np.full((3, 3), 1.0) - np.eye(3), np.diag(ho)) + np.kron(np.eye(3), np.diag(hd))
    v = np.zeros((3 * m, 3 * m), dtype=complex)
    for i, vi in enumerate(unitaries):
        v[i * m:(i + 1) * m, i * m:(i + 1) * m] = vi
    return SymmetricHamiltonian(v @ core @ v.T)


def ghz_balance(hd_offdiag, variant="printed"):
    """Diagonal value that cancels local squeezing for a given off-diagonal value.

    ``variant='printed'`` evaluates
    ``h - ln[exp(6h) (2 + e^6) / (1 + 2 exp(6h))] / 4``;
    ``variant='corrected'`` replaces the constant ``e^6`` by ``exp(6h)``,
    which makes ``h = 0`` a fixed point. Neither is claimed as ground truth.
    """
    h = np.asarray(hd_offdiag, dtype=float)
    if variant == "printed":
        inner = 2.0 + np.exp(6.0)
    elif variant == "corrected":
        inner = 2.0 + np.exp(6.0 * h)
    else:
        raise BadParameter(f"variant must be 'printed' or 'corrected', got {variant!r}")
    out = h - 0.25 * np.log(np.exp(6.0 * h) * inner / (1.0 + 2.0 * np.exp(6.0 * h)))
    return float(out) if out.ndim == 0 else out


__all__ = [
    "GHZReport",
    "LossySqueezing",
    "QuadratureCovariance",
    "TwoModeStructure",
    "covariance",
    "dichroic",
    "dichroic_sandwich",
    "embed_spatial",
    "ghz_balance",
    "ghz_check",
    "ghz_hamiltonian",
    "kronecker_residual",
    "lossy_squeezing",
    "lossy_squeezing_bm",
    "lossy_squeezing_gbm",
    "passive_quadrature_matrix",
    "quadrature_matrix",
    "to_db",
    "two_mode_structure",
]

"""Spectral x spatial kernels, HOSVD and the GBM decomposition.

Four-way tensors are indexed ``(omega, x, omega', x')``. Flattening to a
matrix is omega-major: row ``omega * n_spatial + x``. This is plain C-order
reshaping and is used everywhere in the package and in the file format.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space, polar

from .errors import BadDimension, NonFinite, NotSymplectic, ShapeMismatch
from .linalg import (
    degenerate_groups,
    fix_column_phases,
    localize_subspace,
    symmetric_unitary_factor,
)
from .symplectic import DEFAULT_TOL, SymplecticKernel, validate_symplectic


def _frozen4(a, name):
    a = np.array(a, dtype=complex)
    if a.ndim != 4 or a.shape[:2] != a.shape[2:]:
        raise ShapeMismatch(f"{name} must have shape (n_w, n_x, n_w, n_x), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf entries")
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class TensorKernel:
    C: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        c, s = _frozen4(self.C, "C"), _frozen4(self.S, "S")
        if c.shape != s.shape:
            raise ShapeMismatch(f"C {c.shape} and S {s.shape} differ in shape")
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "S", s)

    @property
    def n_spectral(self):
        return self.C.shape[0]

    @property
    def n_spatial(self):
        return self.C.shape[1]

    @property
    def shape(self):
        return self.C.shape


def flatten(tk):
    n = tk.n_spectral * tk.n_spatial
    return SymplecticKernel(tk.C.reshape(n, n), tk.S.reshape(n, n))


def fold(k, n_spectral, n_spatial):
    if k.dim != n_spectral * n_spatial:
        raise ShapeMismatch(
            f"kernel dim {k.dim} does not factor as {n_spectral} x {n_spatial}"
        )
    shape = (n_spectral, n_spatial, n_spectral, n_spatial)
    return TensorKernel(k.C.reshape(shape), k.S.reshape(shape))


def kron_factor(u_spectral, u_spatial):
    """The flattened (omega-major) matrix of ``u_spectral (x) u_spatial``."""
    return np.kron(u_spectral, u_spatial)


def n_mode_flatten(t, index):
    """Mode-``index`` unfolding (1-based) of an N-way tensor.

    Row is ``i_index``; columns run over the remaining indices in cyclic
    order ``index+1, ..., N, 1, ..., index-1`` with the first of those most
    significant.
    """
    t = np.asarray(t)
    n = t.ndim
    if not 1 <= index <= n:
        raise ShapeMismatch(f"index must be in 1..{n}, got {index}")
    order = [(index - 1 + j) % n for j in range(n)]
    return np.transpose(t, order).reshape(t.shape[index - 1], -1)


def mode_multiply(t, mats):
    """``t x_1 mats[0] x_2 mats[1] ...``: contract each index with a matrix.

    ``out[a, b, ...] = sum mats[0][a, i] mats[1][b, j] ... t[i, j, ...]``.
    """
    out = np.asarray(t)
    for m in mats:
        # tensordot moves the contracted axis to the end; after N steps the
        # original order is restored
        out = np.tensordot(out, m, axes=([0], [1]))
    return out


@dataclass(frozen=True)
class HOSVDResult:
    factors: tuple
    core: np.ndarray
    singular_values: tuple

    def reconstruct(self):
        return mode_multiply(self.core, self.factors)

    def slice_norms(self, index):
        """Frobenius norms of the core slices along ``index`` (1-based)."""
        return np.linalg.norm(n_mode_flatten(self.core, index), axis=1)

    def orthogonality_residual(self):
        """Largest ``|<slice a1, slice a2>|`` over all indices and ``a1 != a2``."""
        worst = 0.0
        for k in range(1, self.core.ndim + 1):
            f = n_mode_flatten(self.core, k)
            gram = f @ f.conj().T
            np.fill_diagonal(gram, 0)
            if gram.size:
                worst = max(worst, float(np.abs(gram).max()))
        return worst


def _mode_factor(flat):
    """Left singular vectors of an unfolding under the package conventions."""
    w, s, _ = np.linalg.svd(flat, full_matrices=False)
    sv = np.zeros(flat.shape[0])
    sv[: s.size] = s
    if w.shape[1] < flat.shape[0]:
        # economy SVD keeps memory bounded; complete the basis of a tall unfolding
        w = np.hstack([w, null_space(w.conj().T)])
    for grp in degenerate_groups(sv):
        if grp.size > 1:
            w[:, grp] = localize_subspace(w[:, grp])
    return fix_column_phases(w), sv


def hosvd(t):
    """Higher-order SVD: factor ``k`` holds the left singular vectors of the
    mode-``k`` unfolding; the core is ``t`` contracted with every factor's
    conjugate transpose, so ``t = core x_1 U1 x_2 U2 ...``.

    Within a cluster of equal singular values the basis is chosen by
    :func:`localize_subspace`; otherwise ties keep the SVD's descending order.
    """
    t = np.asarray(t, dtype=complex)
    if not np.all(np.isfinite(t)):
        raise NonFinite("tensor contains NaN or Inf entries")
    factors, svals = [], []
    for k in range(1, t.ndim + 1):
        u, sv = _mode_factor(n_mode_flatten(t, k))
        factors.append(u)
        svals.append(sv)
    core = mode_multiply(t, [u.conj().T for u in factors])
    return HOSVDResult(tuple(factors), core, tuple(svals))


@dataclass(frozen=True)
class GBMDecomposition:
    """``S = (U_t (x) U_s) S_core (V_t (x) V_s)^T`` and
    ``C = (U_t (x) U_s) C_core (V_t (x) V_s)^dagger``.

    ``S_core`` is all-orthogonal; ``C_core`` in general is not.
    """

    U_t: np.ndarray
    U_s: np.ndarray
    V_t: np.ndarray
    V_s: np.ndarray
    S_core: np.ndarray
    C_core: np.ndarray
    singular_values: tuple

    @property
    def output_unitary(self):
        return kron_factor(self.U_t, self.U_s)

    @property
    def input_unitary(self):
        return kron_factor(self.V_t, self.V_s)

    @property
    def core_kernel(self):
        return TensorKernel(self.C_core, self.S_core)

    def spectral_slice_norms(self):
        return np.linalg.norm(n_mode_flatten(self.S_core, 1), axis=1)

    def reconstruct(self):
        u = (self.U_t, self.U_s)
        v = (self.V_t, self.V_s)
        s = mode_multiply(self.S_core, u + v)
        c = mode_multiply(self.C_core, u + tuple(x.conj() for x in v))
        return TensorKernel(c, s)


def gbm(tk, tol=DEFAULT_TOL):
    """Bloch-Messiah decomposition with Kronecker-structured (spectral x spatial) factors.

    HOSVD of ``S`` fixes all four factors; ``C`` is carried into the same
    basis (``C_core = U^dagger C V`` for the flattened Kronecker factors),
    which keeps the core pair a valid kernel.
    """
    report = validate_symplectic(flatten(tk), tol)
    if not report.valid:
        raise NotSymplectic(f"kernel fails symplectic constraints: {report.residuals}")
    h = hosvd(tk.S)
    u_t, u_s, v_t, v_s = h.factors
    c_core = mode_multiply(tk.C, [u_t.conj().T, u_s.conj().T, v_t.T, v_s.T])
    return GBMDecomposition(u_t, u_s, v_t, v_s, h.core, c_core, h.singular_values)


@dataclass(frozen=True)
class Truncation:
    kernel: TensorKernel
    captured_photon_number: float
    total_photon_number: float
    d_spectral: int


def captured_photons(s_flat, spectral_basis, n_spatial):
    """Photons found in the output modes ``spectral_basis (x) 1_spatial``.

    ``spectral_basis`` has orthonormal columns.
    """
    proj = np.kron(spectral_basis.conj().T, np.eye(n_spatial))
    return float(np.linalg.norm(proj @ s_flat) ** 2)


def _complete_kernel(s, pairing=None):
    """Valid kernel with squeezing block ``s``.

    With ``s = W diag(t) Y^dagger`` any ``C = W D diag(sqrt(1 + t^2)) D^T Y^*``
    works, where ``D`` is unitary within each cluster of equal ``t``; the
    choice sets the squeezing angles. ``pairing`` is a target for the
    anomalous correlations ``C S^T``; ``D D^T`` is taken as the nearest
    symmetric unitary to ``W^dagger pairing W^*`` on every cluster.
    """
    w, sv, yh = np.linalg.svd(s)
    w, yh = w.astype(complex), yh.astype(complex)
    if pairing is not None and sv.size and sv[0] > 0:
        z_full = w.conj().T @ pairing @ w.conj()
        for grp in degenerate_groups(sv):
            if sv[grp].max() <= 8 * sv.size * np.finfo(float).eps * sv[0]:
                continue
            z = z_full[np.ix_(grp, grp)]
            z = 0.5 * (z + z.T)
            if np.linalg.norm(z) == 0:
                continue
            left, _, right = np.linalg.svd(z)
            d = symmetric_unitary_factor(left @ right)
            w[:, grp] = w[:, grp] @ d
            yh[grp] = d.conj().T @ yh[grp]
    return SymplecticKernel((w * np.sqrt(1.0 + sv**2)) @ yh.conj(), s)


def truncate(g, d_spectral):
    """Keep the ``d_spectral`` leading output spectral modes of a GBM reduction.

    The captured photon number is the squared norm of the kept spectral
    slices of ``S_core`` (row slices, summed over every input mode). The
    returned kernel has ``S`` projected onto the kept output modes and
    expressed in the original basis; the discarded modes carry no photons.
    ``C`` is the Bloch-Messiah completion of that ``S`` whose squeezing
    angles follow the original anomalous correlations on the kept modes, so
    the result is a valid kernel with photon number equal to the captured
    value, and ``d_spectral = n_spectral`` reproduces the original output
    state.
    """
    n_w, n_x = g.S_core.shape[:2]
    if not (isinstance(d_spectral, (int, np.integer)) and 0 <= d_spectral <= n_w):
        raise BadDimension(f"d_spectral must be an integer in 0..{n_w}, got {d_spectral}")
    norms = np.linalg.norm(n_mode_flatten(g.S_core, 1), axis=1)
    captured = float(np.sum(norms[:d_spectral] ** 2))
    total = float(np.sum(norms**2))
    full = g.reconstruct()
    n = n_w * n_x
    c, s = full.C.reshape(n, n), full.S.reshape(n, n)
    kept = g.U_t[:, :d_spectral]
    proj = np.kron(kept @ kept.conj().T, np.eye(n_x))
    s_kept = proj @ s
    k = _complete_kernel(s_kept, pairing=proj @ c @ s.T @ proj.T)
    return Truncation(fold(k, n_w, n_x), captured, total, int(d_spectral))


def polar_split(k, tol=DEFAULT_TOL):
    """Polar decomposition ``M = M' V`` into a Hermitian positive active part
    and a passive unitary.

    Returns ``(active, passive_unitary)`` with ``active`` a kernel whose ``C``
    is Hermitian and ``S`` symmetric; ``compose(active, passive(V)) == k``.
    """
    report = validate_symplectic(k, tol)
    if not report.valid:
        raise NotSymplectic(f"kernel fails symplectic constraints: {report.residuals}")
    n = k.dim
    w, p = polar(k.matrix, side="left")
    c = 0.5 * (p[:n, :n] + p[:n, :n].conj().T)
    s = 0.5 * (p[:n, n:] + p[:n, n:].T)
    return SymplecticKernel(c, s), w[:n, :n]
